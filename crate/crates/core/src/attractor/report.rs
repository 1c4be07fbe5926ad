use std::collections::BTreeMap;
use std::fmt;

use super::AttractorError;
use crate::rigor::round::{add_down, add_up, div_down, div_up, mul_down, mul_up};

/// Certified windows `eta_lo <= eta_n <= eta_hi` and `zeta_lo <= zeta_n <= zeta_hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub d: f64,
    pub n: usize,
    pub eta_lo: f64,
    pub eta_hi: f64,
    pub zeta_lo: f64,
    pub zeta_hi: f64,
    pub parameters: BTreeMap<String, String>,
}

impl BoundReport {
    /// The trivial report `[0, 1]` for both quantities.
    pub fn new(d: f64, n: usize) -> Self {
        BoundReport { d, n, eta_lo: 0.0, eta_hi: 1.0, zeta_lo: 0.0, zeta_hi: 1.0, parameters: BTreeMap::new() }
    }

    /// Intersection of two reports on the same level.
    pub fn merge(&self, other: &BoundReport) -> BoundReport {
        let mut parameters = self.parameters.clone();
        for (k, v) in &other.parameters {
            parameters.entry(k.clone()).or_insert_with(|| v.clone());
        }
        BoundReport {
            d: self.d,
            n: self.n,
            eta_lo: self.eta_lo.max(other.eta_lo),
            eta_hi: self.eta_hi.min(other.eta_hi),
            zeta_lo: self.zeta_lo.max(other.zeta_lo),
            zeta_hi: self.zeta_hi.min(other.zeta_hi),
            parameters,
        }
    }

    /// `0 <= lo <= hi <= 1` for both windows.
    pub fn is_consistent(&self) -> bool {
        let ok = |lo: f64, hi: f64| (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo <= hi;
        ok(self.eta_lo, self.eta_hi) && ok(self.zeta_lo, self.zeta_hi)
    }

    pub fn eta(&self) -> Window {
        Window { lo: self.eta_lo, hi: self.eta_hi }
    }

    pub fn zeta(&self) -> Window {
        Window { lo: self.zeta_lo, hi: self.zeta_hi }
    }

    /// Plain `key = value` lines; floats use the shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "d = {:?}\nn = {}\neta_lo = {:?}\neta_hi = {:?}\nzeta_lo = {:?}\nzeta_hi = {:?}\n",
            self.d, self.n, self.eta_lo, self.eta_hi, self.zeta_lo, self.zeta_hi
        );
        for (k, v) in &self.parameters {
            s.push_str(&format!("param.{k} = {v}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, AttractorError> {
        let bad = |m: String| AttractorError::Format(m);
        let mut map = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("no '=' in {line:?}")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| map.get(k).ok_or_else(|| bad(format!("missing key {k}")));
        let num = |k: &str| -> Result<f64, AttractorError> { get(k)?.parse().map_err(|_| bad(format!("bad value for {k}"))) };
        let parameters = map
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("param.").map(|p| (p.to_string(), v.clone())))
            .collect();
        Ok(BoundReport {
            d: num("d")?,
            n: get("n")?.parse().map_err(|_| bad("bad value for n".into()))?,
            eta_lo: num("eta_lo")?,
            eta_hi: num("eta_hi")?,
            zeta_lo: num("zeta_lo")?,
            zeta_hi: num("zeta_hi")?,
            parameters,
        })
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A certified window `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn point(x: f64) -> Window {
        Window { lo: x, hi: x }
    }

    pub fn meets(&self, o: &Window) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrichotomyVerdict {
    /// `eta_n / zeta_n < 1/C`: no wild attractor.
    NoWildAttractorCase1,
    /// Neither strict inequality certified.
    IndeterminateCase2Band,
    /// `eta_n / zeta_n > C`: wild attractor.
    WildAttractorCase3,
}

impl fmt::Display for TrichotomyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrichotomyVerdict::NoWildAttractorCase1 => "NoWildAttractor_Case1",
            TrichotomyVerdict::IndeterminateCase2Band => "Indeterminate_Case2Band",
            TrichotomyVerdict::WildAttractorCase3 => "WildAttractor_Case3",
        })
    }
}

/// Case 1 needs `C eta_hi < zeta_lo`, Case 3 needs `eta_lo > C zeta_hi`,
/// both with outward rounding.
pub fn trichotomy(report: &BoundReport, c: f64) -> TrichotomyVerdict {
    if report.zeta_lo > 0.0 && mul_up(c, report.eta_hi) < report.zeta_lo {
        TrichotomyVerdict::NoWildAttractorCase1
    } else if report.eta_lo > mul_up(c, report.zeta_hi) {
        TrichotomyVerdict::WildAttractorCase3
    } else {
        TrichotomyVerdict::IndeterminateCase2Band
    }
}

/// Window for `eta_{n+m}` implied by the recursive inequality
/// `eta_n eta_{m+1} / (eta_{m+1} + C zeta_{n,m}) <= eta_{n+m} <= eta_n eta_{m+1} / (eta_{m+1} + zeta_{n,m} / C)`.
pub fn recursive_window(eta_n: Window, eta_m1: Window, zeta_nm: Window, c: f64) -> Window {
    let lo_den = add_up(eta_m1.lo, mul_up(c, zeta_nm.hi));
    let lo = if lo_den > 0.0 { div_down(mul_down(eta_n.lo, eta_m1.lo), lo_den) } else { 0.0 };
    let hi_den = add_down(eta_m1.hi, div_down(zeta_nm.lo, c));
    let hi = if hi_den > 0.0 { div_up(mul_up(eta_n.hi, eta_m1.hi), hi_den) } else { 1.0 };
    Window { lo, hi: hi.min(1.0) }
}

/// Outcome of the recursive-inequality audit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecursiveCheck {
    pub predicted: Window,
    pub measured: Window,
    pub holds: bool,
}

/// The certified `eta_{n+m}` window must meet the window predicted from
/// `eta_n`, `eta_{m+1}` and `zeta_{n,m}`.
pub fn recursive_inequality_check(eta_n: Window, eta_m1: Window, eta_nm: Window, zeta_nm: Window, c: f64) -> RecursiveCheck {
    let predicted = recursive_window(eta_n, eta_m1, zeta_nm, c);
    RecursiveCheck { predicted, measured: eta_nm, holds: predicted.meets(&eta_nm) }
}

use std::fs;
use std::path::{Path, PathBuf};

use super::AttractorError;
use crate::rigor::{format_hex, parse_hex, IInterval};

/// Which stage of the `zeta` upper-bound pipeline a pair of endpoint files holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointStage {
    /// Preimage components of `T_n`.
    Preimages,
    /// Their reduced union.
    Reduced,
    /// Pull-backs under the first-return map.
    Returns,
}

impl EndpointStage {
    fn prefixes(self) -> (&'static str, &'static str) {
        match self {
            EndpointStage::Preimages => ("leftpoints", "rightpoints"),
            EndpointStage::Reduced => ("lleftpoints", "rrightpoints"),
            EndpointStage::Returns => ("renorm_leftpoints", "renorm_rightpoints"),
        }
    }
}

/// `<prefix>_zeta_<d>_<n>_<i>` for the left and right endpoint files.
pub fn endpoint_paths(dir: &Path, stage: EndpointStage, d: f64, n: usize, i: usize) -> (PathBuf, PathBuf) {
    let (l, r) = stage.prefixes();
    (dir.join(format!("{l}_zeta_{d}_{n}_{i}")), dir.join(format!("{r}_zeta_{d}_{n}_{i}")))
}

pub fn write_endpoints(dir: &Path, stage: EndpointStage, d: f64, n: usize, i: usize, segs: &[IInterval]) -> Result<(), AttractorError> {
    fs::create_dir_all(dir)?;
    let (lp, rp) = endpoint_paths(dir, stage, d, n, i);
    let mut left = String::with_capacity(24 * segs.len());
    let mut right = String::with_capacity(24 * segs.len());
    for s in segs {
        left.push_str(&format_hex(s.lo()));
        left.push('\n');
        right.push_str(&format_hex(s.hi()));
        right.push('\n');
    }
    fs::write(lp, left)?;
    fs::write(rp, right)?;
    Ok(())
}

fn read_column(path: &Path) -> Result<Vec<f64>, AttractorError> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| parse_hex(l).map_err(|e| AttractorError::Format(format!("{}: {e}", path.display()))))
        .collect()
}

pub fn read_endpoints(dir: &Path, stage: EndpointStage, d: f64, n: usize, i: usize) -> Result<Vec<IInterval>, AttractorError> {
    let (lp, rp) = endpoint_paths(dir, stage, d, n, i);
    let left = read_column(&lp)?;
    let right = read_column(&rp)?;
    if left.len() != right.len() {
        return Err(AttractorError::Format(format!("{} and {} differ in length", lp.display(), rp.display())));
    }
    left.into_iter()
        .zip(right)
        .map(|(a, b)| IInterval::new(a, b).map_err(|e| AttractorError::Format(e.to_string())))
        .collect()
}

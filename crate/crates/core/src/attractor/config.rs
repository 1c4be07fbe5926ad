use std::collections::BTreeMap;
use std::ops::Range;

/// Which map the interval orbits iterate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MapChoice {
    /// The center of the certified ball, with exact coefficients.
    #[default]
    Center,
    /// The whole certified ball; images enclose every map in it.
    Enclosure,
}

impl MapChoice {
    pub fn name(&self) -> &'static str {
        match self {
            MapChoice::Center => "center",
            MapChoice::Enclosure => "enclosure",
        }
    }
}

/// Partition sizes, iteration budgets and refinement caps of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    /// Number of equal pieces `M` of `T_1`.
    pub pieces: usize,
    /// Iteration budget `N` for the `eta` estimates.
    pub eta_budget: usize,
    /// First-return budget `Z` of the `zeta` lower bound.
    pub return_budget: usize,
    /// Full-map budget `X` of the `zeta` lower bound.
    pub escape_budget: usize,
    /// Bisection cap for ambiguous `eta` pieces.
    pub refine_eta: u32,
    /// Bisection caps for ambiguity in the first and second `zeta` stage.
    pub refine_return: u32,
    pub refine_escape: u32,
    /// Depth `N_pre` of the preimage tree of `T_n`.
    pub preimage_depth: usize,
    /// Depth `K_ret` of the pull-back under the first-return map.
    pub return_depth: usize,
    /// Polynomial degree used when evaluating the map.
    pub eval_degree: usize,
    pub map: MapChoice,
}

/// Number of bisections allowed by a refinement size cutoff `f`: `ceil(log2(1/f))`.
pub fn refine_depth(cutoff: f64) -> u32 {
    if !(cutoff > 0.0) || cutoff >= 1.0 {
        return 0;
    }
    (1.0 / cutoff).log2().ceil() as u32
}

impl RunConfig {
    pub const DESK: RunConfig = RunConfig {
        pieces: 200_000,
        eta_budget: 5000,
        return_budget: 5000,
        escape_budget: 5000,
        refine_eta: 2,
        refine_return: 0,
        refine_escape: 0,
        preimage_depth: 10,
        return_depth: 7,
        eval_degree: 24,
        map: MapChoice::Center,
    };

    pub const OVERNIGHT: RunConfig = RunConfig {
        eta_budget: 20_000,
        return_budget: 20_000,
        escape_budget: 20_000,
        preimage_depth: 14,
        return_depth: 9,
        ..RunConfig::DESK
    };

    pub const PROOF: RunConfig = RunConfig {
        pieces: 2_000_000,
        eta_budget: 50_000,
        return_budget: 50_000,
        escape_budget: 50_000,
        refine_eta: 6,
        refine_return: 4,
        refine_escape: 4,
        preimage_depth: 18,
        return_depth: 11,
        eval_degree: 40,
        map: MapChoice::Center,
    };

    /// Same run with the three iteration budgets doubled.
    pub fn doubled_budgets(&self) -> RunConfig {
        RunConfig {
            eta_budget: 2 * self.eta_budget,
            return_budget: 2 * self.return_budget,
            escape_budget: 2 * self.escape_budget,
            ..*self
        }
    }

    pub fn to_params(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("pieces", self.pieces.to_string());
        put("eta_budget", self.eta_budget.to_string());
        put("return_budget", self.return_budget.to_string());
        put("escape_budget", self.escape_budget.to_string());
        put("refine_eta", self.refine_eta.to_string());
        put("refine_return", self.refine_return.to_string());
        put("refine_escape", self.refine_escape.to_string());
        put("preimage_depth", self.preimage_depth.to_string());
        put("return_depth", self.return_depth.to_string());
        put("eval_degree", self.eval_degree.to_string());
        put("map", self.map.name().to_string());
        m
    }
}

/// Shard `index` of `count`: `floor(total / count)` consecutive work units,
/// the remainder going to the last shard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JobShard {
    pub index: usize,
    pub count: usize,
}

impl JobShard {
    pub const WHOLE: JobShard = JobShard { index: 0, count: 1 };

    pub fn new(index: usize, count: usize) -> Option<JobShard> {
        (count > 0 && index < count).then_some(JobShard { index, count })
    }

    pub fn range(&self, total: usize) -> Range<usize> {
        let q = total / self.count;
        let end = if self.index + 1 == self.count { total } else { (self.index + 1) * q };
        self.index * q..end
    }
}

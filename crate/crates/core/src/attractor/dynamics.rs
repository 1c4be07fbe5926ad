use super::{AttractorError, MapChoice, RunConfig};
use crate::renorm::{Branch, ClassAMap, CycleMember, RenormElement, RenormError};
use crate::rigor::IInterval;

/// How an interval orbit stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// The last image is certainly outside `T ∪ J`.
    Escaped,
    /// The last point straddles the boundary of `T ∪ J` or grew wider than `|T|`.
    Ambiguous,
    /// All requested steps were taken inside `T ∪ J`.
    Exhausted,
}

/// Interval orbit `x, F(x), F²(x), …` with the branch used at each step.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub points: Vec<IInterval>,
    pub branches: Vec<Branch>,
    pub status: Status,
}

impl Orbit {
    pub fn last(&self) -> IInterval {
        *self.points.last().expect("orbit starts with its initial point")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Place {
    Inside(Branch),
    Outside,
    Straddle,
}

pub(crate) fn place(map: &ClassAMap, x: IInterval) -> Place {
    match map.branch(x) {
        Some(b) => Place::Inside(b),
        None if map.certainly_outside(x) => Place::Outside,
        None => Place::Straddle,
    }
}

/// One step from a point already known to lie in `branch`; `None` when the
/// image is unusable (evaluation failure or wider than `|T|`).
pub(crate) fn advance(map: &ClassAMap, x: IInterval) -> Option<IInterval> {
    let y = map.image(x).ok().flatten()?;
    (y.width() <= 2.0 * map.t().hi()).then_some(y)
}

/// Iterates `map` on `x` for at most `steps` steps.
pub fn iterate_map(map: &ClassAMap, x: IInterval, steps: usize) -> Orbit {
    let mut orbit = Orbit { points: vec![x], branches: Vec::new(), status: Status::Exhausted };
    for _ in 0..steps {
        let cur = orbit.last();
        let b = match place(map, cur) {
            Place::Inside(b) => b,
            Place::Outside => {
                orbit.status = Status::Escaped;
                return orbit;
            }
            Place::Straddle => {
                orbit.status = Status::Ambiguous;
                return orbit;
            }
        };
        let Some(y) = advance(map, cur) else {
            orbit.status = Status::Ambiguous;
            return orbit;
        };
        orbit.points.push(y);
        orbit.branches.push(b);
    }
    if steps > 0 {
        orbit.status = match place(map, orbit.last()) {
            Place::Inside(_) => Status::Exhausted,
            Place::Outside => Status::Escaped,
            Place::Straddle => Status::Ambiguous,
        };
    }
    orbit
}

/// The fixed-point map together with its cycle partner and the level
/// geometry `T_n = t^{n-1} T_1`, `J_n = c_{n-1} J_1`.
#[derive(Clone, Debug)]
pub struct CycleDynamics {
    f: ClassAMap,
    g: ClassAMap,
}

impl CycleDynamics {
    /// Wraps the fixed point `elem` (as `F`), evaluating `psi`, `phi` at
    /// degree `eval_degree`.
    pub fn new(elem: &RenormElement, eval_degree: usize) -> Result<Self, RenormError> {
        let f = ClassAMap::new(elem, CycleMember::F)?.truncated(eval_degree);
        let g = f.with_member(CycleMember::G);
        Ok(CycleDynamics { f, g })
    }

    /// Dynamics of the map selected by `cfg.map`.
    pub fn for_run(elem: &RenormElement, cfg: &RunConfig) -> Result<Self, RenormError> {
        match cfg.map {
            MapChoice::Center => Self::new(&elem.midpoint(), cfg.eval_degree),
            MapChoice::Enclosure => Self::new(elem, cfg.eval_degree),
        }
    }

    pub fn d(&self) -> f64 {
        self.f.elem.d
    }

    pub fn t(&self) -> IInterval {
        self.f.t()
    }

    pub fn map(&self, member: CycleMember) -> &ClassAMap {
        match member {
            CycleMember::F => &self.f,
            CycleMember::G => &self.g,
        }
    }

    /// `F` itself.
    pub fn base(&self) -> &ClassAMap {
        &self.f
    }

    /// Rescaling `c_k` with `F_k(y) = c_k B_k(y / c_k)`: `|c_k| = t^k`,
    /// positive for `k ≡ 0, 1 (mod 4)`.
    pub fn scale(&self, k: usize) -> IInterval {
        let p = self.t().powi(k as u32);
        if k % 4 < 2 {
            p
        } else {
            -p
        }
    }

    /// `B_k`, the member of the cycle that `F_k` is conjugate to.
    pub fn member(&self, k: usize) -> &ClassAMap {
        self.map(CycleMember::of_level(k))
    }

    /// Half-width of `T_n`; `T_0 = [-1, 1]`.
    pub fn t_half(&self, n: usize) -> IInterval {
        self.t().powi(n as u32)
    }

    /// Points certainly in `T_n`.
    pub fn t_inner(&self, n: usize) -> IInterval {
        let h = self.t_half(n).lo();
        IInterval::raw(-h, h)
    }

    /// Hull of every admissible `T_n`.
    pub fn t_outer(&self, n: usize) -> IInterval {
        let h = self.t_half(n).hi();
        IInterval::raw(-h, h)
    }

    /// Hull of every admissible `J_n`, `n >= 1`.
    pub fn j_outer(&self, n: usize) -> IInterval {
        let c = self.scale(n - 1);
        (c * self.f.elem.i).hull(&(c * self.f.elem.j))
    }
}

/// Orbit of `x ⊆ T_n ∪ J_n` under the first-return map `F_{n-1}`, computed
/// through the conjugacy `F_{n-1} = c B_{n-1}(· / c)`.
pub fn first_return_iterate(dy: &CycleDynamics, n: usize, x: IInterval, steps: usize) -> Result<Orbit, AttractorError> {
    if n == 0 {
        return Err(AttractorError::BadLevel { n, min: 1 });
    }
    let c = dy.scale(n - 1);
    let b = dy.member(n - 1);
    let y = if n == 1 { x } else { x / c };
    if b.branch(y).is_none() {
        return Err(AttractorError::BranchAmbiguous(x));
    }
    let mut orbit = iterate_map(b, y, steps);
    if n > 1 {
        for p in orbit.points.iter_mut().skip(1) {
            *p = c * *p;
        }
        orbit.points[0] = x;
    }
    Ok(orbit)
}

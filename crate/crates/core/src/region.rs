//! Half-space representation shared by polytopes, cones and face tangent cones.

use crate::linalg::{dot, norm};

/// Closed half-space `{x : normal . x <= offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    /// Builds a half-space from an arbitrary (nonzero) normal, normalizing it.
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        let n = norm(&normal);
        HalfSpace {
            normal: normal.iter().map(|x| x / n).collect(),
            offset: offset / n,
        }
    }

    /// Signed distance to the bounding hyperplane, positive inside.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }

    /// The same half-space for the dilate `t * body` (t >= 0).
    pub fn dilated(&self, t: f64) -> Self {
        HalfSpace {
            normal: self.normal.clone(),
            offset: self.offset * t,
        }
    }
}

/// Anything with a point-membership test. Boundaries have measure zero for
/// every sampler in the crate, so implementations may treat them either way.
pub trait Membership: Sync {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
}

/// Intersection of finitely many half-spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub dim: usize,
    pub halfspaces: Vec<HalfSpace>,
}

impl Region {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Self {
        Region { dim, halfspaces }
    }

    /// The whole space (no constraints).
    pub fn everything(dim: usize) -> Self {
        Region {
            dim,
            halfspaces: Vec::new(),
        }
    }

    /// Smallest slack over all constraints; negative means outside.
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.slack(x))
            .fold(f64::INFINITY, f64::min)
    }
}

impl Membership for Region {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.halfspaces.iter().all(|h| h.slack(x) >= 0.0)
    }
}

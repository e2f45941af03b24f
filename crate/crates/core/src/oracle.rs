//! Brute-force ground truth: enumerate the lattice points of `tP` and weight
//! each by its solid angle, classified by which facets pass through it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, dot};
use crate::polytope::{lattice_points, Polytope, BOUNDARY_TOL};
use crate::region::{HalfSpace, Region};
use crate::solid_angle::{
    solid_angle_exact_2d, solid_angle_exact_2d_l1, solid_angle_mc, Method, SolidAngleEstimate,
};
use crate::transforms::{pair, ComplexPoint};

pub const DEFAULT_ORACLE_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    /// Exact planar angles only (d = 2, p in {1, 2}).
    Exact2D,
    /// Monte Carlo for every point that is not interior or on a single facet.
    MC,
    /// Exact wherever a closed form exists, Monte Carlo elsewhere.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub std_error: f64,
    pub n_lattice_points: usize,
    pub per_point_weights: Option<Vec<(Vec<i64>, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaResult {
    #[serde(with = "crate::report::complex_serde")]
    pub value: Complex64,
    pub std_error: f64,
    pub n_lattice_points: usize,
}

fn exact(value: f64) -> SolidAngleEstimate {
    SolidAngleEstimate {
        value,
        std_error: 0.0,
        method: Method::Exact2D,
    }
}

fn check_method(p: &Polytope, power: f64, method: OracleMethod) -> Result<()> {
    if method == OracleMethod::Exact2D && (p.dim() != 2 || !(power == 1.0 || power == 2.0)) {
        return Err(Error::UnsupportedCombination(format!(
            "exact angles need d = 2 and p in {{1, 2}}, got d = {} and p = {power}",
            p.dim()
        )));
    }
    if !(power >= 1.0) || !power.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be a finite real >= 1, got {power}")));
    }
    Ok(())
}

/// Solid angle of `tP` at the lattice point `m` (which must lie in `tP`).
pub fn point_weight(
    p: &Polytope,
    t: f64,
    m: &[i64],
    power: f64,
    method: OracleMethod,
    n_samples: usize,
    seed: u64,
) -> Result<SolidAngleEstimate> {
    check_method(p, power, method)?;
    if t == 0.0 {
        // The dilate is a single point: no ball mass at all.
        return Ok(exact(0.0));
    }
    let x: Vec<f64> = m.iter().map(|&k| k as f64).collect();
    let region = p.dilated_region(t);
    if region.min_slack(&x) < -BOUNDARY_TOL {
        return Ok(exact(0.0));
    }
    let active: Vec<&HalfSpace> = region
        .halfspaces
        .iter()
        .filter(|h| h.slack(&x).abs() <= BOUNDARY_TOL)
        .collect();
    match active.len() {
        0 => return Ok(exact(1.0)),
        1 => return Ok(exact(0.5)),
        _ => {}
    }
    let d = p.dim();
    if d == 2 && method != OracleMethod::MC && (power == 1.0 || power == 2.0) {
        let generators = vertex_generators(p, t, &x)?;
        return if power == 2.0 {
            solid_angle_exact_2d(&generators)
        } else {
            solid_angle_exact_2d_l1(&generators)
        };
    }
    if d == 3 && active.len() == 2 && power == 2.0 && method != OracleMethod::MC {
        // Edge point: interior dihedral angle over 2 pi.
        let cos = dot(&active[0].normal, &active[1].normal).clamp(-1.0, 1.0);
        return Ok(exact((PI - cos.acos()) / (2.0 * PI)));
    }
    // Local tangent cone at x, sampled at unit radius.
    let local = Region::new(
        d,
        active
            .iter()
            .map(|h| HalfSpace {
                normal: h.normal.clone(),
                offset: dot(&h.normal, &x),
            })
            .collect(),
    );
    solid_angle_mc(&local, &x, power, 1.0, n_samples, seed)
}

/// Edge directions of `tP` at the vertex sitting on `x` (2-D).
fn vertex_generators(p: &Polytope, t: f64, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let (idx, _) = p
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (i, linalg::distance(&linalg::scale(v, t), x)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("polytope has vertices");
    let v = &p.vertices()[idx];
    Ok(p.neighbors(idx)
        .into_iter()
        .map(|u| linalg::scale(&linalg::sub(&p.vertices()[u], v), t))
        .collect())
}

fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

fn weights(
    p: &Polytope,
    t: f64,
    power: f64,
    method: OracleMethod,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<(Vec<i64>, SolidAngleEstimate)>> {
    check_method(p, power, method)?;
    let points = lattice_points(p, t);
    points
        .into_par_iter()
        .enumerate()
        .map(|(i, m)| {
            let w = point_weight(p, t, &m, power, method, n_samples, point_seed(seed, i))?;
            Ok((m, w))
        })
        .collect()
}

/// `A_P(t) = sum_{m in tP} omega_{tP}(m)`.
pub fn a_t_oracle(
    p: &Polytope,
    t: f64,
    power: f64,
    method: OracleMethod,
    n_samples: usize,
    seed: u64,
) -> Result<OracleResult> {
    let w = weights(p, t, power, method, n_samples, seed)?;
    let value = w.iter().map(|(_, e)| e.value).sum();
    let var: f64 = w.iter().map(|(_, e)| e.std_error * e.std_error).sum();
    Ok(OracleResult {
        value,
        std_error: var.sqrt(),
        n_lattice_points: w.len(),
        per_point_weights: Some(w.into_iter().map(|(m, e)| (m, e.value)).collect()),
    })
}

/// `alpha_{tP}(s) = sum_{m in tP} omega_{tP}(m) e^{2 pi i <s, m>}`.
pub fn alpha_oracle(
    p: &Polytope,
    t: f64,
    s: &ComplexPoint,
    power: f64,
    method: OracleMethod,
    n_samples: usize,
    seed: u64,
) -> Result<AlphaResult> {
    if s.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: p.dim(),
            got: s.dim(),
        });
    }
    let w = weights(p, t, power, method, n_samples, seed)?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut var = 0.0;
    for (m, e) in &w {
        let x: Vec<f64> = m.iter().map(|&k| k as f64).collect();
        let phase = (Complex64::new(0.0, 2.0 * PI) * pair(&x, &s.0)).exp();
        value += phase * e.value;
        var += (e.std_error * phase.norm()).powi(2);
    }
    Ok(AlphaResult {
        value,
        std_error: var.sqrt(),
        n_lattice_points: w.len(),
    })
}

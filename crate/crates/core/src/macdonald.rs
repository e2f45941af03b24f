//! The solid-angle sum `A_P(t, s)` from vertex tangent cones, its `s -> 0`
//! limit `A_P(t)`, and checks of the reciprocity, Brion, Brianchon-Gram and
//! vanishing-at-zero identities.
//!
//! `A_P(t, s) = lim_eps sum_v sum_m 1^_{t v + K_v}(m + s) phi^_eps(m + s)`,
//! where each vertex cone is split into simple cones with primitive
//! generators. The limit `s -> 0` is taken along a certified generic
//! direction `s = sigma x` by a polynomial fit in `sigma`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cone::SimpleCone;
use crate::error::{Error, Result};
use crate::extrapolate::{richardson_with_noise, validate_schedule};
use crate::lattice_sum::{cone_gap, damped_transform_sum, ConeSumTerm, DampedSum};
use crate::linalg::{self, dot};
use crate::oracle::{a_t_oracle, alpha_oracle, OracleMethod, DEFAULT_ORACLE_SAMPLES};
use crate::polytope::{self, faces, lattice_gap, vertex_simple_cones, Polytope};
use crate::region::Membership;
use crate::report::{complex_json, Report};
use crate::transforms::{ComplexPoint, DampedSumConfig};

/// Minimum pole distance a certified direction keeps over the lattice box.
pub const DIRECTION_POLE_THRESHOLD: f64 = 1e-8;

/// Default tolerance of the identity checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

/// Tolerance for `A_P(0) = 0`.
pub const ZERO_TOLERANCE: f64 = 1e-3;

/// Relative roundoff assumed for every term of a damped sum.
const ROUNDOFF: f64 = 1e-14;

const RANDOM_DIRECTION_TRIES: usize = 100;

/// `A_P(t, s)` with its vertex decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct MacdonaldEvaluation {
    pub t: f64,
    pub s: ComplexPoint,
    pub value: Complex64,
    pub error: f64,
    /// (vertex, extrapolated partial sum over its simple cones).
    pub per_vertex_breakdown: Vec<(Vec<f64>, Complex64)>,
    pub eps_schedule: Vec<f64>,
}

impl MacdonaldEvaluation {
    pub fn to_json(&self) -> Value {
        json!({
            "t": self.t,
            "s": self.s.0.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
            "value": complex_json(self.value),
            "error": self.error,
            "per_vertex": self
                .per_vertex_breakdown
                .iter()
                .map(|(v, z)| json!({"vertex": v, "value": complex_json(*z)}))
                .collect::<Vec<_>>(),
            "eps_schedule": self.eps_schedule,
        })
    }
}

/// Which limit is taken first when both `eps` and `sigma` go to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitOrder {
    /// Extrapolate in eps at each sigma, then fit in sigma.
    #[default]
    EpsThenSigma,
    /// Fit in sigma at each eps, then extrapolate in eps.
    SigmaThenEps,
}

/// How `s -> 0` is approached. Unset fields are chosen per problem.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LimitConfig {
    pub direction: Option<Vec<f64>>,
    /// Strictly decreasing, positive.
    pub sigma_schedule: Option<Vec<f64>>,
    /// Number of nonconstant terms in each fit; default `d + 1`.
    pub fit_degree: Option<usize>,
    pub order: LimitOrder,
    /// Seed for the fallback random directions.
    pub seed: u64,
}

impl LimitConfig {
    pub fn with_direction(mut self, x: Vec<f64>) -> Self {
        self.direction = Some(x);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// `A_P(t)` as the intercept of a fit in sigma.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub t: f64,
    pub value: f64,
    pub error: f64,
    /// Imaginary part of the intercept (zero in exact arithmetic).
    pub imag: f64,
    pub direction: Vec<f64>,
    pub sigma_schedule: Vec<f64>,
    pub eps_schedule: Vec<f64>,
    /// (sigma, A_P(t, sigma x), error) per sigma.
    pub samples: Vec<(f64, Complex64, f64)>,
    pub fit_residual: f64,
    /// The same limit with the other order of limits.
    pub alternate_order: f64,
    pub order: LimitOrder,
}

impl LimitEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "t": self.t,
            "value": self.value,
            "error": self.error,
            "imag": self.imag,
            "direction": self.direction,
            "sigma_schedule": self.sigma_schedule,
            "eps_schedule": self.eps_schedule,
            "fit_residual": self.fit_residual,
            "alternate_order": self.alternate_order,
            "order": match self.order {
                LimitOrder::EpsThenSigma => "eps-then-sigma",
                LimitOrder::SigmaThenEps => "sigma-then-eps",
            },
            "samples": self
                .samples
                .iter()
                .map(|(s, z, e)| json!({"sigma": s, "value": complex_json(*z), "error": e}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Signed simple cones of all vertex cones of `tP`, with the vertex each came from.
pub fn vertex_terms(p: &Polytope, t: f64) -> Result<(Vec<ConeSumTerm>, Vec<usize>)> {
    let mut terms = Vec::new();
    let mut owners = Vec::new();
    for (i, v) in p.vertices().iter().enumerate() {
        for k in vertex_simple_cones(p, i)? {
            terms.push(ConeSumTerm::new(1.0, k.with_apex(linalg::scale(v, t))));
            owners.push(i);
        }
    }
    Ok((terms, owners))
}

/// Schedule shared by every evaluation of `tP` for the given dilations.
fn schedule_for_dilations(p: &Polytope, ts: &[f64], cfg: &DampedSumConfig) -> Vec<f64> {
    let gap = ts
        .iter()
        .map(|&t| lattice_gap(p, t))
        .fold(f64::INFINITY, f64::min);
    cfg.schedule_for(gap, p.dim())
}

fn check_point(p: &Polytope, s: &ComplexPoint) -> Result<()> {
    if s.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: p.dim(),
            got: s.dim(),
        });
    }
    Ok(())
}

/// Raw damped sums of `A_P(t, s)` over a schedule.
fn damped_samples(
    terms: &[ConeSumTerm],
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    schedule: &[f64],
) -> Result<Vec<DampedSum>> {
    schedule
        .iter()
        .map(|&eps| damped_transform_sum(terms, s, cfg, eps))
        .collect()
}

fn noise_level(samples: &[DampedSum]) -> f64 {
    samples.iter().map(|d| d.magnitude).fold(0.0, f64::max) * ROUNDOFF
}

fn evaluate_with_schedule(
    p: &Polytope,
    t: f64,
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    schedule: &[f64],
) -> Result<MacdonaldEvaluation> {
    check_point(p, s)?;
    validate_schedule(schedule)?;
    let (terms, owners) = vertex_terms(p, t)?;
    let samples = damped_samples(&terms, s, cfg, schedule)?;
    let noise = noise_level(&samples);
    let totals: Vec<Complex64> = samples.iter().map(|d| d.value).collect();
    let total = richardson_with_noise(schedule, &totals, noise)?;

    let n_vertices = p.vertices().len();
    let mut per_vertex = Vec::with_capacity(n_vertices);
    for i in 0..n_vertices {
        let seq: Vec<Complex64> = samples
            .iter()
            .map(|d| {
                d.per_term
                    .iter()
                    .zip(&owners)
                    .filter(|(_, &o)| o == i)
                    .map(|(z, _)| *z)
                    .sum()
            })
            .collect();
        // Linear in the samples, so these add up to the total extrapolant.
        let n = schedule.len();
        let (e0, e1) = (schedule[n - 2], schedule[n - 1]);
        let partial = (seq[n - 1] * e0 - seq[n - 2] * e1) / (e0 - e1);
        per_vertex.push((linalg::scale(&p.vertices()[i], t), partial));
    }
    let value: Complex64 = per_vertex.iter().map(|(_, z)| z).sum();
    let last = samples.last().expect("schedule is nonempty");
    let error = total.error + last.tail + noise;
    Ok(MacdonaldEvaluation {
        t,
        s: s.clone(),
        value,
        error,
        per_vertex_breakdown: per_vertex,
        eps_schedule: schedule.to_vec(),
    })
}

/// `A_P(t, s)`, extrapolated to `eps -> 0`.
pub fn a_of_t_s(
    p: &Polytope,
    t: f64,
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
) -> Result<MacdonaldEvaluation> {
    let schedule = schedule_for_dilations(p, &[t], cfg);
    evaluate_with_schedule(p, t, s, cfg, &schedule)
}

/// Smallest `|<w, m + sigma x>|` over generators `w`, lattice points
/// `||m||_inf <= radius` and the given sigmas. Fails with the offending
/// point when it drops below the certification threshold.
pub fn certify_direction(
    cones: &[SimpleCone],
    x: &[f64],
    sigmas: &[f64],
    radius: usize,
) -> Result<f64> {
    if x.iter().all(|&c| c == 0.0) || x.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter("direction must be finite and nonzero".into()));
    }
    let r = radius as i64;
    let mut best = f64::INFINITY;
    for k in cones {
        for (j, w) in k.generators().iter().enumerate() {
            let c = dot(w, x);
            // Solve for the coordinate with the largest weight, enumerate the rest.
            let (solve, ws) = w
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(i, v)| (i, *v))
                .expect("generator is nonempty");
            let others: Vec<usize> = (0..w.len()).filter(|&i| i != solve).collect();
            let lo = vec![-r; others.len()];
            let hi = vec![r; others.len()];
            let mut failure = None;
            polytope::for_each_box_point(&lo, &hi, |rest| {
                let partial: f64 = others.iter().zip(rest).map(|(&i, &m)| w[i] * m as f64).sum();
                for &sigma in sigmas {
                    let a = partial + sigma * c;
                    let centre = (-a / ws).round() as i64;
                    for md in [centre - 1, centre, centre + 1] {
                        if md.abs() > r {
                            continue;
                        }
                        let dist = (a + ws * md as f64).abs();
                        if dist < best {
                            best = dist;
                        }
                        if dist <= DIRECTION_POLE_THRESHOLD && failure.is_none() {
                            let mut m = vec![0i64; w.len()];
                            for (&i, &v) in others.iter().zip(rest) {
                                m[i] = v;
                            }
                            m[solve] = md;
                            failure = Some(Error::PoleHit {
                                generator: j,
                                distance: dist,
                                lattice_point: m,
                            });
                        }
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
    }
    Ok(best)
}

/// Default sigma schedule: 7 geometric points from `min(0.1, 0.05 / M)` down
/// by a factor 100, where `M` bounds `|t <x, v>|` over the vertices.
pub fn default_sigma_schedule(p: &Polytope, t: f64, x: &[f64]) -> Vec<f64> {
    let m = p
        .vertices()
        .iter()
        .map(|v| (t * dot(x, v)).abs())
        .fold(1.0, f64::max);
    let top = (0.05 / m).min(0.1);
    (0..7).map(|k| top * 0.01f64.powf(k as f64 / 6.0)).collect()
}

fn random_direction(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-9i64..=9) as f64).collect();
        if x.iter().any(|&c| c != 0.0) {
            return x;
        }
    }
}

/// Picks (or checks) the direction and sigma schedule for `A_P(t)`.
fn resolve_direction(
    p: &Polytope,
    t: f64,
    limit: &LimitConfig,
    radius: usize,
    cones: &[SimpleCone],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = p.dim();
    let sigmas_for = |x: &[f64]| -> Result<Vec<f64>> {
        match &limit.sigma_schedule {
            Some(s) => {
                validate_schedule(s)?;
                Ok(s.clone())
            }
            None => Ok(default_sigma_schedule(p, t, x)),
        }
    };
    if let Some(x) = &limit.direction {
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                row: 0,
                expected: d,
                got: x.len(),
            });
        }
        let sigmas = sigmas_for(x)?;
        certify_direction(cones, x, &sigmas, radius)?;
        return Ok((x.clone(), sigmas));
    }
    let ones = vec![1.0; d];
    let sigmas = sigmas_for(&ones)?;
    let mut last_err = match certify_direction(cones, &ones, &sigmas, radius) {
        Ok(_) => return Ok((ones, sigmas)),
        Err(e) => e,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(limit.seed);
    for _ in 0..RANDOM_DIRECTION_TRIES {
        let x = random_direction(&mut rng, d);
        let sigmas = sigmas_for(&x)?;
        match certify_direction(cones, &x, &sigmas, radius) {
            Ok(_) => {
                log::debug!("using generic direction {x:?}");
                return Ok((x, sigmas));
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Least-squares intercept of `values` against `basis(u)` at `u = sigma / sigma_max`.
/// Returns (intercept, weights of the intercept in the data, max residual).
fn fit_intercept(us: &[f64], values: &[f64], basis: &[i32]) -> Result<(f64, Vec<f64>, f64)> {
    let n = us.len();
    let k = basis.len();
    if n < k {
        return Err(Error::InvalidParameter(format!(
            "sigma schedule has {n} points, the fit needs at least {k}"
        )));
    }
    let a = DMatrix::from_fn(n, k, |i, j| us[i].powi(basis[j]));
    let pinv = a
        .clone()
        .pseudo_inverse(1e-13)
        .map_err(|e| Error::InvalidParameter(format!("fit failed: {e}")))?;
    let y = nalgebra::DVector::from_column_slice(values);
    let coef = &pinv * &y;
    let fitted = &a * &coef;
    let residual = (0..n).map(|i| (fitted[i] - y[i]).abs()).fold(0.0, f64::max);
    let weights: Vec<f64> = (0..n).map(|i| pinv[(0, i)]).collect();
    Ok((coef[0], weights, residual))
}

/// Fits real parts with even powers and imaginary parts with `1` plus odd
/// powers, both of which `A_P(t, sigma x)` has for real `x`.
fn complex_intercept(
    sigmas: &[f64],
    values: &[Complex64],
    degree: usize,
) -> Result<(Complex64, Vec<f64>, Vec<f64>, f64)> {
    let top = sigmas[0];
    let us: Vec<f64> = sigmas.iter().map(|s| s / top).collect();
    let even: Vec<i32> = (0..=degree).map(|j| 2 * j as i32).collect();
    let odd: Vec<i32> = std::iter::once(0)
        .chain((0..degree).map(|j| 2 * j as i32 + 1))
        .collect();
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    let (r0, rw, rres) = fit_intercept(&us, &re, &even)?;
    let (i0, iw, ires) = fit_intercept(&us, &im, &odd)?;
    Ok((Complex64::new(r0, i0), rw, iw, rres.max(ires)))
}

/// `A_P(t) = lim_{sigma -> 0} A_P(t, sigma x)`.
pub fn a_of_t(
    p: &Polytope,
    t: f64,
    limit: &LimitConfig,
    cfg: &DampedSumConfig,
) -> Result<LimitEstimate> {
    let schedule = schedule_for_dilations(p, &[t], cfg);
    a_of_t_with_schedule(p, t, limit, cfg, &schedule)
}

fn a_of_t_with_schedule(
    p: &Polytope,
    t: f64,
    limit: &LimitConfig,
    cfg: &DampedSumConfig,
    schedule: &[f64],
) -> Result<LimitEstimate> {
    validate_schedule(schedule)?;
    let d = p.dim();
    let (terms, _) = vertex_terms(p, t)?;
    let cones: Vec<SimpleCone> = terms.iter().map(|t| t.cone.clone()).collect();
    let radius = schedule.iter().map(|&e| cfg.radius(e)).max().unwrap_or(0);
    let (x, sigmas) = resolve_direction(p, t, limit, radius, &cones)?;
    let degree = limit.fit_degree.unwrap_or(d + 1);

    // One row of raw damped sums per sigma.
    let grid: Vec<Vec<DampedSum>> = sigmas
        .par_iter()
        .map(|&sigma| {
            let s = ComplexPoint::real(&linalg::scale(&x, sigma));
            damped_samples(&terms, &s, cfg, schedule)
        })
        .collect::<Result<_>>()?;

    let mut per_sigma = Vec::with_capacity(sigmas.len());
    for (row, &sigma) in grid.iter().zip(&sigmas) {
        let noise = noise_level(row);
        let values: Vec<Complex64> = row.iter().map(|d| d.value).collect();
        let ex = richardson_with_noise(schedule, &values, noise)?;
        let tail = row.last().map_or(0.0, |d| d.tail);
        per_sigma.push((sigma, ex.value, ex.error + tail + noise));
    }
    let values: Vec<Complex64> = per_sigma.iter().map(|(_, z, _)| *z).collect();
    let errors: Vec<f64> = per_sigma.iter().map(|(_, _, e)| *e).collect();
    let (eps_first, rw, iw, residual) = complex_intercept(&sigmas, &values, degree)?;

    // Other order: intercept per eps, then extrapolate.
    let mut intercepts = Vec::with_capacity(schedule.len());
    for j in 0..schedule.len() {
        let column: Vec<Complex64> = grid.iter().map(|row| row[j].value).collect();
        intercepts.push(complex_intercept(&sigmas, &column, degree)?.0);
    }
    let noise = grid.iter().map(|r| noise_level(r)).fold(0.0, f64::max);
    let sigma_first = richardson_with_noise(schedule, &intercepts, noise)?;

    let (chosen, other) = match limit.order {
        LimitOrder::EpsThenSigma => (eps_first, sigma_first.value),
        LimitOrder::SigmaThenEps => (sigma_first.value, eps_first),
    };
    let propagated: f64 = rw.iter().zip(&errors).map(|(w, e)| w.abs() * e).sum();
    let propagated_im: f64 = iw.iter().zip(&errors).map(|(w, e)| w.abs() * e).sum();
    let error = match limit.order {
        LimitOrder::EpsThenSigma => propagated + residual,
        LimitOrder::SigmaThenEps => sigma_first.error + residual,
    };
    let max_err = errors.iter().cloned().fold(0.0, f64::max);
    let fit_limit = 10.0 * max_err.max(1e-7 * (1.0 + chosen.re.abs()));
    if residual > fit_limit {
        return Err(Error::PoorFit {
            residual,
            limit: fit_limit,
        });
    }
    if chosen.im.abs() > (1e-6 * (1.0 + chosen.re.abs())).max(3.0 * (propagated_im + residual)) {
        return Err(Error::ImaginaryResidue {
            real: chosen.re,
            imag: chosen.im,
        });
    }
    Ok(LimitEstimate {
        t,
        value: chosen.re,
        error,
        imag: chosen.im,
        direction: x,
        sigma_schedule: sigmas,
        eps_schedule: schedule.to_vec(),
        samples: per_sigma,
        fit_residual: residual,
        alternate_order: other.re,
        order: limit.order,
    })
}

/// `A_P(t)` at several dilations (independent evaluations).
pub fn a_of_t_series(
    p: &Polytope,
    ts: &[f64],
    limit: &LimitConfig,
    cfg: &DampedSumConfig,
) -> Result<Vec<LimitEstimate>> {
    ts.iter().map(|&t| a_of_t(p, t, limit, cfg)).collect()
}

fn point_json(s: &ComplexPoint) -> Value {
    Value::Array(s.0.iter().map(|&z| complex_json(z)).collect())
}

/// Both sides of a cone reciprocity check at one eps (or extrapolated).
fn cone_reciprocity_sides(
    k: &SimpleCone,
    v: &[f64],
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    schedule: &[f64],
) -> Result<(Complex64, Complex64, f64)> {
    let d = k.dim();
    if v.len() != d || s.dim() != d {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: d,
            got: if v.len() != d { v.len() } else { s.dim() },
        });
    }
    let plus = [ConeSumTerm::new(1.0, k.with_apex(v.to_vec()))];
    let minus = [ConeSumTerm::new(1.0, k.with_apex(linalg::scale(v, -1.0)))];
    let neg_s = s.neg();
    let lhs_samples = damped_samples(&plus, &neg_s, cfg, schedule)?;
    let rhs_samples = damped_samples(&minus, s, cfg, schedule)?;
    if schedule.len() == 1 {
        return Ok((lhs_samples[0].value, rhs_samples[0].value, 0.0));
    }
    let noise = noise_level(&lhs_samples).max(noise_level(&rhs_samples));
    let lhs_vals: Vec<Complex64> = lhs_samples.iter().map(|d| d.value).collect();
    let rhs_vals: Vec<Complex64> = rhs_samples.iter().map(|d| d.value).collect();
    let lhs = richardson_with_noise(schedule, &lhs_vals, noise)?;
    let rhs = richardson_with_noise(schedule, &rhs_vals, noise)?;
    Ok((lhs.value, rhs.value, lhs.error.max(rhs.error)))
}

/// `alpha_{v+K}(-s) = (-1)^d alpha_{-v+K}(s)`, both sides extrapolated on a
/// common schedule. With `v = 0` this is the unshifted statement.
pub fn verify_cone_reciprocity(
    k: &SimpleCone,
    v: &[f64],
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    tolerance: f64,
) -> Result<Report> {
    let gap = cone_gap(&k.with_apex(v.to_vec())).min(cone_gap(&k.with_apex(linalg::scale(v, -1.0))));
    let schedule = cfg.schedule_for(gap, k.dim());
    cone_reciprocity_report(k, v, s, cfg, &schedule, tolerance, "cone-reciprocity")
}

/// The same identity for the damped sums at a single eps.
pub fn verify_cone_reciprocity_at(
    k: &SimpleCone,
    v: &[f64],
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    eps: f64,
    tolerance: f64,
) -> Result<Report> {
    if !(eps > 0.0) {
        return Err(Error::BadEpsilon(eps));
    }
    cone_reciprocity_report(k, v, s, cfg, &[eps], tolerance, "cone-reciprocity-fixed-eps")
}

fn cone_reciprocity_report(
    k: &SimpleCone,
    v: &[f64],
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    schedule: &[f64],
    tolerance: f64,
    identity: &str,
) -> Result<Report> {
    let (lhs, rhs, err) = cone_reciprocity_sides(k, v, s, cfg, schedule)?;
    let sign = if k.dim() % 2 == 0 { 1.0 } else { -1.0 };
    let residual = (lhs - rhs * sign).norm();
    Ok(Report::new(
        identity,
        json!({
            "generators": k.generators(),
            "shift": v,
            "s": point_json(s),
            "p": cfg.p,
            "eps_schedule": schedule,
        }),
        residual,
        tolerance,
        json!({
            "lhs": complex_json(lhs),
            "rhs": complex_json(rhs),
            "sign": sign,
            "extrapolation_error": err,
        }),
    ))
}

/// `alpha_P(s) = sum_v alpha_{K_v}(s)`: lattice-point sum against vertex cones.
pub fn verify_brion(
    p: &Polytope,
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    tolerance: f64,
) -> Result<Report> {
    check_point(p, s)?;
    let direct = alpha_oracle(p, 1.0, s, cfg.p, OracleMethod::Auto, DEFAULT_ORACLE_SAMPLES, 0)?;
    let cones = a_of_t_s(p, 1.0, s, cfg)?;
    let residual = (direct.value - cones.value).norm();
    let tolerance = tolerance.max(3.0 * direct.std_error);
    Ok(Report::new(
        "brion",
        json!({ "polytope": polytope::to_json(p), "s": point_json(s), "p": cfg.p }),
        residual,
        tolerance,
        json!({
            "lattice_sum": complex_json(direct.value),
            "lattice_sum_std_error": direct.std_error,
            "cone_sum": cones.to_json(),
        }),
    ))
}

/// `A_P(-t, s) = (-1)^d A_P(t, -s)` on a common schedule.
pub fn verify_macdonald(
    p: &Polytope,
    t: f64,
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    tolerance: f64,
) -> Result<Report> {
    check_point(p, s)?;
    let schedule = schedule_for_dilations(p, &[t, -t], cfg);
    let lhs = evaluate_with_schedule(p, -t, s, cfg, &schedule)?;
    let rhs = evaluate_with_schedule(p, t, &s.neg(), cfg, &schedule)?;
    let sign = if p.dim() % 2 == 0 { 1.0 } else { -1.0 };
    let residual = (lhs.value - rhs.value * sign).norm();
    Ok(Report::new(
        "macdonald-reciprocity",
        json!({ "polytope": polytope::to_json(p), "t": t, "s": point_json(s), "p": cfg.p }),
        residual,
        tolerance,
        json!({ "lhs": lhs.to_json(), "rhs": rhs.to_json(), "sign": sign }),
    ))
}

/// `A_P(0) = 0`: a consequence of reciprocity for odd `d`, conjectured for even `d`.
pub fn conjecture_check(
    p: &Polytope,
    cfg: &DampedSumConfig,
    limit: &LimitConfig,
    tolerance: f64,
) -> Result<Report> {
    let est = a_of_t(p, 0.0, limit, cfg)?;
    let odd = p.dim() % 2 == 1;
    Ok(Report::new(
        "vanishing-at-zero",
        json!({ "polytope": polytope::to_json(p), "p": cfg.p }),
        est.value.abs(),
        tolerance,
        json!({
            "status": if odd { "theorem (odd dimension)" } else { "conjecture (even dimension)" },
            "estimate": est.to_json(),
        }),
    ))
}

/// One disagreement of the Brianchon-Gram identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub point: Vec<f64>,
    pub lhs: i64,
    pub rhs: i64,
}

fn sample_point(p: &Polytope, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = p.dim();
    let verts = p.vertices();
    let (lo, hi) = p.bounding_box(1.0);
    match rng.random_range(0..3) {
        0 => {
            // Box around P with margins.
            (0..d)
                .map(|k| {
                    let w = (hi[k] - lo[k]).max(1e-3);
                    rng.random_range((lo[k] - w)..(hi[k] + w))
                })
                .collect()
        }
        1 => {
            // Random convex combination: inside.
            let weights: Vec<f64> = (0..verts.len()).map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = weights.iter().sum();
            (0..d)
                .map(|k| verts.iter().zip(&weights).map(|(v, w)| v[k] * w).sum::<f64>() / total)
                .collect()
        }
        _ => {
            // Near a random facet.
            let facets = p.facets();
            let f = &facets[rng.random_range(0..facets.len())];
            let weights: Vec<f64> = f.vertices.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = weights.iter().sum();
            let offset = rng.random_range(-1e-3..1e-3);
            (0..d)
                .map(|k| {
                    let on: f64 = f
                        .vertices
                        .iter()
                        .zip(&weights)
                        .map(|(&i, w)| verts[i][k] * w)
                        .sum::<f64>()
                        / total;
                    on + offset * f.halfspace.normal[k]
                })
                .collect()
        }
    }
}

/// `1_P(x) = sum_F (-1)^{dim F} 1_{K_F}(x)` at random points, compared exactly.
pub fn brianchon_gram_check(
    p: &Polytope,
    n_points: usize,
    seed: u64,
) -> Result<(Report, Vec<Counterexample>)> {
    let faces = faces(p)?;
    let regions: Vec<_> = faces.iter().map(|f| p.face_tangent_region(f)).collect();
    let region = p.region();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexamples = Vec::new();
    let mut checked = 0;
    let mut resampled = 0;
    while checked < n_points {
        let x = sample_point(p, &mut rng);
        let near = regions
            .iter()
            .flat_map(|r| r.halfspaces.iter())
            .any(|h| h.slack(&x).abs() < 1e-9);
        if near {
            resampled += 1;
            continue;
        }
        let lhs = i64::from(region.contains(&x));
        let rhs: i64 = faces
            .iter()
            .zip(&regions)
            .map(|(f, r)| if r.contains(&x) { f.sign as i64 } else { 0 })
            .sum();
        if lhs != rhs {
            counterexamples.push(Counterexample { point: x, lhs, rhs });
        }
        checked += 1;
    }
    let report = Report::new(
        "brianchon-gram",
        json!({ "polytope": polytope::to_json(p), "n_points": n_points, "seed": seed }),
        counterexamples.len() as f64,
        0.5,
        json!({
            "faces": faces.len(),
            "resampled": resampled,
            "counterexamples": counterexamples
                .iter()
                .map(|c| json!({"point": c.point, "lhs": c.lhs, "rhs": c.rhs}))
                .collect::<Vec<_>>(),
        }),
    );
    Ok((report, counterexamples))
}

/// The planar triangle with vertices (0,0), (0,1), (sqrt 3, 0).
pub fn sqrt3_triangle() -> Polytope {
    polytope::from_json(r#"{"dim":2,"vertices":[["0","0"],["0","1"],["sqrt(3)","0"]]}"#)
        .expect("fixed triangle is valid")
}

/// Numerator and denominator of the triangle's vertex-cone sum at lattice
/// point `m` along `s = sigma x` (common denominator of the three cones).
fn triangle_fg(m: [f64; 2], t: f64, x: [f64; 2], sigma: f64) -> (Complex64, Complex64) {
    let r3 = 3f64.sqrt();
    let a = m[0] + sigma * x[0];
    let b = m[1] + sigma * x[1];
    let e = |u: f64| Complex64::new(0.0, 2.0 * PI * t * u).exp();
    let f = Complex64::new(r3 * a - b, 0.0) - e(b) * (r3 * a) + e(r3 * a) * b;
    let g = Complex64::new(a * b * (r3 * a - b), 0.0);
    (f, g)
}

/// The displayed closed form for `f''(t, 0) / g''(t, 0)`.
pub fn triangle_closed_form_ratio(m: [f64; 2], t: f64, x: [f64; 2]) -> Complex64 {
    let r3 = 3f64.sqrt();
    let (m1, m2) = (m[0], m[1]);
    let (x1, x2) = (x[0], x[1]);
    let e = |u: f64| Complex64::new(0.0, 2.0 * PI * t * u).exp();
    let i = Complex64::new(0.0, 1.0);
    let num = e(r3 * m1) * (-6.0 * PI * PI * m2 * x1 * x1 * t * t)
        + i * (2.0 * PI * r3 * x1 * x2 * t) * (e(r3 * m1) - e(m2))
        + e(m2) * (2.0 * PI * PI * r3 * m1 * x2 * x2 * t * t);
    let den = -x2 * (2.0 * m2 * x1 + m1 * x2) + r3 * x1 * (m2 * x1 + 2.0 * m1 * x2);
    num / den
}

/// Second derivative in sigma at 0 by Richardson-refined central differences.
fn second_derivative_richardson(f: impl Fn(f64) -> Complex64, h: f64) -> Complex64 {
    let central = |h: f64| (f(h) - f(0.0) * 2.0 + f(-h)) / (h * h);
    (central(h / 2.0) * 4.0 - central(h)) / 3.0
}

/// Second derivative in sigma at 0 by the five-point stencil.
fn second_derivative_stencil(f: impl Fn(f64) -> Complex64, h: f64) -> Complex64 {
    (-f(2.0 * h) + f(h) * 16.0 - f(0.0) * 30.0 + f(-h) * 16.0 - f(-2.0 * h)) / (12.0 * h * h)
}

/// Order of vanishing of `g` at `sigma = 0`: the number of its three linear
/// factors that vanish at `m`.
fn triangle_g_order(m: [f64; 2]) -> usize {
    let r3 = 3f64.sqrt();
    [m[0], m[1], r3 * m[0] - m[1]]
        .iter()
        .filter(|v| v.abs() < 1e-12)
        .count()
}

/// Sample points `(m1, m2, t)` for the L'Hopital comparison.
pub const TRIANGLE_RATIO_SAMPLES: [([f64; 2], f64); 5] = [
    ([1.0, 1.0], 0.5),
    ([2.0, 1.0], 1.0),
    ([1.0, 2.0], 1.5),
    ([3.0, -1.0], 0.7),
    ([1.0, 0.0], 0.5),
];

fn ratio_diagnostics(m: [f64; 2], t: f64, x: [f64; 2]) -> (Value, bool) {
    let f = |s: f64| triangle_fg(m, t, x, s).0;
    let g = |s: f64| triangle_fg(m, t, x, s).1;
    let ratio_a = second_derivative_richardson(f, 2e-3) / second_derivative_richardson(g, 2e-3);
    let ratio_b = second_derivative_stencil(f, 4e-3) / second_derivative_stencil(g, 4e-3);
    let closed = triangle_closed_form_ratio(m, t, x);
    let scale = 1.0 + closed.norm();
    let differentiation_agrees =
        (ratio_a - ratio_b).norm() < 1e-6 * scale && (ratio_a - closed).norm() < 1e-6 * scale;

    // The actual sigma -> 0 limit of f/g, from sigma = 1e-3 and 1e-4.
    let r = |s: f64| {
        let (f, g) = triangle_fg(m, t, x, s);
        f / g
    };
    let (s1, s2) = (1e-3, 1e-4);
    let direct = r(s2) + (r(s2) - r(s1)) * (s2 / (s1 - s2));
    let order = triangle_g_order(m);
    let direct_agrees = (direct - closed).norm() < 1e-6 * scale;
    let value = json!({
        "m": m,
        "t": t,
        "direction": x,
        "closed_form": complex_json(closed),
        "second_derivative_ratio_richardson": complex_json(ratio_a),
        "second_derivative_ratio_stencil": complex_json(ratio_b),
        "differentiation_agrees": differentiation_agrees,
        "direct_ratio_limit": complex_json(direct),
        "direct_agrees_with_closed_form": direct_agrees,
        "g_vanishing_order": order,
        "second_order_lhopital_applies": order == 2,
    });
    (value, differentiation_agrees)
}

/// Partial sums of the two coefficient series of the displayed final formula
/// (`t^2` and `t` parts), with the mass-one kernel and `m = 0` omitted.
fn triangle_series_diagnostics(t: f64, schedule: &[f64]) -> Value {
    let r3 = 3f64.sqrt();
    let e = |u: f64| Complex64::new(0.0, 2.0 * PI * t * u).exp();
    let i = Complex64::new(0.0, 1.0);
    let rows: Vec<Value> = schedule
        .iter()
        .map(|&eps| {
            let r = ((6.0 / (PI * eps).sqrt()).ceil() as i64).max(30);
            let mut s2 = Complex64::new(0.0, 0.0);
            let mut s1 = Complex64::new(0.0, 0.0);
            for m1 in -r..=r {
                for m2 in -r..=r {
                    let (a, b) = (m1 as f64, m2 as f64);
                    let den = -2.0 * b - a + r3 * (b + 2.0 * a);
                    if den.abs() < 1e-12 {
                        continue;
                    }
                    let damp = (-PI * eps * (a * a + b * b)).exp();
                    s2 += (e(b) * (2.0 * PI * PI * r3 * a) - e(r3 * a) * (6.0 * PI * PI * b))
                        * (damp / den);
                    s1 += i * (2.0 * PI * r3) * (e(r3 * a) - e(b)) * (damp / den);
                }
            }
            let k = -1.0 / (4.0 * PI * PI);
            let (s2, s1) = (s2 * k, s1 * k);
            json!({
                "eps": eps,
                "t2_series": complex_json(s2),
                "t_series": complex_json(s1),
                "total": complex_json(s2 * (t * t) + s1 * t),
            })
        })
        .collect();
    Value::Array(rows)
}

/// The worked triangle: vertex-cone determinants, `A_P(t)` against the
/// lattice-point oracle, and the L'Hopital ratio.
pub fn triangle_example(
    t_values: &[f64],
    cfg: &DampedSumConfig,
    limit: &LimitConfig,
) -> Result<Report> {
    let p = sqrt3_triangle();
    let expected = [1.0, 3f64.sqrt(), 1.0];
    let mut dets = Vec::new();
    for i in 0..3 {
        let cones = vertex_simple_cones(&p, i)?;
        dets.push(cones.iter().map(|k| k.det().abs()).sum::<f64>());
    }
    let det_residual = dets
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let dets_pass = det_residual < 1e-12;

    let mut comparisons = Vec::new();
    let mut oracle_residual: f64 = 0.0;
    let mut oracle_pass = true;
    for &t in t_values {
        let oracle = a_t_oracle(&p, t, cfg.p, OracleMethod::Auto, DEFAULT_ORACLE_SAMPLES, 0)?;
        let est = a_of_t(&p, t, limit, cfg)?;
        let diff = (est.value - oracle.value).abs();
        let tol = 1e-2f64.max(3.0 * oracle.std_error);
        oracle_pass &= diff <= tol;
        oracle_residual = oracle_residual.max(diff);
        comparisons.push(json!({
            "t": t,
            "oracle": oracle.value,
            "oracle_std_error": oracle.std_error,
            "estimate": est.value,
            "estimate_error": est.error,
            "difference": diff,
            "tolerance": tol,
            "pass": diff <= tol,
            "series_diagnostics": triangle_series_diagnostics(t, &[0.1, 0.05, 0.025, 0.0125]),
        }));
    }

    let mut ratios = Vec::new();
    let mut ratio_pass = true;
    for (m, t) in TRIANGLE_RATIO_SAMPLES {
        let (v, ok) = ratio_diagnostics(m, t, [1.0, 1.0]);
        ratio_pass &= ok;
        ratios.push(v);
    }

    let mut report = Report::new(
        "triangle-example",
        json!({ "t": t_values, "p": cfg.p, "polytope": polytope::to_json(&p) }),
        oracle_residual,
        1e-2,
        json!({
            "determinants": dets,
            "determinants_pass": dets_pass,
            "oracle_comparison": comparisons,
            "oracle_pass": oracle_pass,
            "ratio_checks": ratios,
            "ratio_pass": ratio_pass,
        }),
    );
    report.pass = dets_pass && oracle_pass && ratio_pass;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::load_polytope;

    fn square() -> Polytope {
        load_polytope(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    fn cfg() -> DampedSumConfig {
        DampedSumConfig::new(2.0).unwrap()
    }

    #[test]
    fn square_alpha_from_vertex_cones() {
        let s = ComplexPoint::parse("0.3+0.2i,-0.1+0.4i").unwrap();
        let r = verify_brion(&square(), &s, &cfg(), DEFAULT_TOLERANCE).unwrap();
        assert!(r.pass, "{}", r.to_json());
    }

    #[test]
    fn breakdown_sums_to_value() {
        let s = ComplexPoint::parse("0.3i,0.4i").unwrap();
        let e = a_of_t_s(&square(), 1.0, &s, &cfg()).unwrap();
        let sum: Complex64 = e.per_vertex_breakdown.iter().map(|(_, z)| z).sum();
        assert_eq!(sum, e.value);
        assert_eq!(e.per_vertex_breakdown.len(), 4);
    }

    #[test]
    fn zero_dilation_collapses_phases() {
        let s = ComplexPoint::parse("0.13+0.1i,0.27-0.05i").unwrap();
        let c = cfg();
        let e = a_of_t_s(&square(), 0.0, &s, &c).unwrap();
        let (terms, _) = vertex_terms(&square(), 0.0).unwrap();
        let eps = *e.eps_schedule.last().unwrap();
        let direct = damped_transform_sum(&terms, &s, &c, eps).unwrap();
        assert!(terms.iter().all(|t| t.cone.apex().iter().all(|&a| a == 0.0)));
        assert!((direct.value - e.value).norm() < 1e-9);
    }

    #[test]
    fn square_limit_is_t_squared() {
        let r = a_of_t(&square(), 2.0, &LimitConfig::default(), &cfg()).unwrap();
        assert!((r.value - 4.0).abs() < 1e-2, "{}", r.to_json());
        assert!((r.alternate_order - 4.0).abs() < 1e-2);
    }

    #[test]
    fn closed_form_matches_numeric_second_derivatives() {
        for (m, t) in TRIANGLE_RATIO_SAMPLES {
            let (v, ok) = ratio_diagnostics(m, t, [1.0, 1.0]);
            assert!(ok, "{v}");
        }
    }

    #[test]
    fn direction_certification() {
        let (terms, _) = vertex_terms(&square(), 1.0).unwrap();
        let cones: Vec<SimpleCone> = terms.into_iter().map(|t| t.cone).collect();
        let sigmas = [0.01, 0.001];
        assert!(certify_direction(&cones, &[1.0, 1.0], &sigmas, 30).unwrap() > 1e-4);
        assert!(matches!(
            certify_direction(&cones, &[1.0, 0.0], &sigmas, 30),
            Err(Error::PoleHit { .. })
        ));
    }

    #[test]
    fn brianchon_gram_on_square() {
        let (r, bad) = brianchon_gram_check(&square(), 100, 7).unwrap();
        assert!(r.pass && bad.is_empty());
    }
}

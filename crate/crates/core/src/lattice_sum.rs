//! Damped lattice sums over signed collections of simple cones, in transform
//! space (`sum_m 1^_K(m+s) phi^_eps(m+s)`) and in direct space
//! (`sum_m (1_K * phi_eps)(m) e^{2 pi i <s, m>}`), plus extrapolation in eps.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cone::SimpleCone;
use crate::error::{Error, Result};
use crate::extrapolate::{self, Extrapolated};
use crate::polytope::{self, for_each_box_point, Polytope};
use crate::quadrature::{smoothed_indicator, Kernel};
use crate::region::Region;
use crate::transforms::{cone_prefactor, pair, phi_hat_1d, ComplexPoint, DampedSumConfig};

/// Pole threshold for lattice sums (stricter than for single transforms).
pub const LATTICE_POLE_THRESHOLD: f64 = 1e-10;

/// Per-point accuracy of the direct-space convolutions.
const DIRECT_TOL: f64 = 1e-13;

/// One signed cone of a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSumTerm {
    pub coefficient: Complex64,
    pub cone: SimpleCone,
}

impl ConeSumTerm {
    pub fn new(coefficient: f64, cone: SimpleCone) -> Self {
        ConeSumTerm {
            coefficient: Complex64::new(coefficient, 0.0),
            cone,
        }
    }

    /// The term for the reflected cone `-K` (apex and generators negated).
    pub fn reflected(&self) -> Self {
        ConeSumTerm {
            coefficient: self.coefficient,
            cone: self.cone.reflected(),
        }
    }
}

/// Result of one damped sum at fixed eps.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedSum {
    pub value: Complex64,
    /// Contribution of each term, in input order; `value` is their sum.
    pub per_term: Vec<Complex64>,
    /// Magnitude of the outermost shell `||m||_inf = R`.
    pub tail: f64,
    /// Sum of term magnitudes (scale for roundoff).
    pub magnitude: f64,
    pub radius: usize,
}

struct Stripe {
    per_term: Vec<Complex64>,
    tail: f64,
    magnitude: f64,
}

/// `sum_{||m||_inf <= R} sum_terms coef * 1^_K(m+s) * phi^_eps(m+s)`.
pub fn damped_transform_sum(
    terms: &[ConeSumTerm],
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    eps: f64,
) -> Result<DampedSum> {
    if !(eps > 0.0) {
        return Err(Error::BadEpsilon(eps));
    }
    let d = s.dim();
    if terms.is_empty() {
        return Ok(DampedSum {
            value: Complex64::new(0.0, 0.0),
            per_term: Vec::new(),
            tail: 0.0,
            magnitude: 0.0,
            radius: 0,
        });
    }
    if let Some(t) = terms.iter().find(|t| t.cone.dim() != d) {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: d,
            got: t.cone.dim(),
        });
    }
    if !s.is_finite() {
        return Err(Error::InvalidParameter("s has non-finite entries".into()));
    }
    let r = cfg.radius(eps) as i64;
    let side = (2 * r + 1) as usize;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);

    // Separable factors: kernel transform and apex phases, per axis.
    let mut kernel_table = vec![vec![Complex64::new(0.0, 0.0); side]; d];
    for k in 0..d {
        for (idx, m) in (-r..=r).enumerate() {
            kernel_table[k][idx] = phi_hat_1d(cfg, eps, s.0[k] + m as f64)?;
        }
    }
    let phase_tables: Vec<Vec<Vec<Complex64>>> = terms
        .iter()
        .map(|t| {
            (0..d)
                .map(|k| {
                    (-r..=r)
                        .map(|m| (two_pi_i * t.cone.apex()[k] * (s.0[k] + m as f64)).exp())
                        .collect()
                })
                .collect()
        })
        .collect();
    let prefactors: Vec<Complex64> = terms
        .iter()
        .map(|t| t.coefficient * cone_prefactor(&t.cone))
        .collect();
    // <w_j, m + s> = <w_j, s> + <w_j, m>
    let base_pairs: Vec<Vec<Complex64>> = terms
        .iter()
        .map(|t| t.cone.generators().iter().map(|w| pair(w, &s.0)).collect())
        .collect();

    let stripes: Vec<Result<Stripe>> = (-r..=r)
        .into_par_iter()
        .map(|m0| {
            let mut acc = Stripe {
                per_term: vec![Complex64::new(0.0, 0.0); terms.len()],
                tail: 0.0,
                magnitude: 0.0,
            };
            let lo: Vec<i64> = std::iter::once(m0).chain(std::iter::repeat_n(-r, d - 1)).collect();
            let hi: Vec<i64> = std::iter::once(m0).chain(std::iter::repeat_n(r, d - 1)).collect();
            let mut failure = None;
            for_each_box_point(&lo, &hi, |m| {
                if failure.is_some() {
                    return;
                }
                let idx: Vec<usize> = m.iter().map(|&x| (x + r) as usize).collect();
                let mut kernel = Complex64::new(1.0, 0.0);
                for k in 0..d {
                    kernel *= kernel_table[k][idx[k]];
                }
                if kernel.norm() < 1e-300 {
                    return;
                }
                let on_shell = m.iter().any(|x| x.abs() == r);
                for (ti, term) in terms.iter().enumerate() {
                    let mut denom = Complex64::new(1.0, 0.0);
                    for (j, w) in term.cone.generators().iter().enumerate() {
                        let wm: f64 = w.iter().zip(m).map(|(a, &b)| a * b as f64).sum();
                        let pw = base_pairs[ti][j] + wm;
                        if pw.norm() < LATTICE_POLE_THRESHOLD {
                            failure = Some(Error::PoleHit {
                                generator: j,
                                distance: pw.norm(),
                                lattice_point: m.to_vec(),
                            });
                            return;
                        }
                        denom *= pw;
                    }
                    let mut phase = Complex64::new(1.0, 0.0);
                    for k in 0..d {
                        phase *= phase_tables[ti][k][idx[k]];
                    }
                    let value = prefactors[ti] * phase * kernel / denom;
                    acc.per_term[ti] += value;
                    let mag = value.norm();
                    acc.magnitude += mag;
                    if on_shell {
                        acc.tail += mag;
                    }
                }
            });
            match failure {
                Some(e) => Err(e),
                None => Ok(acc),
            }
        })
        .collect();

    let mut per_term = vec![Complex64::new(0.0, 0.0); terms.len()];
    let (mut tail, mut magnitude) = (0.0, 0.0);
    for stripe in stripes {
        let stripe = stripe?;
        for (acc, v) in per_term.iter_mut().zip(&stripe.per_term) {
            *acc += v;
        }
        tail += stripe.tail;
        magnitude += stripe.magnitude;
    }
    let value = per_term.iter().sum();
    Ok(DampedSum {
        value,
        per_term,
        tail,
        magnitude,
        radius: r as usize,
    })
}

/// What a direct-space sum runs over.
#[derive(Debug, Clone, Copy)]
pub enum Body<'a> {
    Cone(&'a SimpleCone),
    /// The dilate `t * polytope`.
    Polytope { polytope: &'a Polytope, t: f64 },
}

/// Direct-space sum with its accumulated quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSum {
    pub value: Complex64,
    pub error: f64,
}

/// `sum_{m} (1_body * phi_eps)(m) e^{2 pi i <s, m>}` over a box large enough
/// that dropped terms are negligible.
pub fn damped_direct_sum(
    body: Body<'_>,
    s: &ComplexPoint,
    cfg: &DampedSumConfig,
    eps: f64,
) -> Result<DirectSum> {
    if !(eps > 0.0) {
        return Err(Error::BadEpsilon(eps));
    }
    let d = s.dim();
    let reach = Kernel::new(cfg.p).vmax * eps.powf(1.0 / cfg.p);
    let (region, lo, hi): (Region, Vec<i64>, Vec<i64>) = match body {
        Body::Cone(k) => {
            check_cone_convergence(k, s)?;
            let decay = k
                .generators()
                .iter()
                .map(|w| pair(w, &s.0).im / crate::linalg::norm(w))
                .fold(f64::INFINITY, f64::min);
            // e^{-2 pi decay |m|} < 1e-16 beyond this distance from the apex
            let extent = (37.0 / (2.0 * PI * decay)).ceil() as i64 + 2;
            let extent = cfg
                .truncation_radius
                .map_or(extent, |r| r as i64);
            let lo = k.apex().iter().map(|a| a.floor() as i64 - extent).collect();
            let hi = k.apex().iter().map(|a| a.ceil() as i64 + extent).collect();
            (k.region().clone(), lo, hi)
        }
        Body::Polytope { polytope, t } => {
            let (blo, bhi) = polytope.bounding_box(t);
            let lo = blo.iter().map(|x| (x - reach).floor() as i64).collect();
            let hi = bhi.iter().map(|x| (x + reach).ceil() as i64).collect();
            (polytope.dilated_region(t), lo, hi)
        }
    };
    if region.dim != d {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: region.dim,
            got: d,
        });
    }
    let mut points = Vec::new();
    for_each_box_point(&lo, &hi, |m| points.push(m.to_vec()));
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let parts: Vec<Result<(Complex64, f64)>> = points
        .par_iter()
        .map(|m| {
            let x: Vec<f64> = m.iter().map(|&k| k as f64).collect();
            let (w, err) = smoothed_indicator(&region, &x, cfg.p, eps, DIRECT_TOL)?;
            if w == 0.0 {
                return Ok((Complex64::new(0.0, 0.0), 0.0));
            }
            let phase = (two_pi_i * pair(&x, &s.0)).exp();
            Ok((phase * w, err * phase.norm()))
        })
        .collect();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for part in parts {
        let (v, e) = part?;
        value += v;
        error += e;
    }
    Ok(DirectSum { value, error })
}

/// The direct series over a cone converges iff `<Im s, w_j> > 0` for every
/// generator, i.e. `-Im s` lies in the interior of the polar cone.
pub fn check_cone_convergence(k: &SimpleCone, s: &ComplexPoint) -> Result<()> {
    for (j, w) in k.generators().iter().enumerate() {
        let im = pair(w, &s.0).im;
        if !(im > 0.0) {
            return Err(Error::ConvergenceDomain(format!(
                "<Im s, w_{j}> = {im} is not positive"
            )));
        }
    }
    Ok(())
}

/// Evaluates `evaluate` on the schedule and extrapolates to `eps -> 0`.
pub fn extrapolate_eps(
    schedule: &[f64],
    evaluate: impl FnMut(f64) -> Result<Complex64>,
) -> Result<Extrapolated> {
    extrapolate::extrapolate(schedule, evaluate)
}

/// Lattice gap of a cone, measured over a box around its apex.
pub fn cone_gap(k: &SimpleCone) -> f64 {
    let lo: Vec<i64> = k.apex().iter().map(|a| a.floor() as i64 - 6).collect();
    let hi: Vec<i64> = k.apex().iter().map(|a| a.ceil() as i64 + 6).collect();
    polytope::region_gap(k.region(), &lo, &hi)
}

/// `alpha_K(s)`: the transform-space sum of one cone, extrapolated.
pub fn alpha_cone(k: &SimpleCone, s: &ComplexPoint, cfg: &DampedSumConfig) -> Result<Extrapolated> {
    let schedule = cfg.schedule_for(cone_gap(k), k.dim());
    let terms = [ConeSumTerm::new(1.0, k.clone())];
    extrapolate_eps(&schedule, |eps| Ok(damped_transform_sum(&terms, s, cfg, eps)?.value))
}

/// `alpha_P(s)` from lattice points with solid-angle weights (finite sum).
pub fn alpha_polytope_direct(
    p: &Polytope,
    s: &ComplexPoint,
    power: f64,
) -> Result<crate::oracle::AlphaResult> {
    crate::oracle::alpha_oracle(p, 1.0, s, power, crate::oracle::OracleMethod::Auto, crate::oracle::DEFAULT_ORACLE_SAMPLES, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrant() -> SimpleCone {
        SimpleCone::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn s0() -> ComplexPoint {
        ComplexPoint::new(vec![Complex64::new(0.3, 0.2), Complex64::new(-0.1, 0.4)])
    }

    #[test]
    fn opposite_terms_cancel() {
        let cfg = DampedSumConfig::new(2.0).unwrap();
        let terms = [ConeSumTerm::new(1.0, quadrant()), ConeSumTerm::new(-1.0, quadrant())];
        let r = damped_transform_sum(&terms, &s0(), &cfg, 0.1).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn large_eps_is_dominated_by_origin() {
        let cfg = DampedSumConfig::new(2.0).unwrap();
        let terms = [ConeSumTerm::new(1.0, quadrant())];
        let r = damped_transform_sum(&terms, &s0(), &cfg, 10.0).unwrap();
        assert!(r.tail < 1e-12);
        let origin = crate::transforms::cone_transform(&quadrant(), &s0()).unwrap()
            * crate::transforms::phi_hat(&cfg, 10.0, &s0()).unwrap();
        assert!((r.value - origin).norm() < 1e-3 * origin.norm());
    }

    #[test]
    fn transform_and_direct_agree_for_quadrant() {
        let cfg = DampedSumConfig::new(2.0).unwrap();
        let terms = [ConeSumTerm::new(1.0, quadrant())];
        let a = damped_transform_sum(&terms, &s0(), &cfg, 0.05).unwrap();
        let b = damped_direct_sum(Body::Cone(&quadrant()), &s0(), &cfg, 0.05).unwrap();
        assert!((a.value - b.value).norm() < 1e-6, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn convergence_domain() {
        let cfg = DampedSumConfig::new(2.0).unwrap();
        let real = ComplexPoint::real(&[0.3, 0.1]);
        assert!(matches!(
            damped_direct_sum(Body::Cone(&quadrant()), &real, &cfg, 0.1),
            Err(Error::ConvergenceDomain(_))
        ));
    }

    #[test]
    fn pole_reports_lattice_point() {
        let cfg = DampedSumConfig::new(2.0).unwrap().with_radius(3).unwrap();
        let terms = [ConeSumTerm::new(1.0, quadrant())];
        let s = ComplexPoint::real(&[0.0, 0.5]);
        match damped_transform_sum(&terms, &s, &cfg, 0.1) {
            Err(Error::PoleHit { generator, lattice_point, .. }) => {
                assert_eq!(generator, 0);
                assert_eq!(lattice_point[0], 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tails_shrink_with_radius() {
        let terms = [ConeSumTerm::new(1.0, quadrant())];
        let tails: Vec<f64> = [4, 8, 12]
            .iter()
            .map(|&r| {
                let cfg = DampedSumConfig::new(2.0).unwrap().with_radius(r).unwrap();
                damped_transform_sum(&terms, &s0(), &cfg, 0.1).unwrap().tail
            })
            .collect();
        assert!(tails[1] < 0.1 * tails[0] && tails[2] < 0.1 * tails[1], "{tails:?}");
    }
}

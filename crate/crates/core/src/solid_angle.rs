//! Solid angles `omega_{p,K}(x)`: exact planar formulas, uniform sampling of
//! l^p balls, and the Gaussian-limit estimator with extrapolation in eps.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::Serialize;

use crate::cone::SimpleCone;
use crate::error::{Error, Result};
use crate::extrapolate::validate_schedule;
use crate::linalg::{dot, norm};
use crate::polytope::{Polytope, BOUNDARY_TOL};
use crate::quadrature::norm_constant;
use crate::region::Membership;

/// Samples per independently seeded chunk; fixes the stream layout so that
/// results do not depend on the number of worker threads.
const CHUNK: usize = 4096;

pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Exact2D,
    MonteCarloBall,
    GaussianLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolidAngleEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
}

fn exact(value: f64) -> SolidAngleEstimate {
    SolidAngleEstimate {
        value,
        std_error: 0.0,
        method: Method::Exact2D,
    }
}

fn check_planar_pair(generators: &[Vec<f64>]) -> Result<(f64, f64)> {
    if generators.len() != 2 || generators.iter().any(|g| g.len() != 2) {
        return Err(Error::UnsupportedDimension(
            generators.first().map_or(0, Vec::len),
        ));
    }
    let (a, b) = (&generators[0], &generators[1]);
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateCone("zero generator".into()));
    }
    let cross = a[0] * b[1] - a[1] * b[0];
    if cross.abs() <= 1e-12 * na * nb {
        return if dot(a, b) < 0.0 {
            Err(Error::NotPointed)
        } else {
            Err(Error::DegenerateCone("parallel generators".into()))
        };
    }
    Ok((na, nb))
}

/// Planar angle between the generators over `2 pi` (p = 2).
pub fn solid_angle_exact_2d(generators: &[Vec<f64>]) -> Result<SolidAngleEstimate> {
    let (na, nb) = check_planar_pair(generators)?;
    let cos = (dot(&generators[0], &generators[1]) / (na * nb)).clamp(-1.0, 1.0);
    Ok(exact(cos.acos() / (2.0 * PI)))
}

/// Share of the l1 unit diamond inside the cone (p = 1), by polygon clipping.
pub fn solid_angle_exact_2d_l1(generators: &[Vec<f64>]) -> Result<SolidAngleEstimate> {
    check_planar_pair(generators)?;
    let (a, b) = (&generators[0], &generators[1]);
    let orientation = (a[0] * b[1] - a[1] * b[0]).signum();
    let diamond = vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    // Inside when orientation * det(a, x) >= 0 and orientation * det(x, b) >= 0.
    let clipped = clip(&diamond, |x| orientation * (a[0] * x[1] - a[1] * x[0]));
    let clipped = clip(&clipped, |x| orientation * (x[0] * b[1] - x[1] * b[0]));
    Ok(exact(polygon_area(&clipped) / 2.0))
}

/// Sutherland-Hodgman step keeping `{x : f(x) >= 0}` for a linear `f`.
fn clip(poly: &[[f64; 2]], f: impl Fn(&[f64; 2]) -> f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fp, fq) = (f(&p), f(&q));
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp >= 0.0) != (fq >= 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum();
    twice.abs() / 2.0
}

/// Draws a point uniformly from the unit l^p ball.
fn sample_lp_ball(rng: &mut impl Rng, gamma: &Gamma<f64>, p: f64, out: &mut [f64]) {
    let mut s: f64 = Exp1.sample(rng);
    for y in out.iter_mut() {
        let g: f64 = gamma.sample(rng);
        let mag = g.powf(1.0 / p);
        *y = if rng.random::<bool>() { mag } else { -mag };
        s += mag.powf(p);
    }
    let r = s.powf(-1.0 / p);
    for y in out.iter_mut() {
        *y *= r;
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunks(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(CHUNK))
        .map(|c| (c, CHUNK.min(n - c * CHUNK)))
        .collect()
}

/// Fraction of the l^p ball of radius `eps` at `x` lying in `body`.
pub fn solid_angle_mc(
    body: &dyn Membership,
    x: &[f64],
    p: f64,
    eps: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SolidAngleEstimate> {
    if !(eps > 0.0) {
        return Err(Error::BadEpsilon(eps));
    }
    check_p(p)?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    if x.len() != body.dim() {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: body.dim(),
            got: x.len(),
        });
    }
    let d = x.len();
    let gamma = Gamma::new(1.0 / p, 1.0).expect("valid shape");
    let hits: usize = chunks(n_samples)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut u = vec![0.0; d];
            let mut y = vec![0.0; d];
            let mut count = 0usize;
            for _ in 0..len {
                sample_lp_ball(&mut rng, &gamma, p, &mut u);
                for k in 0..d {
                    y[k] = x[k] + eps * u[k];
                }
                if body.contains(&y) {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let f = hits as f64 / n_samples as f64;
    Ok(SolidAngleEstimate {
        value: f,
        std_error: (f * (1.0 - f) / n_samples as f64).sqrt(),
        method: Method::MonteCarloBall,
    })
}

/// Half the distance from `x` to the nearest facet hyperplane not through `x`.
pub fn default_ball_radius(p: &Polytope, x: &[f64]) -> f64 {
    let r = p
        .facets()
        .iter()
        .map(|f| f.halfspace.slack(x).abs())
        .filter(|s| *s > BOUNDARY_TOL)
        .fold(f64::INFINITY, f64::min);
    if r.is_finite() {
        0.5 * r
    } else {
        1.0
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must be a finite real >= 1, got {p}")))
    }
}

/// Gaussian-limit estimate: `P(x + eps^(1/p) U in K)` with i.i.d. kernel
/// coordinates `U`, on every schedule level with common random numbers,
/// extrapolated to `eps -> 0` by order-1 Richardson on the last pair.
pub fn solid_angle_gaussian(
    cone: &SimpleCone,
    x: &[f64],
    p: f64,
    eps_schedule: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<SolidAngleEstimate> {
    validate_schedule(eps_schedule)?;
    check_p(p)?;
    if n_samples < 2 {
        return Err(Error::InvalidParameter("n_samples must be >= 2".into()));
    }
    let d = cone.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: d,
            got: x.len(),
        });
    }
    let levels = eps_schedule.len();
    let steps: Vec<f64> = eps_schedule.iter().map(|e| e.powf(1.0 / p)).collect();
    let (e0, e1) = (eps_schedule[levels - 2], eps_schedule[levels - 1]);
    let (a_prev, a_last) = (-e1 / (e0 - e1), e0 / (e0 - e1));
    let c = norm_constant(p);
    let gamma = Gamma::new(1.0 / p, 1.0).expect("valid shape");

    struct Acc {
        hits: Vec<usize>,
        y_sum: f64,
        y_sq: f64,
    }
    let parts: Vec<Acc> = chunks(n_samples)
        .into_par_iter()
        .map(|(ci, len)| {
            let mut rng = chunk_rng(seed, ci);
            let mut u = vec![0.0; d];
            let mut y = vec![0.0; d];
            let mut acc = Acc {
                hits: vec![0; levels],
                y_sum: 0.0,
                y_sq: 0.0,
            };
            let mut inside = vec![false; levels];
            for _ in 0..len {
                for uk in u.iter_mut() {
                    let g: f64 = gamma.sample(&mut rng);
                    let mag = (g / c).powf(1.0 / p);
                    *uk = if rng.random::<bool>() { mag } else { -mag };
                }
                for (k, h) in steps.iter().enumerate() {
                    for j in 0..d {
                        y[j] = x[j] + h * u[j];
                    }
                    inside[k] = cone.contains(&y);
                    acc.hits[k] += usize::from(inside[k]);
                }
                let yv = a_prev * f64::from(u8::from(inside[levels - 2]))
                    + a_last * f64::from(u8::from(inside[levels - 1]));
                acc.y_sum += yv;
                acc.y_sq += yv * yv;
            }
            acc
        })
        .collect();

    let n = n_samples as f64;
    let mut hits = vec![0usize; levels];
    let (mut y_sum, mut y_sq) = (0.0, 0.0);
    for part in &parts {
        for k in 0..levels {
            hits[k] += part.hits[k];
        }
        y_sum += part.y_sum;
        y_sq += part.y_sq;
    }
    let means: Vec<f64> = hits.iter().map(|&h| h as f64 / n).collect();
    let extrapolants: Vec<f64> = eps_schedule
        .windows(2)
        .zip(means.windows(2))
        .map(|(e, f)| (e[0] * f[1] - e[1] * f[0]) / (e[0] - e[1]))
        .collect();
    let value = extrapolants[extrapolants.len() - 1];
    let residual = if extrapolants.len() >= 2 {
        (value - extrapolants[extrapolants.len() - 2]).abs()
    } else {
        (value - means[levels - 1]).abs()
    };
    let y_mean = y_sum / n;
    let y_var = ((y_sq / n - y_mean * y_mean) * n / (n - 1.0)).max(0.0);
    let mc = (y_var / n).sqrt();
    Ok(SolidAngleEstimate {
        value: value.clamp(0.0, 1.0),
        std_error: (mc * mc + residual * residual).sqrt(),
        method: Method::GaussianLimit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extrapolate::geometric_schedule;
    use crate::polytope::load_polytope;

    fn quadrant() -> SimpleCone {
        SimpleCone::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn exact_fixtures() {
        let s3 = 3f64.sqrt();
        let q = solid_angle_exact_2d(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(q.value, 0.25);
        let v2 = solid_angle_exact_2d(&[vec![0.0, -1.0], vec![s3, -1.0]]).unwrap();
        assert!((v2.value - 1.0 / 6.0).abs() < 1e-15);
        let v3 = solid_angle_exact_2d(&[vec![-1.0, 0.0], vec![-s3, 1.0]]).unwrap();
        assert!((v3.value - 1.0 / 12.0).abs() < 1e-15);
        assert!(matches!(
            solid_angle_exact_2d(&[vec![1.0, 1.0], vec![2.0, 2.0]]),
            Err(Error::DegenerateCone(_))
        ));
    }

    #[test]
    fn l1_fixtures() {
        let q = solid_angle_exact_2d_l1(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((q.value - 0.25).abs() < 1e-15);
        let w = solid_angle_exact_2d_l1(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!((w.value - 0.125).abs() < 1e-15);
        // Same cone, generators swapped and rescaled.
        let w2 = solid_angle_exact_2d_l1(&[vec![3.0, 3.0], vec![0.5, 0.0]]).unwrap();
        assert!((w2.value - 0.125).abs() < 1e-15);
        assert_eq!(
            solid_angle_exact_2d_l1(&[vec![1.0, 0.0], vec![-1.0, 0.0]]),
            Err(Error::NotPointed)
        );
        let s3 = 3f64.sqrt();
        let v2 = solid_angle_exact_2d_l1(&[vec![0.0, -1.0], vec![s3, -1.0]]).unwrap();
        assert!((v2.value - (3.0 - s3) / 8.0).abs() < 1e-15);
    }

    #[test]
    fn mc_interior_and_symmetry() {
        let sq = load_polytope(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let inner = solid_angle_mc(&sq, &[0.5, 0.5], 2.0, 0.1, 1000, 1).unwrap();
        assert_eq!((inner.value, inner.std_error), (1.0, 0.0));
        for p in [1.0, 2.0, 3.5] {
            let q = solid_angle_mc(&quadrant(), &[0.0, 0.0], p, 1.0, 40_000, 3).unwrap();
            assert!((q.value - 0.25).abs() < 3.0 * q.std_error, "p = {p}: {q:?}");
            let f = solid_angle_mc(&sq, &[0.5, 0.0], p, 0.2, 40_000, 5).unwrap();
            assert!((f.value - 0.5).abs() < 3.0 * f.std_error, "p = {p}: {f:?}");
        }
    }

    #[test]
    fn mc_is_reproducible() {
        let a = solid_angle_mc(&quadrant(), &[0.0, 0.0], 2.0, 1.0, 10_000, 9).unwrap();
        let b = solid_angle_mc(&quadrant(), &[0.0, 0.0], 2.0, 1.0, 10_000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(solid_angle_mc(&quadrant(), &[0.0, 0.0], 2.0, 0.0, 10, 9), Err(Error::BadEpsilon(0.0)));
    }

    #[test]
    fn gaussian_limit_fixtures() {
        let sched = geometric_schedule(0.5, 6);
        for p in [1.0, 2.0] {
            let q = solid_angle_gaussian(&quadrant(), &[0.0, 0.0], p, &sched, 40_000, 1).unwrap();
            assert!((q.value - 0.25).abs() < 3.0 * q.std_error, "p = {p}: {q:?}");
        }
        let s3 = 3f64.sqrt();
        let k = SimpleCone::new(vec![0.0, 1.0], vec![vec![0.0, -1.0], vec![s3, -1.0]]).unwrap();
        let g = solid_angle_gaussian(&k, &[0.0, 1.0], 2.0, &sched, 40_000, 2).unwrap();
        assert!((g.value - 1.0 / 6.0).abs() < 3.0 * g.std_error, "{g:?}");
        assert_eq!(
            solid_angle_gaussian(&k, &[0.0, 1.0], 2.0, &[0.1], 10, 2),
            Err(Error::ScheduleTooShort(1))
        );
    }

    #[test]
    fn gaussian_limit_away_from_apex() {
        // A point on the boundary ray, one unit from the apex: half-plane locally.
        let sched = geometric_schedule(0.5, 8);
        let g = solid_angle_gaussian(&quadrant(), &[1.0, 0.0], 2.0, &sched, 40_000, 4).unwrap();
        assert!((g.value - 0.5).abs() < 3.0 * g.std_error + 1e-3, "{g:?}");
    }
}

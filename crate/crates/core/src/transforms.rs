//! The damping kernel `phi_eps`, its Fourier transform at complex arguments,
//! and the Fourier-Laplace transform of shifted simple cones.
//!
//! Conventions: `f^(z) = \int e^{2 pi i <x, z>} f(x) dx` with the bilinear
//! pairing `<a, z> = sum a_k z_k` (never conjugated).

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::cone::SimpleCone;
use crate::error::{Error, Result};
use crate::extrapolate::{adaptive_schedule, geometric_schedule, validate_schedule};
use crate::quadrature::{gauss_legendre, norm_constant};

/// Threshold on `|<w_j, z>|` below which a cone transform is a pole.
pub const POLE_THRESHOLD: f64 = 1e-14;

/// A point of complex d-space.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint(pub Vec<Complex64>);

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        ComplexPoint(coords)
    }

    pub fn real(x: &[f64]) -> Self {
        ComplexPoint(x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(d: usize) -> Self {
        ComplexPoint(vec![Complex64::new(0.0, 0.0); d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn neg(&self) -> Self {
        ComplexPoint(self.0.iter().map(|z| -z).collect())
    }

    pub fn scale(&self, k: f64) -> Self {
        ComplexPoint(self.0.iter().map(|z| z * k).collect())
    }

    /// `self + m` for an integer vector `m`.
    pub fn shifted(&self, m: &[i64]) -> Self {
        ComplexPoint(self.0.iter().zip(m).map(|(z, &k)| z + k as f64).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Parses comma-separated components in `re+imi` form, e.g.
    /// `"0.3+0.2i,-0.1+0.4i"`; bare reals and bare imaginaries are accepted.
    pub fn parse(src: &str) -> Result<Self> {
        let coords = src
            .split(',')
            .map(|part| parse_complex(part.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ComplexPoint(coords))
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|z| format_complex(*z)).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `re+imi` rendering used by the CLI.
pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn parse_complex(src: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex number '{src}' (expected re+imi)"));
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    let number = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let z = match split {
        Some(k) => Complex64::new(
            body[..k].parse::<f64>().map_err(|_| bad())?,
            number(&body[k..])?,
        ),
        None => Complex64::new(0.0, number(body)?),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

/// Bilinear pairing of a real vector with a complex one.
pub fn pair(a: &[f64], z: &[Complex64]) -> Complex64 {
    a.iter().zip(z).map(|(x, w)| w * *x).sum()
}

/// How the damping parameters are chosen for a given problem.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsSchedule {
    /// Exactly these values, strictly decreasing.
    Fixed(Vec<f64>),
    /// Halving from `eps0`, at least `min_levels` levels, extended until the
    /// lattice geometry says the smoothed sum has settled.
    Adaptive { eps0: f64, min_levels: usize },
}

/// Everything that controls an infinite damped sum.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedSumConfig {
    pub p: f64,
    pub c: f64,
    pub schedule: EpsSchedule,
    /// Sup-norm lattice cutoff; `None` picks `max(30, ceil(6 / sqrt(pi eps)))`.
    pub truncation_radius: Option<usize>,
    /// Half-width of the real-space window for general-p transforms;
    /// `None` sizes it from the tail bound.
    pub quad_halfwidth: Option<f64>,
    /// Gauss-Legendre nodes per panel for general-p transforms.
    pub quad_points: usize,
}

impl Default for DampedSumConfig {
    fn default() -> Self {
        DampedSumConfig {
            p: 2.0,
            c: PI,
            schedule: EpsSchedule::Adaptive {
                eps0: 0.5,
                min_levels: 6,
            },
            truncation_radius: None,
            quad_halfwidth: None,
            quad_points: 32,
        }
    }
}

impl DampedSumConfig {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must be a finite real >= 1, got {p}")));
        }
        Ok(DampedSumConfig {
            p,
            c: norm_constant(p),
            ..Default::default()
        })
    }

    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Result<Self> {
        validate_schedule(&schedule)?;
        self.schedule = EpsSchedule::Fixed(schedule);
        Ok(self)
    }

    pub fn with_radius(mut self, radius: usize) -> Result<Self> {
        if radius < 1 {
            return Err(Error::InvalidParameter("truncation radius must be >= 1".into()));
        }
        self.truncation_radius = Some(radius);
        Ok(self)
    }

    /// Lattice cutoff for a given damping parameter.
    pub fn radius(&self, eps: f64) -> usize {
        self.truncation_radius
            .unwrap_or_else(|| ((6.0 / (PI * eps).sqrt()).ceil() as usize).max(30))
    }

    /// Concrete schedule for a problem whose nearest lattice point to an
    /// unrelated boundary piece sits at distance `gap`.
    pub fn schedule_for(&self, gap: f64, dim: usize) -> Vec<f64> {
        match &self.schedule {
            EpsSchedule::Fixed(s) => s.clone(),
            EpsSchedule::Adaptive { eps0, min_levels } => {
                let target = if gap.is_finite() && gap > 0.0 {
                    if self.p == 2.0 {
                        PI * gap * gap / 23.0
                    } else {
                        self.c * (gap / (dim as f64).sqrt()).powf(self.p) / 23.0
                    }
                } else {
                    *eps0
                };
                adaptive_schedule(*eps0, *min_levels, target, eps_floor(dim))
            }
        }
    }

    /// The schedule when no geometry is known.
    pub fn default_schedule(&self) -> Vec<f64> {
        match &self.schedule {
            EpsSchedule::Fixed(s) => s.clone(),
            EpsSchedule::Adaptive { eps0, min_levels } => geometric_schedule(*eps0, *min_levels),
        }
    }
}

/// Smallest damping parameter the adaptive schedule will use in dimension `d`
/// (bounds the lattice box at a few million points).
pub fn eps_floor(dim: usize) -> f64 {
    match dim {
        0 | 1 => 1e-6,
        2 => 2e-5,
        3 => 6e-4,
        _ => 1e-2,
    }
}

/// `phi_eps(t) = eps^(-d/p) exp(-(c/eps) ||t||_p^p)`.
pub fn phi(cfg: &DampedSumConfig, eps: f64, t: &[f64]) -> f64 {
    let d = t.len() as f64;
    let s: f64 = t.iter().map(|x| x.abs().powf(cfg.p)).sum();
    eps.powf(-d / cfg.p) * (-(cfg.c / eps) * s).exp()
}

/// Fourier transform of `phi_eps` at a complex point (mass one, so 1 at 0).
pub fn phi_hat(cfg: &DampedSumConfig, eps: f64, z: &ComplexPoint) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::BadEpsilon(eps));
    }
    let mut out = Complex64::new(1.0, 0.0);
    for &zk in z.coords() {
        out *= phi_hat_1d(cfg, eps, zk)?;
    }
    Ok(out)
}

/// One coordinate factor of `phi_hat`.
pub fn phi_hat_1d(cfg: &DampedSumConfig, eps: f64, z: Complex64) -> Result<Complex64> {
    if cfg.p == 2.0 {
        Ok((-PI * eps * z * z).exp())
    } else if cfg.p == 1.0 {
        if z.im.abs() * PI * eps >= 1.0 {
            return Err(Error::ConvergenceDomain(format!(
                "|Im z| = {} reaches the strip edge 1/(pi eps) for p = 1",
                z.im.abs()
            )));
        }
        Ok(1.0 / (1.0 + PI * PI * eps * eps * z * z))
    } else {
        phi_hat_1d_quadrature(cfg, eps, z)
    }
}

/// `2 \int_0^U cos(2 pi z h u) e^{-c u^p} du` with `h = eps^(1/p)`, on panels
/// graded geometrically toward the origin (where `u^p` is not smooth).
pub fn phi_hat_1d_quadrature(cfg: &DampedSumConfig, eps: f64, z: Complex64) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::BadEpsilon(eps));
    }
    let (p, c) = (cfg.p, cfg.c);
    let h = eps.powf(1.0 / p);
    let growth = 2.0 * PI * z.im.abs() * h;
    // log of the integrand envelope e^{-c u^p + growth u}
    let log_env = |u: f64| -c * u.powf(p) + growth * u;
    let upper = match cfg.quad_halfwidth {
        Some(l) => l / h,
        None => {
            let mut u = (36.0 / c).powf(1.0 / p).max(1.0);
            while log_env(u) > -36.0 || growth >= c * p * u.powf(p - 1.0) {
                u *= 1.25;
                if u > 1e6 {
                    return Err(Error::QuadratureUnderResolved(f64::INFINITY));
                }
            }
            u
        }
    };
    let slope = c * p * upper.powf(p - 1.0) - growth;
    let tail = if slope > 0.0 {
        2.0 * log_env(upper).exp() / slope
    } else {
        f64::INFINITY
    };
    if tail > 1e-12 {
        return Err(Error::QuadratureUnderResolved(tail));
    }

    let (nodes, weights) = gauss_legendre(cfg.quad_points.max(4));
    let mut edges = vec![0.0];
    for k in (0..24).rev() {
        edges.push(upper * 0.5f64.powi(k + 1));
    }
    edges.push(upper);
    let omega = 2.0 * PI * z * h;
    let waves_per_unit = omega.norm() / (2.0 * PI);
    let mut sum = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        let pieces = ((w[1] - w[0]) * waves_per_unit / 2.0).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / pieces as f64;
        for j in 0..pieces {
            let a = w[0] + j as f64 * step;
            let half = 0.5 * step;
            let mid = a + half;
            for (x, wt) in nodes.iter().zip(&weights) {
                let u = mid + half * x;
                sum += (omega * u).cos() * ((-c * u.powf(p)).exp() * wt * half);
            }
        }
    }
    Ok(sum * 2.0)
}

/// `(-2 pi i)^(-d) |det K| e^{2 pi i <apex, z>} / prod_j <w_j, z>`.
pub fn cone_transform(k: &SimpleCone, z: &ComplexPoint) -> Result<Complex64> {
    if z.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: k.dim(),
            got: z.dim(),
        });
    }
    let mut denom = Complex64::new(1.0, 0.0);
    for (j, w) in k.generators().iter().enumerate() {
        let pw = pair(w, z.coords());
        if pw.norm() < POLE_THRESHOLD {
            return Err(Error::PoleHit {
                generator: j,
                distance: pw.norm(),
                lattice_point: Vec::new(),
            });
        }
        denom *= pw;
    }
    let phase = (Complex64::new(0.0, 2.0 * PI) * pair(k.apex(), z.coords())).exp();
    Ok(cone_prefactor(k) * phase / denom)
}

/// `(-2 pi i)^(-d) |det K|`.
pub fn cone_prefactor(k: &SimpleCone) -> Complex64 {
    Complex64::new(0.0, -2.0 * PI).powi(-(k.dim() as i32)) * k.det().abs()
}

/// Smallest `|<w_j, z>|` over all cones and generators.
pub fn pole_distance(cones: &[SimpleCone], z: &ComplexPoint) -> f64 {
    cones
        .iter()
        .flat_map(|k| k.generators().iter())
        .map(|w| pair(w, z.coords()).norm())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn quadrant() -> SimpleCone {
        SimpleCone::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn parse_complex_forms() {
        assert_eq!(parse_complex("0.3+0.2i").unwrap(), Complex64::new(0.3, 0.2));
        assert_eq!(parse_complex("-0.1-0.4i").unwrap(), Complex64::new(-0.1, -0.4));
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e-2i").unwrap(), Complex64::new(1e-3, 2e-2));
        assert_eq!(parse_complex("0.5i").unwrap(), Complex64::new(0.0, 0.5));
        assert!(parse_complex("abc").is_err());
        let s = ComplexPoint::parse("0.3+0.2i,-0.1+0.4i").unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(ComplexPoint::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn phi_basics() {
        let cfg = DampedSumConfig::new(2.0).unwrap();
        assert_eq!(phi(&cfg, 1.0, &[0.0, 0.0]), 1.0);
        assert_eq!(phi(&cfg, 0.3, &[0.2, -0.7]), phi(&cfg, 0.3, &[-0.2, 0.7]));
    }

    #[test]
    fn phi_has_unit_mass() {
        for p in [1.0, 2.0, 3.0] {
            let cfg = DampedSumConfig::new(p).unwrap();
            let (m, _) = integrate(|t| phi(&cfg, 0.2, &[t]), -20.0, 20.0, &[0.0], 1e-13);
            assert!((m - 1.0).abs() < 1e-10, "p = {p}: {m}");
        }
    }

    #[test]
    fn phi_hat_at_zero_is_one() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let cfg = DampedSumConfig::new(p).unwrap();
            for eps in cfg.default_schedule() {
                let v = phi_hat(&cfg, eps, &ComplexPoint::zeros(2)).unwrap();
                assert!((v - 1.0).norm() < 1e-10, "p = {p}, eps = {eps}: {v}");
            }
        }
    }

    #[test]
    fn quadrature_matches_gaussian_closed_form() {
        let cfg = DampedSumConfig::new(2.0).unwrap();
        for eps in [0.5, 0.1, 0.02] {
            for re in [-3.0, -0.7, 0.0, 0.4, 2.5] {
                for im in [-1.0, -0.3, 0.0, 0.6, 1.0] {
                    let z = Complex64::new(re, im);
                    let a = phi_hat_1d(&cfg, eps, z).unwrap();
                    let b = phi_hat_1d_quadrature(&cfg, eps, z).unwrap();
                    assert!((a - b).norm() < 1e-10, "eps {eps} z {z}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn quadrature_matches_laplace_closed_form() {
        let cfg = DampedSumConfig::new(1.0).unwrap();
        for z in [Complex64::new(0.3, 0.0), Complex64::new(1.2, 0.4)] {
            let a = phi_hat_1d(&cfg, 0.1, z).unwrap();
            let b = phi_hat_1d_quadrature(&cfg, 0.1, z).unwrap();
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn phi_hat_is_even() {
        for p in [1.5, 2.0, 3.0] {
            let cfg = DampedSumConfig::new(p).unwrap();
            let z = ComplexPoint::new(vec![Complex64::new(0.7, 0.3), Complex64::new(-1.1, 0.5)]);
            let a = phi_hat(&cfg, 0.05, &z).unwrap();
            let b = phi_hat(&cfg, 0.05, &z.neg()).unwrap();
            assert!((a - b).norm() < 1e-14, "p = {p}");
        }
    }

    #[test]
    fn gaussian_self_transform() {
        let cfg = DampedSumConfig::new(2.0).unwrap();
        let v = phi_hat(&cfg, 0.1, &ComplexPoint::real(&[1.0, 2.0])).unwrap();
        assert!((v.re - (-PI * 0.1 * 5.0).exp()).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn quadrant_transform_at_i_i() {
        let z = ComplexPoint::new(vec![Complex64::new(0.0, 1.0); 2]);
        let v = cone_transform(&quadrant(), &z).unwrap();
        assert!((v - Complex64::new(1.0 / (4.0 * PI * PI), 0.0)).norm() < 1e-16);
    }

    #[test]
    fn apex_shift_multiplies_phase() {
        let z = ComplexPoint::new(vec![Complex64::new(0.3, 0.2), Complex64::new(-0.1, 0.4)]);
        let k = quadrant();
        let v = vec![0.5, 2f64.sqrt()];
        let shifted = k.with_apex(v.clone());
        let ratio = cone_transform(&shifted, &z).unwrap() / cone_transform(&k, &z).unwrap();
        let expect = (Complex64::new(0.0, 2.0 * PI) * pair(&v, z.coords())).exp();
        assert!((ratio - expect).norm() < 1e-14);
    }

    #[test]
    fn pole_is_reported() {
        let z = ComplexPoint::real(&[0.0, 1.0]);
        match cone_transform(&quadrant(), &z) {
            Err(Error::PoleHit { generator, .. }) => assert_eq!(generator, 0),
            other => panic!("{other:?}"),
        }
        assert_eq!(pole_distance(&[quadrant()], &ComplexPoint::real(&[1.0, 1.0])), 1.0);
        assert_eq!(pole_distance(&[quadrant()], &ComplexPoint::real(&[1.0, 0.0])), 0.0);
    }

    #[test]
    fn homogeneity() {
        let k = quadrant();
        let z = ComplexPoint::new(vec![Complex64::new(0.3, 0.2), Complex64::new(-0.1, 0.4)]);
        for lambda in [-2.0, 0.5, 3.0] {
            let a = cone_transform(&k, &z.scale(lambda)).unwrap();
            let b = cone_transform(&k, &z).unwrap() * lambda.powi(-2);
            assert!((a - b).norm() < 1e-13 * b.norm());
        }
    }

    #[test]
    fn config_validation() {
        assert!(DampedSumConfig::new(0.5).is_err());
        assert!((DampedSumConfig::new(2.0).unwrap().c - PI).abs() < 1e-14);
        let cfg = DampedSumConfig::new(2.0).unwrap();
        assert_eq!(cfg.radius(0.5), 30);
        assert_eq!(cfg.radius(1e-3), 108);
        assert!(cfg.clone().with_schedule(vec![0.1]).is_err());
        assert!(cfg.with_radius(0).is_err());
    }
}

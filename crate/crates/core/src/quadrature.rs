//! Quadrature rules and the smoothed indicator `(1_R * phi_eps)(x)`.
//!
//! The convolution of a polyhedral region with the product damping kernel is
//! the probability that `x + eps^(1/p) U` lands in the region, where `U` has
//! i.i.d. coordinates with density `exp(-c|u|^p)`. We integrate the outer
//! coordinates with adaptive Gauss-Kronrod and the innermost one exactly
//! through the kernel's distribution function.

use std::collections::BinaryHeap;

use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};
use crate::linalg;
use crate::region::Region;

/// Normalizing constant `c = (2 Gamma(1/p + 1))^p`.
pub fn norm_constant(p: f64) -> f64 {
    if p == 2.0 {
        std::f64::consts::PI
    } else if p == 1.0 {
        2.0
    } else {
        (2.0 * gamma(1.0 / p + 1.0)).powf(p)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) over `[a, b]` split first at the
/// given interior breakpoints. Returns (integral, error estimate).
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
) -> (f64, f64) {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let (value, err) = gk15(&mut f, w[0], w[1]);
        total_err += err;
        heap.push(Piece {
            a: w[0],
            b: w[1],
            value,
            err,
        });
    }
    let mut evaluations = heap.len();
    while total_err > abs_tol && evaluations < 4000 {
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total_err += e1 + e2 - worst.err;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        evaluations += 2;
    }
    // Re-sum to shed accumulated update roundoff.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let err: f64 = heap.iter().map(|p| p.err).sum();
    (value, err)
}

/// One-dimensional damping kernel `exp(-c|u|^p)` (unit mass) and its tails.
#[derive(Debug, Clone, Copy)]
pub struct Kernel {
    pub p: f64,
    pub c: f64,
    /// Half-width beyond which the one-sided tail mass is below 1e-17.
    pub vmax: f64,
}

impl Kernel {
    pub fn new(p: f64) -> Self {
        let c = norm_constant(p);
        Kernel {
            p,
            c,
            vmax: (40.0 / c).powf(1.0 / p),
        }
    }

    pub fn density(&self, u: f64) -> f64 {
        (-self.c * u.abs().powf(self.p)).exp()
    }

    /// Upper tail `P(U > v)` for `v >= 0`.
    pub fn upper_tail(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.5;
        }
        if v.is_infinite() {
            return 0.0;
        }
        // statrs' erfc is only good to ~1e-10; the incomplete gamma is not.
        if self.p == 1.0 {
            0.5 * (-2.0 * v).exp()
        } else {
            0.5 * gamma_ur(1.0 / self.p, self.c * v.powf(self.p))
        }
    }

    /// `P(lo < U < hi)`, evaluated through tails to keep relative accuracy.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        if lo >= 0.0 {
            self.upper_tail(lo) - self.upper_tail(hi)
        } else if hi <= 0.0 {
            self.upper_tail(-hi) - self.upper_tail(-lo)
        } else {
            1.0 - self.upper_tail(-lo) - self.upper_tail(hi)
        }
    }
}

/// `(1_R * phi_eps)(x)`: the damped indicator of a polyhedral region.
/// Returns (value, quadrature error estimate).
pub fn smoothed_indicator(region: &Region, x: &[f64], p: f64, eps: f64, tol: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0) {
        return Err(Error::BadEpsilon(eps));
    }
    if region.dim != x.len() {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: region.dim,
            got: x.len(),
        });
    }
    let kernel = Kernel::new(p);
    let h = eps.powf(1.0 / p);
    let constraints: Vec<(Vec<f64>, f64)> = region
        .halfspaces
        .iter()
        .map(|hs| (hs.normal.clone(), hs.slack(x) / h))
        .collect();
    Ok(polyhedron_mass(&kernel, &constraints, tol))
}

/// Mass of `{u : a_i . u <= b_i}` under the product kernel.
pub fn polyhedron_mass(kernel: &Kernel, constraints: &[(Vec<f64>, f64)], tol: f64) -> (f64, f64) {
    let v = kernel.vmax;
    let mut live: Vec<(Vec<f64>, f64)> = Vec::with_capacity(constraints.len());
    for (a, b) in constraints {
        let reach = v * a.iter().map(|x| x.abs()).sum::<f64>();
        if *b < -reach {
            return (0.0, 0.0);
        }
        if *b >= reach {
            continue;
        }
        live.push((a.clone(), *b));
    }
    if live.is_empty() {
        return (1.0, 0.0);
    }
    let d = live[0].0.len();
    if d == 1 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, b) in &live {
            if a[0] > 0.0 {
                hi = hi.min(b / a[0]);
            } else if a[0] < 0.0 {
                lo = lo.max(b / a[0]);
            } else if *b < 0.0 {
                return (0.0, 0.0);
            }
        }
        return (kernel.mass(lo, hi), 0.0);
    }

    let breakpoints = arrangement_breakpoints(&live, d);
    let inner_tol = tol * 0.1;
    let mut inner_err = 0.0_f64;
    let (value, err) = integrate(
        |u0| {
            let w = kernel.density(u0);
            if w == 0.0 {
                return 0.0;
            }
            let sliced: Vec<(Vec<f64>, f64)> = live
                .iter()
                .map(|(a, b)| (a[1..].to_vec(), b - a[0] * u0))
                .collect();
            let (m, e) = polyhedron_mass(kernel, &sliced, inner_tol);
            inner_err = inner_err.max(e);
            w * m
        },
        -v,
        v,
        &breakpoints,
        tol,
    );
    (value, err + 2.0 * v * inner_err)
}

/// First coordinates of the vertices of the hyperplane arrangement, plus
/// hyperplanes that are level sets of the first coordinate.
fn arrangement_breakpoints(constraints: &[(Vec<f64>, f64)], d: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for (a, b) in constraints {
        if a[1..].iter().all(|x| x.abs() < 1e-14) && a[0].abs() > 0.0 {
            out.push(b / a[0]);
        }
    }
    let n = constraints.len();
    if n < d {
        return out;
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let cols: Vec<Vec<f64>> = (0..d)
            .map(|k| idx.iter().map(|&i| constraints[i].0[k]).collect())
            .collect();
        if let Some(inv) = linalg::inverse_of_columns(&cols) {
            // rows of A are constraints; cols holds A's columns so inv = A^{-1}
            let rhs: Vec<f64> = idx.iter().map(|&i| constraints[i].1).collect();
            let u0: f64 = (0..d).map(|k| inv[(0, k)] * rhs[k]).sum();
            if u0.is_finite() {
                out.push(u0);
            }
        }
        // next combination
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < n - d + k {
                idx[k] += 1;
                for j in (k + 1)..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

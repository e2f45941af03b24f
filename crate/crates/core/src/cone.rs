//! Pointed polyhedral cones: general vertex cones, simple cones, and the fan
//! triangulation that turns the former into the latter.

use crate::error::{Error, Result};
use crate::linalg::{self, cross3, dot, norm};
use crate::region::{HalfSpace, Membership, Region};

const DET_REL_TOL: f64 = 1e-12;

/// Apex plus generator directions; the generators may outnumber the dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    pub apex: Vec<f64>,
    pub generators: Vec<Vec<f64>>,
}

impl Cone {
    pub fn new(apex: Vec<f64>, generators: Vec<Vec<f64>>) -> Self {
        Cone { apex, generators }
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    pub fn triangulate(&self) -> Result<Vec<SimpleCone>> {
        triangulate_cone(&self.apex, &self.generators)
    }
}

/// A cone `apex + span_{>=0}(w_1, ..., w_d)` with `d` independent generators.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleCone {
    apex: Vec<f64>,
    generators: Vec<Vec<f64>>,
    det: f64,
    region: Region,
}

impl SimpleCone {
    pub fn new(apex: Vec<f64>, generators: Vec<Vec<f64>>) -> Result<Self> {
        let d = apex.len();
        if generators.len() != d {
            return Err(Error::DegenerateCone(format!(
                "a simple cone in dimension {d} needs {d} generators, got {}",
                generators.len()
            )));
        }
        if let Some((row, g)) = generators.iter().enumerate().find(|(_, g)| g.len() != d) {
            return Err(Error::DimensionMismatch {
                row,
                expected: d,
                got: g.len(),
            });
        }
        let det = linalg::determinant(&generators);
        let scale: f64 = generators.iter().map(|g| norm(g)).product();
        if !(det.abs() > DET_REL_TOL * scale) {
            return Err(Error::DegenerateCone(format!(
                "generators are linearly dependent (det = {det:e})"
            )));
        }
        let region = simple_cone_region(&apex, &generators)?;
        Ok(SimpleCone {
            apex,
            generators,
            det,
            region,
        })
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    pub fn apex(&self) -> &[f64] {
        &self.apex
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Signed determinant of the generator matrix (generators as columns).
    pub fn det(&self) -> f64 {
        self.det
    }

    /// Recomputes the determinant from the generators.
    pub fn recomputed_det(&self) -> f64 {
        linalg::determinant(&self.generators)
    }

    /// Same generators, new apex.
    pub fn with_apex(&self, apex: Vec<f64>) -> SimpleCone {
        let shift = linalg::sub(&apex, &self.apex);
        let halfspaces = self
            .region
            .halfspaces
            .iter()
            .map(|h| HalfSpace {
                normal: h.normal.clone(),
                offset: h.offset + dot(&h.normal, &shift),
            })
            .collect();
        SimpleCone {
            apex,
            generators: self.generators.clone(),
            det: self.det,
            region: Region::new(self.region.dim, halfspaces),
        }
    }

    /// The cone `-apex - K` obtained by the point reflection x -> -x.
    pub fn reflected(&self) -> SimpleCone {
        let apex = linalg::scale(&self.apex, -1.0);
        let generators: Vec<Vec<f64>> =
            self.generators.iter().map(|g| linalg::scale(g, -1.0)).collect();
        let det = if self.dim() % 2 == 0 { self.det } else { -self.det };
        let region = Region::new(
            self.dim(),
            self.region
                .halfspaces
                .iter()
                .map(|h| HalfSpace {
                    normal: linalg::scale(&h.normal, -1.0),
                    offset: h.offset,
                })
                .collect(),
        );
        SimpleCone {
            apex,
            generators,
            det,
            region,
        }
    }

    /// Half-space description `{x : W^{-1}(x - apex) >= 0}`.
    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Each generator rescaled to its primitive integer vector when its
    /// direction is rational; irrational directions keep their length.
    pub fn normalized(&self) -> SimpleCone {
        let generators = self
            .generators
            .iter()
            .map(|g| primitive_direction(g))
            .collect();
        SimpleCone::new(self.apex.clone(), generators).expect("rescaling keeps independence")
    }
}

impl Membership for SimpleCone {
    fn dim(&self) -> usize {
        self.apex.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.region.contains(x)
    }
}

impl Membership for Cone {
    fn dim(&self) -> usize {
        self.apex.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        match self.triangulate() {
            Ok(pieces) => pieces.iter().any(|c| c.contains(x)),
            Err(_) => false,
        }
    }
}

fn simple_cone_region(apex: &[f64], generators: &[Vec<f64>]) -> Result<Region> {
    let d = apex.len();
    let inv = linalg::inverse_of_columns(generators)
        .ok_or_else(|| Error::DegenerateCone("singular generator matrix".into()))?;
    let halfspaces = (0..d)
        .map(|j| {
            let row: Vec<f64> = (0..d).map(|k| inv[(j, k)]).collect();
            // row . (x - apex) >= 0  <=>  -row . x <= -row . apex
            let neg: Vec<f64> = row.iter().map(|r| -r).collect();
            HalfSpace::new(neg, -dot(&row, apex))
        })
        .collect();
    Ok(Region::new(d, halfspaces))
}

/// Splits a pointed cone into simple cones with disjoint interiors whose union
/// is the cone. In 3-D the extreme rays are put in cyclic order and fanned
/// around the lexicographically smallest one.
pub fn triangulate_cone(apex: &[f64], generators: &[Vec<f64>]) -> Result<Vec<SimpleCone>> {
    let d = apex.len();
    if d == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    if let Some((row, g)) = generators.iter().enumerate().find(|(_, g)| g.len() != d) {
        return Err(Error::DimensionMismatch {
            row,
            expected: d,
            got: g.len(),
        });
    }
    if generators.iter().any(|g| norm(g) == 0.0) {
        return Err(Error::DegenerateCone("zero generator".into()));
    }
    match d {
        1 => triangulate_1d(apex, generators),
        2 => triangulate_2d(apex, generators),
        3 => triangulate_3d(apex, generators),
        _ => {
            if generators.len() == d {
                Ok(vec![SimpleCone::new(apex.to_vec(), generators.to_vec())?])
            } else {
                Err(Error::UnsupportedDimension(d))
            }
        }
    }
}

fn triangulate_1d(apex: &[f64], generators: &[Vec<f64>]) -> Result<Vec<SimpleCone>> {
    let positive = generators.iter().any(|g| g[0] > 0.0);
    let negative = generators.iter().any(|g| g[0] < 0.0);
    if positive && negative {
        return Err(Error::NotPointed);
    }
    Ok(vec![SimpleCone::new(apex.to_vec(), vec![generators[0].clone()])?])
}

fn triangulate_2d(apex: &[f64], generators: &[Vec<f64>]) -> Result<Vec<SimpleCone>> {
    if generators.len() == 2 {
        let (a, b) = (&generators[0], &generators[1]);
        let det = a[0] * b[1] - a[1] * b[0];
        if det.abs() <= DET_REL_TOL * norm(a) * norm(b) {
            return if dot(a, b) < 0.0 {
                Err(Error::NotPointed)
            } else {
                Err(Error::DegenerateCone("parallel generators".into()))
            };
        }
        return Ok(vec![SimpleCone::new(apex.to_vec(), generators.to_vec())?]);
    }
    // Extreme rays bound the largest angular gap, which must exceed pi.
    let mut angles: Vec<(f64, usize)> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| (g[1].atan2(g[0]), i))
        .collect();
    angles.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = angles.len();
    let mut best_gap = -1.0;
    let mut best = 0;
    for k in 0..n {
        let next = (k + 1) % n;
        let mut gap = angles[next].0 - angles[k].0;
        if next == 0 {
            gap += 2.0 * std::f64::consts::PI;
        }
        if gap > best_gap {
            best_gap = gap;
            best = k;
        }
    }
    if best_gap <= std::f64::consts::PI + 1e-12 {
        return Err(Error::NotPointed);
    }
    let first = angles[(best + 1) % n].1;
    let last = angles[best].1;
    if first == last {
        return Err(Error::DegenerateCone("all generators parallel".into()));
    }
    let (i, j) = if first < last { (first, last) } else { (last, first) };
    Ok(vec![SimpleCone::new(
        apex.to_vec(),
        vec![generators[i].clone(), generators[j].clone()],
    )?])
}

fn triangulate_3d(apex: &[f64], generators: &[Vec<f64>]) -> Result<Vec<SimpleCone>> {
    if linalg::rank(generators, 1e-12) < 3 {
        // Either flat or spanning a plane through the apex in both directions.
        return Err(Error::DegenerateCone("generators do not span 3-space".into()));
    }
    if generators.len() == 3 {
        return Ok(vec![SimpleCone::new(apex.to_vec(), generators.to_vec())?]);
    }
    let unit: Vec<Vec<f64>> = generators.iter().map(|g| linalg::scale(g, 1.0 / norm(g))).collect();

    // Supporting planes through pairs of generators give inward facet normals.
    let mut axis = [0.0; 3];
    let mut found = false;
    for i in 0..unit.len() {
        for j in (i + 1)..unit.len() {
            let n = cross3(&unit[i], &unit[j]);
            let nn = norm(&n);
            if nn < 1e-12 {
                continue;
            }
            let n: Vec<f64> = n.iter().map(|x| x / nn).collect();
            let sides: Vec<f64> = unit.iter().map(|u| dot(&n, u)).collect();
            let sign = if sides.iter().all(|&s| s >= -1e-12) {
                1.0
            } else if sides.iter().all(|&s| s <= 1e-12) {
                -1.0
            } else {
                continue;
            };
            found = true;
            for k in 0..3 {
                axis[k] += sign * n[k];
            }
        }
    }
    if !found || unit.iter().any(|u| dot(&axis, u) <= 1e-12) {
        return Err(Error::NotPointed);
    }

    // Cross-section at <axis, y> = 1, in an orthonormal basis of the plane.
    let a_norm = norm(&axis);
    let a: Vec<f64> = axis.iter().map(|x| x / a_norm).collect();
    let helper = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let c = cross3(&a, &helper);
        let n = norm(&c);
        c.map(|x| x / n)
    };
    let e2 = cross3(&a, &e1);
    let projected: Vec<[f64; 2]> = unit
        .iter()
        .map(|u| {
            let y = linalg::scale(u, 1.0 / dot(&a, u));
            [dot(&y, &e1), dot(&y, &e2)]
        })
        .collect();

    let hull = convex_hull_2d(&projected);
    if hull.len() < 3 {
        return Err(Error::DegenerateCone("cross-section is not a polygon".into()));
    }
    if hull.len() == 3 {
        let mut idx = hull.clone();
        idx.sort_unstable();
        let gens = idx.iter().map(|&i| generators[i].clone()).collect();
        return Ok(vec![SimpleCone::new(apex.to_vec(), gens)?]);
    }
    let start = (0..hull.len())
        .min_by(|&x, &y| lex_cmp(&generators[hull[x]], &generators[hull[y]]))
        .unwrap();
    let cyclic: Vec<usize> = (0..hull.len()).map(|k| hull[(start + k) % hull.len()]).collect();
    let mut pieces = Vec::with_capacity(cyclic.len() - 2);
    for k in 1..cyclic.len() - 1 {
        pieces.push(SimpleCone::new(
            apex.to_vec(),
            vec![
                generators[cyclic[0]].clone(),
                generators[cyclic[k]].clone(),
                generators[cyclic[k + 1]].clone(),
            ],
        )?);
    }
    Ok(pieces)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Indices of the extreme points of a planar point set in counter-clockwise
/// order (monotone chain; collinear boundary points dropped).
pub(crate) fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
    });
    idx.dedup_by(|a, b| {
        (points[*a][0] - points[*b][0]).abs() < 1e-14 && (points[*a][1] - points[*b][1]).abs() < 1e-14
    });
    if idx.len() < 3 {
        return idx;
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(1.0);
    let tol = 1e-12 * scale * scale;
    let cross = |o: usize, a: usize, b: usize| {
        (points[a][0] - points[o][0]) * (points[b][1] - points[o][1])
            - (points[a][1] - points[o][1]) * (points[b][0] - points[o][0])
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], i) <= tol {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], i) <= tol {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Best rational approximation `p/q` with `q <= max_den` via continued fractions,
/// if one lies within `tol` of `x`.
fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-300 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive integer vector along `w` when `w` has a rational direction
/// (denominators up to 10^4), otherwise `w` unchanged.
pub fn primitive_direction(w: &[f64]) -> Vec<f64> {
    let m = w.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return w.to_vec();
    }
    let mut fracs = Vec::with_capacity(w.len());
    for &x in w {
        match rational_approx(x / m, 10_000, 1e-13) {
            Some(f) => fracs.push(f),
            None => return w.to_vec(),
        }
    }
    let lcm = fracs.iter().fold(1i64, |l, &(_, q)| l / gcd(l, q) * q);
    if lcm > 1_000_000 {
        return w.to_vec();
    }
    let ints: Vec<i64> = fracs.iter().map(|&(p, q)| p * (lcm / q)).collect();
    let g = ints.iter().fold(0i64, |g, &z| gcd(g, z));
    let z: Vec<f64> = ints.iter().map(|&v| (v / g) as f64).collect();
    let (wn, zn) = (norm(w), norm(&z));
    let agree = w
        .iter()
        .zip(&z)
        .all(|(a, b)| (a / wn - b / zn).abs() < 1e-12);
    if agree {
        z
    } else {
        w.to_vec()
    }
}

//! Convex polytopes given by vertices, with the half-space description,
//! face lattice (d <= 3), vertex tangent cones and lattice-point enumeration.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::Value;

use crate::cone::{convex_hull_2d, primitive_direction, Cone, SimpleCone};
use crate::error::{Error, Result};
use crate::expr;
use crate::linalg::{self, cross3, dot, norm};
use crate::region::{HalfSpace, Membership, Region};

/// Boundary tolerance for membership and incidence tests.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// A facet: supporting half-space plus the vertices lying on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub halfspace: HalfSpace,
    pub vertices: Vec<usize>,
}

/// A nonempty face; `sign` is `(-1)^dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    pub vertex_indices: Vec<usize>,
    pub sign: i32,
}

/// Full-dimensional convex polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    provenance: Vec<Vec<String>>,
    facets: Vec<Facet>,
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Coordinates as written in the input (numbers rendered with `Display`).
    pub fn provenance(&self) -> &[Vec<String>] {
        &self.provenance
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn region(&self) -> Region {
        Region::new(
            self.dim,
            self.facets.iter().map(|f| f.halfspace.clone()).collect(),
        )
    }

    /// Half-spaces of the dilate `tP`; `t` may be zero or negative.
    pub fn dilated_region(&self, t: f64) -> Region {
        let halfspaces = self
            .facets
            .iter()
            .map(|f| {
                if t >= 0.0 {
                    f.halfspace.dilated(t)
                } else {
                    HalfSpace {
                        normal: linalg::scale(&f.halfspace.normal, -1.0),
                        offset: f.halfspace.offset * (-t),
                    }
                }
            })
            .collect();
        Region::new(self.dim, halfspaces)
    }

    /// Axis-aligned bounding box of `tP` as (min, max) per coordinate.
    pub fn bounding_box(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for v in &self.vertices {
            for k in 0..self.dim {
                lo[k] = lo[k].min(t * v[k]);
                hi[k] = hi[k].max(t * v[k]);
            }
        }
        (lo, hi)
    }

    /// Indices of facets whose hyperplane passes within `tol` of `x` in `tP`.
    pub fn active_facets(&self, x: &[f64], t: f64, tol: f64) -> Vec<usize> {
        let region = self.dilated_region(t);
        region
            .halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| h.slack(x).abs() <= tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// Vertices adjacent to `v` along an edge, in increasing index order.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&u| u != v && self.is_edge(u, v))
            .collect()
    }

    fn is_edge(&self, u: usize, v: usize) -> bool {
        let normals: Vec<Vec<f64>> = self
            .facets
            .iter()
            .filter(|f| f.vertices.contains(&u) && f.vertices.contains(&v))
            .map(|f| f.halfspace.normal.clone())
            .collect();
        linalg::rank(&normals, 1e-9) == self.dim - 1
    }

    /// Tangent cone of the face with the given vertex set, as the
    /// intersection of the facet half-spaces containing the face.
    pub fn face_tangent_region(&self, face: &Face) -> Region {
        let halfspaces = self
            .facets
            .iter()
            .filter(|f| face.vertex_indices.iter().all(|i| f.vertices.contains(i)))
            .map(|f| f.halfspace.clone())
            .collect();
        Region::new(self.dim, halfspaces)
    }
}

impl Membership for Polytope {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.facets.iter().all(|f| f.halfspace.slack(x) >= 0.0)
    }
}

/// Validates vertex rows and builds the polytope, dropping non-extreme points.
pub fn load_polytope(dim: usize, vertex_rows: &[Vec<f64>]) -> Result<Polytope> {
    let provenance = vertex_rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect();
    build(dim, vertex_rows, provenance)
}

fn build(dim: usize, rows: &[Vec<f64>], provenance: Vec<Vec<String>>) -> Result<Polytope> {
    if dim == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    for (row, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::DimensionMismatch {
                row,
                expected: dim,
                got: r.len(),
            });
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateInput(format!("row {row} has a non-finite coordinate")));
        }
    }
    if rows.len() < dim + 1 {
        return Err(Error::DegenerateInput(format!(
            "{} points cannot span dimension {dim}",
            rows.len()
        )));
    }
    let diffs: Vec<Vec<f64>> = rows[1..].iter().map(|r| linalg::sub(r, &rows[0])).collect();
    if linalg::rank(&diffs, BOUNDARY_TOL) < dim {
        return Err(Error::DegenerateInput(format!(
            "affine hull has dimension < {dim}"
        )));
    }

    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(1.0_f64, |m, x| m.max(x.abs()));
    let tol = BOUNDARY_TOL * scale;

    // Drop exact duplicates (keeping the first occurrence).
    let mut distinct: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        if !distinct.iter().any(|&j| linalg::distance(&rows[i], &rows[j]) <= tol) {
            distinct.push(i);
        }
    }

    let planes = match dim {
        1 => hull_planes_1d(rows, &distinct),
        2 => hull_planes_2d(rows, &distinct),
        3 => hull_planes_3d(rows, &distinct, tol),
        _ => hull_planes_simplex(rows, &distinct)?,
    };

    // A point is a vertex when its incident facet normals span the space.
    let keep: Vec<usize> = distinct
        .iter()
        .copied()
        .filter(|&i| {
            let normals: Vec<Vec<f64>> = planes
                .iter()
                .filter(|h| h.slack(&rows[i]).abs() <= tol)
                .map(|h| h.normal.clone())
                .collect();
            linalg::rank(&normals, 1e-9) == dim
        })
        .collect();
    if keep.len() < rows.len() {
        log::warn!(
            "dropped {} redundant point(s) from the vertex list",
            rows.len() - keep.len()
        );
    }

    let vertices: Vec<Vec<f64>> = keep.iter().map(|&i| rows[i].clone()).collect();
    let provenance: Vec<Vec<String>> = keep.iter().map(|&i| provenance[i].clone()).collect();
    let facets = planes
        .into_iter()
        .map(|h| {
            let on: Vec<usize> = vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| h.slack(v).abs() <= tol)
                .map(|(i, _)| i)
                .collect();
            Facet {
                halfspace: h,
                vertices: on,
            }
        })
        .collect();
    Ok(Polytope {
        dim,
        vertices,
        provenance,
        facets,
    })
}

fn hull_planes_1d(rows: &[Vec<f64>], idx: &[usize]) -> Vec<HalfSpace> {
    let lo = idx.iter().map(|&i| rows[i][0]).fold(f64::INFINITY, f64::min);
    let hi = idx.iter().map(|&i| rows[i][0]).fold(f64::NEG_INFINITY, f64::max);
    vec![HalfSpace::new(vec![-1.0], -lo), HalfSpace::new(vec![1.0], hi)]
}

fn hull_planes_2d(rows: &[Vec<f64>], idx: &[usize]) -> Vec<HalfSpace> {
    let pts: Vec<[f64; 2]> = idx.iter().map(|&i| [rows[i][0], rows[i][1]]).collect();
    let hull = convex_hull_2d(&pts);
    let n = hull.len();
    (0..n)
        .map(|k| {
            let a = pts[hull[k]];
            let b = pts[hull[(k + 1) % n]];
            // Counter-clockwise order: the interior is to the left.
            let normal = vec![b[1] - a[1], a[0] - b[0]];
            let offset = normal[0] * a[0] + normal[1] * a[1];
            HalfSpace::new(normal, offset)
        })
        .collect()
}

fn hull_planes_3d(rows: &[Vec<f64>], idx: &[usize], tol: f64) -> Vec<HalfSpace> {
    let mut planes: Vec<HalfSpace> = Vec::new();
    for a in 0..idx.len() {
        for b in (a + 1)..idx.len() {
            for c in (b + 1)..idx.len() {
                let (pa, pb, pc) = (&rows[idx[a]], &rows[idx[b]], &rows[idx[c]]);
                let (u, w) = (linalg::sub(pb, pa), linalg::sub(pc, pa));
                let n = cross3(&u, &w);
                if norm(&n) <= 1e-10 * norm(&u) * norm(&w) {
                    continue;
                }
                let h = HalfSpace::new(n.to_vec(), dot(&n, pa));
                let slacks: Vec<f64> = idx.iter().map(|&i| h.slack(&rows[i])).collect();
                let candidate = if slacks.iter().all(|&s| s >= -tol) {
                    h
                } else if slacks.iter().all(|&s| s <= tol) {
                    HalfSpace {
                        normal: linalg::scale(&h.normal, -1.0),
                        offset: -h.offset,
                    }
                } else {
                    continue;
                };
                let duplicate = planes.iter().any(|p| {
                    linalg::distance(&p.normal, &candidate.normal) < 1e-9
                        && (p.offset - candidate.offset).abs() <= tol
                });
                if !duplicate {
                    planes.push(candidate);
                }
            }
        }
    }
    planes
}

fn hull_planes_simplex(rows: &[Vec<f64>], idx: &[usize]) -> Result<Vec<HalfSpace>> {
    let d = rows[0].len();
    if idx.len() != d + 1 {
        return Err(Error::UnsupportedDimension(d));
    }
    // Facet opposite vertex k: barycentric coordinate k is nonnegative.
    let base = &rows[idx[0]];
    let cols: Vec<Vec<f64>> = idx[1..].iter().map(|&i| linalg::sub(&rows[i], base)).collect();
    let inv = linalg::inverse_of_columns(&cols)
        .ok_or_else(|| Error::DegenerateInput("singular simplex".into()))?;
    let mut planes = Vec::with_capacity(d + 1);
    // lambda_j = row_j . (x - base) >= 0 for j = 1..d
    let mut sum_row = vec![0.0; d];
    for j in 0..d {
        let row: Vec<f64> = (0..d).map(|k| inv[(j, k)]).collect();
        for k in 0..d {
            sum_row[k] += row[k];
        }
        planes.push(HalfSpace::new(linalg::scale(&row, -1.0), -dot(&row, base)));
    }
    // lambda_0 = 1 - sum_j lambda_j >= 0
    planes.push(HalfSpace::new(sum_row.clone(), 1.0 + dot(&sum_row, base)));
    Ok(planes)
}

/// Parses `{"dim": d, "vertices": [[...], ...]}`; coordinates are numbers or
/// expression strings such as `"sqrt(3)"` or `"1/2"`.
pub fn from_json(text: &str) -> Result<Polytope> {
    let value: Value = serde_json::from_str(text)?;
    let dim = value
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing or invalid \"dim\"".into()))? as usize;
    let rows = value
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"vertices\" array".into()))?;
    let mut coords = Vec::with_capacity(rows.len());
    let mut provenance = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("vertex {i} is not an array")))?;
        let mut c = Vec::with_capacity(row.len());
        let mut p = Vec::with_capacity(row.len());
        for x in row {
            match x {
                Value::Number(n) => {
                    let v = n
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("bad number in vertex {i}")))?;
                    c.push(v);
                    p.push(n.to_string());
                }
                Value::String(s) => {
                    c.push(expr::eval(s)?);
                    p.push(s.clone());
                }
                _ => return Err(Error::Parse(format!("bad coordinate in vertex {i}"))),
            }
        }
        coords.push(c);
        provenance.push(p);
    }
    build(dim, &coords, provenance)
}

pub fn read_polytope(path: &Path) -> Result<Polytope> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

/// JSON form of the polytope, reusing the original coordinate strings.
pub fn to_json(p: &Polytope) -> Value {
    let vertices: Vec<Value> = p
        .provenance
        .iter()
        .zip(&p.vertices)
        .map(|(strs, xs)| {
            Value::Array(
                strs.iter()
                    .zip(xs)
                    .map(|(s, &x)| match s.parse::<f64>() {
                        Ok(_) => serde_json::json!(x),
                        Err(_) => Value::String(s.clone()),
                    })
                    .collect(),
            )
        })
        .collect();
    serde_json::json!({ "dim": p.dim, "vertices": vertices })
}

/// Tangent cone at vertex `v_index`: apex `v`, generators `neighbor - v`.
pub fn vertex_tangent_cone(p: &Polytope, v_index: usize) -> Result<Cone> {
    if v_index >= p.vertices.len() {
        return Err(Error::BadIndex {
            index: v_index,
            len: p.vertices.len(),
        });
    }
    let v = &p.vertices[v_index];
    let generators = p
        .neighbors(v_index)
        .into_iter()
        .map(|u| linalg::sub(&p.vertices[u], v))
        .collect();
    Ok(Cone::new(v.clone(), generators))
}

/// Simple pieces of the vertex cone, with generators rescaled to primitive
/// integer vectors wherever the edge direction is rational.
pub fn vertex_simple_cones(p: &Polytope, v_index: usize) -> Result<Vec<SimpleCone>> {
    let cone = vertex_tangent_cone(p, v_index)?;
    let generators: Vec<Vec<f64>> = cone.generators.iter().map(|g| primitive_direction(g)).collect();
    crate::cone::triangulate_cone(&cone.apex, &generators)
}

/// All nonempty faces including `P` itself, ordered by dimension then vertices.
pub fn faces(p: &Polytope) -> Result<Vec<Face>> {
    if p.dim > 3 {
        return Err(Error::UnsupportedDimension(p.dim));
    }
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier: Vec<Vec<usize>> = p.facets.iter().map(|f| f.vertices.clone()).collect();
    while let Some(s) = frontier.pop() {
        if s.is_empty() || !sets.insert(s.clone()) {
            continue;
        }
        for f in &p.facets {
            let meet: Vec<usize> = s.iter().copied().filter(|i| f.vertices.contains(i)).collect();
            if !meet.is_empty() && !sets.contains(&meet) {
                frontier.push(meet);
            }
        }
    }
    sets.insert((0..p.vertices.len()).collect());
    let mut out: Vec<Face> = sets
        .into_iter()
        .map(|s| {
            let dim = if s.len() == 1 {
                0
            } else {
                let base = &p.vertices[s[0]];
                let diffs: Vec<Vec<f64>> =
                    s[1..].iter().map(|&i| linalg::sub(&p.vertices[i], base)).collect();
                linalg::rank(&diffs, 1e-9)
            };
            Face {
                dim,
                vertex_indices: s,
                sign: if dim % 2 == 0 { 1 } else { -1 },
            }
        })
        .collect();
    out.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.vertex_indices.cmp(&b.vertex_indices)));
    Ok(out)
}

/// Integer points of the closed dilate `tP`, boundary band included.
pub fn lattice_points(p: &Polytope, t: f64) -> Vec<Vec<i64>> {
    let region = p.dilated_region(t);
    let (lo, hi) = p.bounding_box(t);
    let lo: Vec<i64> = lo.iter().map(|x| (x - BOUNDARY_TOL).ceil() as i64).collect();
    let hi: Vec<i64> = hi.iter().map(|x| (x + BOUNDARY_TOL).floor() as i64).collect();
    let mut out = Vec::new();
    for_each_box_point(&lo, &hi, |m| {
        let x: Vec<f64> = m.iter().map(|&k| k as f64).collect();
        if region.min_slack(&x) >= -BOUNDARY_TOL {
            out.push(m.to_vec());
        }
    });
    out
}

/// Visits every integer point of the box `lo..=hi` in lexicographic order.
pub fn for_each_box_point(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut m = lo.to_vec();
    loop {
        f(&m);
        let mut k = m.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if m[k] < hi[k] {
                m[k] += 1;
                for j in (k + 1)..m.len() {
                    m[j] = lo[j];
                }
                break;
            }
        }
    }
}

/// Smallest positive distance from a lattice point near `tP` to a piece of
/// the boundary of `tP` it does not touch. Governs how fast smoothed sums
/// approach their solid-angle limits as the damping parameter shrinks.
pub fn lattice_gap(p: &Polytope, t: f64) -> f64 {
    let (lo, hi) = p.bounding_box(t);
    let lo: Vec<i64> = lo.iter().map(|x| x.floor() as i64 - 1).collect();
    let hi: Vec<i64> = hi.iter().map(|x| x.ceil() as i64 + 1).collect();
    region_gap(&p.dilated_region(t), &lo, &hi)
}

/// Gap over the lattice box `lo..=hi`: for outside points the largest
/// constraint violation, for inside points the smallest slack that is not
/// (numerically) zero; the minimum of these over the box.
pub fn region_gap(region: &Region, lo: &[i64], hi: &[i64]) -> f64 {
    let mut gap = f64::INFINITY;
    for_each_box_point(lo, hi, |m| {
        let x: Vec<f64> = m.iter().map(|&k| k as f64).collect();
        let slacks: Vec<f64> = region.halfspaces.iter().map(|h| h.slack(&x)).collect();
        let worst = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
        if worst < -BOUNDARY_TOL {
            gap = gap.min(-worst);
        } else {
            for s in slacks {
                if s > BOUNDARY_TOL {
                    gap = gap.min(s);
                }
            }
        }
    });
    gap
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Polytope {
        load_polytope(2, &[vec![0.0, 0.0], vec![0.0, 1.0], vec![3f64.sqrt(), 0.0]]).unwrap()
    }

    fn square() -> Polytope {
        load_polytope(
            2,
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
        )
        .unwrap()
    }

    fn tetra() -> Polytope {
        load_polytope(
            3,
            &[
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            load_polytope(2, &[vec![0.0, 0.0], vec![1.0], vec![1.0, 1.0]]),
            Err(Error::DimensionMismatch { row: 1, .. })
        ));
        assert!(matches!(
            load_polytope(2, &[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn drops_interior_and_edge_points() {
        let p = load_polytope(
            2,
            &[
                vec![0.0, 0.0],
                vec![2.0, 0.0],
                vec![1.0, 0.0],
                vec![2.0, 2.0],
                vec![1.0, 1.0],
                vec![0.0, 2.0],
            ],
        )
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.vertices()[1], vec![2.0, 0.0]);
    }

    #[test]
    fn triangle_tangent_cones_follow_vertex_order() {
        let p = triangle();
        let s3 = 3f64.sqrt();
        let k1 = vertex_tangent_cone(&p, 0).unwrap();
        assert_eq!(k1.generators, vec![vec![0.0, 1.0], vec![s3, 0.0]]);
        let k2 = vertex_tangent_cone(&p, 1).unwrap();
        assert_eq!(k2.generators, vec![vec![0.0, -1.0], vec![s3, -1.0]]);
        assert!((linalg::determinant(&k2.generators).abs() - s3).abs() < 1e-15);
        assert!(matches!(vertex_tangent_cone(&p, 3), Err(Error::BadIndex { .. })));
    }

    #[test]
    fn triangle_simple_cone_dets() {
        let p = triangle();
        let dets: Vec<f64> = (0..3)
            .map(|i| vertex_simple_cones(&p, i).unwrap()[0].det().abs())
            .collect();
        assert!((dets[0] - 1.0).abs() < 1e-12);
        assert!((dets[1] - 3f64.sqrt()).abs() < 1e-12);
        assert!((dets[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn face_counts_and_euler() {
        for (p, n) in [(triangle(), 7), (square(), 9), (tetra(), 15)] {
            let f = faces(&p).unwrap();
            assert_eq!(f.len(), n);
            assert_eq!(f.iter().map(|f| f.sign).sum::<i32>(), 1);
        }
    }

    #[test]
    fn cube_faces() {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push(vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        let p = load_polytope(3, &v).unwrap();
        assert_eq!(p.facets().len(), 6);
        let f = faces(&p).unwrap();
        assert_eq!(f.len(), 8 + 12 + 6 + 1);
        for i in 0..8 {
            assert_eq!(vertex_tangent_cone(&p, i).unwrap().generators.len(), 3);
        }
    }

    #[test]
    fn lattice_point_examples() {
        assert_eq!(lattice_points(&square(), 2.0).len(), 9);
        let tri = lattice_points(&triangle(), 1.0);
        assert_eq!(tri, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(lattice_points(&triangle(), 0.0), vec![vec![0, 0]]);
        assert_eq!(lattice_points(&tetra(), 1.0).len(), 4);
    }

    #[test]
    fn json_loader_keeps_strings() {
        let p = from_json(r#"{"dim":2,"vertices":[[0,0],[0,1],["sqrt(3)",0]]}"#).unwrap();
        assert_eq!(p.provenance()[2][0], "sqrt(3)");
        assert_eq!(p.vertices()[2][0], 3f64.sqrt());
        let back = to_json(&p);
        assert_eq!(back["vertices"][2][0], "sqrt(3)");
    }

    #[test]
    fn gap_for_unit_square() {
        assert!((lattice_gap(&square(), 1.0) - 1.0).abs() < 1e-12);
        let g = lattice_gap(&triangle(), 1.5);
        assert!(g > 0.05 && g < 0.08, "gap {g}");
    }

    #[test]
    fn segment_and_simplex_in_4d() {
        let seg = load_polytope(1, &[vec![0.0], vec![1.618]]).unwrap();
        assert_eq!(vertex_tangent_cone(&seg, 0).unwrap().generators, vec![vec![1.618]]);
        let mut rows = vec![vec![0.0; 4]];
        for k in 0..4 {
            let mut e = vec![0.0; 4];
            e[k] = 1.0;
            rows.push(e);
        }
        let s = load_polytope(4, &rows).unwrap();
        assert_eq!(s.facets().len(), 5);
        assert_eq!(lattice_points(&s, 1.0).len(), 5);
    }
}

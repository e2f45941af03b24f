//! Small dense vector helpers on `&[f64]`, with nalgebra for the few
//! factorizations we need (determinants, rank, inverses).

use nalgebra::DMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], k: f64) -> Vec<f64> {
    a.iter().map(|x| x * k).collect()
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Matrix whose j-th column is `cols[j]`.
pub fn column_matrix(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Determinant of the square matrix with the given columns.
pub fn determinant(cols: &[Vec<f64>]) -> f64 {
    match cols.len() {
        0 => 1.0,
        1 => cols[0][0],
        2 => cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1],
        3 => dot(&cols[0], &cross3(&cols[1], &cols[2])),
        _ => column_matrix(cols).determinant(),
    }
}

/// Numerical rank of a set of row vectors, relative tolerance on singular values.
pub fn rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sv = m.singular_values();
    let largest = sv.iter().cloned().fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}

/// Inverse of the matrix with the given columns; `None` when singular.
pub fn inverse_of_columns(cols: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    column_matrix(cols).try_inverse()
}

/// Euclidean distance between two points.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

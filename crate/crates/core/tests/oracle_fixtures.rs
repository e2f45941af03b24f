//! Ground truth first: frozen lattice-point values and the worked triangle.

mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use common::*;
use num_complex::Complex64;
use solidsum_core::oracle::{a_t_oracle, alpha_oracle, point_weight, OracleMethod};
use solidsum_core::polytope::{lattice_points, vertex_simple_cones};
use solidsum_core::solid_angle::{solid_angle_exact_2d, solid_angle_exact_2d_l1};
use solidsum_core::transforms::ComplexPoint;
use solidsum_core::vertex_tangent_cone;

#[test]
fn square_is_t_squared_at_integers() {
    for t in [1.0, 2.0, 3.0] {
        let r = a_t_oracle(&square(), t, 2.0, OracleMethod::Exact2D, 0, 0).unwrap();
        assert_eq!(r.value, t * t);
        assert_eq!(r.n_lattice_points, ((t + 1.0) * (t + 1.0)) as usize);
    }
}

#[test]
fn triangle_vertex_angles() {
    let p = triangle();
    let expect = [0.25, 1.0 / 6.0, 1.0 / 12.0];
    let mut total = 0.0;
    for (i, want) in expect.iter().enumerate() {
        let k = vertex_tangent_cone(&p, i).unwrap();
        let w = solid_angle_exact_2d(&k.generators).unwrap();
        assert_abs_diff_eq!(w.value, want, epsilon = 1e-15);
        total += w.value;
    }
    assert_abs_diff_eq!(total, 0.5, epsilon = 1e-15);
}

#[test]
fn triangle_determinants() {
    let p = triangle();
    let dets: Vec<f64> = (0..3)
        .map(|i| vertex_simple_cones(&p, i).unwrap()[0].det().abs())
        .collect();
    assert_abs_diff_eq!(dets[0], 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(dets[1], 3f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(dets[2], 1.0, epsilon = 1e-12);
}

#[test]
fn triangle_sum_at_one() {
    let r = a_t_oracle(&triangle(), 1.0, 2.0, OracleMethod::Exact2D, 0, 0).unwrap();
    assert_abs_diff_eq!(r.value, 11.0 / 12.0, epsilon = 1e-15);
    assert_eq!(r.n_lattice_points, 3);
}

#[test]
fn triangle_l1_vertex_angle_by_clipping() {
    // Between (0,-1) and (sqrt 3,-1): the diamond sector has area (3 - sqrt 3)/4 of 2.
    let k = vertex_tangent_cone(&triangle(), 1).unwrap();
    let w = solid_angle_exact_2d_l1(&k.generators).unwrap();
    assert_abs_diff_eq!(w.value, (3.0 - 3f64.sqrt()) / 8.0, epsilon = 1e-15);
    let r = a_t_oracle(&triangle(), 1.0, 1.0, OracleMethod::Exact2D, 0, 0).unwrap();
    assert_abs_diff_eq!(r.value, 0.25 + (3.0 - 3f64.sqrt()) / 8.0 + 0.5, epsilon = 1e-15);
}

#[test]
fn exact_and_monte_carlo_oracles_agree() {
    for p in [1.0, 2.0] {
        for poly in [triangle(), golden_rectangle()] {
            let exact = a_t_oracle(&poly, 2.0, p, OracleMethod::Exact2D, 0, 0).unwrap();
            let mc = a_t_oracle(&poly, 2.0, p, OracleMethod::MC, 40_000, 3).unwrap();
            assert!(
                (exact.value - mc.value).abs() <= 3.0 * mc.std_error + 1e-12,
                "p = {p}: {} vs {} +- {}",
                exact.value,
                mc.value,
                mc.std_error
            );
        }
    }
}

#[test]
fn golden_rectangle_values() {
    // Lattice points of [0, phi] x [0, 1]: corners (0,0), (0,1) weigh 1/4,
    // (1,0), (1,1) sit on edges and weigh 1/2.
    let r = a_t_oracle(&golden_rectangle(), 1.0, 2.0, OracleMethod::Exact2D, 0, 0).unwrap();
    assert_eq!(r.value, 1.5);
    // t = 2: x in {0..3}, y in {0,1,2}.
    let r = a_t_oracle(&golden_rectangle(), 2.0, 2.0, OracleMethod::Exact2D, 0, 0).unwrap();
    assert_eq!(r.value, 0.25 * 2.0 + 0.5 * 1.0 + 0.5 * 6.0 + 1.0 * 3.0);
}

#[test]
fn segment_alpha() {
    let s = ComplexPoint::parse("0.21+0.1i").unwrap();
    let a = alpha_oracle(&segment(), 1.0, &s, 2.0, OracleMethod::Auto, 0, 0).unwrap();
    let want = Complex64::new(0.5, 0.0) + e(s.0[0]);
    assert!((a.value - want).norm() < 1e-15);
}

#[test]
fn tetrahedron_edge_and_facet_weights() {
    let p = tetrahedron();
    let w = point_weight(&p, 1.0, &[1, 0, 0], 2.0, OracleMethod::Auto, 0, 0).unwrap();
    assert_eq!(w.value, 0.25);
    let w = point_weight(&p, 1.0, &[1, 1, 0], 2.0, OracleMethod::Auto, 0, 0).unwrap();
    assert_abs_diff_eq!(w.value, (1.0 / 3f64.sqrt()).acos() / (2.0 * PI), epsilon = 1e-15);
    let w = point_weight(&p, 2.0, &[1, 1, 1], 2.0, OracleMethod::Auto, 0, 0).unwrap();
    assert_eq!(w.value, 1.0);
}

#[test]
fn lattice_points_of_dilates() {
    assert_eq!(lattice_points(&triangle(), 1.5).len(), 4);
    assert_eq!(lattice_points(&simplex3(), 2.0).len(), 10);
    assert!(lattice_points(&triangle(), 0.0) == vec![vec![0, 0]]);
}

#[test]
fn oracle_is_monotone_around_an_interior_origin() {
    let p = solidsum_core::load_polytope(2, &[vec![-1.0, -0.5], vec![1.3, -0.7], vec![0.2, 1.1]]).unwrap();
    let mut last = 0.0;
    for k in 1..=20 {
        let r = a_t_oracle(&p, 0.25 * k as f64, 2.0, OracleMethod::Exact2D, 0, 0).unwrap();
        assert!(r.value >= last - 1e-12, "t = {}: {} < {last}", 0.25 * k as f64, r.value);
        last = r.value;
    }
}

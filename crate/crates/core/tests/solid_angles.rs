//! Exact, ball-sampling and Gaussian-limit solid angles against each other.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solidsum_core::extrapolate::geometric_schedule;
use solidsum_core::solid_angle::*;
use solidsum_core::{Cone, SimpleCone};

fn random_planar_cones(n: usize, seed: u64) -> Vec<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a: f64 = rng.random_range(0.0..2.0 * PI);
            let opening: f64 = rng.random_range(0.2..PI - 0.2);
            let r1: f64 = rng.random_range(0.5..3.0);
            let r2: f64 = rng.random_range(0.5..3.0);
            vec![
                vec![r1 * a.cos(), r1 * a.sin()],
                vec![r2 * (a + opening).cos(), r2 * (a + opening).sin()],
            ]
        })
        .collect()
}

#[test]
fn gaussian_limit_matches_exact_angles() {
    let schedule = geometric_schedule(0.5, 6);
    for p in [1.0, 2.0] {
        for (i, gens) in random_planar_cones(20, 99).into_iter().enumerate() {
            let exact = if p == 2.0 {
                solid_angle_exact_2d(&gens).unwrap()
            } else {
                solid_angle_exact_2d_l1(&gens).unwrap()
            };
            let k = SimpleCone::new(vec![0.0, 0.0], gens.clone()).unwrap();
            let g = solid_angle_gaussian(&k, &[0.0, 0.0], p, &schedule, 20_000, i as u64).unwrap();
            assert!(
                (g.value - exact.value).abs() <= 3.0 * g.std_error,
                "p = {p}, cone {i}: {} vs {} +- {}",
                exact.value,
                g.value,
                g.std_error
            );
        }
    }
}

#[test]
fn l1_clipping_matches_ball_sampling() {
    for (i, gens) in random_planar_cones(20, 7).into_iter().enumerate() {
        let exact = solid_angle_exact_2d_l1(&gens).unwrap();
        let cone = Cone::new(vec![0.0, 0.0], gens);
        let mc = solid_angle_mc(&cone, &[0.0, 0.0], 1.0, 1.0, 20_000, i as u64).unwrap();
        assert!(
            (mc.value - exact.value).abs() <= 3.0 * mc.std_error,
            "cone {i}: {} vs {} +- {}",
            exact.value,
            mc.value,
            mc.std_error
        );
    }
}

#[test]
fn l1_and_l2_agree_on_coordinate_cones() {
    // Symmetric under coordinate swaps and sign flips: every norm gives 1/4.
    let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    assert_eq!(solid_angle_exact_2d(&gens).unwrap().value, 0.25);
    assert_eq!(solid_angle_exact_2d_l1(&gens).unwrap().value, 0.25);
    let k = SimpleCone::new(vec![0.0, 0.0], gens).unwrap();
    let g = solid_angle_gaussian(&k, &[0.0, 0.0], 3.0, &geometric_schedule(0.5, 4), 40_000, 1).unwrap();
    assert!((g.value - 0.25).abs() < 3.0 * g.std_error);
}

#[test]
fn octant_in_every_norm() {
    let k = SimpleCone::new(
        vec![0.0; 3],
        vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
    )
    .unwrap();
    for p in [1.0, 1.5, 2.0, 4.0] {
        let mc = solid_angle_mc(&k, &[0.0; 3], p, 1.0, 40_000, 2).unwrap();
        assert!((mc.value - 0.125).abs() < 3.0 * mc.std_error, "p = {p}");
    }
}

#[test]
fn sampling_is_reproducible() {
    let gens = vec![vec![1.0, 0.2], vec![-0.3, 1.0]];
    let cone = Cone::new(vec![0.0, 0.0], gens);
    let a = solid_angle_mc(&cone, &[0.0, 0.0], 2.0, 1.0, 10_000, 5).unwrap();
    let b = solid_angle_mc(&cone, &[0.0, 0.0], 2.0, 1.0, 10_000, 5).unwrap();
    let c = solid_angle_mc(&cone, &[0.0, 0.0], 2.0, 1.0, 10_000, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.value, c.value);
}

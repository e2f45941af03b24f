#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solidsum_core::polytope::read_polytope;
use solidsum_core::transforms::ComplexPoint;
use solidsum_core::Polytope;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Polytope {
    read_polytope(&fixture_path(name)).expect("fixture loads")
}

pub fn square() -> Polytope {
    fixture("square.json")
}

pub fn triangle() -> Polytope {
    fixture("triangle.json")
}

pub fn golden_rectangle() -> Polytope {
    fixture("golden_rectangle.json")
}

pub fn simplex3() -> Polytope {
    fixture("simplex3.json")
}

pub fn tetrahedron() -> Polytope {
    fixture("tetrahedron.json")
}

pub fn segment() -> Polytope {
    fixture("segment_golden.json")
}

/// Complex points with real parts in (-0.5, 0.5) and imaginary parts in (-0.3, 0.3).
pub fn random_points(d: usize, n: usize, seed: u64) -> Vec<ComplexPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            ComplexPoint::new(
                (0..d)
                    .map(|_| Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.3..0.3)))
                    .collect(),
            )
        })
        .collect()
}

pub fn e(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * x).exp()
}

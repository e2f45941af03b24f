//! Acceptance criteria, one line each: `PASS|FAIL <n> <name>: <measured> (<seconds>)`.

mod common;

use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solidsum_core::extrapolate::geometric_schedule;
use solidsum_core::lattice_sum::{damped_direct_sum, damped_transform_sum, Body};
use solidsum_core::macdonald::*;
use solidsum_core::oracle::{a_t_oracle, OracleMethod};
use solidsum_core::solid_angle::*;
use solidsum_core::transforms::{ComplexPoint, DampedSumConfig};
use solidsum_core::{vertex_tangent_cone, Cone, Result, SimpleCone};

struct Outcome {
    pass: bool,
    detail: String,
}

fn cfg() -> DampedSumConfig {
    DampedSumConfig::new(2.0).unwrap()
}

fn check(n: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (mut pass, detail) = match result {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let mut timing = format!("{:.2} s", elapsed.as_secs_f64());
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            timing.push_str(&format!(", over the {} s budget", limit.as_secs_f64()));
        }
    }
    println!("{} {n:>2} {name}: {detail} ({timing})", if pass { "PASS" } else { "FAIL" });
    pass
}

fn triangle_determinants() -> Result<Outcome> {
    let r = triangle_example(&[], &cfg(), &LimitConfig::default())?;
    let dets: Vec<f64> = r.details["determinants"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_f64().unwrap())
        .collect();
    let want = [1.0, 3f64.sqrt(), 1.0];
    let worst = dets.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Outcome {
        pass: worst < 1e-12,
        detail: format!("|det| = {dets:?}, max deviation {worst:.1e}"),
    })
}

fn exact_angles() -> Result<Outcome> {
    let p = triangle();
    let want = [0.25, 1.0 / 6.0, 1.0 / 12.0];
    let mut got = Vec::new();
    for i in 0..3 {
        got.push(solid_angle_exact_2d(&vertex_tangent_cone(&p, i)?.generators)?.value);
    }
    let worst = got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let sum: f64 = got.iter().sum();
    Ok(Outcome {
        pass: worst < 1e-14 && (sum - 0.5).abs() < 1e-14,
        detail: format!("omega = {got:?}, sum {sum}"),
    })
}

fn square_quasi_polynomial() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [1.0, 2.0, 3.0] {
        let o = a_t_oracle(&square(), t, 2.0, OracleMethod::Exact2D, 0, 0)?;
        let a = a_of_t(&square(), t, &LimitConfig::default(), &cfg())?;
        pass &= o.value == t * t && (a.value - t * t).abs() < 1e-2;
        parts.push(format!("t={t}: oracle {} limit {:.9}", o.value, a.value));
    }
    Ok(Outcome { pass, detail: parts.join("; ") })
}

fn brion() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for p in [square(), triangle()] {
        for s in random_points(2, 5, 2024) {
            let r = verify_brion(&p, &s, &cfg(), 1e-4)?;
            worst = worst.max(r.residual);
        }
    }
    Ok(Outcome {
        pass: worst < 1e-4,
        detail: format!("max residual {worst:.2e} over 10 evaluations"),
    })
}

fn cone_reciprocity() -> Result<Outcome> {
    let quadrant = SimpleCone::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]])?;
    let octant = SimpleCone::new(
        vec![0.0; 3],
        vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
    )?;
    let s2 = ComplexPoint::parse("0.3+0.2i,-0.1+0.4i").unwrap();
    let s3 = ComplexPoint::parse("0.3+0.2i,-0.1+0.4i,0.2+0.1i").unwrap();
    let cases = [
        (&quadrant, vec![0.0, 0.0], &s2),
        (&quadrant, vec![0.5, 2f64.sqrt()], &s2),
        (&octant, vec![0.0; 3], &s3),
    ];
    let (mut fixed, mut full): (f64, f64) = (0.0, 0.0);
    for (k, v, s) in cases {
        fixed = fixed.max(verify_cone_reciprocity_at(k, &v, s, &cfg(), 0.05, 1e-6)?.residual);
        full = full.max(verify_cone_reciprocity(k, &v, s, &cfg(), 1e-5)?.residual);
    }
    Ok(Outcome {
        pass: fixed < 1e-6 && full < 1e-5,
        detail: format!("max residual {fixed:.2e} at eps = 0.05, {full:.2e} extrapolated"),
    })
}

fn macdonald_reciprocity() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.37] {
        for s in random_points(2, 3, 77) {
            worst = worst.max(verify_macdonald(&triangle(), t, &s, &cfg(), 1e-5)?.residual);
        }
    }
    Ok(Outcome {
        pass: worst < 1e-5,
        detail: format!("max residual {worst:.2e} over 6 evaluations"),
    })
}

fn vanishing_at_zero() -> Result<Outcome> {
    let simplex = a_of_t(&simplex3(), 0.0, &LimitConfig::default(), &cfg())?;
    let tri = a_of_t(&triangle(), 0.0, &LimitConfig::default(), &cfg())?;
    Ok(Outcome {
        pass: simplex.value.abs() < 1e-3 && tri.value.abs() < 1e-3,
        detail: format!("3-simplex {:.2e}, triangle {:.2e}", simplex.value, tri.value),
    })
}

fn estimator_agreement() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let schedule = geometric_schedule(0.5, 6);
    let mut worst_sigmas: f64 = 0.0;
    for i in 0..20 {
        let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let opening: f64 = rng.random_range(0.2..std::f64::consts::PI - 0.2);
        let gens = vec![vec![a.cos(), a.sin()], vec![(a + opening).cos(), (a + opening).sin()]];
        let k = SimpleCone::new(vec![0.0, 0.0], gens.clone())?;
        for p in [1.0, 2.0] {
            let exact = if p == 2.0 {
                solid_angle_exact_2d(&gens)?
            } else {
                solid_angle_exact_2d_l1(&gens)?
            };
            let g = solid_angle_gaussian(&k, &[0.0, 0.0], p, &schedule, 20_000, 100 + i)?;
            worst_sigmas = worst_sigmas.max((g.value - exact.value).abs() / g.std_error);
        }
        let exact = solid_angle_exact_2d_l1(&gens)?;
        let mc = solid_angle_mc(&Cone::new(vec![0.0, 0.0], gens), &[0.0, 0.0], 1.0, 1.0, 20_000, 200 + i)?;
        worst_sigmas = worst_sigmas.max((mc.value - exact.value).abs() / mc.std_error);
    }
    Ok(Outcome {
        pass: worst_sigmas <= 3.0,
        detail: format!("largest deviation {worst_sigmas:.2} standard errors over 60 comparisons"),
    })
}

fn poisson_sanity() -> Result<Outcome> {
    let p = square();
    let (terms, _) = vertex_terms(&p, 1.0)?;
    let mut worst: f64 = 0.0;
    for s in ["0.3+0.2i,-0.1+0.4i", "0.17,0.41"] {
        let s = ComplexPoint::parse(s).unwrap();
        let a = damped_transform_sum(&terms, &s, &cfg(), 0.1)?;
        let b = damped_direct_sum(Body::Polytope { polytope: &p, t: 1.0 }, &s, &cfg(), 0.1)?;
        worst = worst.max((a.value - b.value).norm());
    }
    Ok(Outcome {
        pass: worst < 1e-8,
        detail: format!("max |transform - direct| = {worst:.2e}"),
    })
}

fn brianchon_gram() -> Result<Outcome> {
    let mut bad = 0;
    for p in [square(), triangle(), tetrahedron()] {
        bad += brianchon_gram_check(&p, 100, 31)?.1.len();
    }
    Ok(Outcome {
        pass: bad == 0,
        detail: format!("{bad} counterexamples in 300 points"),
    })
}

fn main() {
    let criteria: Vec<bool> = vec![
        check(1, "triangle determinants", None, triangle_determinants),
        check(2, "exact vertex angles", Some(Duration::from_secs(1)), exact_angles),
        check(3, "unit square quasi-polynomial", Some(Duration::from_secs(120)), square_quasi_polynomial),
        check(4, "Brion identity", Some(Duration::from_secs(300)), brion),
        check(5, "cone reciprocity", None, cone_reciprocity),
        check(6, "Macdonald reciprocity", None, macdonald_reciprocity),
        check(7, "vanishing at zero", None, vanishing_at_zero),
        check(8, "estimator agreement", None, estimator_agreement),
        check(9, "Poisson sanity", None, poisson_sanity),
        check(10, "Brianchon-Gram", None, brianchon_gram),
    ];
    let passed = criteria.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}

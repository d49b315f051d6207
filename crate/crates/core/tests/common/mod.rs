//! Property suites shared by the `properties` and `acceptance` targets. Each
//! suite runs a fixed-seed proptest runner and returns the first failure.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};
use qsphere::dini::{build_majorant, ProfileSource, ScaleProfile};
use qsphere::geometry::{hausdorff_distance, jones_beta, local_flatness, FlatnessConfig};
use qsphere::{Point, PointSet};

pub const TRIALS: u32 = 1000;

pub fn runner(cases: u32, seed: u8) -> TestRunner {
    let cfg = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(cfg, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

pub fn run<S: Strategy>(
    cases: u32,
    seed: u8,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases, seed).run(&strategy, test).map_err(|e| match e {
        TestError::Fail(why, input) => format!("{why} for input {input:?}"),
        TestError::Abort(why) => format!("aborted: {why}"),
    })
}

pub fn set2(min: usize, max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), min..=max)
        .prop_map(|v| PointSet::new(2, v.into_iter().map(|(x, y)| Point::new2(x, y)).collect()).unwrap())
}

/// Points near a random parabola arc, so flatness values spread over
/// `[0, 1]` instead of clustering near the value for uniform noise.
pub fn curve_set2() -> impl Strategy<Value = PointSet> {
    (-2.0f64..2.0, 0.0f64..0.3, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..60)).prop_map(|(a, noise, v)| {
        let pts = v.into_iter().map(|(u, e)| Point::new2(u, a * u * u + noise * e)).collect();
        PointSet::new(2, pts).unwrap()
    })
}

pub fn curve_set3() -> impl Strategy<Value = PointSet> {
    (-2.0f64..2.0, 0.0f64..0.3, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 4..40)).prop_map(
        |(a, noise, v)| {
            let pts = v.into_iter().map(|(u, w, e)| Point::new3(u, w, a * u * w + noise * e)).collect();
            PointSet::new(3, pts).unwrap()
        },
    )
}

/// `(angle, scale, translation)`.
pub fn similarity2() -> impl Strategy<Value = (f64, f64, (f64, f64))> {
    (-PI..PI, 0.1f64..10.0, (-5.0f64..5.0, -5.0f64..5.0))
}

pub fn apply_similarity(p: &Point, (ang, lam, (vx, vy)): (f64, f64, (f64, f64))) -> Point {
    let (c, s) = (ang.cos(), ang.sin());
    let (x, y) = (p.coords()[0], p.coords()[1]);
    Point::new2(lam * (c * x - s * y + vx), lam * (s * x + c * y + vy))
}

pub fn hausdorff_metric() -> Result<(), String> {
    run(TRIALS, 1, (set2(1, 20), set2(1, 20), set2(1, 20)), |(a, b, c)| {
        let ab = hausdorff_distance(&a, &b).unwrap();
        let ba = hausdorff_distance(&b, &a).unwrap();
        let bc = hausdorff_distance(&b, &c).unwrap();
        let ac = hausdorff_distance(&a, &c).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        prop_assert!(ac <= ab + bc + 1e-12, "{ac} > {ab} + {bc}");
        Ok(())
    })
}

pub fn theta_similarity_invariance() -> Result<(), String> {
    let cfg = FlatnessConfig::default();
    run(TRIALS, 2, (curve_set2(), any::<prop::sample::Index>(), 0.2f64..1.5, similarity2()), |(s, i, r, sim)| {
        let x = s.points()[i.index(s.len())];
        let t = PointSet::new(2, s.points().iter().map(|p| apply_similarity(p, sim)).collect()).unwrap();
        let a = local_flatness(&s, &x, r, &cfg).unwrap().theta;
        let b = local_flatness(&t, &apply_similarity(&x, sim), sim.1 * r, &cfg).unwrap().theta;
        prop_assert!((a - b).abs() <= 1e-9, "θ {a} vs {b}");
        Ok(())
    })
}

pub fn beta_below_theta() -> Result<(), String> {
    let cfg = FlatnessConfig::default();
    run(TRIALS, 3, (curve_set2(), any::<prop::sample::Index>(), 0.05f64..2.0), |(s, i, r)| {
        let x = s.points()[i.index(s.len())];
        let theta = local_flatness(&s, &x, r, &cfg).unwrap().theta;
        let beta = jones_beta(&s, &x, r, &cfg).unwrap();
        prop_assert!(beta >= 0.0 && beta <= theta && theta <= 1.0, "β {beta} θ {theta}");
        Ok(())
    })
}

pub fn theta_in_unit_interval() -> Result<(), String> {
    let cfg = FlatnessConfig::default();
    run(TRIALS, 4, (set2(1, 40), (-1.0f64..1.0, -1.0f64..1.0), 0.01f64..3.0), |(s, (x, y), r)| {
        let x = Point::new2(x, y);
        match local_flatness(&s, &x, r, &cfg) {
            Ok(f) => prop_assert!((0.0..=1.0).contains(&f.theta), "θ = {}", f.theta),
            Err(qsphere::Error::NoPointsAtScale { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
        Ok(())
    })?;
    run(200, 5, (curve_set3(), any::<prop::sample::Index>(), 0.2f64..1.5), |(s, i, r)| {
        let x = s.points()[i.index(s.len())];
        let theta = local_flatness(&s, &x, r, &cfg).unwrap().theta;
        let beta = jones_beta(&s, &x, r, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&theta), "θ = {theta}");
        prop_assert!(beta >= 0.0 && beta <= theta, "β {beta} θ {theta}");
        Ok(())
    })
}

/// A monotone base profile times multiplicative noise in `[1 − η, 1 + η]`.
pub fn noisy_monotone_profile() -> impl Strategy<Value = (ScaleProfile, f64)> {
    (0u8..3, 0.01f64..1.0, 0.0f64..1.5, 0.0f64..0.5, prop::collection::vec(-1.0f64..1.0, 10..80)).prop_map(
        |(kind, c, q, eta, noise)| {
            let n = noise.len();
            let samples = noise
                .iter()
                .enumerate()
                .map(|(i, u)| {
                    let t = 10f64.powf(-6.0 + 6.0 * i as f64 / (n - 1) as f64);
                    let base = match kind {
                        0 => c * t.powf(q),
                        1 => c / (1.0 + (1.0 / t).ln()).powf(q),
                        _ => c,
                    };
                    (t, base * (1.0 + eta * u))
                })
                .collect();
            (ScaleProfile::new(samples, ProfileSource::Measured).unwrap(), eta)
        },
    )
}

pub fn majorant_contract() -> Result<(), String> {
    use qsphere::dini::ScaleFunction;
    run(TRIALS, 6, noisy_monotone_profile(), |(p, eta)| {
        let m = build_majorant(&p);
        prop_assert!(m.knots.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1), "knots not monotone");
        prop_assert!(m.is_majorizable());
        prop_assert!(m.b <= (1.0 + eta) / (1.0 - eta) * (1.0 + 1e-12), "b = {} for η = {eta}", m.b);
        for &(t, g) in p.samples() {
            let v = m.value(t);
            prop_assert!(v >= g, "M({t}) = {v} < {g}");
            prop_assert!(v <= m.b * g * (1.0 + 1e-12), "M({t}) = {v} > b g = {}", m.b * g);
        }
        Ok(())
    })
}

pub fn angle() -> impl Strategy<Value = f64> {
    0.0..(FRAC_PI_2 - 1e-3)
}

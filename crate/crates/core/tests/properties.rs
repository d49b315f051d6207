mod common;

use common::{angle, run, set2, similarity2, curve_set2};
use proptest::prelude::*;
use qsphere::dini::{dini_integral, DiniConfig, DiniSource, ProfileSource, ScaleProfile};
use qsphere::generators::{snowflake, AngleSchedule, Angles};
use qsphere::geometry::{hyperplane_distance_profile, local_flatness, FlatnessConfig, Hyperplane};
use qsphere::maps::{builtin_test_maps, dilatation, pointwise_dilatation, Region};
use qsphere::qs::{extremal_quotient, standardize, weak_qs_constant, weak_qs_nested, QsConfig};
use qsphere::sampling::sphere_points;
use qsphere::special::{
    distortion_phi, gamma_bounds, grotzsch_gamma_2d, ring_modulus_rho, tau_from_gamma, SpecialFnContext,
};
use qsphere::{MapSpec, Point};

fn ok(r: Result<(), String>) {
    if let Err(e) = r {
        panic!("{e}");
    }
}

#[test]
fn hausdorff_is_a_metric() {
    ok(common::hausdorff_metric());
}

#[test]
fn theta_is_similarity_invariant() {
    ok(common::theta_similarity_invariance());
}

#[test]
fn beta_never_exceeds_theta() {
    ok(common::beta_below_theta());
}

#[test]
fn theta_lies_in_unit_interval() {
    ok(common::theta_in_unit_interval());
}

#[test]
fn majorant_envelopes_noisy_monotone_profiles() {
    ok(common::majorant_contract());
}

#[test]
fn theta_matches_exhaustive_sweep() {
    let cfg = FlatnessConfig::default();
    ok(run(200, 10, (curve_set2(), any::<prop::sample::Index>(), 0.2f64..1.5), |(s, i, r)| {
        let x = s.points()[i.index(s.len())];
        let theta = local_flatness(&s, &x, r, &cfg).unwrap().theta;
        let sweep = (0..1800)
            .map(|k| {
                let a = (k as f64 * 0.1).to_radians();
                let h = Hyperplane::through(&x, &Point::new2(a.cos(), a.sin())).unwrap();
                hyperplane_distance_profile(&s, &h, &x, r, &cfg).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!(theta <= sweep.min(1.0) + 1e-3, "θ {theta} sweep {sweep}");
        Ok(())
    }));
}

#[test]
fn hausdorff_of_translate_is_bounded_by_shift() {
    ok(run(300, 11, (set2(1, 30), (-1.0f64..1.0, -1.0f64..1.0)), |(a, (dx, dy))| {
        let v = Point::new2(dx, dy);
        let b = qsphere::PointSet::new(2, a.points().iter().map(|p| *p + v).collect()).unwrap();
        let d = qsphere::geometry::hausdorff_distance(&a, &b).unwrap();
        prop_assert!(d <= v.norm() + 1e-12);
        Ok(())
    }));
}

fn map2() -> impl Strategy<Value = MapSpec> {
    prop_oneof![
        ((0.3f64..3.0, -1.0f64..1.0), (-1.0f64..1.0, 0.3f64..3.0))
            .prop_map(|((a, b), (c, d))| MapSpec::linear(2, &[vec![a, b], vec![c, d]]).unwrap()),
        (0.3f64..3.0, 0.3f64..3.0).prop_map(|(a, b)| MapSpec::diag(&[a, b]).unwrap()),
        (0.5f64..2.0).prop_map(|a| MapSpec::radial_stretch(2, a).unwrap()),
        (0.5f64..2.0, 0.5f64..2.0).prop_map(|(i, o)| MapSpec::radial_blend(2, i, o, 0.5, 1.5).unwrap()),
        (0.5f64..2.0, -PI..PI).prop_map(|(a, t)| MapSpec::rotation2(t).unwrap().after(&MapSpec::radial_stretch(2, a).unwrap()).unwrap()),
    ]
}

use std::f64::consts::PI;

fn away_from_origin() -> impl Strategy<Value = Point> {
    (0.1f64..2.0, -PI..PI).prop_map(|(r, a)| Point::new2(r * a.cos(), r * a.sin()))
}

#[test]
fn dilatation_is_at_least_one_and_submultiplicative() {
    ok(run(1000, 12, (map2(), map2(), away_from_origin()), |(f, g, x)| {
        let gx = g.evaluate(&x).unwrap();
        prop_assume!(gx.norm() > 1e-3);
        let kf = pointwise_dilatation(&f, &gx).unwrap();
        let kg = pointwise_dilatation(&g, &x).unwrap();
        let kfg = pointwise_dilatation(&f.after(&g).unwrap(), &x).unwrap();
        prop_assert!(kf >= 1.0 && kg >= 1.0 && kfg >= 1.0);
        prop_assert!(kfg <= kf * kg * (1.0 + 1e-9), "{kfg} > {kf} · {kg}");
        Ok(())
    }));
}

#[test]
fn dilatation_ignores_rotations_and_scalings() {
    ok(run(300, 13, (map2(), -PI..PI, -PI..PI, 0.2f64..5.0), |(f, a, b, s)| {
        let outer = MapSpec::rotation2(a).unwrap().after(&MapSpec::scaling(2, s).unwrap()).unwrap();
        let g = outer.after(&f).unwrap().after(&MapSpec::rotation2(b).unwrap()).unwrap();
        let region = Region::ball(Point::new2(1.2, 0.4), 0.5).unwrap();
        let base = dilatation(&outer.after(&f).unwrap(), &region, 200).unwrap().k;
        let post = dilatation(&f, &region, 200).unwrap().k;
        prop_assert!((base - post).abs() <= 1e-12 * post, "{base} {post}");
        let x = Point::new2(1.2, 0.4);
        let rx = MapSpec::rotation2(b).unwrap().evaluate(&x).unwrap();
        let k1 = pointwise_dilatation(&g, &x).unwrap();
        let k2 = pointwise_dilatation(&f, &rx).unwrap();
        prop_assert!((k1 - k2).abs() <= 1e-12 * k2, "{k1} {k2}");
        Ok(())
    }));
}

#[test]
fn finite_difference_jacobian_agrees() {
    ok(run(1000, 14, (map2(), away_from_origin()), |(f, x)| {
        let j = f.jacobian(&x).unwrap();
        let fd = f.jacobian_fd(&x).unwrap();
        let err = (&j - &fd).norm() / j.norm();
        prop_assert!(err < 1e-6, "relative error {err}");
        Ok(())
    }));
    let f = MapSpec::radial_stretch(3, 0.7).unwrap();
    ok(run(1000, 15, (0.1f64..2.0, -1.0f64..1.0, -PI..PI), |(r, z, a)| {
        let w = (1.0 - z * z).sqrt();
        let x = Point::new3(r * w * a.cos(), r * w * a.sin(), r * z);
        let j = f.jacobian(&x).unwrap();
        let err = (&j - &f.jacobian_fd(&x).unwrap()).norm() / j.norm();
        prop_assert!(err < 1e-6, "relative error {err}");
        Ok(())
    }));
}

fn qs_cfg(seed: u64) -> QsConfig {
    QsConfig { triple_count: 2000, seed, refine_iterations: 20, ..QsConfig::default() }
}

/// Compared on the matched sampled triples only: the hill-climb projects onto
/// the ball boundary, where rounding of the transformed ball can send it down
/// a different path.
#[test]
fn weak_qs_is_similarity_invariant() {
    let cfg = |seed| QsConfig { refine_iterations: 0, ..qs_cfg(seed) };
    ok(run(300, 16, (map2(), similarity2(), any::<u64>()), |(f, (a, s, (vx, vy)), seed)| {
        let (c, r) = (Point::new2(1.5, 0.0), 0.5);
        let h = weak_qs_constant(&f, &c, r, &cfg(seed)).unwrap().h;
        prop_assert!(h >= 1.0);
        let post = MapSpec::translation(Point::new2(vx, vy))
            .unwrap()
            .after(&MapSpec::rotation2(a).unwrap())
            .unwrap()
            .after(&MapSpec::scaling(2, s).unwrap())
            .unwrap()
            .after(&f)
            .unwrap();
        let hp = weak_qs_constant(&post, &c, r, &cfg(seed)).unwrap().h;
        prop_assert!((h - hp).abs() <= 1e-9, "post: {h} vs {hp}");
        // f ∘ S with S(y) = s y + v on the ball S⁻¹(B)
        let v = Point::new2(vx, vy);
        let pre = f.after(&MapSpec::translation(v).unwrap().after(&MapSpec::scaling(2, s).unwrap()).unwrap()).unwrap();
        let hq = weak_qs_constant(&pre, &((c - v) * (1.0 / s)), r / s, &cfg(seed)).unwrap().h;
        prop_assert!((h - hq).abs() <= 1e-9, "pre: {h} vs {hq}");
        Ok(())
    }));
}

#[test]
fn nested_weak_qs_is_monotone_in_radius() {
    ok(run(100, 17, (map2(), prop::collection::vec(0.01f64..1.0, 2..6), any::<u64>()), |(f, radii, seed)| {
        let c = Point::new2(1.5, 0.0);
        let est = weak_qs_nested(&f, &c, &radii, &qs_cfg(seed)).unwrap();
        for i in 0..radii.len() {
            for j in 0..radii.len() {
                if radii[i] <= radii[j] {
                    prop_assert!(est[i].h <= est[j].h);
                }
            }
        }
        Ok(())
    }));
}

#[test]
fn extremal_quotient_dominates_sphere_triples() {
    let maps = builtin_test_maps();
    ok(run(200, 18, (any::<prop::sample::Index>(), any::<prop::sample::Index>(), any::<prop::sample::Index>()), |(m, y, z)| {
        let tm = &maps[m.index(maps.len())];
        let st = standardize(&tm.map, &tm.center, tm.radius, qsphere::qs::default_sphere_samples(tm.map.dim())).unwrap();
        let q = extremal_quotient(&st.g, 2000).unwrap();
        let lattice = sphere_points(tm.map.dim(), 2000);
        let (y, z) = (lattice[y.index(lattice.len())], lattice[z.index(lattice.len())]);
        let g0 = st.g.evaluate(&Point::zero(tm.map.dim())).unwrap();
        let ratio = st.g.evaluate(&y).unwrap().dist(&g0) / st.g.evaluate(&z).unwrap().dist(&g0);
        prop_assert!(ratio <= q * (1.0 + 1e-12), "{}: {ratio} > {q}", tm.name);
        Ok(())
    }));
}

#[test]
fn grotzsch_identities() {
    let ctx = SpecialFnContext::new(2).unwrap();
    let grid: Vec<f64> = (0..100).map(|i| 1.0 + 10f64.powf(-3.0 + 6.0 * i as f64 / 99.0)).collect();
    for w in grid.windows(2) {
        assert!(grotzsch_gamma_2d(w[0]).unwrap() > grotzsch_gamma_2d(w[1]).unwrap());
    }
    for &t in grid.iter().filter(|t| **t <= 1e3) {
        let g = grotzsch_gamma_2d(t).unwrap();
        assert!(gamma_bounds(&ctx, t).unwrap().contains(g), "t = {t}");
        let tau = tau_from_gamma(&ctx, t * t - 1.0).unwrap().exact().unwrap();
        assert!((g - 2.0 * tau).abs() <= 1e-10 * g, "t = {t}");
    }
    ok(run(500, 19, (0.01f64..0.99, 1.0f64..3.0), |(r, a)| {
        let y = distortion_phi(&ctx, a, r).unwrap().exact().unwrap();
        let back = distortion_phi(&ctx, 1.0 / a, y).unwrap().exact().unwrap();
        prop_assert!((back - r).abs() < 1e-8, "{r} -> {y} -> {back}");
        Ok(())
    }));
    ok(run(500, 20, (2usize..5, 0.01f64..10.0, 1.01f64..100.0, 0.001f64..1000.0), |(n, r, k, lam)| {
        let a = ring_modulus_rho(n, r, k * r).unwrap();
        let b = ring_modulus_rho(n, lam * r, lam * k * r).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a, "{a} {b}");
        Ok(())
    }));
}

#[test]
fn dini_is_monotone_in_the_profile() {
    let strat = (prop::collection::vec((0.0f64..0.3, 0.0f64..0.05), 5..40), 0.5f64..3.0, any::<bool>());
    ok(run(300, 21, strat, |(vals, p, lw)| {
        let n = vals.len();
        let t = |i: usize| 10f64.powf(-5.0 + 5.0 * i as f64 / (n - 1) as f64);
        let g1 = ScaleProfile::new((0..n).map(|i| (t(i), vals[i].0)).collect(), ProfileSource::Measured).unwrap();
        let g2 = ScaleProfile::new((0..n).map(|i| (t(i), vals[i].0 + vals[i].1)).collect(), ProfileSource::Measured).unwrap();
        let cfg = DiniConfig::default();
        let a = dini_integral(&DiniSource::Profile(&g1), p, lw, 1e-5, 1.0, &cfg).unwrap().value;
        let b = dini_integral(&DiniSource::Profile(&g2), p, lw, 1e-5, 1.0, &cfg).unwrap().value;
        prop_assert!(a <= b * (1.0 + 1e-12), "{a} > {b}");
        Ok(())
    }));
}

#[test]
fn dini_step_halving_is_stable() {
    let coarse = DiniConfig::default();
    let fine = DiniConfig { nodes_per_decade: 2 * coarse.nodes_per_decade, ..coarse.clone() };
    let cases: [(&(dyn Fn(f64) -> f64 + Sync), f64, bool); 3] = [
        (&|t: f64| t.sqrt(), 2.0, true),
        (&|t: f64| t, 1.0, false),
        (&|t: f64| if t < 1.0 { 1.0 / (1.0 / t).ln().max(1.0) } else { 1.0 }, 2.0, false),
    ];
    for (f, p, lw) in cases {
        let a = dini_integral(&DiniSource::Analytic(f), p, lw, 0.0, 1.0, &coarse).unwrap();
        let b = dini_integral(&DiniSource::Analytic(f), p, lw, 0.0, 1.0, &fine).unwrap();
        assert!((a.value - b.value).abs() < 1e-6, "{} {}", a.value, b.value);
    }
}

#[test]
fn snowflake_length_is_monotone_in_angles() {
    let strat = prop::collection::vec((angle(), 0.0f64..1.0), 1..7);
    ok(run(200, 22, strat, |pairs| {
        let lo: Vec<f64> = pairs.iter().map(|(a, u)| a * u).collect();
        let hi: Vec<f64> = pairs.iter().map(|(a, _)| *a).collect();
        let m = pairs.len();
        let len = |th: Vec<f64>| {
            let c = snowflake(&AngleSchedule::new(Angles::List { thetas: th }, m).unwrap()).unwrap();
            (c.checked_length().unwrap(), c.predicted_length())
        };
        let (a, pa) = len(lo);
        let (b, pb) = len(hi);
        prop_assert!(a <= b * (1.0 + 1e-12) && pa <= pb, "{a} > {b}");
        Ok(())
    }));
}

#[test]
fn snowflake_length_factors_reproduce_polyline_length() {
    for m in [1, 4, 7, 10] {
        for theta in [0.2, 1.0, 60f64.to_radians(), 1.4] {
            let c = snowflake(&AngleSchedule::constant(theta, m).unwrap()).unwrap();
            let measured = qsphere::generators::polyline_length(c.polyline.points());
            assert!((measured - c.predicted_length()).abs() <= 1e-9 * c.predicted_length(), "m={m} θ={theta}");
        }
    }
}

#[test]
fn koch_flatness_is_scale_invariant_at_the_apex() {
    let c = snowflake(&AngleSchedule::constant(60f64.to_radians(), 8).unwrap()).unwrap();
    let pts = c.polyline.points();
    let apex = pts[pts.len() / 2];
    assert!(apex.dist(&Point::new2(0.5, 3f64.sqrt() / 6.0)) < 1e-12);
    let cfg = FlatnessConfig::default();
    let th: Vec<f64> = (1..=4)
        .map(|k| local_flatness(&c.polyline, &apex, 3f64.powi(-k), &cfg).unwrap().theta)
        .collect();
    let (lo, hi) = th.iter().fold((f64::INFINITY, 0.0f64), |a, &t| (a.0.min(t), a.1.max(t)));
    assert!(hi / lo - 1.0 < 0.1, "{th:?}");
}

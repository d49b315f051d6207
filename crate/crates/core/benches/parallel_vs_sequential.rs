use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qsphere::exec;
use qsphere::generators::sphere_sampler;
use qsphere::geometry::{reifenberg_profile, FlatnessConfig};
use qsphere::maps::builtin_test_maps;
use qsphere::qs::{weak_qs_constant, QsConfig};
use qsphere::sampling::sphere_points;

fn flatness_profile(c: &mut Criterion) {
    let s = sphere_sampler(2, 20_000, 1).unwrap();
    let centers = sphere_points(2, 16);
    let scales = [0.4, 0.2, 0.1, 0.05];
    let cfg = FlatnessConfig::default();
    let mut g = c.benchmark_group("reifenberg_profile");
    for sequential in [false, true] {
        let id = BenchmarkId::from_parameter(if sequential { "sequential" } else { "parallel" });
        g.bench_function(id, |b| {
            exec::set_sequential(sequential);
            b.iter(|| reifenberg_profile(&s, &centers, &scales, &cfg).unwrap());
        });
    }
    exec::set_sequential(false);
    g.finish();
}

fn weak_qs(c: &mut Criterion) {
    let m = builtin_test_maps().into_iter().find(|m| m.name == "shear-2d").unwrap();
    let cfg = QsConfig { triple_count: 50_000, refine_iterations: 20, ..QsConfig::default() };
    let mut g = c.benchmark_group("weak_qs_constant");
    for sequential in [false, true] {
        let id = BenchmarkId::from_parameter(if sequential { "sequential" } else { "parallel" });
        g.bench_function(id, |b| {
            exec::set_sequential(sequential);
            b.iter(|| weak_qs_constant(&m.map, &m.center, m.radius, &cfg).unwrap());
        });
    }
    exec::set_sequential(false);
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = flatness_profile, weak_qs
}
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sphwave::fields::{sphere_point, Incident, PlaneWave};
use sphwave::grid::{build_uniform_partition, sample_scalar, sample_vector_spherical};
use sphwave::multiscatter::{assemble_and_solve, normalized_translation, sound_soft_data, Scatterer, ScattererSet};
use sphwave::radial::RadialContext;
use sphwave::sphtrans::{sph_forward_with, ElemFactorTables};
use sphwave::{solve_acoustic_single, sph_forward, vsh_forward};

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("transforms");
    g.sample_size(10);

    let pw = PlaneWave::new(100.0, [1.0, 0.0, 0.0]);
    let p = build_uniform_partition(3, 4, 120).unwrap();
    let f = sample_scalar(|t, ph| pw.on_sphere(1.0, t, ph), &p);
    g.bench_function("sph k=100 N=120 L=145", |b| b.iter(|| sph_forward(black_box(&f), 145).unwrap()));
    let tables = ElemFactorTables::new(&p, 145);
    g.bench_function("sph k=100 N=120 L=145, tables reused", |b| {
        b.iter(|| sph_forward_with(&tables, black_box(&f)).unwrap())
    });

    let pw = PlaneWave::new(20.0, [1.0, 1.0, 1.0]);
    let p = build_uniform_partition(3, 4, 40).unwrap();
    let v = sample_vector_spherical(|t, ph| pw.vsh_test_field(1.0, t, ph), &p);
    g.bench_function("vsh k=20 N=40 L=20", |b| b.iter(|| vsh_forward(black_box(&v), 20).unwrap()));
    g.finish();
}

fn scattering(c: &mut Criterion) {
    let mut g = c.benchmark_group("scattering");
    g.sample_size(10);

    g.bench_function("radial ratios L=300, 100 radii", |b| {
        let ctx = RadialContext::new(40.0, 0.25, 300).unwrap();
        let radii: Vec<f64> = (0..100).map(|i| 0.25 * (1.0 + 0.1 * i as f64)).collect();
        b.iter(|| ctx.log_ratios_many(black_box(&radii)).unwrap())
    });

    let pw = PlaneWave::new(40.0, [1.0, 0.0, 0.0]);
    let p = build_uniform_partition(3, 4, 50).unwrap();
    let data = sample_scalar(|t, ph| -pw.at(sphere_point(0.25, t, ph)), &p);
    g.bench_function("single sphere k=40 L=40", |b| {
        b.iter(|| solve_acoustic_single(black_box(&data), 40.0, 0.25, 40).unwrap())
    });

    g.bench_function("translation table k=50 L=40", |b| {
        b.iter(|| normalized_translation(black_box([2.0, 0.0, 0.0]), 50.0, 0.25, 0.25, 40).unwrap())
    });

    let set = ScattererSet::new(vec![
        Scatterer { center: [-1.0, 0.0, 0.0], radius: 0.25 },
        Scatterer { center: [1.0, 0.0, 0.0], radius: 0.25 },
    ])
    .unwrap();
    let data = sound_soft_data(&set, &Incident::Plane(PlaneWave::new(50.0, [0.0, 0.0, 1.0])), &p);
    g.bench_function("two spheres k=50 L=40", |b| b.iter(|| assemble_and_solve(&set, 50.0, 40, black_box(&data)).unwrap()));
    g.finish();
}

criterion_group!(benches, transforms, scattering);
criterion_main!(benches);

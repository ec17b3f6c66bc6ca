use criterion::{black_box, criterion_group, criterion_main, Criterion};
use japar_core::features::{extract_features, FeatureOptions};
use japar_core::hysteresis::integrate;
use japar_core::japar::fit;
use japar_core::jiles92::estimate;
use japar_core::magnetics::anhysteretic_implicit;
use japar_core::synthetic::*;
use japar_core::*;

fn langevin_eval(c: &mut Criterion) {
    let xs: Vec<f64> = (0..1000).map(|i| -20.0 + 0.04 * i as f64).collect();
    c.bench_function("langevin/1000", |b| {
        b.iter(|| xs.iter().map(|&x| langevin(black_box(x))).sum::<f64>())
    });
}

fn implicit_curve(c: &mut Criterion) {
    let p = steel_grid()[0].params();
    let fields = uniform_fields(GRID_SAMPLES, GRID_H_MAX);
    c.bench_function("anhysteretic_implicit/200", |b| {
        b.iter(|| {
            fields
                .iter()
                .map(|&h| anhysteretic_implicit(black_box(h), &p, STEEL_MS).unwrap())
                .sum::<f64>()
        })
    });
}

fn japar_fit(c: &mut Criterion) {
    let data = grid_curve(&steel_grid()[0]).unwrap();
    let mut group = c.benchmark_group("japar_fit");
    group.sample_size(10);
    for (name, stride, parallel) in [("full/serial", None, false), ("full/parallel", None, true), ("stride50", Some(50), true)] {
        let cfg = JaParConfig {
            coarse_stride: stride,
            parallel,
            ..JaParConfig::default()
        };
        group.bench_function(name, |b| b.iter(|| fit(black_box(&data), &steel(), &cfg).unwrap()));
    }
    group.finish();
}

fn loop_integration(c: &mut Criterion) {
    let p = HysteresisParams::new(972.0, 1.4e-3, 0.1, 1000.0, STEEL_MS).unwrap();
    let w = FieldWaveform::symmetric_cycles(1e4, 3, 2000).unwrap();
    c.bench_function("integrate/3x2000", |b| {
        b.iter(|| integrate(&p, black_box(&w), 0.0, &SimOptions::default()).unwrap())
    });
}

fn jiles92_estimate(c: &mut Criterion) {
    let truth = HysteresisParams::new(972.0, 1.4e-3, 0.1, 1000.0, STEEL_MS).unwrap();
    let sim = simulate_loop(&truth, 1e4, 3, 400, &SimOptions::default()).unwrap();
    let anh = anhysteretic_curve(&steel_grid()[0].params(), STEEL_MS, &uniform_fields(2000, 1e4)).unwrap();
    let features =
        extract_features(&sim.first_magnetization, &sim.last_cycle, &anh, &FeatureOptions::default()).unwrap();
    let mut group = c.benchmark_group("jiles92");
    group.sample_size(10);
    group.bench_function("estimate", |b| {
        b.iter(|| estimate(black_box(&features), &steel(), &sim.last_cycle, &Jiles92Config::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, langevin_eval, implicit_curve, japar_fit, loop_integration, jiles92_estimate);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion};
use rei_gates::dipolar::{self, DipolarParams, ExactOptions, COMPUTATIONAL};
use rei_gates::exec::{par_map, seq_map, with_workers};
use rei_gates::haar::average_fidelity_monte_carlo;

fn exact_point(r: &f64) -> f64 {
    let p = DipolarParams::at_separation(*r);
    dipolar::md_exact_fidelity(&p, &ExactOptions::schedule_only()).unwrap().fidelity
}

fn separation_sweep(c: &mut Criterion) {
    let rs: Vec<f64> = (0..8).map(|i| (5.0 + i as f64) * 1e-9).collect();
    let mut g = c.benchmark_group("md_exact_sweep");
    g.sample_size(10);
    g.bench_function("sequential", |b| b.iter(|| seq_map(&rs, exact_point)));
    g.bench_function("parallel", |b| b.iter(|| par_map(&rs, exact_point)));
    g.finish();
}

fn haar_monte_carlo(c: &mut Criterion) {
    let (e, u) = dipolar::md_exact_channel(&DipolarParams::default(), &ExactOptions::schedule_only()).unwrap();
    let run = || average_fidelity_monte_carlo(&e, &u, &COMPUTATIONAL, 4000, 1).unwrap();
    let mut g = c.benchmark_group("haar_monte_carlo");
    g.sample_size(10);
    g.bench_function("one_thread", |b| b.iter(|| with_workers(1, run)));
    g.bench_function("all_threads", |b| b.iter(run));
    g.finish();
}

criterion_group!(benches, separation_sweep, haar_monte_carlo);
criterion_main!(benches);

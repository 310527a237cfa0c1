//! Exhaustive scans on the default rayon pool against a one-thread pool.
//! Build with `--no-default-features` to time the sequential fallback itself.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use granulum::fixtures::five_element_space;
use granulum::grif::{check_semiring, form_theorems, FormTau};
use granulum::inverse::{consistency_filter, enumerate_models, observations_of, Generator, UniverseSpec};
use granulum::norms::NormTriple;
use granulum::rational::grid;
use granulum::rif::{prif_domains, prif_oracle_on, InclusionFn};
use granulum::Universe;
use rayon::ThreadPool;

fn pools() -> Vec<(&'static str, ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("one-thread pool");
    let all = rayon::ThreadPoolBuilder::new().build().expect("default pool");
    vec![("sequential", one), ("parallel", all)]
}

fn scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("scans");
    g.sample_size(10);
    let s = five_element_space();
    let g3 = grid(2);
    let u = Universe::parse_list("w,x,y").unwrap();
    let models = enumerate_models(&UniverseSpec::Known(u), &Generator::Relations).unwrap();
    let truth = models[models.len() / 2].space().unwrap();
    let obs = observations_of(&truth);
    let domains: Vec<_> = prif_domains().into_iter().take(27).collect();

    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new("form_theorems_k0", name), &pool, |b, p| {
            b.iter(|| p.install(|| form_theorems(&s, FormTau::K0).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("semiring_min_max", name), &pool, |b, p| {
            b.iter(|| p.install(|| check_semiring(&NormTriple::min_max(), &g3).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("consistency_filter_3pt", name), &pool, |b, p| {
            b.iter(|| p.install(|| consistency_filter(&models, &obs, &InclusionFn::K0).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("prif_three_point_orders", name), &pool, |b, p| {
            b.iter(|| p.install(|| prif_oracle_on(&domains)))
        });
    }
    g.finish();
}

criterion_group!(benches, scans);
criterion_main!(benches);

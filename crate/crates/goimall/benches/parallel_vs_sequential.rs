use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use goimall::corpus::{chunk_families, enumerate, with_cuts};
use goimall::goi_engine::verify_main_theorem;
use goimall::par::Exec;
use goimall::traced::{check_all, Law};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn corpus(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 6), &exec, |b, &exec| b.iter(|| enumerate(6, exec).len()));
    }
    g.finish();
}

fn theorem(c: &mut Criterion) {
    let jobs: Vec<_> = with_cuts(5, Exec::Parallel)
        .into_iter()
        .flat_map(|e| chunk_families(&e.proof, 4, 16).into_iter().map(move |f| (e.proof.clone(), f)))
        .collect();
    let mut g = c.benchmark_group("verify_main_theorem");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, jobs.len()), &exec, |b, &exec| {
            b.iter(|| exec.map(&jobs, |(p, nu)| verify_main_theorem(p, nu, Exec::Sequential).pass()))
        });
    }
    g.finish();
}

fn laws(c: &mut Criterion) {
    let mut g = c.benchmark_group("trace_laws");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 200), &exec, |b, &exec| {
            b.iter(|| check_all(&Law::AXIOMS, 200, 7, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, corpus, theorem, laws);
criterion_main!(benches);

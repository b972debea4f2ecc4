use altsim_core::exec::Exec;
use altsim_core::random::{derive_seed, random_ats, RandomSpec};
use altsim_core::relations::{altsim_basic_with, IterOptions};
use altsim_core::sweep::run_batch;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn basic_relation(c: &mut Criterion) {
    let mut group = c.benchmark_group("altsim_basic");
    for n in [16, 32, 64] {
        let k = random_ats(&RandomSpec::new(n, 3, 3, 2, 1)).unwrap();
        let kp = random_ats(&RandomSpec::new(n, 3, 3, 2, 2)).unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| altsim_basic_with(&k, &kp, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_batch");
    group.sample_size(10);
    let instances: Vec<(RandomSpec, RandomSpec)> = (0..32)
        .map(|i| {
            let l = RandomSpec::new(12, 3, 3, 2, derive_seed(7, 2 * i));
            let r = RandomSpec::new(12, 3, 3, 2, derive_seed(7, 2 * i + 1));
            (l, r)
        })
        .collect();
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| run_batch(&instances, IterOptions::default(), exec)));
    }
    group.finish();
}

criterion_group!(benches, basic_relation, batch);
criterion_main!(benches);

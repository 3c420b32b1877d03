use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qhyper::batch::{verify, Strategy, VerifyConfig};
use qhyper::jorgensen::conjugation_orbit;
use qhyper::spn1::{is_member, random_perturbation, stream_rng};
use qhyper::{QMatrix, Quaternion};

fn verify_strategies(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(20);
    for n in [1, 3] {
        let cfg = VerifyConfig::new(n, 42, 1000);
        for (name, strategy) in [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, n), &cfg, |b, cfg| {
                b.iter(|| verify(cfg, strategy))
            });
        }
    }
    group.finish();
}

fn orbit(c: &mut Criterion) {
    let d = [Quaternion::ONE, Quaternion::real(1.05), Quaternion::real(1.0 / 1.05)];
    let g = is_member(&QMatrix::from_diag(&d), 1e-12).unwrap();
    let h = random_perturbation(2, 0.05, &mut stream_rng(1, 0)).unwrap();
    c.bench_function("conjugation_orbit/64", |b| b.iter(|| conjugation_orbit(&g, &h, 64)));
}

criterion_group!(benches, verify_strategies, orbit);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jacobi_curves::classify::alphas;
use jacobi_curves::exactalg::scalar::{rat, Rat};
use jacobi_curves::sweep;

/// Half exceptional tuples (scaled alphas), half random ones, for m = 2..=4.
fn tuples(count: usize) -> Vec<Vec<Rat>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..count)
        .map(|k| {
            let m = 2 + k % 3;
            if k % 2 == 0 {
                let s = rat(rng.gen_range(1..5), rng.gen_range(1..4));
                let mut pow = s.clone();
                alphas(m)
                    .into_iter()
                    .map(|a| {
                        let v = a * pow.clone();
                        pow = pow.clone() * s.clone();
                        v
                    })
                    .collect()
            } else {
                (0..m).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..4))).collect()
            }
        })
        .collect()
}

fn flatness(c: &mut Criterion) {
    let items = tuples(24);
    let mut g = c.benchmark_group("flatness_sweep");
    g.sample_size(10);
    for (name, parallel) in [("sequential", false), ("parallel", true)] {
        g.bench_with_input(BenchmarkId::new(name, items.len()), &items, |b, items| {
            b.iter(|| sweep::run(items, parallel, |r| sweep::flatness_matches(r).unwrap_or(false)))
        });
    }
    g.finish();
}

criterion_group!(benches, flatness);
criterion_main!(benches);

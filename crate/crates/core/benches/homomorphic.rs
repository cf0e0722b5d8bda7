//! Batch encrypt/evaluate throughput: a sequential loop against a rayon
//! `par_iter` over the same workload, plus single-op latencies per scheme.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use vault_core::evaluator::{evaluate, supported_op};
use vault_core::schemes::{Keypair, SchemeId};

fn test_key(scheme: SchemeId, bits: u64) -> Keypair {
    let mut rng = ChaCha20Rng::seed_from_u64(0xbe7c);
    let add_bound = (scheme == SchemeId::ElGamalAdd).then_some(1 << 20);
    Keypair::generate(scheme, bits, add_bound, &mut rng).unwrap()
}

fn plaintext(scheme: SchemeId, rng: &mut ChaCha20Rng) -> BigUint {
    match scheme {
        SchemeId::Gm => BigUint::from(rng.gen_range(0..=1u32)),
        SchemeId::ElGamalAdd => BigUint::from(rng.gen_range(0..1u64 << 16)),
        _ => BigUint::from(rng.gen_range(1..1u64 << 32)),
    }
}

fn bench_encrypt_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("encrypt_batch_64");
    group.sample_size(10);
    for scheme in [SchemeId::Rsa, SchemeId::Paillier, SchemeId::ElGamalAdd] {
        let kp = test_key(scheme, 256);
        let pk = kp.public();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let messages: Vec<BigUint> = (0..64).map(|_| plaintext(scheme, &mut rng)).collect();

        group.bench_with_input(BenchmarkId::new("sequential", scheme), &scheme, |b, _| {
            b.iter(|| {
                let mut rng = ChaCha20Rng::seed_from_u64(2);
                messages
                    .iter()
                    .map(|m| pk.encrypt(m, &mut rng).unwrap())
                    .collect::<Vec<_>>()
            });
        });
        group.bench_with_input(BenchmarkId::new("parallel", scheme), &scheme, |b, _| {
            b.iter(|| {
                messages
                    .par_iter()
                    .map_init(
                        || ChaCha20Rng::seed_from_u64(2),
                        |rng, m| pk.encrypt(m, rng).unwrap(),
                    )
                    .collect::<Vec<_>>()
            });
        });
    }
    group.finish();
}

fn bench_evaluate_fold(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_fold_8");
    for scheme in SchemeId::ALL {
        let kp = test_key(scheme, 256);
        let pk = kp.public();
        let op = supported_op(scheme);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let cts: Vec<_> = (0..8)
            .map(|_| pk.encrypt(&plaintext(scheme, &mut rng), &mut rng).unwrap())
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(scheme), &scheme, |b, _| {
            b.iter(|| evaluate(op, &cts, &pk).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_encrypt_batch, bench_evaluate_fold);
criterion_main!(benches);

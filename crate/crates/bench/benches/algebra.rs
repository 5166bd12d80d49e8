use std::hint::black_box;

use clocknet::constructions::family_13;
use clocknet::factorization::{identity_factorization, verify_factorization};
use clocknet::{IntMatrix, Support, Verification};
use criterion::{criterion_group, criterion_main, Criterion};

fn determinant(c: &mut Criterion) {
    let m = IntMatrix::from_fn(12, 12, |i, j| ((i * 7 + j * 3) % 5) as i64 - 2 + i64::from(i == j) * 3);
    c.bench_function("det 12x12", |b| b.iter(|| black_box(&m).det().unwrap()));
}

fn factorization(c: &mut Criterion) {
    let support: Support = "1,2,4".parse().unwrap();
    c.bench_function("identity_factorization n=200 R={1,2,4}", |b| {
        b.iter(|| {
            let f = identity_factorization(black_box(200), &support).unwrap();
            verify_factorization(&f, Verification::Integer).unwrap()
        })
    });
    c.bench_function("family_13 n=300", |b| b.iter(|| family_13(black_box(300)).unwrap()));
}

criterion_group!(benches, determinant, factorization);
criterion_main!(benches);

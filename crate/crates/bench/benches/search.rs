use std::hint::black_box;

use clocknet::search::{linear_solvable, nonlinear_solvable_z2, solvability_table, SearchBudget};
use clocknet::{Modulus, Support};
use criterion::{criterion_group, criterion_main, Criterion};

fn support(text: &str) -> Support {
    text.parse().unwrap()
}

fn linear(c: &mut Criterion) {
    let budget = SearchBudget::default();
    let r13 = support("1,3");
    let mut group = c.benchmark_group("linear_solvable");
    for s in [2, 3] {
        let s = Modulus::new(s).unwrap();
        group.bench_function(format!("n=40 R={{1,3}} s={s}"), |b| {
            b.iter(|| linear_solvable(black_box(40), &r13, s, &budget).unwrap())
        });
    }
    let r15 = support("1,5");
    let wide = SearchBudget::unbounded_space();
    group.sample_size(10);
    group.bench_function("n=20 R={1,5} s=2 sparse", |b| {
        b.iter(|| linear_solvable(black_box(20), &r15, Modulus::new(2).unwrap(), &wide).unwrap())
    });
    group.finish();
}

fn table(c: &mut Criterion) {
    let budget = SearchBudget::default();
    let moduli: Vec<Modulus> = [2, 3].into_iter().map(|s| Modulus::new(s).unwrap()).collect();
    let r13 = support("1,3");
    c.bench_function("table R={1,3} s=2,3 n=4..40", |b| {
        b.iter(|| solvability_table(&r13, &moduli, black_box(4..=40), &budget).unwrap())
    });
}

fn nonlinear(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonlinear_z2");
    group.sample_size(10);
    for (n, r) in [(9, "1,2"), (11, "1,3")] {
        let sup = support(r);
        group.bench_function(format!("n={n} R={{{r}}}"), |b| {
            b.iter(|| nonlinear_solvable_z2(black_box(n), &sup).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, linear, table, nonlinear);
criterion_main!(benches);

mod common;

use clocknet::factorization::verify_factorization;
use clocknet::network::{check_solves, Circuit};
use clocknet::search::linear::MatrixCodec;
use clocknet::search::{
    decide, linear_solvable, linear_witness, nonlinear_solvable_z2, solvable_set, MethodChoice, SearchBudget,
};
use clocknet::{
    AtomicMatrix, ClockSpec, LinearCircuit, Modulus, Network, Support, Verdict, Verification,
};
use common::{config, s, sup};
use proptest::prelude::*;

fn small_supports() -> Vec<Support> {
    ["1,2", "1,3", "2,3", "1,2,3"].into_iter().map(sup).collect()
}

proptest! {
    #![proptest_config(config(64))]

    /// Every product of `t` atomic matrices with a unit corner lies in layer `t`.
    #[test]
    fn reachable_layers_are_closed_under_products(
        support in prop::sample::select(small_supports()),
        sv in 2u64..=3,
        t in 1usize..12,
        raw in prop::collection::vec(prop::collection::vec(0u64..3, 3), 12),
    ) {
        let modulus = s(sv);
        let r = support.max();
        let profile = solvable_set(&support, modulus, &SearchBudget::default()).unwrap();
        let mut product = clocknet::ModMatrix::identity(modulus, r);
        for alpha in raw.iter().take(t) {
            let mut alpha: Vec<i64> = alpha[..support.len()].iter().map(|&x| (x % sv) as i64).collect();
            let last = alpha.len() - 1;
            if !modulus.is_unit(alpha[last] as u64) {
                alpha[last] = 1;
            }
            let a = AtomicMatrix::new(&support, alpha).unwrap();
            product = a.to_mod(modulus).mul(&product).unwrap();
        }
        let code = MatrixCodec::new(r, modulus).unwrap().encode(product.entries());
        prop_assert!(profile.reachable(t).contains(code));
    }

    /// A solving linear circuit has invertible atomic factors, so the search finds `n`.
    #[test]
    fn solving_circuits_are_found(
        support in prop::sample::select(small_supports()),
        extra in 0usize..8,
        sv in 2u64..=3,
        raw in prop::collection::vec(0u64..3, 33),
    ) {
        let modulus = s(sv);
        let spec = ClockSpec::new(support.max() + extra, support.clone()).unwrap();
        let c = LinearCircuit::from_fn(&spec, modulus, |k, j| {
            raw[(k * 3 + support.index_of(j).unwrap()) % raw.len()] as i64
        });
        if check_solves(&Network::clock(&spec), &c).unwrap() {
            let r = spec.r();
            prop_assert!((r + 1..=spec.n() + r).all(|k| modulus.is_unit(c.coefficient(k, r))));
            prop_assert!(linear_solvable(spec.n(), &support, modulus, &SearchBudget::default()).unwrap());
        }
    }
}

#[test]
fn witnesses_exist_exactly_when_solvable() {
    let budget = SearchBudget::default();
    for support in small_supports() {
        for sv in [2, 3] {
            let modulus = s(sv);
            for n in support.max()..=14 {
                let solvable = linear_solvable(n, &support, modulus, &budget).unwrap();
                let witness = linear_witness(n, &support, modulus, &budget).unwrap();
                assert_eq!(witness.is_some(), solvable, "n = {n} R = {support} s = {sv}");
                if let Some(w) = witness {
                    assert_eq!(w.circuit.modulus(), modulus);
                    assert!(check_solves(&Network::clock(w.circuit.spec()), &w.circuit).unwrap());
                    assert!(verify_factorization(&w.factorization, Verification::Modular(modulus)).unwrap());
                    assert!(w.matrix.tail_is_identity_mod(modulus));
                }
            }
        }
    }
}

#[test]
fn nonlinear_solvability_contains_linear() {
    let budget = SearchBudget::default();
    let two = s(2);
    for support in ["1,2", "1,3", "2,3"].map(sup) {
        for n in support.max()..=14 {
            if linear_solvable(n, &support, two, &budget).unwrap() {
                assert!(nonlinear_solvable_z2(n, &support).unwrap(), "n = {n} R = {support}");
            }
        }
    }
}

#[test]
fn verdicts_are_invariant_under_scaling() {
    let budget = SearchBudget::unbounded_space();
    let verdict = |n: usize, support: &Support, modulus: Modulus| {
        let spec = ClockSpec::new(n, support.clone()).unwrap();
        decide(&spec, modulus, MethodChoice::Linear, &budget, false).unwrap().verdict
    };
    for support in ["1,2", "1,3", "2,3"].map(sup) {
        for d in [2, 3] {
            let scaled = Support::new(support.iter().map(|j| j * d)).unwrap();
            for sv in [2, 3] {
                for n in support.max()..=10 {
                    assert_eq!(verdict(n * d, &scaled, s(sv)), verdict(n, &support, s(sv)), "n = {n} R = {support} d = {d}");
                    for off in 1..d {
                        assert_eq!(verdict(n * d + off, &scaled, s(sv)), Verdict::Unsolvable);
                    }
                }
            }
        }
    }
}

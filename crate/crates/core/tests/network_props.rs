mod common;

use clocknet::constructions::{
    check_circuit_matrix, circuit_to_matrix, family_13, named_matrix, universal_validate, validate_circuit_matrix,
};
use clocknet::network::{build_clock_digraph, check_solves, gcd_reduce, verify_digraph_isomorphism};
use clocknet::{ClockSpec, GcdVerdict, LinearCircuit, Network, NamedMatrix, Support};
use common::{config, s, sup};
use proptest::prelude::*;

fn small_support() -> impl Strategy<Value = Support> {
    prop::sample::select(vec!["1", "2", "1,2", "1,3", "2,3", "1,2,3"]).prop_map(sup)
}

/// A random linear circuit on `N_n(R)` over `Z_s` with `n ≤ 9`, `s ≤ 4`.
fn circuit() -> impl Strategy<Value = LinearCircuit> {
    (small_support(), 0usize..7, 2u64..5).prop_flat_map(|(support, extra, sv)| {
        let spec = ClockSpec::new(support.max() + extra, support.clone()).unwrap();
        let cells = spec.n() * support.len();
        prop::collection::vec(0..sv, cells).prop_map(move |flat| {
            let coeffs = flat.chunks(spec.support().len()).map(<[u64]>::to_vec).collect();
            LinearCircuit::new(&spec, s(sv), coeffs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn in_neighbourhoods_have_full_size(support in small_support(), extra in 0usize..10) {
        let spec = ClockSpec::new(support.max() + extra, support.clone()).unwrap();
        let net = Network::clock(&spec);
        let r = spec.r();
        for k in r + 1..=spec.n() + r {
            let gamma = net.gamma(k);
            prop_assert_eq!(gamma.len(), support.len());
            prop_assert!(gamma.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(gamma.iter().all(|&i| support.contains(k - i)));
        }
    }

    #[test]
    fn solving_iff_matrix_tail_is_identity(c in circuit()) {
        let net = Network::clock(c.spec());
        let m = circuit_to_matrix(&c, &net).unwrap();
        let modulus = clocknet::network::Circuit::modulus(&c);
        prop_assert_eq!(check_solves(&net, &c).unwrap(), m.tail_is_identity_mod(modulus));
    }

    #[test]
    fn validation_round_trips(c in circuit()) {
        let net = Network::clock(c.spec());
        let modulus = clocknet::network::Circuit::modulus(&c);
        let m = circuit_to_matrix(&c, &net).unwrap();
        let recovered = validate_circuit_matrix(&m, c.spec().support(), modulus).unwrap()
            .expect("matrix of a circuit is valid");
        let again = circuit_to_matrix(&recovered, &net).unwrap();
        prop_assert_eq!(again.matrix().reduce_mod(modulus), m.matrix().reduce_mod(modulus));
    }

    #[test]
    fn interleaved_copies_preserve_solvability(c in circuit()) {
        let reduced = c.spec();
        prop_assume!(reduced.support().gcd() == 1);
        let d = 2;
        let support = Support::new(reduced.support().iter().map(|j| j * d)).unwrap();
        let spec = ClockSpec::new(reduced.n() * d, support).unwrap();
        match gcd_reduce(&spec) {
            GcdVerdict::Reduced { spec: back, copies } => {
                prop_assert_eq!(copies, d);
                prop_assert_eq!(&back, reduced);
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
        let modulus = clocknet::network::Circuit::modulus(&c);
        let lifted = LinearCircuit::from_fn(&spec, modulus, |k, j| c.coefficient((k - 1) / d + 1, j / d) as i64);
        prop_assert_eq!(
            check_solves(&Network::clock(&spec), &lifted).unwrap(),
            check_solves(&Network::clock(reduced), &c).unwrap()
        );
    }

    #[test]
    fn digraphs_are_self_isomorphic(support in small_support(), n in 3usize..12) {
        prop_assume!(n >= support.max());
        let g = build_clock_digraph(n, &support).unwrap();
        let id: Vec<usize> = (0..n).collect();
        prop_assert!(verify_digraph_isomorphism(&g, &g, &id).unwrap());
    }
}

#[test]
fn universal_matrices_are_valid_for_every_small_modulus() {
    let r13 = sup("1,3");
    let mut matrices: Vec<_> = [NamedMatrix::M10, NamedMatrix::M14].into_iter().map(named_matrix).collect();
    matrices.extend((12..=30).map(|n| family_13(n).unwrap()));
    for m in &matrices {
        assert!(universal_validate(m, &r13).unwrap().is_some());
        assert!(m.tail_is_identity());
        for sv in 2..=7 {
            assert!(check_circuit_matrix(m, &r13, s(sv)).unwrap().is_valid(), "n = {} s = {sv}", m.n());
        }
    }
}

#![allow(dead_code)]

use clocknet::{Modulus, Support};
use proptest::test_runner::{Config, RngSeed};

/// Seed shared by every property test in this crate.
pub const SEED: u64 = 0x00c1_0c4e_7a11;

pub fn config(cases: u32) -> Config {
    eprintln!("proptest seed {SEED:#x}, {cases} cases");
    Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn sup(text: &str) -> Support {
    text.parse().expect("valid support")
}

pub fn s(x: u64) -> Modulus {
    Modulus::new(x).expect("valid modulus")
}

/// Every `R ⊆ [r]` with `r ∈ R` and `gcd(R) = 1`.
pub fn coprime_supports(r: usize) -> Vec<Support> {
    (0u32..1 << (r - 1))
        .map(|mask| Support::new((1..r).filter(|j| mask >> (j - 1) & 1 == 1).chain([r])).unwrap())
        .filter(|sup| sup.gcd() == 1)
        .collect()
}

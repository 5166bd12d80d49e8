//! Clock networks `N_n(R)`: linear algebra over `Z` and `Z_s`, circuit
//! matrices, atomic-matrix factorizations, and exact solvability searches.

pub mod constructions;
pub mod error;
pub mod factorization;
pub mod linalg;
pub mod network;
pub mod search;

pub use constructions::{CircuitMatrix, MatrixCheck, NamedMatrix, Scope};
pub use error::{Error, Result};
pub use factorization::{AtomicMatrix, Factorization, StepMatrix, ToggleMatrix, Verification};
pub use linalg::{IntMatrix, ModMatrix, Modulus};
pub use network::{
    BoundsReport, Circuit, ClockSpec, Digraph, GcdVerdict, LinearCircuit, Network, Permutation, Support,
    TableCircuit, Valuation,
};
pub use search::{Decision, Method, MethodChoice, ReachabilityProfile, SearchBudget, Verdict};

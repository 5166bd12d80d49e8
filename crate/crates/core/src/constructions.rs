//! Explicit circuit matrices and the conversions between circuit matrices
//! and linear circuits.
//!
//! A circuit matrix for `N_n(R)` is an `(n + r) x r` matrix whose row `k`
//! (1-based) expresses `X_k` as a linear form in the input. It is valid when
//! the first `r` rows are `I_r` and every later row is a combination of the
//! rows `k - j`, `j ∈ R`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_int, solve_mod, IntMatrix, ModMatrix, Modulus};
use crate::network::{Circuit, ClockSpec, LinearCircuit, Network, Support};

/// Which moduli a circuit matrix is claimed or known to be valid for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Modular(u64),
    Universal,
    Unspecified,
}

/// An `(n + r) x r` integer matrix together with its `(n, R, s)` metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMatrix {
    matrix: IntMatrix,
    support: Option<Support>,
    scope: Scope,
}

impl CircuitMatrix {
    /// Requires at least `r` rows, where `r` is the column count.
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        if matrix.cols() == 0 || matrix.rows() < matrix.cols() {
            return Err(Error::dim(format!(
                "a circuit matrix needs at least r rows and r >= 1 columns, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(CircuitMatrix {
            matrix,
            support: None,
            scope: Scope::Unspecified,
        })
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = Some(support);
        self
    }

    pub fn with_scope(mut self, scope: Scope) -> Self {
        self.scope = scope;
        self
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    pub fn support(&self) -> Option<&Support> {
        self.support.as_ref()
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn r(&self) -> usize {
        self.matrix.cols()
    }

    /// Length of the network: rows minus `r`.
    pub fn n(&self) -> usize {
        self.matrix.rows() - self.matrix.cols()
    }

    /// Row `k`, 1-based as in `ω(k)`.
    pub fn omega(&self, k: usize) -> &[i64] {
        self.matrix.row(k - 1)
    }

    fn block_is_identity(&self, first_row: usize) -> bool {
        let r = self.r();
        (0..r).all(|i| (0..r).all(|j| self.matrix.get(first_row + i, j) == i64::from(i == j)))
    }

    pub fn head_is_identity(&self) -> bool {
        self.block_is_identity(0)
    }

    /// Whether the last `r` rows form `I_r` (over the integers).
    pub fn tail_is_identity(&self) -> bool {
        self.block_is_identity(self.n())
    }

    /// Whether the last `r` rows form `I_r` modulo `s`.
    pub fn tail_is_identity_mod(&self, s: Modulus) -> bool {
        let r = self.r();
        let n = self.n();
        (0..r).all(|i| {
            (0..r).all(|j| s.reduce(self.matrix.get(n + i, j)) == u64::from(i == j))
        })
    }

    /// JSON document with the `n`, `R`, `s` metadata and the rows.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<&[i64]> = self.matrix.row_iter().collect();
        serde_json::json!({
            "n": self.n(),
            "r": self.r(),
            "R": self.support.as_ref().map(|s| s.as_slice().to_vec()),
            "s": match self.scope {
                Scope::Modular(s) => serde_json::json!(s),
                Scope::Universal => serde_json::json!("universal"),
                Scope::Unspecified => serde_json::Value::Null,
            },
            "rows": rows,
        })
    }
}

impl fmt::Display for CircuitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.matrix.fmt(f)
    }
}

/// `𝔍_{a,b}` by its defining recursion: `I_a` when `a = b`, otherwise
/// `[𝔍_{a,b-a}, I_a]` for `a < b` and `[𝔍_{a-b,b}; I_b]` for `a > b`.
pub fn gim(a: usize, b: usize) -> Result<IntMatrix> {
    if a == 0 || b == 0 {
        return Err(Error::params("gim needs positive dimensions"));
    }
    Ok(gim_rec(a, b))
}

fn gim_rec(a: usize, b: usize) -> IntMatrix {
    use std::cmp::Ordering;
    match a.cmp(&b) {
        Ordering::Equal => IntMatrix::identity(a),
        Ordering::Less => gim_rec(a, b - a)
            .hstack(&IntMatrix::identity(a))
            .expect("both blocks have a rows"),
        Ordering::Greater => gim_rec(a - b, b)
            .vstack(&IntMatrix::identity(b))
            .expect("both blocks have b columns"),
    }
}

/// `𝔐_{n,r}`: `I_r` stacked on top of `𝔍_{n,r}`.
pub fn full_clock_matrix(n: usize, r: usize) -> Result<CircuitMatrix> {
    if r == 0 || n < r {
        return Err(Error::params(format!(
            "full clock matrix needs n >= r >= 1, got n = {n}, r = {r}"
        )));
    }
    let m = IntMatrix::identity(r).vstack(&gim(n, r)?)?;
    Ok(CircuitMatrix::new(m)?
        .with_support(Support::full(r)?)
        .with_scope(Scope::Universal))
}

/// Detailed outcome of checking a circuit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixCheck<T> {
    Valid(T),
    /// The first `r` rows are not `I_r`.
    BadHead,
    /// Row `k` (1-based) is not a combination of the rows `k - j`, `j ∈ R`.
    RowUnreachable(usize),
}

impl<T> MatrixCheck<T> {
    pub fn ok(self) -> Option<T> {
        match self {
            MatrixCheck::Valid(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, MatrixCheck::Valid(_))
    }
}

fn check_shape(m: &CircuitMatrix, support: &Support) -> Result<ClockSpec> {
    if m.r() != support.max() {
        return Err(Error::dim(format!(
            "matrix has {} columns but max(R) = {}",
            m.r(),
            support.max()
        )));
    }
    ClockSpec::new(m.n(), support.clone())
        .map_err(|_| Error::dim(format!("matrix has {} rows, fewer than 2r", m.matrix.rows())))
}

/// The offsets `j ∈ R` usable for row `k`, ascending.
fn offsets(support: &Support, k: usize) -> Vec<usize> {
    support.iter().filter(|&j| j < k).collect()
}

/// Checks the row-combination property modulo `s` and recovers the
/// coefficients `λ_{k,j}`.
pub fn check_circuit_matrix(
    m: &CircuitMatrix,
    support: &Support,
    s: Modulus,
) -> Result<MatrixCheck<LinearCircuit>> {
    let spec = check_shape(m, support)?;
    let r = spec.r();
    let reduced = m.matrix.reduce_mod(s);
    let head_ok = (0..r).all(|i| (0..r).all(|j| reduced.get(i, j) == u64::from(i == j)));
    if !head_ok {
        return Ok(MatrixCheck::BadHead);
    }
    let mut coeffs = Vec::with_capacity(spec.n());
    for k in r + 1..=spec.n() + r {
        let offs = offsets(support, k);
        let system = ModMatrix::from_fn(s, r, offs.len(), |i, c| reduced.get(k - offs[c] - 1, i));
        let Some(lambda) = solve_mod(&system, reduced.row(k - 1))? else {
            return Ok(MatrixCheck::RowUnreachable(k));
        };
        let mut row = vec![0u64; support.len()];
        for (&j, v) in offs.iter().zip(lambda) {
            row[support.index_of(j).expect("offset from support")] = v;
        }
        coeffs.push(row);
    }
    Ok(MatrixCheck::Valid(LinearCircuit::new(&spec, s, coeffs)?))
}

/// The circuit whose circuit matrix is `m` modulo `s`, if `m` is a valid
/// `R`-circuit matrix over `Z_s`.
pub fn validate_circuit_matrix(
    m: &CircuitMatrix,
    support: &Support,
    s: Modulus,
) -> Result<Option<LinearCircuit>> {
    Ok(check_circuit_matrix(m, support, s)?.ok())
}

/// Integer coefficients `λ_{k,j}`; row `k - r - 1` follows the sorted support.
pub type IntegerCoefficients = Vec<Vec<i64>>;

/// Checks the row-combination property over the integers.
pub fn check_universal(m: &CircuitMatrix, support: &Support) -> Result<MatrixCheck<IntegerCoefficients>> {
    let spec = check_shape(m, support)?;
    let r = spec.r();
    if !m.head_is_identity() {
        return Ok(MatrixCheck::BadHead);
    }
    let mut table = Vec::with_capacity(spec.n());
    for k in r + 1..=spec.n() + r {
        let offs = offsets(support, k);
        let system = IntMatrix::from_fn(r, offs.len(), |i, c| m.matrix.get(k - offs[c] - 1, i));
        let Some(lambda) = solve_int(&system, m.omega(k))? else {
            return Ok(MatrixCheck::RowUnreachable(k));
        };
        let mut row = vec![0i64; support.len()];
        for (&j, v) in offs.iter().zip(lambda) {
            row[support.index_of(j).expect("offset from support")] = v;
        }
        table.push(row);
    }
    Ok(MatrixCheck::Valid(table))
}

/// Integer coefficients valid for every modulus at once, if they exist.
pub fn universal_validate(m: &CircuitMatrix, support: &Support) -> Result<Option<IntegerCoefficients>> {
    Ok(check_universal(m, support)?.ok())
}

/// Reduces an integer coefficient table to a circuit over `Z_s`.
pub fn circuit_from_integer_coefficients(
    spec: &ClockSpec,
    table: &IntegerCoefficients,
    s: Modulus,
) -> Result<LinearCircuit> {
    let coeffs = table
        .iter()
        .map(|row| row.iter().map(|&x| s.reduce(x)).collect())
        .collect();
    LinearCircuit::new(spec, s, coeffs)
}

/// `M_F`: row `i` is `e_i` for `i <= r`, row `k` is `Σ λ_{k,j} ω(k - j)`.
/// Entries are residues in `[0, s)`.
pub fn circuit_to_matrix(c: &LinearCircuit, net: &Network) -> Result<CircuitMatrix> {
    c.check_shape(net)?;
    let spec = c.spec();
    let s = c.modulus();
    let r = spec.r();
    let mut m = ModMatrix::zeros(s, spec.n() + r, r);
    for i in 0..r {
        m.set(i, i, 1);
    }
    for k in r + 1..=spec.n() + r {
        for col in 0..r {
            let v = spec
                .support()
                .iter()
                .filter(|&j| j < k)
                .fold(0, |acc, j| s.add(acc, s.mul(c.coefficient(k, j), m.get(k - j - 1, col))));
            m.set(k - 1, col, v);
        }
    }
    Ok(CircuitMatrix::new(m.to_int())?
        .with_support(spec.support().clone())
        .with_scope(Scope::Modular(s.get())))
}

/// The explicit matrices for `R = {1,3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedMatrix {
    /// `N_7({1,3})` over `Z_2`.
    A7,
    /// `N_8({1,3})` over `Z_3`.
    B8,
    /// `N_10({1,3})` over every `Z_s`.
    M10,
    /// `N_14({1,3})` over every `Z_s`.
    M14,
}

impl NamedMatrix {
    pub const ALL: [NamedMatrix; 4] = [NamedMatrix::A7, NamedMatrix::B8, NamedMatrix::M10, NamedMatrix::M14];

    pub fn name(self) -> &'static str {
        match self {
            NamedMatrix::A7 => "A7",
            NamedMatrix::B8 => "B8",
            NamedMatrix::M10 => "M10",
            NamedMatrix::M14 => "M14",
        }
    }

    fn rows(self) -> &'static [[i64; 3]] {
        const A7: [[i64; 3]; 10] = [
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [1, 0, 1],
            [1, 1, 1],
            [1, 1, 0],
            [0, 1, 1],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
        ];
        const B8: [[i64; 3]; 11] = [
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [1, 0, 1],
            [1, 1, 1],
            [1, 1, 2],
            [2, 1, 0],
            [0, 2, 1],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
        ];
        const M10: [[i64; 3]; 13] = [
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [1, 0, 1],
            [1, 1, 1],
            [0, 0, 1],
            [-1, 0, 1],
            [1, 1, 1],
            [1, 1, 0],
            [0, 1, 1],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
        ];
        const M14: [[i64; 3]; 17] = [
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [1, 0, 0],
            [1, 1, 0],
            [1, 1, 1],
            [0, 1, 1],
            [1, 0, -1],
            [0, 1, 2],
            [0, 0, 1],
            [1, 0, -1],
            [1, 1, 1],
            [1, 1, 0],
            [0, 1, 1],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
        ];
        match self {
            NamedMatrix::A7 => &A7,
            NamedMatrix::B8 => &B8,
            NamedMatrix::M10 => &M10,
            NamedMatrix::M14 => &M14,
        }
    }

    pub fn scope(self) -> Scope {
        match self {
            NamedMatrix::A7 => Scope::Modular(2),
            NamedMatrix::B8 => Scope::Modular(3),
            NamedMatrix::M10 | NamedMatrix::M14 => Scope::Universal,
        }
    }
}

impl FromStr for NamedMatrix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A7" | "A" => Ok(NamedMatrix::A7),
            "B8" | "B" => Ok(NamedMatrix::B8),
            "M10" => Ok(NamedMatrix::M10),
            "M14" => Ok(NamedMatrix::M14),
            _ => Err(Error::UnknownMatrix(s.to_string())),
        }
    }
}

pub fn named_matrix(name: NamedMatrix) -> CircuitMatrix {
    let m = IntMatrix::from_rows(name.rows()).expect("rows have equal length");
    CircuitMatrix::new(m)
        .expect("at least r rows")
        .with_support(Support::new([1, 3]).expect("nonempty"))
        .with_scope(name.scope())
}

/// A `{1,3}`-circuit matrix of length `n >= 12` valid over every `Z_s`:
/// copies of `I_3` appended below `I_3`, `M10` or `M14` according to
/// `n mod 3`.
pub fn family_13(n: usize) -> Result<CircuitMatrix> {
    if n < 12 {
        return Err(Error::params(format!("family_13 needs n >= 12, got {n}")));
    }
    let mut m = match n % 3 {
        0 => IntMatrix::identity(3),
        1 => named_matrix(NamedMatrix::M10).into_matrix(),
        _ => named_matrix(NamedMatrix::M14).into_matrix(),
    };
    let i3 = IntMatrix::identity(3);
    while m.rows() < n + 3 {
        m = m.vstack(&i3)?;
    }
    Ok(CircuitMatrix::new(m)?
        .with_support(Support::new([1, 3])?)
        .with_scope(Scope::Universal))
}

/// The circuit on `N_n([r])` in which every node negates the sum of its `r`
/// predecessors, so that every `r + 1` consecutive values sum to zero.
pub fn zero_sum_circuit(n: usize, r: usize, s: Modulus) -> Result<LinearCircuit> {
    let spec = ClockSpec::new(n, Support::full(r)?)?;
    Ok(LinearCircuit::from_fn(&spec, s, |_, _| -1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{check_solves, evaluate};

    fn s(x: u64) -> Modulus {
        Modulus::new(x).unwrap()
    }

    fn r13() -> Support {
        "1,3".parse().unwrap()
    }

    #[test]
    fn gim_examples() {
        assert_eq!(
            gim(4, 3).unwrap(),
            IntMatrix::from_rows(&[[1, 1, 1], [1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap()
        );
        for k in 1..6 {
            assert_eq!(gim(k, k).unwrap(), IntMatrix::identity(k));
        }
        assert_eq!(
            gim(7, 2).unwrap(),
            IntMatrix::from_rows(&[[1, 1], [1, 0], [0, 1], [1, 0], [0, 1], [1, 0], [0, 1]])
                .unwrap()
        );
        let big = gim(30, 43).unwrap();
        assert_eq!((big.rows(), big.cols()), (30, 43));
        // Right-hand block is I_30.
        assert!(big.submatrix(0, 13, 30, 30).unwrap().is_identity());
        assert!(gim(0, 3).is_err());
    }

    #[test]
    fn full_clock_examples() {
        let m = full_clock_matrix(7, 2).unwrap();
        assert_eq!((m.matrix().rows(), m.r()), (9, 2));
        assert_eq!(m.omega(8), &[1, 0]);
        assert_eq!(m.omega(9), &[0, 1]);
        assert!(m.tail_is_identity());

        let m = full_clock_matrix(4, 4).unwrap();
        assert!(m.head_is_identity() && m.tail_is_identity());

        assert!(full_clock_matrix(30, 43).is_err());
    }

    #[test]
    fn named_matrix_entries() {
        assert_eq!(named_matrix(NamedMatrix::A7).omega(4), &[1, 0, 1]);
        assert_eq!(named_matrix(NamedMatrix::M10).omega(7), &[-1, 0, 1]);
        assert_eq!(named_matrix(NamedMatrix::M14).omega(9), &[0, 1, 2]);
        assert_eq!(named_matrix(NamedMatrix::B8).matrix().rows(), 11);
        assert_eq!(named_matrix(NamedMatrix::M14).matrix().rows(), 17);
        assert!(matches!("Q9".parse::<NamedMatrix>(), Err(Error::UnknownMatrix(_))));
        for name in NamedMatrix::ALL {
            assert_eq!(name.name().parse::<NamedMatrix>().unwrap(), name);
        }
    }

    #[test]
    fn validation_examples() {
        let a = named_matrix(NamedMatrix::A7);
        let b = named_matrix(NamedMatrix::B8);
        assert!(validate_circuit_matrix(&a, &r13(), s(2)).unwrap().is_some());
        assert_eq!(
            check_circuit_matrix(&a, &r13(), s(3)).unwrap(),
            MatrixCheck::RowUnreachable(7)
        );
        assert!(validate_circuit_matrix(&b, &r13(), s(3)).unwrap().is_some());

        // The A7 coefficients are the construction rule: row k = row k-1 + row k-3.
        let c = validate_circuit_matrix(&a, &r13(), s(2)).unwrap().unwrap();
        for k in 4..=10 {
            assert_eq!((c.coefficient(k, 1), c.coefficient(k, 3)), (1, 1), "row {k}");
        }
    }

    #[test]
    fn validation_shape_errors() {
        let a = named_matrix(NamedMatrix::A7);
        assert!(matches!(
            validate_circuit_matrix(&a, &"1,4".parse().unwrap(), s(2)),
            Err(Error::Dimension(_))
        ));
        let mut bad = a.matrix().clone();
        bad.set(0, 1, 1);
        let bad = CircuitMatrix::new(bad).unwrap();
        assert_eq!(check_circuit_matrix(&bad, &r13(), s(2)).unwrap(), MatrixCheck::BadHead);
        assert_eq!(check_universal(&bad, &r13()).unwrap(), MatrixCheck::BadHead);
    }

    #[test]
    fn universal_examples() {
        assert!(universal_validate(&named_matrix(NamedMatrix::M10), &r13()).unwrap().is_some());
        assert!(universal_validate(&named_matrix(NamedMatrix::M14), &r13()).unwrap().is_some());
        assert_eq!(
            check_universal(&named_matrix(NamedMatrix::A7), &r13()).unwrap(),
            MatrixCheck::RowUnreachable(7)
        );
    }

    #[test]
    fn circuit_matrix_round_trips() {
        let a = named_matrix(NamedMatrix::A7);
        let c = validate_circuit_matrix(&a, &r13(), s(2)).unwrap().unwrap();
        let net = Network::clock(c.spec());
        assert_eq!(circuit_to_matrix(&c, &net).unwrap().matrix(), a.matrix());

        let m = full_clock_matrix(7, 2).unwrap();
        let c = validate_circuit_matrix(&m, &Support::full(2).unwrap(), s(2)).unwrap().unwrap();
        let back = circuit_to_matrix(&c, &Network::clock(c.spec())).unwrap();
        assert_eq!(back.matrix(), &m.matrix().reduce_mod(s(2)).to_int());

        let spec = ClockSpec::new(5, r13()).unwrap();
        let zero = LinearCircuit::from_fn(&spec, s(3), |_, _| 0);
        let zm = circuit_to_matrix(&zero, &Network::clock(&spec)).unwrap();
        assert!((4..=8).all(|k| zm.omega(k).iter().all(|&x| x == 0)));
    }

    #[test]
    fn matrix_a_circuit_evaluates_to_identity_outputs() {
        let a = named_matrix(NamedMatrix::A7);
        let c = validate_circuit_matrix(&a, &r13(), s(2)).unwrap().unwrap();
        let net = Network::clock(c.spec());
        let x = evaluate(&net, &c, &[1, 1, 0]).unwrap();
        assert_eq!(&x.values()[7..10], &[1, 1, 0]);
        assert!(check_solves(&net, &c).unwrap());
    }

    #[test]
    fn family_13_examples() {
        let m = family_13(12).unwrap();
        assert_eq!(m.matrix().rows(), 15);
        for block in 0..5 {
            assert!(m.matrix().submatrix(3 * block, 0, 3, 3).unwrap().is_identity());
        }
        let m13 = family_13(13).unwrap();
        let m10 = named_matrix(NamedMatrix::M10);
        assert_eq!(m13.matrix().submatrix(0, 0, 13, 3).unwrap(), *m10.matrix());
        assert_eq!(m13.matrix().rows(), 16);
        assert_eq!(family_13(14).unwrap().matrix(), named_matrix(NamedMatrix::M14).matrix());
        assert!(family_13(11).is_err());
    }

    #[test]
    fn zero_sum_circuit_fails_on_n7() {
        for modulus in [2, 3, 5] {
            let c = zero_sum_circuit(7, 2, s(modulus)).unwrap();
            assert!(!check_solves(&Network::clock(c.spec()), &c).unwrap());
        }
        let c = zero_sum_circuit(5, 2, s(2)).unwrap();
        assert!(!check_solves(&Network::clock(c.spec()), &c).unwrap());
    }

    #[test]
    fn zero_sum_valuation_has_period_r_plus_one() {
        for (n, r, modulus) in [(9, 2, 3), (11, 3, 5), (10, 4, 2)] {
            let c = zero_sum_circuit(n, r, s(modulus)).unwrap();
            let net = Network::clock(c.spec());
            let input: Vec<u64> = (1..=r as u64).collect();
            let x = evaluate(&net, &c, &input).unwrap();
            for i in 1..=n + r - (r + 1) {
                assert_eq!(x.get(i), x.get(i + r + 1));
            }
        }
    }

    #[test]
    fn json_export_has_metadata() {
        let v = named_matrix(NamedMatrix::B8).to_json();
        assert_eq!(v["n"], 8);
        assert_eq!(v["R"], serde_json::json!([1, 3]));
        assert_eq!(v["s"], 3);
        assert_eq!(v["rows"][5], serde_json::json!([1, 1, 2]));
    }
}

//! Atomic, step and toggle matrices and the factorization of `I_r` into
//! exactly `n` atomic matrices.
//!
//! Every list of factors in this module is in *application order*: the first
//! element acts first, so a list `[A_1, ..., A_n]` denotes the product
//! `A_n · ... · A_1`, matching `Y_n = A_n ··· A_1 Y_0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, ModMatrix, Modulus};
use crate::network::{ClockSpec, LinearCircuit, Permutation, Support};

/// An `R`-atomic matrix: shifted identity in rows `1..r-1`, last row
/// `(α_r, α_{r-1}, ..., α_1)` with `α_j = 0` for `j ∉ R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AtomicMatrix {
    support: Support,
    /// `alpha[idx]` is `α_j` for the `idx`-th element `j` of the support.
    alpha: Vec<i64>,
}

impl AtomicMatrix {
    pub fn new(support: &Support, alpha: Vec<i64>) -> Result<Self> {
        if alpha.len() != support.len() {
            return Err(Error::dim(format!(
                "{} coefficients for |R| = {}",
                alpha.len(),
                support.len()
            )));
        }
        Ok(AtomicMatrix {
            support: support.clone(),
            alpha,
        })
    }

    /// From `α_1..α_r`; fails if some `α_j ≠ 0` with `j ∉ R`.
    pub fn from_dense(support: &Support, dense: &[i64]) -> Result<Self> {
        let r = support.max();
        if dense.len() != r {
            return Err(Error::dim(format!("{} coefficients for r = {r}", dense.len())));
        }
        if let Some(j) = (1..=r).find(|&j| dense[j - 1] != 0 && !support.contains(j)) {
            return Err(Error::params(format!(
                "α_{j} = {} but {j} is not in R = {support}",
                dense[j - 1]
            )));
        }
        Ok(AtomicMatrix {
            support: support.clone(),
            alpha: support.iter().map(|j| dense[j - 1]).collect(),
        })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn r(&self) -> usize {
        self.support.max()
    }

    /// `α_j`, zero for `j ∉ R`.
    pub fn alpha(&self, j: usize) -> i64 {
        self.support.index_of(j).map_or(0, |idx| self.alpha[idx])
    }

    /// Coefficients in the order of the sorted support.
    pub fn coefficients(&self) -> &[i64] {
        &self.alpha
    }

    pub fn to_matrix(&self) -> IntMatrix {
        let r = self.r();
        IntMatrix::from_fn(r, r, |i, c| {
            if i + 1 < r {
                i64::from(c == i + 1)
            } else {
                self.alpha(r - c)
            }
        })
    }

    pub fn to_mod(&self, s: Modulus) -> ModMatrix {
        self.to_matrix().reduce_mod(s)
    }
}

impl fmt::Display for AtomicMatrix {
    /// `alpha_1=v alpha_3=w` over the elements of `R`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .support
            .iter()
            .zip(&self.alpha)
            .map(|(j, v)| format!("alpha_{j}={v}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// `P`: the atomic matrix with `α_r = 1` and all other coefficients zero,
/// i.e. the `r`-cycle sending row `i` to column `i + 1`.
pub fn shift_matrix(support: &Support) -> AtomicMatrix {
    let r = support.max();
    AtomicMatrix {
        support: support.clone(),
        alpha: support.iter().map(|j| i64::from(j == r)).collect(),
    }
}

/// Whether column `i` of row `t` may be nonzero in an `R`-step matrix.
fn step_entry_allowed(support: &Support, t: usize, i: usize) -> bool {
    let r = support.max();
    i == t || support.iter().any(|j| (i + j) % r == t % r)
}

/// `I_r` with row `t` replaced by `β`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepMatrix {
    support: Support,
    t: usize,
    beta: Vec<i64>,
}

impl StepMatrix {
    /// `t` is 1-based; `beta[i - 1] = β_i`.
    pub fn new(support: &Support, t: usize, beta: Vec<i64>) -> Result<Self> {
        let r = support.max();
        if t == 0 || t > r || beta.len() != r {
            return Err(Error::dim(format!(
                "step row {t} with {} entries for r = {r}",
                beta.len()
            )));
        }
        if let Some(i) = (1..=r).find(|&i| beta[i - 1] != 0 && !step_entry_allowed(support, t, i)) {
            return Err(Error::params(format!(
                "β_{i} must vanish in row {t} for R = {support}"
            )));
        }
        Ok(StepMatrix {
            support: support.clone(),
            t,
            beta,
        })
    }

    /// `E_{ab}(λ)`: identity with entry `(a, b)` set to `λ`.
    fn elementary(support: &Support, a: usize, b: usize, lambda: i64) -> Result<Self> {
        let r = support.max();
        let mut beta = vec![0; r];
        beta[a - 1] = 1;
        beta[b - 1] = lambda;
        StepMatrix::new(support, a, beta)
    }

    fn identity(support: &Support, t: usize) -> Self {
        let mut beta = vec![0; support.max()];
        beta[t - 1] = 1;
        StepMatrix {
            support: support.clone(),
            t,
            beta,
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn beta(&self) -> &[i64] {
        &self.beta
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn to_matrix(&self) -> IntMatrix {
        let r = self.support.max();
        IntMatrix::from_fn(r, r, |i, j| {
            if i + 1 == self.t {
                self.beta[j]
            } else {
                i64::from(i == j)
            }
        })
    }
}

/// `T(t)`: `I_r` with row `t` replaced by all `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToggleMatrix {
    pub r: usize,
    pub t: usize,
}

impl ToggleMatrix {
    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.r, self.r, |i, j| {
            if i + 1 == self.t {
                -1
            } else {
                i64::from(i == j)
            }
        })
    }
}

/// Integer product of factors given in application order.
pub fn product_of<'a>(r: usize, factors: impl IntoIterator<Item = &'a IntMatrix>) -> Result<IntMatrix> {
    factors
        .into_iter()
        .try_fold(IntMatrix::identity(r), |acc, m| m.mul(&acc))
}

/// Writes a step matrix as `r` atomic matrices: `P` everywhere except at
/// position `t`, where the atomic carries `α_j = β_{(t - j) mod r}`.
pub fn step_to_atomics(step: &StepMatrix) -> Vec<AtomicMatrix> {
    let support = step.support();
    let r = support.max();
    let t = step.t();
    let p = shift_matrix(support);
    let carried = AtomicMatrix {
        support: support.clone(),
        alpha: support
            .iter()
            .map(|j| {
                let i = (t + r - j % r) % r;
                step.beta()[if i == 0 { r } else { i } - 1]
            })
            .collect(),
    };
    (1..=r)
        .map(|i| if i == t { carried.clone() } else { p.clone() })
        .collect()
}

/// Writes `T(t)` as exactly `2r - 3` step matrices.
///
/// Grows `U_2 = {x, t} ⊂ U_3 ⊂ ... ⊂ U_r = [r]` one element `b` at a time,
/// each attached to some `a ∈ U` with `a - b mod r ∈ R`, taking the smallest
/// admissible `x` and then the lexicographically smallest `(b, a)`. With
/// `S_k` the identity whose row `t` is `-1` on `U_k`,
/// `S_k = E_{ab}(-1) S_{k-1} E_{ab}(1)` when `a ≠ t`, and
/// `S_k = I · S_{k-1} E_{tb}(1)` when `a = t`.
pub fn toggle_to_steps(t: usize, support: &Support) -> Result<Vec<StepMatrix>> {
    let r = support.max();
    if r < 2 {
        return Err(Error::params("toggle decomposition needs r > 1"));
    }
    if support.gcd() != 1 {
        return Err(Error::params(format!("gcd(R) = {} for R = {support}", support.gcd())));
    }
    if t == 0 || t > r {
        return Err(Error::dim(format!("toggle row {t} for r = {r}")));
    }
    let diff_ok = |a: usize, b: usize| {
        let d = (a + r - b) % r;
        d != 0 && support.contains(d)
    };
    let x = (1..=r)
        .find(|&x| x != t && diff_ok(t, x))
        .ok_or_else(|| Error::params("no admissible partner for the toggle row"))?;
    let mut in_u = vec![false; r + 1];
    in_u[x] = true;
    in_u[t] = true;
    let mut beta = vec![0; r];
    beta[x - 1] = -1;
    beta[t - 1] = -1;
    let mut steps = vec![StepMatrix::new(support, t, beta)?];
    for _ in 3..=r {
        let (b, a) = (1..=r)
            .filter(|&b| !in_u[b])
            .find_map(|b| (1..=r).find(|&a| in_u[a] && diff_ok(a, b)).map(|a| (b, a)))
            .ok_or_else(|| Error::params("U cannot grow; gcd(R) = 1 should prevent this"))?;
        let (right, left) = if a == t {
            (StepMatrix::elementary(support, t, b, 1)?, StepMatrix::identity(support, t))
        } else {
            (
                StepMatrix::elementary(support, a, b, 1)?,
                StepMatrix::elementary(support, a, b, -1)?,
            )
        };
        steps.insert(0, right);
        steps.push(left);
        in_u[b] = true;
    }
    Ok(steps)
}

/// The permutation matrix whose row `i` has its one in column `π(i)`.
pub fn permutation_matrix(perm: &Permutation) -> IntMatrix {
    IntMatrix::from_fn(perm.len(), perm.len(), |i, j| i64::from(perm.apply(i) == j))
}

/// Writes a permutation matrix as toggles: a `k`-cycle `(a_1 ... a_k)`
/// becomes `T(a_1) T(a_2) ... T(a_k) T(a_1)`, fixed points contribute nothing.
pub fn permutation_to_toggles(perm: &Permutation) -> Vec<ToggleMatrix> {
    let r = perm.len();
    // Matrix order; reversed into application order at the end.
    let mut written = Vec::new();
    for cycle in perm.cycles().into_iter().filter(|c| c.len() > 1) {
        for &a in cycle.iter().chain(cycle.first()) {
            written.push(ToggleMatrix { r, t: a + 1 });
        }
    }
    written.reverse();
    written
}

/// Which product a factorization is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verification {
    /// Over the integers, hence for every modulus.
    Integer,
    Modular(Modulus),
}

/// An ordered list of atomic matrices `[A_1, ..., A_n]` for `N_n(R)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    support: Support,
    n: usize,
    factors: Vec<AtomicMatrix>,
    modulus: Option<Modulus>,
}

impl Factorization {
    pub fn new(support: &Support, factors: Vec<AtomicMatrix>, modulus: Option<Modulus>) -> Result<Self> {
        if let Some(bad) = factors.iter().position(|a| a.support() != support) {
            return Err(Error::params(format!("factor {} has a different R", bad + 1)));
        }
        Ok(Factorization {
            support: support.clone(),
            n: factors.len(),
            factors,
            modulus,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn factors(&self) -> &[AtomicMatrix] {
        &self.factors
    }

    /// The evaluation modulus; `None` for integer factorizations.
    pub fn modulus(&self) -> Option<Modulus> {
        self.modulus
    }

    /// `A_n · ... · A_1` over the integers.
    pub fn product_int(&self) -> Result<IntMatrix> {
        let r = self.support.max();
        self.factors
            .iter()
            .try_fold(IntMatrix::identity(r), |acc, a| a.to_matrix().mul(&acc))
    }

    /// `A_n · ... · A_1` over `Z_s`.
    pub fn product_mod(&self, s: Modulus) -> ModMatrix {
        let r = self.support.max();
        self.factors.iter().fold(ModMatrix::identity(s, r), |acc, a| {
            a.to_mod(s).mul(&acc).expect("square factors of equal size")
        })
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "R={}", self.support.to_list())?;
        if let Some(s) = self.modulus {
            writeln!(f, "s={s}")?;
        }
        for a in &self.factors {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for Factorization {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut n = None;
        let mut support: Option<Support> = None;
        let mut modulus = None;
        let mut factors = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: `{line}`", lineno + 1));
            if let Some(v) = line.strip_prefix("n=") {
                n = Some(v.trim().parse::<usize>().map_err(|_| bad())?);
            } else if let Some(v) = line.strip_prefix("R=") {
                support = Some(v.parse()?);
            } else if let Some(v) = line.strip_prefix("s=") {
                modulus = Some(Modulus::new(v.trim().parse().map_err(|_| bad())?)?);
            } else {
                let support = support.as_ref().ok_or_else(|| Error::Parse("R= header missing".into()))?;
                let mut dense = vec![0i64; support.max()];
                for token in line.split_whitespace() {
                    let (key, value) = token.split_once('=').ok_or_else(bad)?;
                    let j: usize = key
                        .strip_prefix("alpha_")
                        .and_then(|j| j.parse().ok())
                        .filter(|&j| j >= 1 && j <= support.max())
                        .ok_or_else(bad)?;
                    dense[j - 1] = value.parse().map_err(|_| bad())?;
                }
                factors.push(AtomicMatrix::from_dense(support, &dense)?);
            }
        }
        let support = support.ok_or_else(|| Error::Parse("R= header missing".into()))?;
        let f = Factorization::new(&support, factors, modulus)?;
        if let Some(n) = n {
            if n != f.n() {
                return Err(Error::Parse(format!("header says n={n} but {} factors follow", f.n())));
            }
        }
        Ok(f)
    }
}

/// Compares `A_n ··· A_1` with `I_r`. An empty factorization is the identity.
pub fn verify_factorization(f: &Factorization, mode: Verification) -> Result<bool> {
    Ok(match mode {
        Verification::Integer => f.product_int()?.is_identity(),
        Verification::Modular(s) => f.product_mod(s).is_identity(),
    })
}

/// Number of atomic factors `identity_factorization` spends on `P^{-n}`
/// before padding with copies of `P`.
pub fn identity_factorization_threshold(n: usize, support: &Support) -> Result<usize> {
    Ok(permutation_part(n, support)?.len())
}

fn permutation_part(n: usize, support: &Support) -> Result<Vec<AtomicMatrix>> {
    let r = support.max();
    if support.gcd() != 1 {
        return Err(Error::params(format!(
            "identity factorization needs gcd(R) = 1, R = {support}"
        )));
    }
    if r == 1 {
        return Ok(Vec::new());
    }
    // Q = P^{-n} = P^e; P sends row i to column i + 1, so Q sends i to i + e.
    let e = (r - n % r) % r;
    let q = Permutation::new((0..r).map(|i| (i + e) % r).collect())?;
    let mut atomics = Vec::new();
    for toggle in permutation_to_toggles(&q) {
        for step in toggle_to_steps(toggle.t, support)? {
            atomics.extend(step_to_atomics(&step));
        }
    }
    Ok(atomics)
}

/// `I_r` as a product of exactly `n` `R`-atomic matrices with integer
/// entries: `P^{-n}` expanded through toggles, steps and atomics, times
/// the remaining copies of `P`.
pub fn identity_factorization(n: usize, support: &Support) -> Result<Factorization> {
    let q_part = permutation_part(n, support)?;
    if n < q_part.len() {
        return Err(Error::BelowThreshold {
            n,
            threshold: q_part.len(),
            support: support.to_string(),
        });
    }
    let p = shift_matrix(support);
    let mut factors = vec![p; n - q_part.len()];
    factors.extend(q_part);
    Factorization::new(support, factors, None)
}

/// The circuit whose node `r + i` reads its coefficients from the last row
/// of `A_i`, reduced mod `s`.
pub fn factorization_to_circuit(f: &Factorization, s: Modulus) -> Result<LinearCircuit> {
    let spec = ClockSpec::new(f.n(), f.support().clone())?;
    let coeffs = f
        .factors()
        .iter()
        .map(|a| a.coefficients().iter().map(|&x| s.reduce(x)).collect())
        .collect();
    LinearCircuit::new(&spec, s, coeffs)
}

/// The atomic matrices `A_i` of a linear circuit; the circuit solves
/// `N_n(R)` iff their product is `I_r` modulo `s`.
pub fn circuit_to_factorization(c: &LinearCircuit) -> Factorization {
    let spec = c.spec();
    let r = spec.r();
    let factors = (r + 1..=spec.n() + r)
        .map(|k| AtomicMatrix {
            support: spec.support().clone(),
            alpha: c.node_coefficients(k).iter().map(|&x| x as i64).collect(),
        })
        .collect();
    Factorization {
        support: spec.support().clone(),
        n: spec.n(),
        factors,
        modulus: Some(crate::network::Circuit::modulus(c)),
    }
}

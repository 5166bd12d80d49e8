//! Decision procedures for solvability of `N_n(R)` over `Z_s`.

pub mod linear;
pub mod nonlinear;

use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::constructions::circuit_to_matrix;
use crate::error::{Error, Result};
use crate::factorization::identity_factorization_threshold;
use crate::linalg::Modulus;
use crate::network::{gcd_reduce, ClockSpec, GcdVerdict, LinearCircuit, Network, Support};

pub use linear::{
    linear_solvable, linear_witness, solvable_set, Layer, LinearWitness, ReachabilityProfile, SearchBudget,
};
pub use nonlinear::{nonlinear_solvable_z2, nonlinear_solvable_z2_unpruned};

/// Requested decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Linear,
    Exhaustive,
    Auto,
}

/// The procedure that produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gcd,
    Linear,
    Exhaustive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Gcd => "gcd",
            Method::Linear => "linear",
            Method::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Solvable,
    Unsolvable,
    /// No linear circuit exists; nonlinear circuits were not examined.
    LinearlyUnsolvable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Solvable => "SOLVABLE",
            Verdict::Unsolvable => "UNSOLVABLE",
            Verdict::LinearlyUnsolvable => "LINEARLY-UNSOLVABLE",
        })
    }
}

/// Outcome of [`decide`].
#[derive(Debug, Clone)]
pub struct Decision {
    pub spec: ClockSpec,
    pub modulus: Modulus,
    pub method: Method,
    pub verdict: Verdict,
    /// Set when the gcd lemma split the network into copies.
    pub reduced: Option<ClockSpec>,
    /// A linear circuit on the full network, when one was requested and found.
    pub witness: Option<LinearCircuit>,
}

impl Decision {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "n": self.spec.n(),
            "R": self.spec.support().as_slice(),
            "s": self.modulus.get(),
            "method": self.method,
            "verdict": self.verdict.to_string(),
        });
        if let Some(red) = &self.reduced {
            v["reduced"] = json!({ "n": red.n(), "R": red.support().as_slice() });
        }
        if let Some(w) = &self.witness {
            v["witness"] = json!(w.rows());
        }
        v
    }
}

/// Lifts a circuit on `N_{n/d}(R/d)` to the `d` interleaved copies in `N_n(R)`.
fn lift_circuit(reduced: &LinearCircuit, spec: &ClockSpec, d: usize) -> LinearCircuit {
    LinearCircuit::from_fn(spec, crate::network::Circuit::modulus(reduced), |k, j| {
        reduced.coefficient((k - 1) / d + 1, j / d) as i64
    })
}

/// Decides `N_n(R)` over `Z_s`: gcd lemma first, then the requested method.
/// `auto` escalates from the linear search to the exhaustive oracle when
/// `s = 2` and `r ≤ 3`.
pub fn decide(
    spec: &ClockSpec,
    s: Modulus,
    choice: MethodChoice,
    budget: &SearchBudget,
    want_witness: bool,
) -> Result<Decision> {
    let (work, d) = match gcd_reduce(spec) {
        GcdVerdict::Unsolvable { .. } => {
            return Ok(Decision {
                spec: spec.clone(),
                modulus: s,
                method: Method::Gcd,
                verdict: Verdict::Unsolvable,
                reduced: None,
                witness: None,
            })
        }
        GcdVerdict::Reduced { spec: red, copies } => (red, copies),
        GcdVerdict::Unchanged => (spec.clone(), 1),
    };
    let reduced = (d > 1).then(|| work.clone());
    let exhaustive_ok = s.get() == 2 && work.r() <= nonlinear::MAX_WIDTH;
    let decision = |method, verdict, witness| Decision {
        spec: spec.clone(),
        modulus: s,
        method,
        verdict,
        reduced: reduced.clone(),
        witness,
    };

    if choice == MethodChoice::Exhaustive {
        if !exhaustive_ok {
            return Err(Error::params(format!(
                "the exhaustive oracle needs s = 2 and r <= {}, got s = {s}, r = {}",
                nonlinear::MAX_WIDTH,
                work.r()
            )));
        }
        let ok = nonlinear_solvable_z2(work.n(), work.support())?;
        let verdict = if ok { Verdict::Solvable } else { Verdict::Unsolvable };
        return Ok(decision(Method::Exhaustive, verdict, None));
    }

    let (solvable, witness) = if want_witness {
        let w = linear_witness(work.n(), work.support(), s, budget)?;
        let lifted = w.map(|w| if d > 1 { lift_circuit(&w.circuit, spec, d) } else { w.circuit });
        (lifted.is_some(), lifted)
    } else {
        (linear_solvable(work.n(), work.support(), s, budget)?, None)
    };
    if solvable {
        return Ok(decision(Method::Linear, Verdict::Solvable, witness));
    }
    if choice == MethodChoice::Auto && exhaustive_ok {
        let ok = nonlinear_solvable_z2(work.n(), work.support())?;
        let verdict = if ok { Verdict::Solvable } else { Verdict::Unsolvable };
        return Ok(decision(Method::Exhaustive, verdict, None));
    }
    Ok(decision(Method::Linear, Verdict::LinearlyUnsolvable, None))
}

/// Linear solvability per `(s, n)` laid out as in a published grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvabilityTable {
    pub support: Support,
    pub ns: Vec<usize>,
    /// `rows[i][c]` for modulus `moduli[i]` and length `ns[c]`; `None` when `n < r`.
    pub rows: Vec<(Modulus, Vec<Option<bool>>)>,
}

impl SolvabilityTable {
    /// Header `n,<n...>`, then one `s=<s>,✓/✗...` row per modulus.
    pub fn to_csv(&self) -> String {
        if self.ns.is_empty() {
            return String::new();
        }
        let mut out = String::from("n");
        for n in &self.ns {
            out.push_str(&format!(",{n}"));
        }
        out.push('\n');
        for (s, cells) in &self.rows {
            out.push_str(&format!("s={s}"));
            for c in cells {
                out.push(',');
                out.push_str(match c {
                    Some(true) => "✓",
                    Some(false) => "✗",
                    None => "-",
                });
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "R": self.support.as_slice(),
            "n": self.ns,
            "rows": self.rows.iter().map(|(s, cells)| json!({"s": s.get(), "solvable": cells})).collect::<Vec<_>>(),
        })
    }
}

/// Linear solvability of `N_n(R)` over `Z_s` from a profile of the reduced support.
fn profile_verdict(profile: &ReachabilityProfile, d: usize, n: usize) -> bool {
    n % d == 0 && profile.is_solvable(n / d)
}

fn reduced_support(support: &Support) -> Result<(Support, usize)> {
    let d = support.gcd();
    Ok((Support::new(support.iter().map(|j| j / d))?, d))
}

pub fn solvability_table(
    support: &Support,
    moduli: &[Modulus],
    ns: RangeInclusive<usize>,
    budget: &SearchBudget,
) -> Result<SolvabilityTable> {
    let ns: Vec<usize> = ns.collect();
    let (base, d) = reduced_support(support)?;
    let mut rows = Vec::with_capacity(moduli.len());
    for &s in moduli {
        let cells = if ns.is_empty() {
            Vec::new()
        } else {
            let profile = solvable_set(&base, s, budget)?;
            ns.iter()
                .map(|&n| (n >= support.max()).then(|| profile_verdict(&profile, d, n)))
                .collect()
        };
        rows.push((s, cells));
    }
    Ok(SolvabilityTable {
        support: support.clone(),
        ns,
        rows,
    })
}

/// Per-modulus `n₀` values with an upper bound valid for every modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct N0Report {
    pub support: Support,
    pub per_modulus: Vec<(Modulus, Option<usize>)>,
    /// `None` if some modulus has no `n₀`.
    pub max: Option<usize>,
    /// From a construction valid over every `Z_s`, with its name.
    pub universal_upper_bound: Option<(usize, &'static str)>,
}

impl N0Report {
    /// Whether the finitely many moduli pin down the all-`s` value.
    pub fn is_decided(&self) -> bool {
        matches!((self.max, self.universal_upper_bound), (Some(m), Some((u, _))) if m == u)
    }
}

impl fmt::Display for N0Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<usize>| v.map_or_else(|| "none".to_string(), |x| x.to_string());
        writeln!(f, "R = {}", self.support)?;
        for (s, v) in &self.per_modulus {
            writeln!(f, "n0(R, {s}) = {}", show(*v))?;
        }
        writeln!(f, "max over listed moduli = {}", show(self.max))?;
        match self.universal_upper_bound {
            Some((u, name)) => writeln!(f, "upper bound for every modulus = {u} ({name})")?,
            None => writeln!(f, "upper bound for every modulus = none")?,
        }
        if self.is_decided() {
            writeln!(f, "n0(R) = {}", show(self.max))
        } else {
            writeln!(
                f,
                "note: finitely many moduli give only a lower bound for the all-s value"
            )
        }
    }
}

/// Least `n` beyond which the integer identity factorization always exists.
fn factorization_bound(support: &Support) -> Option<usize> {
    let r = support.max();
    let worst = (0..r)
        .map(|residue| identity_factorization_threshold(residue, support))
        .collect::<Result<Vec<_>>>()
        .ok()?
        .into_iter()
        .max()?;
    // Every n >= worst meets the threshold of its residue class.
    Some(worst.max(r))
}

fn universal_upper_bound(support: &Support) -> Option<(usize, &'static str)> {
    let r = support.max();
    if *support == Support::full(r).ok()? {
        return Some((r, "full clock matrix"));
    }
    if support.as_slice() == [1, 3] {
        return Some((12, "family_13"));
    }
    factorization_bound(support).map(|b| (b, "identity factorization"))
}

pub fn min_n0_estimate(support: &Support, moduli: &[Modulus], budget: &SearchBudget) -> Result<N0Report> {
    let per_modulus = moduli
        .iter()
        .map(|&s| Ok((s, solvable_set(support, s, budget)?.n0())))
        .collect::<Result<Vec<_>>>()?;
    let max = per_modulus
        .iter()
        .map(|(_, v)| *v)
        .collect::<Option<Vec<_>>>()
        .and_then(|v| v.into_iter().max());
    Ok(N0Report {
        support: support.clone(),
        per_modulus,
        max,
        universal_upper_bound: universal_upper_bound(support),
    })
}

/// Builds the validated circuit matrix of a decision's witness.
pub fn witness_matrix(decision: &Decision) -> Result<Option<crate::constructions::CircuitMatrix>> {
    decision
        .witness
        .as_ref()
        .map(|c| circuit_to_matrix(c, &Network::clock(&decision.spec)))
        .transpose()
}

//! Linear solvability as reachability of `I_r` in the semigroup generated
//! by the `R`-atomic matrices over `Z_s`.
//!
//! Only atomics with `α_r` a unit are used as generators: a product equal
//! to `I_r` has unit determinant, so every factor does, and
//! `det A = ±α_r` for an atomic `A`.
//!
//! States are `r × r` matrices over `Z_s` encoded as `Σ m[i][c] s^{ir + c}`,
//! so row `0` occupies the least significant digits. Left multiplication by
//! an atomic then drops row `0` and appends one new row at the top.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::constructions::{circuit_to_matrix, CircuitMatrix};
use crate::error::{Error, Result};
use crate::factorization::{factorization_to_circuit, AtomicMatrix, Factorization};
use crate::linalg::Modulus;
use crate::network::{ClockSpec, LinearCircuit, Network, Support};

/// State spaces up to this size are stored as dense bit arrays.
pub const DENSE_STATE_LIMIT: u128 = 1 << 25;

/// Resource caps for reachability searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Largest admissible `s^(r²)`.
    pub max_state_space: u128,
    /// Largest admissible layer in the sparse representation.
    pub max_layer_states: usize,
    /// Largest number of layers explored while looking for a period.
    pub max_layers: usize,
}

impl Default for SearchBudget {
    /// Admits `r ≤ 4` for `s = 2` and `r ≤ 3` for `s ≤ 5`.
    fn default() -> Self {
        SearchBudget {
            max_state_space: 1 << 21,
            max_layer_states: 1 << 24,
            max_layers: 4096,
        }
    }
}

impl SearchBudget {
    /// Any state space that fits in `u64`; layers still capped.
    pub fn unbounded_space() -> Self {
        SearchBudget {
            max_state_space: u128::from(u64::MAX),
            ..SearchBudget::default()
        }
    }
}

/// Base-`s` encoding of `r × r` matrices.
#[derive(Debug, Clone, Copy)]
pub struct MatrixCodec {
    s: u64,
    r: usize,
    row_base: u64,
    top_weight: u64,
    space: u128,
}

impl MatrixCodec {
    pub fn new(r: usize, s: Modulus) -> Result<Self> {
        let s = s.get();
        let space = (0..r * r).try_fold(1u128, |acc, _| acc.checked_mul(u128::from(s)));
        let space = space
            .filter(|&x| x <= u128::from(u64::MAX))
            .ok_or_else(|| Error::BudgetExceeded(format!("{s}^({r}²) states do not fit in 64 bits")))?;
        Ok(MatrixCodec {
            s,
            r,
            row_base: s.pow(r as u32),
            top_weight: s.pow((r * (r - 1)) as u32),
            space,
        })
    }

    pub fn state_space(&self) -> u128 {
        self.space
    }

    pub fn encode(&self, entries: &[u64]) -> u64 {
        entries.iter().rev().fold(0, |acc, &e| acc * self.s + e)
    }

    pub fn decode(&self, mut code: u64, out: &mut [u64]) {
        for e in out.iter_mut().take(self.r * self.r) {
            *e = code % self.s;
            code /= self.s;
        }
    }

    pub fn identity(&self) -> u64 {
        let r = self.r;
        let entries: Vec<u64> = (0..r * r).map(|idx| u64::from(idx / r == idx % r)).collect();
        self.encode(&entries)
    }
}

/// An invertible atomic matrix together with data for fast products.
#[derive(Debug, Clone)]
struct Generator {
    /// Coefficients in support order.
    alpha: Vec<u64>,
    /// `(row index r - j, α_j)` for the nonzero coefficients.
    taps: Vec<(usize, u64)>,
    /// Row `0` of `A^{-1}`; the other rows are shifted unit vectors.
    inverse_head: Vec<u64>,
}

fn generators(support: &Support, s: Modulus) -> Vec<Generator> {
    let r = support.max();
    let m = support.len();
    let sv = s.get();
    let total = sv.pow(m as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        // The first support element is the most significant digit.
        let mut alpha = vec![0u64; m];
        let mut rest = idx;
        for a in alpha.iter_mut().rev() {
            *a = rest % sv;
            rest /= sv;
        }
        let Some(inv_r) = s.inverse(alpha[m - 1]) else {
            continue;
        };
        let taps = support
            .iter()
            .zip(&alpha)
            .filter(|(_, &a)| a != 0)
            .map(|(j, &a)| (r - j, a))
            .collect();
        let mut inverse_head = vec![0u64; r];
        inverse_head[r - 1] = inv_r;
        for (j, &a) in support.iter().zip(&alpha) {
            if j < r {
                inverse_head[r - j - 1] = s.mul(s.neg(a), inv_r);
            }
        }
        out.push(Generator {
            alpha,
            taps,
            inverse_head,
        });
    }
    out
}

/// A set of encoded matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Layer {
    Dense(FixedBitSet),
    /// Sorted, deduplicated.
    Sparse(Vec<u64>),
}

impl Layer {
    pub fn len(&self) -> usize {
        match self {
            Layer::Dense(b) => b.count_ones(..),
            Layer::Sparse(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, code: u64) -> bool {
        match self {
            Layer::Dense(b) => b.contains(code as usize),
            Layer::Sparse(v) => v.binary_search(&code).is_ok(),
        }
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match self {
            Layer::Dense(b) => Box::new(b.ones().map(|x| x as u64)),
            Layer::Sparse(v) => Box::new(v.iter().copied()),
        }
    }

    fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }
}

/// Generators and codec for one `(R, s)`.
#[derive(Debug, Clone)]
pub struct AtomicSemigroup {
    support: Support,
    modulus: Modulus,
    codec: MatrixCodec,
    gens: Vec<Generator>,
}

impl AtomicSemigroup {
    pub fn new(support: &Support, s: Modulus, budget: &SearchBudget) -> Result<Self> {
        let codec = MatrixCodec::new(support.max(), s)?;
        if codec.state_space() > budget.max_state_space {
            return Err(Error::BudgetExceeded(format!(
                "{}^({}²) = {} matrix states exceed the budget of {}",
                s,
                support.max(),
                codec.state_space(),
                budget.max_state_space
            )));
        }
        Ok(AtomicSemigroup {
            support: support.clone(),
            modulus: s,
            codec,
            gens: generators(support, s),
        })
    }

    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    pub fn codec(&self) -> &MatrixCodec {
        &self.codec
    }

    pub fn is_dense(&self) -> bool {
        self.codec.state_space() <= DENSE_STATE_LIMIT
    }

    fn r(&self) -> usize {
        self.support.max()
    }

    /// `A · M` for every generator `A`, in generator order.
    fn for_each_left_product(&self, code: u64, mut f: impl FnMut(usize, u64)) {
        let r = self.r();
        let s = self.modulus;
        let mut m = [0u64; 64];
        self.codec.decode(code, &mut m);
        let shifted = code / self.codec.row_base;
        for (g_idx, g) in self.gens.iter().enumerate() {
            let mut row = 0u64;
            for c in (0..r).rev() {
                let v = g
                    .taps
                    .iter()
                    .fold(0, |acc, &(i, a)| s.add(acc, s.mul(a, m[i * r + c])));
                row = row * s.get() + v;
            }
            f(g_idx, shifted + row * self.codec.top_weight);
        }
    }

    /// `H · A^{-1}` for every generator `A`.
    fn for_each_right_inverse_product(&self, code: u64, mut f: impl FnMut(usize, u64)) {
        let r = self.r();
        let s = self.modulus;
        let mut h = [0u64; 64];
        let mut out = [0u64; 64];
        self.codec.decode(code, &mut h);
        for (g_idx, g) in self.gens.iter().enumerate() {
            for i in 0..r {
                let head = h[i * r];
                for c in 0..r {
                    let tail = if c + 1 < r { h[i * r + c + 1] } else { 0 };
                    out[i * r + c] = s.add(tail, s.mul(head, g.inverse_head[c]));
                }
            }
            f(g_idx, self.codec.encode(&out[..r * r]));
        }
    }

    /// `A^{-1} · M`.
    fn left_inverse_product(&self, g: &Generator, code: u64) -> u64 {
        let r = self.r();
        let s = self.modulus;
        let mut m = [0u64; 64];
        let mut out = [0u64; 64];
        self.codec.decode(code, &mut m);
        for c in 0..r {
            out[c] = (0..r).fold(0, |acc, k| s.add(acc, s.mul(g.inverse_head[k], m[k * r + c])));
        }
        out[r..r * r].copy_from_slice(&m[..r * (r - 1)]);
        self.codec.encode(&out[..r * r])
    }

    /// `H · A`.
    fn right_product(&self, g: &Generator, code: u64) -> u64 {
        let r = self.r();
        let s = self.modulus;
        let mut h = [0u64; 64];
        let mut out = [0u64; 64];
        self.codec.decode(code, &mut h);
        // Last row of A has α_{r - c} in column c; other rows are e_{k+1}.
        let mut last = vec![0u64; r];
        for &(i, a) in &g.taps {
            last[i] = a;
        }
        for i in 0..r {
            let tail = h[i * r + r - 1];
            for c in 0..r {
                let shifted = if c >= 1 { h[i * r + c - 1] } else { 0 };
                out[i * r + c] = s.add(shifted, s.mul(tail, last[c]));
            }
        }
        self.codec.encode(&out[..r * r])
    }

    fn expand(&self, layer: &Layer, backward: bool, budget: &SearchBudget) -> Result<Layer> {
        if self.is_dense() {
            let mut next = FixedBitSet::with_capacity(self.codec.state_space() as usize);
            for code in layer.iter() {
                if backward {
                    self.for_each_right_inverse_product(code, |_, x| next.insert(x as usize));
                } else {
                    self.for_each_left_product(code, |_, x| next.insert(x as usize));
                }
            }
            Ok(Layer::Dense(next))
        } else {
            let mut next = Vec::with_capacity(layer.len() * self.gens.len());
            for code in layer.iter() {
                if backward {
                    self.for_each_right_inverse_product(code, |_, x| next.push(x));
                } else {
                    self.for_each_left_product(code, |_, x| next.push(x));
                }
                if next.len() > budget.max_layer_states.saturating_mul(4) {
                    next.sort_unstable();
                    next.dedup();
                }
            }
            next.sort_unstable();
            next.dedup();
            if next.len() > budget.max_layer_states {
                return Err(Error::BudgetExceeded(format!(
                    "a layer of {} states exceeds the budget of {}",
                    next.len(),
                    budget.max_layer_states
                )));
            }
            Ok(Layer::Sparse(next))
        }
    }

    fn initial_layer(&self) -> Layer {
        let id = self.codec.identity();
        if self.is_dense() {
            let mut b = FixedBitSet::with_capacity(self.codec.state_space() as usize);
            b.insert(id as usize);
            Layer::Dense(b)
        } else {
            Layer::Sparse(vec![id])
        }
    }

    fn atomic(&self, g_idx: usize) -> AtomicMatrix {
        let alpha = self.gens[g_idx].alpha.iter().map(|&a| a as i64).collect();
        AtomicMatrix::new(&self.support, alpha).expect("generator matches the support")
    }
}

/// Forward layers `L_0 = {I}`, `L_{t+1} = { A·M }` up to a horizon or
/// until a layer repeats.
struct Exploration {
    layers: Vec<Layer>,
    /// `(preperiod, period)`: `L_{p+q} = L_p`.
    cycle: Option<(usize, usize)>,
}

impl Exploration {
    fn run(sg: &AtomicSemigroup, horizon: Option<usize>, budget: &SearchBudget) -> Result<Self> {
        let mut layers = vec![sg.initial_layer()];
        let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
        seen.entry(layers[0].fingerprint()).or_default().push(0);
        loop {
            let t = layers.len() - 1;
            if horizon.is_some_and(|h| t >= h) {
                return Ok(Exploration { layers, cycle: None });
            }
            if layers.len() > budget.max_layers {
                return Err(Error::BudgetExceeded(format!(
                    "no period found within {} layers",
                    budget.max_layers
                )));
            }
            let next = sg.expand(&layers[t], false, budget)?;
            let fp = next.fingerprint();
            if let Some(&p) = seen
                .get(&fp)
                .and_then(|idxs| idxs.iter().find(|&&i| layers[i] == next))
            {
                return Ok(Exploration {
                    cycle: Some((p, t + 1 - p)),
                    layers,
                });
            }
            seen.entry(fp).or_default().push(t + 1);
            layers.push(next);
        }
    }

    fn index(&self, t: usize) -> Option<usize> {
        if t < self.layers.len() {
            Some(t)
        } else {
            self.cycle.map(|(p, q)| p + (t - p) % q)
        }
    }

    fn layer(&self, t: usize) -> &Layer {
        &self.layers[self.index(t).expect("layer within the explored range")]
    }
}

/// The layered reachable sets for `(R, s)` with their eventual period.
#[derive(Debug, Clone)]
pub struct ReachabilityProfile {
    support: Support,
    modulus: Modulus,
    identity: u64,
    layers: Vec<Layer>,
    preperiod: usize,
    period: usize,
}

impl ReachabilityProfile {
    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// `p` with `L_{p+q} = L_p`, least such.
    pub fn preperiod(&self) -> usize {
        self.preperiod
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Distinct layers `L_0 .. L_{p+q-1}`.
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn reachable(&self, t: usize) -> &Layer {
        let idx = if t < self.layers.len() {
            t
        } else {
            self.preperiod + (t - self.preperiod) % self.period
        };
        &self.layers[idx]
    }

    /// Whether `N_n(R)` is linearly `s`-solvable.
    pub fn is_solvable(&self, n: usize) -> bool {
        n >= self.support.max() && self.reachable(n).contains(self.identity)
    }

    /// Solvable `n` in `r..=horizon`.
    pub fn solvable_up_to(&self, horizon: usize) -> Vec<usize> {
        (self.support.max()..=horizon).filter(|&n| self.is_solvable(n)).collect()
    }

    /// Least `n₀ ≥ r` such that every `n ≥ n₀` is solvable, if any.
    pub fn n0(&self) -> Option<usize> {
        let r = self.support.max();
        let p = self.preperiod;
        let cyclic_ok = (p..p + self.period).all(|t| t < r || self.layers[t].contains(self.identity));
        if !cyclic_ok {
            return None;
        }
        let mut n0 = p.max(r);
        while n0 > r && self.is_solvable(n0 - 1) {
            n0 -= 1;
        }
        Some(n0)
    }
}

/// Computes reachable layers until they repeat.
pub fn solvable_set(support: &Support, s: Modulus, budget: &SearchBudget) -> Result<ReachabilityProfile> {
    let sg = AtomicSemigroup::new(support, s, budget)?;
    let ex = Exploration::run(&sg, None, budget)?;
    let (preperiod, period) = ex.cycle.expect("unbounded exploration ends in a cycle");
    Ok(ReachabilityProfile {
        support: support.clone(),
        modulus: s,
        identity: sg.codec.identity(),
        layers: ex.layers,
        preperiod,
        period,
    })
}

/// A linear solution recovered from the search.
#[derive(Debug, Clone)]
pub struct LinearWitness {
    pub factorization: Factorization,
    pub circuit: LinearCircuit,
    pub matrix: CircuitMatrix,
}

impl LinearWitness {
    fn from_generators(sg: &AtomicSemigroup, n: usize, gens: &[usize]) -> Result<Self> {
        debug_assert_eq!(gens.len(), n);
        let atomics = gens.iter().map(|&g| sg.atomic(g)).collect();
        let factorization = Factorization::new(&sg.support, atomics, Some(sg.modulus))?;
        let circuit = factorization_to_circuit(&factorization, sg.modulus)?;
        let spec = ClockSpec::new(n, sg.support.clone())?;
        let matrix = circuit_to_matrix(&circuit, &Network::clock(&spec))?;
        Ok(LinearWitness {
            factorization,
            circuit,
            matrix,
        })
    }
}

/// Whether `I_r` is a product of exactly `n` `R`-atomic matrices over `Z_s`.
/// Does not apply the gcd reduction.
pub fn linear_solvable(n: usize, support: &Support, s: Modulus, budget: &SearchBudget) -> Result<bool> {
    let sg = AtomicSemigroup::new(support, s, budget)?;
    if sg.is_dense() {
        let ex = Exploration::run(&sg, Some(n), budget)?;
        Ok(ex.layer(n).contains(sg.codec.identity()))
    } else {
        Ok(meet_in_the_middle(&sg, n, budget, false)?.is_some())
    }
}

/// Like [`linear_solvable`] but returns a circuit when one exists.
pub fn linear_witness(
    n: usize,
    support: &Support,
    s: Modulus,
    budget: &SearchBudget,
) -> Result<Option<LinearWitness>> {
    let sg = AtomicSemigroup::new(support, s, budget)?;
    let gens = if sg.is_dense() {
        let ex = Exploration::run(&sg, Some(n), budget)?;
        let id = sg.codec.identity();
        if !ex.layer(n).contains(id) {
            return Ok(None);
        }
        backtrack_forward(&sg, |t| ex.layer(t), n, id)
    } else {
        match meet_in_the_middle(&sg, n, budget, true)? {
            Some(gens) => gens,
            None => return Ok(None),
        }
    };
    LinearWitness::from_generators(&sg, n, &gens).map(Some)
}

/// Generator indices in application order taking `I` to `end ∈ L_t`.
fn backtrack_forward<'a>(
    sg: &AtomicSemigroup,
    layer: impl Fn(usize) -> &'a Layer,
    t: usize,
    end: u64,
) -> Vec<usize> {
    let mut gens = Vec::with_capacity(t);
    let mut cur = end;
    for step in (1..=t).rev() {
        let prev_layer = layer(step - 1);
        let (g, prev) = sg
            .gens
            .iter()
            .enumerate()
            .map(|(g_idx, g)| (g_idx, sg.left_inverse_product(g, cur)))
            .find(|&(_, prev)| prev_layer.contains(prev))
            .expect("every reached state has a predecessor");
        gens.push(g);
        cur = prev;
    }
    gens.reverse();
    gens
}

/// Generator indices `[A_1, .., A_t]` with `(A_t ⋯ A_1)^{-1} = end ∈ H_t`.
fn backtrack_backward(sg: &AtomicSemigroup, layers: &[Layer], t: usize, end: u64) -> Vec<usize> {
    let mut gens = Vec::with_capacity(t);
    let mut cur = end;
    for step in (1..=t).rev() {
        let (g, prev) = sg
            .gens
            .iter()
            .enumerate()
            .map(|(g_idx, g)| (g_idx, sg.right_product(g, cur)))
            .find(|&(_, prev)| layers[step - 1].contains(prev))
            .expect("every reached state has a predecessor");
        gens.push(g);
        cur = prev;
    }
    gens.reverse();
    gens
}

/// Splits `n = a + b`: forward products of length `a`, inverses of
/// products of length `b`; the last forward layer is streamed.
fn meet_in_the_middle(
    sg: &AtomicSemigroup,
    n: usize,
    budget: &SearchBudget,
    keep_layers: bool,
) -> Result<Option<Vec<usize>>> {
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let b = n / 2;
    let a = n - b;

    let mut backward = vec![sg.initial_layer()];
    for _ in 0..b {
        let next = sg.expand(backward.last().expect("nonempty"), true, budget)?;
        if !keep_layers {
            backward.clear();
        }
        backward.push(next);
    }
    let target = backward.last().expect("nonempty");

    let mut forward = vec![sg.initial_layer()];
    for _ in 0..a - 1 {
        let next = sg.expand(forward.last().expect("nonempty"), false, budget)?;
        if !keep_layers {
            forward.clear();
        }
        forward.push(next);
    }
    let before_last = forward.last().expect("nonempty");

    // Stream L_a in sorted chunks against the sorted target layer.
    const CHUNK: usize = 1 << 20;
    let mut hit = None;
    let mut chunk: Vec<u64> = Vec::with_capacity(CHUNK * sg.gens.len());
    let mut states = before_last.iter().peekable();
    while hit.is_none() && states.peek().is_some() {
        chunk.clear();
        for code in states.by_ref().take(CHUNK) {
            sg.for_each_left_product(code, |_, x| chunk.push(x));
        }
        chunk.sort_unstable();
        chunk.dedup();
        hit = first_common(&chunk, target);
    }
    let Some(meet) = hit else {
        return Ok(None);
    };
    if !keep_layers {
        return Ok(Some(Vec::new()));
    }
    let last_gen = sg
        .gens
        .iter()
        .position(|g| before_last.contains(sg.left_inverse_product(g, meet)))
        .expect("meet point lies in the forward layer");
    let mid = sg.left_inverse_product(&sg.gens[last_gen], meet);
    let mut gens = backtrack_forward(sg, |t| &forward[t], a - 1, mid);
    gens.push(last_gen);
    gens.extend(backtrack_backward(sg, &backward, b, meet));
    Ok(Some(gens))
}

fn first_common(sorted: &[u64], layer: &Layer) -> Option<u64> {
    match layer {
        Layer::Sparse(target) => {
            let mut rest = &target[..];
            for &x in sorted {
                let pos = rest.partition_point(|&y| y < x);
                rest = &rest[pos..];
                match rest.first() {
                    None => return None,
                    Some(&y) if y == x => return Some(x),
                    Some(_) => {}
                }
            }
            None
        }
        Layer::Dense(_) => sorted.iter().copied().find(|&x| layer.contains(x)),
    }
}

//! Networks, circuits and valuations, and the digraphs obtained from them.
//!
//! Node indices are 1-based: inputs are `1..=r`, intermediate nodes
//! `r+1..=n`, outputs `n+1..=n+r`. Digraph vertices are 0-based residues
//! modulo `n`, with network node `v_{i+1}` corresponding to residue `i`.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Modulus;

/// Default cap on the number of inputs swept by [`check_solves`].
pub const DEFAULT_EVALUATION_BUDGET: u64 = 1_000_000;

/// The connection set `R`: a nonempty set of positive integers, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Support(Vec<usize>);

impl Support {
    pub fn new(elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = elements.into_iter().collect();
        if set.is_empty() {
            return Err(Error::params("R must be nonempty"));
        }
        if set.contains(&0) {
            return Err(Error::params("R must contain positive integers only"));
        }
        Ok(Support(set.into_iter().collect()))
    }

    /// `[r] = {1, ..., r}`.
    pub fn full(r: usize) -> Result<Self> {
        Self::new(1..=r)
    }

    /// `r = max(R)`.
    pub fn max(&self) -> usize {
        *self.0.last().expect("nonempty")
    }

    pub fn gcd(&self) -> usize {
        self.0.iter().fold(0, |g, &j| g.gcd(&j))
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Position of `j` in the sorted support.
    pub fn index_of(&self, j: usize) -> Option<usize> {
        self.0.binary_search(&j).ok()
    }

    /// Comma-separated form accepted by [`FromStr`].
    pub fn to_list(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|j| j.to_string()).collect();
        parts.join(",")
    }
}

impl TryFrom<Vec<usize>> for Support {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Support::new(v)
    }
}

impl From<Support> for Vec<usize> {
    fn from(s: Support) -> Self {
        s.0
    }
}

impl FromStr for Support {
    type Err = Error;

    /// Parses `1,3` (optionally braced, `{1,3}`) or `[r]` for the full set.
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let r = inner
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad full support `{text}`")))?;
            return Support::full(r);
        }
        let t = t.trim_start_matches('{').trim_end_matches('}');
        let parsed: std::result::Result<Vec<usize>, _> =
            t.split(',').map(|p| p.trim().parse::<usize>()).collect();
        let elements = parsed.map_err(|_| Error::Parse(format!("bad support `{text}`")))?;
        Support::new(elements)
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_list())
    }
}

/// Parameters `(n, R)` of the clock network `N_n(R)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClockSpec {
    n: usize,
    support: Support,
}

impl ClockSpec {
    /// Requires `n >= r`. The boundary `n = r` is accepted; see [`Self::is_boundary`].
    pub fn new(n: usize, support: Support) -> Result<Self> {
        let r = support.max();
        if n < r {
            return Err(Error::params(format!(
                "length n = {n} is smaller than the width r = {r}"
            )));
        }
        Ok(ClockSpec { n, support })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.support.max()
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    /// `n = r`: no intermediate nodes, outside the strict `n > r` definition.
    pub fn is_boundary(&self) -> bool {
        self.n == self.r()
    }
}

impl fmt::Display for ClockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N_{}({})", self.n, self.support)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeRole {
    Input,
    Intermediate,
    Output,
}

/// An acyclic network of width `r` and length `n` with edges from lower to
/// higher indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n: usize,
    r: usize,
    /// `gamma[k - r - 1]` is `Γ(k)`, sorted ascending.
    gamma: Vec<Vec<usize>>,
    clock: Option<ClockSpec>,
}

impl Network {
    /// A general network. `gamma[k - r - 1]` lists the in-neighbours of node `k`.
    pub fn new(n: usize, r: usize, gamma: Vec<Vec<usize>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::params("width must be positive"));
        }
        if gamma.len() != n {
            return Err(Error::dim(format!(
                "{} in-neighbourhoods for {n} non-input nodes",
                gamma.len()
            )));
        }
        let mut sorted = Vec::with_capacity(n);
        for (idx, g) in gamma.into_iter().enumerate() {
            let k = r + 1 + idx;
            let set: BTreeSet<usize> = g.into_iter().collect();
            if let Some(&bad) = set.iter().find(|&&i| i == 0 || i >= k) {
                return Err(Error::params(format!(
                    "edge v{bad} -> v{k} does not go from a lower to a higher index"
                )));
            }
            sorted.push(set.into_iter().collect());
        }
        Ok(Network {
            n,
            r,
            gamma: sorted,
            clock: None,
        })
    }

    /// `N_n(R)`: `Γ(k) = { k - j : j ∈ R, k - j >= 1 }`.
    pub fn clock(spec: &ClockSpec) -> Self {
        let r = spec.r();
        let gamma = (r + 1..=spec.n() + r)
            .map(|k| {
                let mut g: Vec<usize> =
                    spec.support().iter().filter(|&j| j < k).map(|j| k - j).collect();
                g.sort_unstable();
                g
            })
            .collect();
        Network {
            n: spec.n(),
            r,
            gamma,
            clock: Some(spec.clone()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn node_count(&self) -> usize {
        self.n + self.r
    }

    pub fn clock_spec(&self) -> Option<&ClockSpec> {
        self.clock.as_ref()
    }

    /// In-neighbourhood of a non-input node `k` (1-based).
    pub fn gamma(&self, k: usize) -> &[usize] {
        assert!(
            k > self.r && k <= self.node_count(),
            "node {k} has no in-neighbourhood"
        );
        &self.gamma[k - self.r - 1]
    }

    pub fn role(&self, k: usize) -> NodeRole {
        if k <= self.r {
            NodeRole::Input
        } else if k <= self.n {
            NodeRole::Intermediate
        } else {
            NodeRole::Output
        }
    }

    /// All edges `(i, k)` in increasing order of `k`, then `i`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.gamma
            .iter()
            .enumerate()
            .flat_map(move |(idx, g)| g.iter().map(move |&i| (i, self.r + 1 + idx)))
    }

    pub fn edge_count(&self) -> usize {
        self.gamma.iter().map(Vec::len).sum()
    }

    /// Graphviz rendering, one edge per line, node roles as comments.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let title = match &self.clock {
            Some(spec) => spec.to_string(),
            None => format!("network n={} r={}", self.n, self.r),
        };
        let _ = writeln!(out, "// {title}");
        if self.clock.as_ref().is_some_and(ClockSpec::is_boundary) {
            let _ = writeln!(out, "// boundary case n = r: no intermediate nodes");
        }
        out.push_str("digraph network {\n  rankdir=LR;\n");
        for k in 1..=self.node_count() {
            let role = match self.role(k) {
                NodeRole::Input => "input",
                NodeRole::Intermediate => "intermediate",
                NodeRole::Output => "output",
            };
            let _ = writeln!(out, "  v{k}; // {role}");
        }
        for (i, k) in self.edges() {
            let _ = writeln!(out, "  v{i} -> v{k};");
        }
        out.push_str("}\n");
        out
    }
}

/// Node functions of a circuit over `Z_s`.
pub trait Circuit {
    fn modulus(&self) -> Modulus;

    /// Fails unless the circuit has a function for every non-input node of
    /// `net` with the right arity.
    fn check_shape(&self, net: &Network) -> Result<()>;

    /// `f_k` applied to the already-computed prefix `X_1..X_{k-1}`
    /// (`prefix[i - 1] = X_i`).
    fn node_value(&self, net: &Network, k: usize, prefix: &[u64]) -> u64;
}

/// A linear circuit on `N_n(R)`: `X_k = Σ_{j ∈ R} λ_{k,j} X_{k-j}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearCircuit {
    modulus: Modulus,
    spec: ClockSpec,
    /// `coeffs[k - r - 1][idx]` is `λ_{k,j}` for the `idx`-th element `j` of R.
    coeffs: Vec<Vec<u64>>,
}

impl LinearCircuit {
    pub fn new(spec: &ClockSpec, modulus: Modulus, coeffs: Vec<Vec<u64>>) -> Result<Self> {
        if coeffs.len() != spec.n() || coeffs.iter().any(|c| c.len() != spec.support().len()) {
            return Err(Error::dim(format!(
                "coefficient table must be {} x {}",
                spec.n(),
                spec.support().len()
            )));
        }
        let r = spec.r();
        let mut coeffs = coeffs;
        for (idx, row) in coeffs.iter_mut().enumerate() {
            let k = r + 1 + idx;
            for (c, j) in row.iter_mut().zip(spec.support().iter()) {
                *c = if j < k { *c % modulus.get() } else { 0 };
            }
        }
        Ok(LinearCircuit {
            modulus,
            spec: spec.clone(),
            coeffs,
        })
    }

    /// Builds `λ_{k,j} = f(k, j)` reduced mod `s`.
    pub fn from_fn(spec: &ClockSpec, modulus: Modulus, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let r = spec.r();
        let coeffs = (r + 1..=spec.n() + r)
            .map(|k| spec.support().iter().map(|j| modulus.reduce(f(k, j))).collect())
            .collect();
        LinearCircuit::new(spec, modulus, coeffs).expect("shape is correct by construction")
    }

    /// Each node copies `X_{k-r}`; solves `N_n(R)` whenever `r | n`.
    pub fn relay(spec: &ClockSpec, modulus: Modulus) -> Self {
        let r = spec.r();
        Self::from_fn(spec, modulus, |_, j| i64::from(j == r))
    }

    pub fn spec(&self) -> &ClockSpec {
        &self.spec
    }

    /// `λ_{k,j}`, zero for `j ∉ R`.
    pub fn coefficient(&self, k: usize, j: usize) -> u64 {
        match self.spec.support().index_of(j) {
            Some(idx) => self.coeffs[k - self.spec.r() - 1][idx],
            None => 0,
        }
    }

    /// Coefficients of node `k` in the order of the sorted support.
    pub fn node_coefficients(&self, k: usize) -> &[u64] {
        &self.coeffs[k - self.spec.r() - 1]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.coeffs
    }
}

impl Circuit for LinearCircuit {
    fn modulus(&self) -> Modulus {
        self.modulus
    }

    fn check_shape(&self, net: &Network) -> Result<()> {
        match net.clock_spec() {
            Some(spec) if spec == &self.spec => Ok(()),
            Some(spec) => Err(Error::dim(format!(
                "circuit for {} used on {spec}",
                self.spec
            ))),
            None => Err(Error::dim("linear circuits are defined on clock networks")),
        }
    }

    fn node_value(&self, _net: &Network, k: usize, prefix: &[u64]) -> u64 {
        let s = self.modulus;
        self.spec
            .support()
            .iter()
            .zip(self.node_coefficients(k))
            .filter(|(j, _)| *j < k)
            .fold(0, |acc, (j, &c)| s.add(acc, s.mul(c, prefix[k - j - 1])))
    }
}

/// A circuit given by explicit function tables.
///
/// The table of node `k` is indexed by `Σ_i x_{γ_i} s^i`, where
/// `γ_0 < γ_1 < ...` enumerate `Γ(k)`: the first in-neighbour is the least
/// significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCircuit {
    modulus: Modulus,
    tables: Vec<Vec<u64>>,
}

impl TableCircuit {
    pub fn new(modulus: Modulus, tables: Vec<Vec<u64>>) -> Self {
        let tables = tables
            .into_iter()
            .map(|t| t.into_iter().map(|x| x % modulus.get()).collect())
            .collect();
        TableCircuit { modulus, tables }
    }

    /// Tabulates a linear circuit.
    pub fn from_linear(net: &Network, circuit: &LinearCircuit) -> Result<Self> {
        circuit.check_shape(net)?;
        let s = circuit.modulus();
        let tables = (net.r() + 1..=net.node_count())
            .map(|k| {
                let g = net.gamma(k);
                let size = s.get().pow(g.len() as u32);
                (0..size)
                    .map(|idx| {
                        let mut prefix = vec![0u64; k - 1];
                        let mut rest = idx;
                        for &i in g {
                            prefix[i - 1] = rest % s.get();
                            rest /= s.get();
                        }
                        circuit.node_value(net, k, &prefix)
                    })
                    .collect()
            })
            .collect();
        Ok(TableCircuit { modulus: s, tables })
    }

    pub fn tables(&self) -> &[Vec<u64>] {
        &self.tables
    }
}

impl Circuit for TableCircuit {
    fn modulus(&self) -> Modulus {
        self.modulus
    }

    fn check_shape(&self, net: &Network) -> Result<()> {
        if self.tables.len() != net.n() {
            return Err(Error::dim(format!(
                "{} tables for {} non-input nodes",
                self.tables.len(),
                net.n()
            )));
        }
        let s = self.modulus.get();
        for k in net.r() + 1..=net.node_count() {
            let expected = u32::try_from(net.gamma(k).len())
                .ok()
                .and_then(|d| s.checked_pow(d));
            let got = self.tables[k - net.r() - 1].len() as u64;
            if expected != Some(got) {
                return Err(Error::dim(format!(
                    "table of node {k} has {got} entries, expected s^|Γ(k)|"
                )));
            }
        }
        Ok(())
    }

    fn node_value(&self, net: &Network, k: usize, prefix: &[u64]) -> u64 {
        let s = self.modulus.get();
        let idx = net
            .gamma(k)
            .iter()
            .rev()
            .fold(0u64, |acc, &i| acc * s + prefix[i - 1]);
        self.tables[k - net.r() - 1][idx as usize]
    }
}

/// The node values `X_1..X_{n+r}` for one input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Valuation(Vec<u64>);

impl Valuation {
    /// `X_i`, 1-based.
    pub fn get(&self, i: usize) -> u64 {
        self.0[i - 1]
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }
}

/// The unique valuation of `circuit` on `net` for `input`.
pub fn evaluate<C: Circuit + ?Sized>(net: &Network, circuit: &C, input: &[u64]) -> Result<Valuation> {
    circuit.check_shape(net)?;
    if input.len() != net.r() {
        return Err(Error::dim(format!(
            "input of length {} for width {}",
            input.len(),
            net.r()
        )));
    }
    Ok(Valuation(valuation_unchecked(net, circuit, input)))
}

fn valuation_unchecked<C: Circuit + ?Sized>(net: &Network, circuit: &C, input: &[u64]) -> Vec<u64> {
    let s = circuit.modulus().get();
    let mut x = Vec::with_capacity(net.node_count());
    x.extend(input.iter().map(|&c| c % s));
    for k in net.r() + 1..=net.node_count() {
        let v = circuit.node_value(net, k, &x);
        x.push(v);
    }
    x
}

/// Whether `circuit` solves `net`: outputs reproduce the inputs for all
/// `s^r` inputs. Uses [`DEFAULT_EVALUATION_BUDGET`].
pub fn check_solves<C: Circuit + ?Sized>(net: &Network, circuit: &C) -> Result<bool> {
    check_solves_with_budget(net, circuit, DEFAULT_EVALUATION_BUDGET)
}

pub fn check_solves_with_budget<C: Circuit + ?Sized>(
    net: &Network,
    circuit: &C,
    budget: u64,
) -> Result<bool> {
    circuit.check_shape(net)?;
    let s = circuit.modulus().get();
    let r = net.r();
    let total = u32::try_from(r)
        .ok()
        .and_then(|r| s.checked_pow(r))
        .filter(|&t| t <= budget)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!("s^r = {s}^{r} inputs exceed the budget of {budget}"))
        })?;
    let n = net.n();
    let mut input = vec![0u64; r];
    for _ in 0..total {
        let x = valuation_unchecked(net, circuit, &input);
        if x[n..n + r] != input[..] {
            return Ok(false);
        }
        for c in input.iter_mut() {
            *c += 1;
            if *c < s {
                break;
            }
            *c = 0;
        }
    }
    Ok(true)
}

/// Outcome of the gcd lemma on `(n, R)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GcdVerdict {
    /// `d = gcd(R) > 1` does not divide `n`: no circuit solves the network.
    Unsolvable { d: usize },
    /// `N_n(R)` is `d` disjoint copies of the reduced network.
    Reduced { spec: ClockSpec, copies: usize },
    Unchanged,
}

pub fn gcd_reduce(spec: &ClockSpec) -> GcdVerdict {
    let d = spec.support().gcd();
    if d == 1 {
        GcdVerdict::Unchanged
    } else if spec.n() % d != 0 {
        GcdVerdict::Unsolvable { d }
    } else {
        let support = Support::new(spec.support().iter().map(|j| j / d)).expect("nonempty");
        let reduced = ClockSpec::new(spec.n() / d, support).expect("n/d >= r/d");
        GcdVerdict::Reduced {
            spec: reduced,
            copies: d,
        }
    }
}

/// A simple digraph on vertices `0..vertices`. Parallel edges are collapsed
/// on insertion and counted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    vertices: usize,
    edges: BTreeSet<(usize, usize)>,
    collapsed: usize,
}

impl Digraph {
    pub fn new(vertices: usize) -> Self {
        Digraph {
            vertices,
            edges: BTreeSet::new(),
            collapsed: 0,
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.vertices && v < self.vertices, "vertex out of range");
        if !self.edges.insert((u, v)) {
            self.collapsed += 1;
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.edges.range((u, 0)..(u + 1, 0)).count()
    }

    /// Number of duplicate edges dropped while building.
    pub fn collapsed_duplicates(&self) -> usize {
        self.collapsed
    }

    pub fn self_loops(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    /// Unordered pairs `{u, v}` with both `u -> v` and `v -> u`.
    pub fn two_cycles(&self) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| u < v && self.has_edge(v, u))
            .count()
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "// {name}: {} vertices, {} edges", self.vertices, self.edge_count());
        if self.collapsed > 0 {
            let _ = writeln!(out, "// {} parallel edges collapsed", self.collapsed);
        }
        if self.self_loops() > 0 {
            let _ = writeln!(out, "// {} self-loops", self.self_loops());
        }
        out.push_str("digraph clock {\n");
        for v in 0..self.vertices {
            let _ = writeln!(out, "  {v}; // v{}", v + 1);
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -> {v};");
        }
        out.push_str("}\n");
        out
    }
}

/// `G_clock(n, R)`: edge `i -> j` iff `(j - i) mod n ∈ R`.
pub fn build_clock_digraph(n: usize, support: &Support) -> Result<Digraph> {
    if n == 0 {
        return Err(Error::params("a clock digraph needs at least one vertex"));
    }
    let mut g = Digraph::new(n);
    for i in 0..n {
        for j in support.iter() {
            g.add_edge(i, (i + j) % n);
        }
    }
    Ok(g)
}

/// `G_N`: identify each output `v_{n+i}` with its input `v_i`.
pub fn identify_network_digraph(net: &Network) -> Digraph {
    let n = net.n();
    let mut g = Digraph::new(n);
    for (i, k) in net.edges() {
        g.add_edge((i - 1) % n, (k - 1) % n);
    }
    g
}

/// A permutation of `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &v in &images {
            if v >= images.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotPermutation(format!("{images:?}")));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(len: usize) -> Self {
        Permutation((0..len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// Cycles in order of their smallest element, each starting there.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.0[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn order(&self) -> usize {
        self.cycles().iter().fold(1, |acc, c| acc.lcm(&c.len()))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in self.cycles() {
            let parts: Vec<String> = cycle.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Checks that `map` carries the edges of `d1` exactly onto those of `d2`.
pub fn verify_digraph_isomorphism(d1: &Digraph, d2: &Digraph, map: &[usize]) -> Result<bool> {
    if d1.vertex_count() != d2.vertex_count() {
        return Err(Error::dim(format!(
            "{} vs {} vertices",
            d1.vertex_count(),
            d2.vertex_count()
        )));
    }
    if map.len() != d1.vertex_count() {
        return Err(Error::NotPermutation(format!(
            "map has {} entries for {} vertices",
            map.len(),
            d1.vertex_count()
        )));
    }
    let perm = Permutation::new(map.to_vec())?;
    Ok(d1.edge_count() == d2.edge_count()
        && d1.edges().all(|(u, v)| d2.has_edge(perm.apply(u), perm.apply(v))))
}

/// `i -> m·i mod n`.
pub fn multiplier_map(n: usize, m: i64) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::params("n must be positive"));
    }
    let m_mod = m.rem_euclid(n as i64) as usize;
    if m_mod.gcd(&n) != 1 {
        return Err(Error::NotInvertible {
            value: m,
            modulus: n as u64,
        });
    }
    Permutation::new((0..n).map(|i| (i * m_mod) % n).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GuessingBound {
    AtMost(usize),
    Exactly(usize),
    LessThan(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefectBound {
    AtLeast(usize),
    Exactly(usize),
}

/// Guessing number and information defect bounds for `G_N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub r: usize,
    pub modulus: Option<u64>,
    pub guessing_number: GuessingBound,
    pub information_defect: DefectBound,
    pub boundary: bool,
}

/// `gn <= r` and `b >= n - r`, sharpened by known solvability verdicts.
///
/// Linear solvability implies solvability, so `linearly = Some(true)` also
/// pins the guessing number.
pub fn bounds_report(
    spec: &ClockSpec,
    modulus: Option<Modulus>,
    solvable: Option<bool>,
    linearly: Option<bool>,
) -> BoundsReport {
    let r = spec.r();
    let n = spec.n();
    let solvable = if linearly == Some(true) {
        Some(true)
    } else {
        solvable
    };
    BoundsReport {
        n,
        r,
        modulus: modulus.map(Modulus::get),
        guessing_number: match solvable {
            Some(true) => GuessingBound::Exactly(r),
            Some(false) => GuessingBound::LessThan(r),
            None => GuessingBound::AtMost(r),
        },
        information_defect: if linearly == Some(true) {
            DefectBound::Exactly(n - r)
        } else {
            DefectBound::AtLeast(n - r)
        },
        boundary: spec.is_boundary(),
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self
            .modulus
            .map_or_else(|| "s".to_string(), |s| s.to_string());
        match self.guessing_number {
            GuessingBound::AtMost(r) => writeln!(f, "gn(G_N,{s}) <= {r}")?,
            GuessingBound::Exactly(r) => writeln!(f, "gn(G_N,{s}) = {r}")?,
            GuessingBound::LessThan(r) => writeln!(f, "gn(G_N,{s}) < {r}")?,
        }
        match self.information_defect {
            DefectBound::AtLeast(b) => writeln!(f, "b(G_N,{s}) >= {b}")?,
            DefectBound::Exactly(b) => writeln!(f, "b(G_N,{s}) = {b}")?,
        }
        if self.boundary {
            writeln!(f, "note: n = r boundary case")?;
        }
        Ok(())
    }
}

//! Exhaustive solvability over `Z_2` for arbitrary (nonlinear) circuits.
//!
//! A state is the window `(X_{k-r}, ..., X_{k-1})` of node values viewed as
//! Boolean functions of the input `c ∈ Z_2^r`, each a truth table of `2^r`
//! bits. Input `c` is indexed by `Σ c_i 2^{i-1}`. The window packs table
//! `p` (holding `X_{k-r+p}`) at bit offset `p · 2^r`.
//!
//! The pruned search discards windows whose joint map `c ↦ window(c)` is not
//! injective: every later value is a function of the window, so such a
//! window can never reproduce `c`.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::network::Support;

/// Largest `r` the oracle accepts: `r · 2^r ≤ 24` state bits.
pub const MAX_WIDTH: usize = 3;

struct Oracle {
    r: usize,
    table_bits: usize,
    table_mask: u32,
    /// Window positions `r - j` for `j ∈ R`, in ascending node order.
    taps: Vec<usize>,
    prune: bool,
}

impl Oracle {
    fn new(support: &Support, prune: bool) -> Result<Self> {
        let r = support.max();
        if r > MAX_WIDTH {
            return Err(Error::params(format!(
                "the Z_2 oracle handles r <= {MAX_WIDTH}, got r = {r}"
            )));
        }
        let table_bits = 1 << r;
        let mut taps: Vec<usize> = support.iter().map(|j| r - j).collect();
        taps.sort_unstable();
        Ok(Oracle {
            r,
            table_bits,
            table_mask: ((1u64 << table_bits) - 1) as u32,
            taps,
            prune,
        })
    }

    fn state_bits(&self) -> usize {
        self.r * self.table_bits
    }

    fn table(&self, state: u32, p: usize) -> u32 {
        (state >> (p * self.table_bits)) & self.table_mask
    }

    /// The coordinate projections `X_i = c_i`.
    fn projections(&self) -> u32 {
        (0..self.r).fold(0, |acc, p| {
            let t = (0..self.table_bits).fold(0u32, |t, c| t | ((((c >> p) & 1) as u32) << c));
            acc | (t << (p * self.table_bits))
        })
    }

    fn injective(&self, state: u32) -> bool {
        let mut seen = 0u32;
        for c in 0..self.table_bits {
            let sig = (0..self.r).fold(0, |acc, p| acc | (((self.table(state, p) >> c) & 1) << p));
            if seen & (1 << sig) != 0 {
                return false;
            }
            seen |= 1 << sig;
        }
        true
    }

    /// Every successor window: drop `X_{k-r}`, append `f(taps)` for all `f`.
    fn successors(&self, state: u32, mut emit: impl FnMut(u32)) {
        let arity = self.taps.len();
        let patterns = 1usize << arity;
        // masks[a] = inputs c whose argument tuple is a.
        let mut masks = [0u32; 8];
        for c in 0..self.table_bits {
            let a = self
                .taps
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &p)| acc | ((((self.table(state, p) >> c) & 1) as usize) << i));
            masks[a] |= 1 << c;
        }
        let base = state >> self.table_bits;
        let top = (self.r - 1) * self.table_bits;
        for f in 0u32..(1u32 << patterns) {
            let t = (0..patterns)
                .filter(|&a| (f >> a) & 1 == 1)
                .fold(0u32, |acc, a| acc | masks[a]);
            let next = base | (t << top);
            if !self.prune || self.injective(next) {
                emit(next);
            }
        }
    }

    fn solvable(&self, n: usize) -> bool {
        let size = 1usize << self.state_bits();
        let start = self.projections();
        let mut frontier = vec![start];
        let mut seen = FixedBitSet::with_capacity(size);
        for _ in 0..n {
            seen.clear();
            let mut next = Vec::new();
            for &state in &frontier {
                self.successors(state, |x| {
                    if !seen.put(x as usize) {
                        next.push(x);
                    }
                });
            }
            frontier = next;
        }
        frontier.contains(&start)
    }
}

/// Whether some circuit over `Z_2` solves `N_n(R)`; exact, for `r ≤ 3`.
pub fn nonlinear_solvable_z2(n: usize, support: &Support) -> Result<bool> {
    check_length(n, support)?;
    Ok(Oracle::new(support, true)?.solvable(n))
}

/// The same search without the injectivity pruning; for cross-checks.
pub fn nonlinear_solvable_z2_unpruned(n: usize, support: &Support) -> Result<bool> {
    check_length(n, support)?;
    Ok(Oracle::new(support, false)?.solvable(n))
}

fn check_length(n: usize, support: &Support) -> Result<()> {
    if n < support.max() {
        return Err(Error::params(format!("N_n(R) needs n >= max(R), got n = {n}, R = {support}")));
    }
    Ok(())
}

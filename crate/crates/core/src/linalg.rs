//! Exact integer and modular matrices.
//!
//! Every construction in the crate keeps one integer master copy
//! ([`IntMatrix`]) and reduces it on demand into [`ModMatrix`] for a
//! particular modulus. Canonical residues live in `[0, s)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this many candidate vectors [`solve_mod`] switches from lexicographic
/// enumeration to lattice elimination.
pub const EXHAUSTIVE_SOLVE_LIMIT: u64 = 729;

/// A modulus `s >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(s: u64) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidModulus(s));
        }
        // Products of two residues must fit in u64.
        if s > u32::MAX as u64 {
            return Err(Error::params(format!("modulus {s} is too large")));
        }
        Ok(Modulus(s))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Canonical representative of `x` in `[0, s)`.
    #[inline]
    pub fn reduce(self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        (a * b) % self.0
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        (self.0 - a % self.0) % self.0
    }

    pub fn is_unit(self, a: u64) -> bool {
        a.gcd(&self.0) == 1
    }

    pub fn inverse(self, a: u64) -> Option<u64> {
        let e = (a as i64).extended_gcd(&(self.0 as i64));
        (e.gcd == 1).then(|| self.reduce(e.x))
    }

    /// All units of `Z_s` in increasing order.
    pub fn units(self) -> impl Iterator<Item = u64> {
        (1..self.0).filter(move |&a| self.is_unit(a))
    }
}

impl TryFrom<u64> for Modulus {
    type Error = Error;
    fn try_from(s: u64) -> Result<Self> {
        Modulus::new(s)
    }
}

impl From<Modulus> for u64 {
    fn from(m: Modulus) -> u64 {
        m.0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense integer matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.data[i * k + i] = 1;
        }
        m
    }

    /// Builds a matrix from row slices. All rows must have the same length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::dim(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` (0-based).
    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[i64]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == i64::from(i == j)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// The `nrows x ncols` block whose top-left corner is `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, nrows: usize, ncols: usize) -> Result<Self> {
        if r0 + nrows > self.rows || c0 + ncols > self.cols {
            return Err(Error::dim(format!(
                "block {nrows}x{ncols} at ({r0},{c0}) outside {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(Self::from_fn(nrows, ncols, |i, j| self.get(r0 + i, c0 + j)))
    }

    /// `self` on top of `below`.
    pub fn vstack(&self, below: &IntMatrix) -> Result<Self> {
        if self.cols != below.cols {
            return Err(Error::dim(format!(
                "vertical concat of {} and {} columns",
                self.cols, below.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(IntMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        })
    }

    /// `self` to the left of `right`.
    pub fn hstack(&self, right: &IntMatrix) -> Result<Self> {
        if self.rows != right.rows {
            return Err(Error::dim(format!(
                "horizontal concat of {} and {} rows",
                self.rows, right.rows
            )));
        }
        let cols = self.cols + right.cols;
        Ok(Self::from_fn(self.rows, cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                right.get(i, j - self.cols)
            }
        }))
    }

    /// Exact product; fails on shape mismatch or i64 overflow.
    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a
                        .checked_mul(rhs.get(k, j))
                        .and_then(|p| p.checked_add(out.get(i, j)))
                        .ok_or(Error::Overflow("integer matrix product"))?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn reduce_mod(&self, s: Modulus) -> ModMatrix {
        ModMatrix {
            modulus: s,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| s.reduce(x)).collect(),
        }
    }

    /// Exact determinant.
    ///
    /// Fraction-free (Bareiss) elimination in `i128`; if any intermediate
    /// overflows the whole computation is redone over [`BigInt`].
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let work: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        match bareiss_i128(work, self.rows) {
            Some(d) => Ok(BigInt::from(d)),
            None => {
                let work = self.data.iter().map(|&x| BigInt::from(x)).collect();
                Ok(bareiss_big(work, self.rows))
            }
        }
    }
}

fn bareiss_i128(mut a: Vec<i128>, n: usize) -> Option<i128> {
    if n == 0 {
        return Some(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                return Some(0);
            };
            for j in 0..n {
                a.swap(k * n + j, swap * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i * n + j]
                    .checked_mul(pivot)?
                    .checked_sub(a[i * n + k].checked_mul(a[k * n + j])?)?;
                a[i * n + j] = v / prev;
            }
        }
        prev = pivot;
    }
    Some(sign * a[n * n - 1])
}

fn bareiss_big(mut a: Vec<BigInt>, n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                Some(swap) => {
                    for j in 0..n {
                        a.swap(k * n + j, swap * n + j);
                    }
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &pivot - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = pivot;
    }
    let d = a[n * n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

impl fmt::Display for IntMatrix {
    /// One row per line, entries separated by single spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.row_iter() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = Error;

    /// One row per line, whitespace-separated; blank lines and `#` comments skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("line {}: `{tok}` is not an integer", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("no matrix rows".into()));
        }
        IntMatrix::from_rows(&rows)
    }
}

/// Dense matrix over `Z_s` with entries in `[0, s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModMatrix {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn new(modulus: Modulus, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let data = data.into_iter().map(|x| x % modulus.get()).collect();
        Ok(ModMatrix {
            modulus,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(modulus: Modulus, rows: usize, cols: usize) -> Self {
        ModMatrix {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: Modulus, k: usize) -> Self {
        let mut m = Self::zeros(modulus, k, k);
        for i in 0..k {
            m.data[i * k + i] = 1;
        }
        m
    }

    pub fn from_fn(
        modulus: Modulus,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % modulus.get());
            }
        }
        ModMatrix {
            modulus,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.modulus.get();
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    /// Lifts residues back to integers in `[0, s)`.
    pub fn to_int(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) as i64)
    }

    pub fn mul(&self, rhs: &ModMatrix) -> Result<ModMatrix> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: rhs.modulus.get(),
            });
        }
        if self.cols != rhs.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let s = self.modulus.get();
        let mut out = ModMatrix::zeros(self.modulus, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc = (acc + self.get(i, k) * rhs.get(k, j)) % s;
                }
                out.data[i * rhs.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// `self * x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.cols {
            return Err(Error::dim(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        let s = self.modulus.get();
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(0u64, |acc, (&a, &b)| (acc + a * (b % s)) % s)
            })
            .collect())
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Solves `a x = b (mod s)`.
///
/// Small systems (at most [`EXHAUSTIVE_SOLVE_LIMIT`] candidate vectors) are
/// solved by enumeration, which returns the lexicographically smallest
/// solution. Larger systems go through [`solve_mod_lattice`].
pub fn solve_mod(a: &ModMatrix, b: &[u64]) -> Result<Option<Vec<u64>>> {
    if a.rows() != b.len() {
        return Err(Error::dim(format!(
            "system has {} rows but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let s = a.modulus().get();
    let small = u32::try_from(a.cols())
        .ok()
        .and_then(|c| s.checked_pow(c))
        .is_some_and(|count| count <= EXHAUSTIVE_SOLVE_LIMIT);
    if small {
        solve_mod_exhaustive(a, b)
    } else {
        solve_mod_lattice(a, b)
    }
}

/// Enumerates all `s^cols` candidate vectors in lexicographic order and
/// returns the first solution.
pub fn solve_mod_exhaustive(a: &ModMatrix, b: &[u64]) -> Result<Option<Vec<u64>>> {
    if a.rows() != b.len() {
        return Err(Error::dim("right-hand side length"));
    }
    let s = a.modulus().get();
    let target: Vec<u64> = b.iter().map(|&x| x % s).collect();
    let mut x = vec![0u64; a.cols()];
    loop {
        if a.mul_vec(&x)? == target {
            return Ok(Some(x));
        }
        // Odometer with the first coordinate most significant.
        let mut pos = x.len();
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            x[pos] += 1;
            if x[pos] < s {
                break;
            }
            x[pos] = 0;
        }
    }
}

/// Solves `a x = b (mod s)` as the integer system `[a | sI] (x, y) = b`.
///
/// Valid for composite `s`; zero divisors are handled by the integer
/// diagonalization rather than by field elimination.
pub fn solve_mod_lattice(a: &ModMatrix, b: &[u64]) -> Result<Option<Vec<u64>>> {
    if a.rows() != b.len() {
        return Err(Error::dim("right-hand side length"));
    }
    let s = a.modulus();
    let m = a.rows();
    let k = a.cols();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<BigInt> = a.row(i).iter().map(|&x| BigInt::from(x)).collect();
        row.extend((0..m).map(|j| BigInt::from(if i == j { s.get() } else { 0 })));
        rows.push(row);
    }
    let rhs = b.iter().map(|&x| BigInt::from(x)).collect();
    Ok(solve_integer_system(rows, k + m, rhs).map(|x| {
        x[..k]
            .iter()
            .map(|v| {
                let r = v.mod_floor(&BigInt::from(s.get()));
                r.to_u64().expect("residue fits")
            })
            .collect()
    }))
}

/// Solves `a x = b` over the integers.
pub fn solve_int(a: &IntMatrix, b: &[i64]) -> Result<Option<Vec<i64>>> {
    if a.rows() != b.len() {
        return Err(Error::dim(format!(
            "system has {} rows but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let rows = a
        .row_iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let rhs = b.iter().map(|&x| BigInt::from(x)).collect();
    match solve_integer_system(rows, a.cols(), rhs) {
        None => Ok(None),
        Some(x) => x
            .into_iter()
            .map(|v| v.to_i64().ok_or(Error::Overflow("integer solve")))
            .collect::<Result<Vec<_>>>()
            .map(Some),
    }
}

/// Diagonalizes `a` with unimodular row and column operations (a Smith form
/// without the divisibility chain) and back-solves.
fn solve_integer_system(
    mut a: Vec<Vec<BigInt>>,
    cols: usize,
    mut b: Vec<BigInt>,
) -> Option<Vec<BigInt>> {
    let m = a.len();
    // Column operations are recorded in `v`, so that x = v z.
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut rank = 0;
    'pivots: for p in 0..m.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(p) {
                for (j, x) in row.iter().enumerate().skip(p) {
                    if !x.is_zero()
                        && best.map_or(true, |(bi, bj)| x.abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'pivots;
            };
            a.swap(p, pi);
            b.swap(p, pi);
            if pj != p {
                for row in a.iter_mut() {
                    row.swap(p, pj);
                }
                for row in v.iter_mut() {
                    row.swap(p, pj);
                }
            }
            let pivot = a[p][p].clone();
            let mut clean = true;
            for i in p + 1..m {
                if a[i][p].is_zero() {
                    continue;
                }
                let q = &a[i][p] / &pivot;
                let (top, rest) = a.split_at_mut(i);
                for (dst, src) in rest[0][p..cols].iter_mut().zip(&top[p][p..cols]) {
                    *dst -= &q * src;
                }
                let d = &q * &b[p];
                b[i] -= d;
                clean &= a[i][p].is_zero();
            }
            for j in p + 1..cols {
                if a[p][j].is_zero() {
                    continue;
                }
                let q = &a[p][j] / &pivot;
                for row in a.iter_mut() {
                    let d = &q * &row[p];
                    row[j] -= d;
                }
                for row in v.iter_mut() {
                    let d = &q * &row[p];
                    row[j] -= d;
                }
                clean &= a[p][j].is_zero();
            }
            if clean {
                rank = p + 1;
                break;
            }
        }
    }
    let mut z = vec![BigInt::zero(); cols];
    for i in 0..rank {
        let (q, r) = b[i].div_rem(&a[i][i]);
        if !r.is_zero() {
            return None;
        }
        z[i] = q;
    }
    if b[rank..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(
        v.iter()
            .map(|row| row.iter().zip(&z).map(|(c, zi)| c * zi).sum())
            .collect(),
    )
}

/// Cofactor-expansion determinant for small matrices.
pub fn det_cofactor(m: &IntMatrix) -> Result<i128> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    fn rec(m: &IntMatrix, rows: &[usize], cols: &mut Vec<usize>) -> i128 {
        let Some((&r, rest)) = rows.split_first() else {
            return 1;
        };
        let mut total = 0i128;
        for idx in 0..cols.len() {
            let c = cols.remove(idx);
            let a = m.get(r, c) as i128;
            if a != 0 {
                let sign = if idx % 2 == 0 { 1 } else { -1 };
                total += sign * a * rec(m, rest, cols);
            }
            cols.insert(idx, c);
        }
        total
    }
    let rows: Vec<usize> = (0..m.rows()).collect();
    let mut cols: Vec<usize> = (0..m.cols()).collect();
    Ok(rec(m, &rows, &mut cols))
}

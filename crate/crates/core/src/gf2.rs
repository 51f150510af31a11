//! Dense GF(2) linear algebra over bit-packed rows.
//!
//! Rows are stored as `u64` words, so XOR and popcount run a word at a time.
//! Row reduction always picks pivots left to right and, within a column, the
//! lowest available row, which keeps every canonical form reproducible.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors raised by GF(2) operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),
}

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from the listed one-positions.
    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    /// Builds a vector of length `len` from the low bits of `value`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD);
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = value & mask;
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.len, other.len);
        BitVector {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            len: self.len,
        }
    }

    pub fn or(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.len, other.len);
        BitVector {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
            len: self.len,
        }
    }

    /// Hamming weight.
    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    #[inline]
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// Positions of the one entries, ascending.
    pub fn ones(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Entries `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        let mut out = BitVector::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }

    /// Entries at the given positions, in order.
    pub fn gather(&self, positions: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(k, true);
            }
        }
        out
    }

    /// Index of the first one entry.
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Gf2Error::Parse(format!("unexpected character {other:?}"))),
            }
        }
        Ok(v)
    }
}

/// A dense GF(2) matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    ncols: usize,
}

/// Result of a reduced row echelon computation.
#[derive(Debug, Clone)]
pub struct Echelon {
    /// The matrix in reduced row echelon form; zero rows are kept at the bottom.
    pub reduced: BitMatrix,
    /// Pivot column of each nonzero row, ascending.
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { rows: vec![BitVector::zeros(ncols); nrows], ncols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `ncols`.
    pub fn from_rows(ncols: usize, rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        for r in &rows {
            if r.len() != ncols {
                return Err(Gf2Error::DimensionMismatch { expected: ncols, got: r.len() });
            }
        }
        Ok(Self { rows, ncols })
    }

    /// Builds a matrix from 0/1 string rows. Panics on malformed input; meant for literals.
    pub fn from_strs(ncols: usize, rows: &[&str]) -> Self {
        let rows = rows.iter().map(|r| r.parse::<BitVector>().expect("0/1 literal")).collect();
        Self::from_rows(ncols, rows).expect("consistent literal widths")
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut BitVector {
        &mut self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value)
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<(), Gf2Error> {
        if row.len() != self.ncols {
            return Err(Gf2Error::DimensionMismatch { expected: self.ncols, got: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.ncols, self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.ncols {
            return Err(Gf2Error::DimensionMismatch { expected: self.ncols, got: v.len() });
        }
        let mut out = BitVector::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.ncols != other.nrows() {
            return Err(Gf2Error::DimensionMismatch { expected: self.ncols, got: other.nrows() });
        }
        let mut out = BitMatrix::zeros(self.nrows(), other.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            for k in r.ones() {
                out.rows[i].xor_assign(&other.rows[k]);
            }
        }
        Ok(out)
    }

    /// Product `self · otherᵀ`, computed row against row.
    pub fn mul_transpose(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.ncols != other.ncols {
            return Err(Gf2Error::DimensionMismatch { expected: self.ncols, got: other.ncols });
        }
        let mut out = BitMatrix::zeros(self.nrows(), other.nrows());
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in other.rows.iter().enumerate() {
                if a.dot(b) {
                    out.rows[i].set(j, true);
                }
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.nrows() != other.nrows() {
            return Err(Gf2Error::DimensionMismatch { expected: self.nrows(), got: other.nrows() });
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.concat(b)).collect();
        Ok(BitMatrix { rows, ncols: self.ncols + other.ncols })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.ncols != other.ncols {
            return Err(Gf2Error::DimensionMismatch { expected: self.ncols, got: other.ncols });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix { rows, ncols: self.ncols })
    }

    /// Kronecker product.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let (r2, c2) = (other.nrows(), other.ncols);
        let mut out = BitMatrix::zeros(self.nrows() * r2, self.ncols * c2);
        for i in 0..self.nrows() {
            for j in self.rows[i].ones() {
                for k in 0..r2 {
                    for l in other.rows[k].ones() {
                        out.rows[i * r2 + k].set(j * c2 + l, true);
                    }
                }
            }
        }
        out
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> BitMatrix {
        BitMatrix { rows: idx.iter().map(|&i| self.rows[i].clone()).collect(), ncols: self.ncols }
    }

    /// Reduced row echelon form with deterministic pivoting.
    pub fn rref(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.ncols {
            if rank == rows.len() {
                break;
            }
            let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && r.get(col) {
                    r.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        Echelon { reduced: BitMatrix { rows, ncols: self.ncols }, pivots }
    }

    /// GF(2) rank.
    pub fn rank(&self) -> usize {
        // Forward elimination only; cheaper than a full reduction.
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.ncols {
            if rank == rows.len() {
                break;
            }
            let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot = &head[rank];
            for r in tail.iter_mut() {
                if r.get(col) {
                    r.xor_assign(pivot);
                }
            }
            rank += 1;
        }
        rank
    }

    /// A basis of the right kernel `{v : M v = 0}`, one free column per row.
    pub fn nullspace_basis(&self) -> BitMatrix {
        let ech = self.rref();
        let mut is_pivot = vec![false; self.ncols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::zeros(self.ncols);
            v.set(f, true);
            for (i, &p) in ech.pivots.iter().enumerate() {
                if ech.reduced.rows[i].get(f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix { rows: basis, ncols: self.ncols }
    }

    /// Independent rows spanning the row space (the nonzero rows of the RREF).
    pub fn row_basis(&self) -> BitMatrix {
        let ech = self.rref();
        let r = ech.pivots.len();
        let mut rows = ech.reduced.rows;
        rows.truncate(r);
        BitMatrix { rows, ncols: self.ncols }
    }

    /// Indices of a maximal independent subset of rows, chosen greedily top-down.
    pub fn independent_row_indices(&self) -> Vec<usize> {
        let mut reducer = RowReducer::new(self.ncols);
        let mut keep = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            if reducer.insert(r.clone()) {
                keep.push(i);
            }
        }
        keep
    }

    /// Some `x` with `M x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>, Gf2Error> {
        if b.len() != self.nrows() {
            return Err(Gf2Error::DimensionMismatch { expected: self.nrows(), got: b.len() });
        }
        let mut aug = self.clone();
        for (i, r) in aug.rows.iter_mut().enumerate() {
            let mut ext = BitVector::zeros(self.ncols + 1);
            for j in r.ones() {
                ext.set(j, true);
            }
            if b.get(i) {
                ext.set(self.ncols, true);
            }
            *r = ext;
        }
        aug.ncols += 1;
        let ech = aug.rref();
        if ech.pivots.last() == Some(&self.ncols) {
            return Ok(None);
        }
        let mut x = BitVector::zeros(self.ncols);
        for (i, &p) in ech.pivots.iter().enumerate() {
            if ech.reduced.rows[i].get(self.ncols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Result<BitMatrix, Gf2Error> {
        let n = self.nrows();
        if n != self.ncols {
            return Err(Gf2Error::DimensionMismatch { expected: n, got: self.ncols });
        }
        if n == 0 {
            return Ok(BitMatrix::zeros(0, 0));
        }
        let aug = self.hstack(&BitMatrix::identity(n))?;
        let ech = aug.rref();
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return Err(Gf2Error::Singular);
        }
        let rows = ech.reduced.rows.iter().map(|r| r.slice(n, 2 * n)).collect();
        Ok(BitMatrix { rows, ncols: n })
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVector) -> bool {
        let mut reducer = RowReducer::new(self.ncols);
        for r in &self.rows {
            reducer.insert(r.clone());
        }
        reducer.reduce(v).is_zero()
    }

    /// Serializes to the plain-text format: `nrows ncols` then one 0/1 row per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.nrows(), self.ncols);
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses the plain-text format from a line iterator, consuming exactly one matrix.
    pub fn read_text<'a, I: Iterator<Item = &'a str>>(lines: &mut I) -> Result<BitMatrix, Gf2Error> {
        let header = lines
            .by_ref()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| Gf2Error::Parse("missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Gf2Error::Parse(format!("bad header {header:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        let [nrows, ncols] = dims[..] else {
            return Err(Gf2Error::Parse(format!("header must be 'nrows ncols', got {header:?}")));
        };
        let mut rows = Vec::with_capacity(nrows);
        for _ in 0..nrows {
            let line = lines.next().ok_or_else(|| Gf2Error::Parse("truncated matrix".into()))?;
            let row: BitVector = line.parse()?;
            if row.len() != ncols {
                return Err(Gf2Error::DimensionMismatch { expected: ncols, got: row.len() });
            }
            rows.push(row);
        }
        Ok(BitMatrix { rows, ncols })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.nrows(), self.ncols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for BitMatrix {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BitMatrix::read_text(&mut s.lines())
    }
}

/// Incremental row reducer keyed by pivot column.
///
/// Used for rank-one updates: independence tests and row-space membership.
#[derive(Clone, Debug)]
pub struct RowReducer {
    ncols: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl RowReducer {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        debug_assert_eq!(v.len(), self.ncols);
        let mut v = v.clone();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(r);
            }
        }
        v
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: BitVector) -> bool {
        let v = self.reduce(&v);
        match v.first_one() {
            None => false,
            Some(p) => {
                // Keep stored rows reduced in column p so `reduce` stays a single pass.
                for r in self.rows.iter_mut() {
                    if r.get(p) {
                        r.xor_assign(&v);
                    }
                }
                self.rows.push(v);
                self.pivots.push(p);
                true
            }
        }
    }
}

/// Outcome of a coset weight minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetWeight {
    /// The minimum was found.
    Exact(usize),
    /// The search stopped at `cap`; the minimum is at least this value.
    AtLeast(usize),
}

impl CosetWeight {
    pub fn value(self) -> usize {
        match self {
            CosetWeight::Exact(w) | CosetWeight::AtLeast(w) => w,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, CosetWeight::Exact(_))
    }
}

/// Generator counts up to this size are enumerated exhaustively.
pub const EXHAUSTIVE_COSET_RANK: usize = 20;

/// Minimum Hamming weight over the coset `v + span(basis)`.
///
/// With at most [`EXHAUSTIVE_COSET_RANK`] independent generators the coset is
/// walked in Gray-code order. Otherwise candidate vectors are enumerated by
/// increasing weight and tested for coset membership through the annihilator
/// of the span; the search stops at weight `cap` and reports `AtLeast(cap)`.
pub fn coset_min_weight(basis: &BitMatrix, v: &BitVector, cap: usize) -> Result<CosetWeight, Gf2Error> {
    if basis.ncols() != v.len() {
        return Err(Gf2Error::DimensionMismatch { expected: basis.ncols(), got: v.len() });
    }
    let gens = basis.row_basis();
    let g = gens.nrows();
    if g <= EXHAUSTIVE_COSET_RANK {
        let mut cur = v.clone();
        let mut best = cur.weight();
        for i in 1u64..(1u64 << g) {
            cur.xor_assign(gens.row(i.trailing_zeros() as usize));
            best = best.min(cur.weight());
        }
        return Ok(CosetWeight::Exact(best));
    }

    // e ∈ v + span(B)  ⇔  K e = K v  where the rows of K span the annihilator of B.
    let k = gens.nullspace_basis();
    let cols = k.transpose();
    let target = k.mul_vec(v)?;
    let wv = v.weight();
    let limit = cap.min(wv);
    let n = v.len();
    for w in 0..limit {
        if weight_search(cols.rows(), n, w, &target) {
            return Ok(CosetWeight::Exact(w));
        }
    }
    if limit == wv {
        Ok(CosetWeight::Exact(wv))
    } else {
        Ok(CosetWeight::AtLeast(cap))
    }
}

/// Whether some XOR of exactly `w` of the given columns equals `target`.
fn weight_search(cols: &[BitVector], n: usize, w: usize, target: &BitVector) -> bool {
    fn rec(cols: &[BitVector], start: usize, left: usize, acc: &mut BitVector, target: &BitVector) -> bool {
        if left == 0 {
            return acc == target;
        }
        for i in start..=(cols.len() - left) {
            acc.xor_assign(&cols[i]);
            if rec(cols, i + 1, left - 1, acc, target) {
                acc.xor_assign(&cols[i]);
                return true;
            }
            acc.xor_assign(&cols[i]);
        }
        false
    }
    if w > n {
        return false;
    }
    let mut acc = BitVector::zeros(target.len());
    rec(cols, 0, w, &mut acc, target)
}

/// Visits every `w`-subset of `0..n` in lexicographic order, stopping early when
/// `visit` returns false. Returns false if stopped early.
pub fn for_each_combination(n: usize, w: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    if w > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        if !visit(&idx) {
            return false;
        }
        let mut i = w;
        while i > 0 && idx[i - 1] == n - w + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return true;
        }
        idx[i - 1] += 1;
        for j in i..w {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

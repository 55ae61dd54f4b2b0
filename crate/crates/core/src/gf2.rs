//! Linear algebra over F2.
//!
//! Coordinates are numbered from the least-significant bit: `x_1` is bit 0 of
//! the integer encoding, `x_2` is bit 1, and so on. A matrix stores its rows
//! as such integers, so entry `(i, j)` is bit `j` of row `i`.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::limits::Limits;

/// Largest arity representable by [`GF2Vector`] and [`GF2Matrix`].
pub const MAX_ARITY: usize = 31;

#[inline]
fn mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

#[inline]
fn parity(v: u32) -> bool {
    v.count_ones() & 1 == 1
}

/// An element of F2^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GF2Vector {
    n: usize,
    bits: u32,
}

impl GF2Vector {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::InvalidParameter(format!(
                "arity {n} exceeds the supported maximum {MAX_ARITY}"
            )));
        }
        if bits & !mask(n) != 0 {
            return Err(Error::InvalidParameter(format!(
                "bits {bits:#x} set above position {}",
                n.saturating_sub(1)
            )));
        }
        Ok(GF2Vector { n, bits })
    }

    pub(crate) fn from_raw(n: usize, bits: u32) -> Self {
        debug_assert!(bits & !mask(n) == 0);
        GF2Vector { n, bits }
    }

    pub fn zero(n: usize) -> Self {
        GF2Vector { n, bits: 0 }
    }

    /// The standard basis vector with a single one at 0-based position `i`.
    pub fn unit(n: usize, i: usize) -> Self {
        assert!(i < n, "unit vector index {i} out of range for arity {n}");
        GF2Vector { n, bits: 1 << i }
    }

    /// Builds a vector from coordinates `(x_1, ..., x_n)`.
    pub fn from_coords(coords: &[u8]) -> Self {
        let bits = coords
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &c)| acc | (u32::from(c & 1) << i));
        GF2Vector {
            n: coords.len(),
            bits,
        }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Coordinate at 0-based position `i`.
    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &GF2Vector) -> Result<bool> {
        check_dim(self.n, other.n)?;
        Ok(parity(self.bits & other.bits))
    }

    pub fn add(&self, other: &GF2Vector) -> Result<GF2Vector> {
        check_dim(self.n, other.n)?;
        Ok(GF2Vector {
            n: self.n,
            bits: self.bits ^ other.bits,
        })
    }

    /// Re-embeds the vector into a space of arity `n`, keeping the low
    /// coordinates. Fails if a dropped coordinate is nonzero.
    pub fn resize(&self, n: usize) -> Result<GF2Vector> {
        GF2Vector::new(n, self.bits)
    }
}

impl fmt::Display for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A square matrix over F2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    n: usize,
    rows: Vec<u32>,
}

impl GF2Matrix {
    pub fn from_rows(n: usize, rows: Vec<u32>) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::InvalidParameter(format!(
                "dimension {n} exceeds the supported maximum {MAX_ARITY}"
            )));
        }
        check_dim(n, rows.len())?;
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| **r & !mask(n) != 0) {
            return Err(Error::InvalidParameter(format!(
                "row {i} = {r:#x} has entries beyond column {n}"
            )));
        }
        Ok(GF2Matrix { n, rows })
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[GF2Vector]) -> Result<Self> {
        let n = columns.len();
        let mut rows = vec![0u32; n];
        for (j, c) in columns.iter().enumerate() {
            check_dim(n, c.n)?;
            for (i, row) in rows.iter_mut().enumerate() {
                if c.get(i) {
                    *row |= 1 << j;
                }
            }
        }
        Ok(GF2Matrix { n, rows })
    }

    pub fn identity(n: usize) -> Self {
        GF2Matrix {
            n,
            rows: (0..n).map(|i| 1u32 << i).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        GF2Matrix {
            n,
            rows: vec![0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn column(&self, j: usize) -> GF2Vector {
        let bits = self
            .rows
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, r)| acc | (((r >> j) & 1) << i));
        GF2Vector { n: self.n, bits }
    }

    /// Row-major integer encoding, first row most significant. This is the
    /// key that orders [`enumerate_gl`].
    pub fn encoding(&self) -> u128 {
        self.rows
            .iter()
            .fold(0u128, |acc, &r| (acc << self.n) | u128::from(r))
    }

    pub fn mat_vec(&self, x: &GF2Vector) -> Result<GF2Vector> {
        check_dim(self.n, x.n)?;
        Ok(GF2Vector {
            n: self.n,
            bits: self.apply(x.bits),
        })
    }

    /// `M x` on raw integer encodings, unchecked.
    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.rows
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, r)| acc | (u32::from(parity(r & x)) << i))
    }

    /// The images `M x` of every `x` in F2^n, indexed by the encoding of `x`.
    pub fn point_map(&self) -> Vec<u32> {
        let cols: Vec<u32> = (0..self.n).map(|j| self.column(j).bits).collect();
        let size = 1usize << self.n;
        let mut img = vec![0u32; size];
        for x in 1..size {
            let low = x.trailing_zeros() as usize;
            img[x] = img[x & (x - 1)] ^ cols[low];
        }
        img
    }

    pub fn transpose(&self) -> GF2Matrix {
        GF2Matrix {
            n: self.n,
            rows: (0..self.n).map(|j| self.column(j).bits).collect(),
        }
    }

    pub fn mul(&self, other: &GF2Matrix) -> Result<GF2Matrix> {
        check_dim(self.n, other.n)?;
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                (0..self.n)
                    .filter(|k| (r >> k) & 1 == 1)
                    .fold(0u32, |acc, k| acc ^ other.rows[k])
            })
            .collect();
        Ok(GF2Matrix { n: self.n, rows })
    }

    pub fn rank(&self) -> usize {
        rank_of(&self.rows)
    }

    pub fn is_nonsingular(&self) -> bool {
        self.rank() == self.n
    }

    /// Gauss-Jordan inverse; `None` when the matrix is singular.
    pub fn inverse(&self) -> Option<GF2Matrix> {
        let n = self.n;
        let mut a = self.rows.clone();
        let mut inv: Vec<u32> = (0..n).map(|i| 1u32 << i).collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| (a[r] >> col) & 1 == 1)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Some(GF2Matrix { n, rows: inv })
    }

    /// `n` lines of `n` characters in `{0,1}`, row-major.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for r in &self.rows {
            for j in 0..self.n {
                out.push(if (r >> j) & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<GF2Matrix> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.is_empty())
            .collect();
        let n = lines.len();
        let mut rows = Vec::with_capacity(n);
        for (li, line) in lines.iter().enumerate() {
            let mut row = 0u32;
            let mut width = 0;
            for (ci, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => row |= 1 << ci.min(31),
                    _ => {
                        return Err(Error::Parse {
                            line: li + 1,
                            column: ci + 1,
                            message: format!("expected '0' or '1', found {ch:?}"),
                        })
                    }
                }
                width += 1;
            }
            if width != n {
                return Err(Error::Parse {
                    line: li + 1,
                    column: width.min(n) + 1,
                    message: format!("row has {width} entries, expected {n}"),
                });
            }
            rows.push(row);
        }
        GF2Matrix::from_rows(n, rows)
    }
}

impl fmt::Display for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn rank_of(rows: &[u32]) -> usize {
    let mut basis = XorBasis::default();
    rows.iter().filter(|&&r| basis.insert(r)).count()
}

/// Incrementally reduced basis used for independence tests.
#[derive(Default, Clone)]
struct XorBasis {
    // (pivot bit, vector) with distinct pivots
    elems: Vec<(u32, u32)>,
}

impl XorBasis {
    fn reduce(&self, mut v: u32) -> u32 {
        for &(pivot, b) in &self.elems {
            if v & pivot != 0 {
                v ^= b;
            }
        }
        v
    }

    /// Inserts `v`; returns whether it was independent of the current span.
    fn insert(&mut self, v: u32) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let pivot = 1u32 << (31 - r.leading_zeros());
        for e in &mut self.elems {
            if e.1 & pivot != 0 {
                e.1 ^= r;
            }
        }
        self.elems.push((pivot, r));
        true
    }
}

/// `M x` with dimension checking.
pub fn mat_vec(m: &GF2Matrix, x: &GF2Vector) -> Result<GF2Vector> {
    m.mat_vec(x)
}

/// The inverse of `m`, or `None` if `m` is singular.
pub fn mat_inverse(m: &GF2Matrix) -> Option<GF2Matrix> {
    m.inverse()
}

/// |GL_n(F2)| = prod_{i<n} (2^n - 2^i), as a float (exact for n <= 7).
pub fn gl_order(n: usize) -> f64 {
    let total = 2f64.powi(n as i32);
    (0..n).map(|i| total - 2f64.powi(i as i32)).product()
}

/// Every element of GL_n(F2) exactly once, in ascending order of
/// [`GF2Matrix::encoding`].
pub fn enumerate_gl(n: usize, limits: &Limits) -> Result<GlIter> {
    limits.check_gl("GL_n(F2) enumeration", n)?;
    Ok(GlIter::new(n))
}

/// Depth-first sweep over GL_n(F2), choosing rows in ascending order while
/// keeping them linearly independent.
pub struct GlIter {
    n: usize,
    rows: Vec<u32>,
    // spans[d][v] == true iff v lies in the span of rows[..d]
    spans: Vec<Vec<bool>>,
    next: Vec<u32>,
    depth: usize,
    done: bool,
}

impl GlIter {
    fn new(n: usize) -> Self {
        let size = 1usize << n;
        let mut spans = vec![vec![false; size]; n.max(1)];
        spans[0][0] = true;
        GlIter {
            n,
            rows: vec![0; n],
            spans,
            next: vec![1; n.max(1)],
            depth: 0,
            done: false,
        }
    }
}

impl Iterator for GlIter {
    type Item = GF2Matrix;

    fn next(&mut self) -> Option<GF2Matrix> {
        if self.done {
            return None;
        }
        if self.n == 0 {
            self.done = true;
            return Some(GF2Matrix::identity(0));
        }
        let size = 1u32 << self.n;
        loop {
            let d = self.depth;
            let mut c = self.next[d];
            while c < size && self.spans[d][c as usize] {
                c += 1;
            }
            if c >= size {
                if d == 0 {
                    self.done = true;
                    return None;
                }
                self.depth -= 1;
                continue;
            }
            self.next[d] = c + 1;
            self.rows[d] = c;
            if d + 1 == self.n {
                return Some(GF2Matrix {
                    n: self.n,
                    rows: self.rows.clone(),
                });
            }
            let (lo, hi) = self.spans.split_at_mut(d + 1);
            let (cur, nxt) = (&lo[d], &mut hi[0]);
            nxt.copy_from_slice(cur);
            for v in 0..size as usize {
                if cur[v] {
                    nxt[v ^ c as usize] = true;
                }
            }
            self.next[d + 1] = 1;
            self.depth = d + 1;
        }
    }
}

/// Greedily selects a maximal independent subsequence of `vectors` (left to
/// right) and returns a nonsingular `R` with `R a_j = e_j` for the `j`-th
/// selected vector, together with the rank.
pub fn extend_to_basis(n: usize, vectors: &[GF2Vector]) -> Result<(GF2Matrix, usize)> {
    let mut basis = XorBasis::default();
    let mut columns = Vec::with_capacity(n);
    for v in vectors {
        check_dim(n, v.n)?;
        if basis.insert(v.bits) {
            columns.push(*v);
        }
    }
    let rank = columns.len();
    for i in 0..n {
        if columns.len() == n {
            break;
        }
        if basis.insert(1 << i) {
            columns.push(GF2Vector::unit(n, i));
        }
    }
    let b = GF2Matrix::from_columns(&columns)?;
    let r = b
        .inverse()
        .ok_or_else(|| Error::Invariant("completed basis is singular".into()))?;
    Ok((r, rank))
}

/// Uniform element of GL_n(F2) by rejection sampling, drawn from `rng`.
pub fn random_nonsingular_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GF2Matrix {
    loop {
        let rows: Vec<u32> = (0..n).map(|_| rng.random::<u32>() & mask(n)).collect();
        if rank_of(&rows) == n {
            return GF2Matrix { n, rows };
        }
    }
}

/// Uniform element of GL_n(F2), deterministic in `seed`.
pub fn random_nonsingular(n: usize, seed: u64) -> GF2Matrix {
    random_nonsingular_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn m(n: usize, rows: &[&str]) -> GF2Matrix {
        let text: String = rows.iter().map(|r| format!("{r}\n")).collect();
        let mat = GF2Matrix::from_text(&text).unwrap();
        assert_eq!(mat.dim(), n);
        mat
    }

    #[test]
    fn mat_vec_examples() {
        let x = GF2Vector::from_coords(&[1, 0, 1]);
        assert_eq!(GF2Matrix::identity(3).mat_vec(&x).unwrap(), x);
        assert!(GF2Matrix::zero(3).mat_vec(&x).unwrap().is_zero());

        let a = m(2, &["11", "01"]);
        let e1 = GF2Vector::from_coords(&[1, 0]);
        let e2 = GF2Vector::from_coords(&[0, 1]);
        assert_eq!(a.mat_vec(&e1).unwrap(), GF2Vector::from_coords(&[1, 0]));
        assert_eq!(a.mat_vec(&e2).unwrap(), GF2Vector::from_coords(&[1, 1]));
    }

    #[test]
    fn mat_vec_dimension_mismatch() {
        let err = GF2Matrix::identity(3)
            .mat_vec(&GF2Vector::zero(2))
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            GF2Matrix::identity(4).inverse().unwrap(),
            GF2Matrix::identity(4)
        );
        assert!(m(2, &["11", "11"]).inverse().is_none());
        let a = m(2, &["11", "01"]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, a);
        assert_eq!(a.mul(&inv).unwrap(), GF2Matrix::identity(2));
    }

    #[test]
    fn gl_counts_match_formula_and_brute_force() {
        let limits = Limits::default();
        for (n, expected) in [(0usize, 1usize), (1, 1), (2, 6), (3, 168), (4, 20160)] {
            let count = enumerate_gl(n, &limits).unwrap().count();
            assert_eq!(count, expected, "n = {n}");
            assert_eq!(gl_order(n) as usize, expected);
        }
        // brute force over all 2^(n^2) matrices at n = 2 and n = 3
        for n in [2usize, 3] {
            let total = 1u32 << (n * n);
            let brute = (0..total)
                .filter(|code| {
                    let rows = (0..n)
                        .map(|i| (code >> (n * (n - 1 - i))) & mask(n))
                        .collect::<Vec<_>>();
                    rank_of(&rows) == n
                })
                .count();
            assert_eq!(brute, enumerate_gl(n, &limits).unwrap().count());
        }
    }

    #[test]
    fn gl_enumeration_is_ascending_and_invertible() {
        let all: Vec<_> = enumerate_gl(3, &Limits::default()).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0].encoding() < w[1].encoding()));
        for a in &all {
            let inv = a.inverse().expect("GL element must be invertible");
            assert_eq!(a.mul(&inv).unwrap(), GF2Matrix::identity(3));
        }
        assert_eq!(all[0], m(3, &["100", "010", "001"]).transpose().transpose());
    }

    #[test]
    fn gl_guard_refuses() {
        let err = enumerate_gl(6, &Limits::default()).err().unwrap();
        let msg = err.to_string();
        assert!(msg.contains("guard is n <= 5"), "{msg}");
        assert!(msg.contains("|GL_6(F2)|"), "{msg}");
    }

    #[test]
    fn extend_to_basis_examples() {
        let units: Vec<_> = (0..4).map(|i| GF2Vector::unit(4, i)).collect();
        assert_eq!(
            extend_to_basis(4, &units).unwrap(),
            (GF2Matrix::identity(4), 4)
        );
        assert_eq!(extend_to_basis(3, &[]).unwrap(), (GF2Matrix::identity(3), 0));

        let a = GF2Vector::from_coords(&[1, 1, 0]);
        let b = GF2Vector::from_coords(&[0, 1, 1]);
        let (r, rank) = extend_to_basis(3, &[a, a, b]).unwrap();
        assert_eq!(rank, 2);
        assert!(r.is_nonsingular());
        assert_eq!(r.mat_vec(&a).unwrap(), GF2Vector::unit(3, 0));
        assert_eq!(r.mat_vec(&b).unwrap(), GF2Vector::unit(3, 1));
    }

    #[test]
    fn random_nonsingular_is_reproducible_and_uniform() {
        assert_eq!(random_nonsingular(1, 99), GF2Matrix::identity(1));
        assert_eq!(random_nonsingular(4, 7), random_nonsingular(4, 7));

        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts: HashMap<u128, usize> = HashMap::new();
        for _ in 0..6000 {
            *counts
                .entry(random_nonsingular_with(2, &mut rng).encoding())
                .or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for (code, c) in &counts {
            assert!((850..=1150).contains(c), "matrix {code}: {c} draws");
        }
    }

    #[test]
    fn text_roundtrip_and_parse_errors() {
        let a = m(3, &["110", "011", "001"]);
        assert_eq!(GF2Matrix::from_text(&a.to_text()).unwrap(), a);
        match GF2Matrix::from_text("10\n0x\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(GF2Matrix::from_text("10\n011\n").is_err());
    }

    #[test]
    fn point_map_agrees_with_apply() {
        let a = random_nonsingular(5, 3);
        let map = a.point_map();
        for x in 0..32u32 {
            assert_eq!(map[x as usize], a.apply(x));
        }
    }
}

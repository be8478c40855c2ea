//! Exact linear algebra over a prime field or the rationals.
//!
//! Every routine pivots deterministically (first nonzero column, smallest row
//! index at or below the current pivot row), so results are reproducible bit
//! for bit across runs.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::poly::{self, Factorization, Poly};

/// The ground field of a computation, as it appears in input files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSpec {
    Prime(u64),
    Rationals,
}

impl FieldSpec {
    pub const DEFAULT_PRIME: u64 = 101;
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Prime(Self::DEFAULT_PRIME)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid scalar `{0}`")]
pub struct ScalarParseError(pub String);

/// Arithmetic context for a field. Elements carry no reference to their field,
/// so every operation goes through the context value.
pub trait Field: Clone + Debug + PartialEq + Eq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Ord + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    /// A random element. Over the rationals this is a small integer.
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    fn parse_elem(&self, s: &str) -> Result<Self::Elem, ScalarParseError>;
    fn format_elem(&self, a: &Self::Elem) -> String;
    fn spec(&self) -> FieldSpec;
    /// Pairwise coprime factors of `f`, as far as this field can determine them.
    fn factor(&self, f: &Poly<Self>) -> Factorization<Self>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }
}

/// The prime field F_p, elements stored as canonical residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Returns `None` unless `p` is a prime below 2^32.
    pub fn new(p: u64) -> Option<Self> {
        if p < 2 || p >= (1 << 32) || !is_prime(p) {
            return None;
        }
        Some(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero in F_{}", self.p);
        self.pow(*a, self.p - 2)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn parse_elem(&self, s: &str) -> Result<u64, ScalarParseError> {
        let q = parse_rational(s)?;
        let num = bigint_mod(q.numer(), self.p);
        let den = bigint_mod(q.denom(), self.p);
        if den == 0 {
            return Err(ScalarParseError(s.to_string()));
        }
        Ok(self.div(&num, &den))
    }
    fn format_elem(&self, a: &u64) -> String {
        a.to_string()
    }
    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn factor(&self, f: &Poly<Self>) -> Factorization<Self> {
        poly::factor_prime_field(self, f)
    }
}

fn bigint_mod(v: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((v % &m) + &m) % &m;
    r.try_into().expect("residue fits in u64")
}

fn parse_rational(s: &str) -> Result<BigRational, ScalarParseError> {
    let err = || ScalarParseError(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = den.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

/// The rational numbers with exact big-integer fractions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero rational");
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-4..=4))
    }
    fn parse_elem(&self, s: &str) -> Result<BigRational, ScalarParseError> {
        parse_rational(s)
    }
    fn format_elem(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn factor(&self, f: &Poly<Self>) -> Factorization<Self> {
        poly::factor_rationals(f)
    }
}

/// Dense row-major matrix over `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Result of [`Matrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref<F: Field> {
    pub reduced: Matrix<F>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Self {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_rows(field: &F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from row vectors, all of length `cols`.
    pub fn from_row_vecs(field: &F, cols: usize, rows: &[Vec<F::Elem>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().cloned());
        }
        Self::from_rows(field, rows.len(), cols, data)
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_col_vecs(field: &F, rows: usize, cols: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn from_i64(field: &F, rows: usize, cols: usize, vals: &[i64]) -> Self {
        let data = vals.iter().map(|&v| field.from_i64(v)).collect();
        Self::from_rows(field, rows, cols, data)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len());
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !f.is_zero(a) && !f.is_zero(b) {
                        acc = f.add(&acc, &f.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.field.add(a, b))
            .collect();
        Self::from_rows(&self.field, self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.field.sub(a, b))
            .collect();
        Self::from_rows(&self.field, self.rows, self.cols, data)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let data = self.data.iter().map(|a| self.field.mul(a, c)).collect();
        Self::from_rows(&self.field, self.rows, self.cols, data)
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &F::Elem, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        if self.field.is_zero(c) {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !self.field.is_zero(b) {
                *a = self.field.add(a, &self.field.mul(c, b));
            }
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(&self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> F::Elem {
        assert!(self.is_square());
        let mut acc = self.field.zero();
        for i in 0..self.rows {
            acc = self.field.add(&acc, &self[(i, i)]);
        }
        acc
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self::from_rows(&self.field, self.rows + other.rows, self.cols, data)
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(&self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn block_diag(field: &F, blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(&self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        m
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(&self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend(self.row(i).iter().cloned());
        }
        Self::from_rows(&self.field, rows.len(), self.cols, data)
    }

    /// Reduced row-echelon form.
    pub fn rref(&self) -> Rref<F> {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(&m[(i, c)])) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = f.inv(&m[(r, c)]);
            for j in c..m.cols {
                let v = f.mul(&m[(r, j)], &inv);
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(&m[(i, c)]) {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if f.is_zero(&m[(r, j)]) {
                        continue;
                    }
                    let v = f.sub(&m[(i, j)], &f.mul(&factor, &m[(r, j)]));
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            reduced: m,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let Rref {
            reduced, pivots, ..
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(&reduced[(r, free)]);
            }
            out.push(v);
        }
        out
    }

    /// Some `x` with `self * x = b`, or `None` if `b` is outside the column space.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(b.len(), self.rows);
        let f = &self.field;
        let bcol = Self::from_col_vecs(f, self.rows, &[b.to_vec()]);
        let aug = self.hstack(&bcol);
        let Rref {
            reduced, pivots, ..
        } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = reduced[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(&self.field, n));
        let rr = aug.rref();
        if rr.pivots.len() < n || rr.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(rr.reduced.block(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<F: Field> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F::Elem;
    fn index(&self, (i, j): (usize, usize)) -> &F::Elem {
        &self.data[i * self.cols + j]
    }
}

impl<F: Field> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F::Elem {
        &mut self.data[i * self.cols + j]
    }
}

/// A subspace of `F^n` kept as the rows of a reduced echelon matrix.
///
/// The rows are themselves the basis used for coordinates: a vector `v` in the
/// span equals `sum_i v[pivot_i] * row_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn new(field: &F, ambient: usize) -> Self {
        Self {
            field: field.clone(),
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn spanned_by(field: &F, ambient: usize, vecs: &[Vec<F::Elem>]) -> Self {
        let mut s = Self::new(field, ambient);
        for v in vecs {
            s.insert(v);
        }
        s
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                let mut v = vec![field.zero(); ambient];
                v[i] = field.one();
                v
            })
            .collect();
        Self {
            field: field.clone(),
            ambient,
            rows,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Eliminates the pivot coordinates of `v`; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if f.is_zero(&w[p]) {
                continue;
            }
            let c = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.reduce(v).iter().all(|x| self.field.is_zero(x))
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[F::Elem]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let f = self.field.clone();
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&w[p]);
        for x in w.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for row in self.rows.iter_mut() {
            if f.is_zero(&row[p]) {
                continue;
            }
            let c = row[p].clone();
            for (x, y) in row.iter_mut().zip(&w) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, w);
        true
    }

    /// Coordinates of `v` relative to the echelon rows. Caller guarantees membership.
    pub fn coords(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        debug_assert!(self.contains(v));
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    /// Indices of the coordinate vectors complementing this subspace.
    pub fn complement_indices(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&i| !is_pivot[i]).collect()
    }

    /// Coordinates of the image of `v` in the quotient by this subspace, relative
    /// to the complement coordinate vectors.
    pub fn quotient_coords(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let w = self.reduce(v);
        self.complement_indices()
            .into_iter()
            .map(|i| w[i].clone())
            .collect()
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r);
        }
        s
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let f = &self.field;
        // Solve a*A = b*B over the stacked rows.
        let (n, a, b) = (self.ambient, self.dim(), other.dim());
        let mut m = Matrix::zeros(f, n, a + b);
        for (j, r) in self.rows.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = r[i].clone();
            }
        }
        for (j, r) in other.rows.iter().enumerate() {
            for i in 0..n {
                m[(i, a + j)] = f.neg(&r[i]);
            }
        }
        let mut out = Self::new(f, n);
        for k in m.kernel_basis() {
            let mut v = vec![f.zero(); n];
            for (j, r) in self.rows.iter().enumerate() {
                if f.is_zero(&k[j]) {
                    continue;
                }
                for i in 0..n {
                    v[i] = f.add(&v[i], &f.mul(&k[j], &r[i]));
                }
            }
            out.insert(&v);
        }
        out
    }

    /// Basis rows as the columns of an `ambient x dim` matrix.
    pub fn as_columns(&self) -> Matrix<F> {
        Matrix::from_col_vecs(&self.field, self.ambient, &self.rows)
    }
}

/// Rank of the subgroup of Z^cols generated by `rows`; equals the rank over Q.
pub fn int_rank<T: Clone + Into<BigInt>>(rows: &[Vec<T>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let q = Rationals;
    let cols = first.len();
    let data: Vec<BigRational> = rows
        .iter()
        .flat_map(|r| {
            assert_eq!(r.len(), cols);
            r.iter().map(|v| BigRational::from_integer(v.clone().into()))
        })
        .collect();
    Matrix::from_rows(&q, rows.len(), cols, data).rank()
}

/// Primitive integer polynomial coefficients for a rational polynomial.
pub(crate) fn clear_denominators(coeffs: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut l = BigInt::one();
    for c in coeffs {
        l = l.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return ints;
    }
    let sign = if ints.last().map(|c| c.is_negative()).unwrap_or(false) {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    ints.into_iter().map(|c| c / &g * &sign).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn rref_identity_and_zero() {
        let f = fp();
        let r = Matrix::identity(&f, 3).rref();
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);
        let z = Matrix::zeros(&f, 2, 5).rref();
        assert_eq!(z.rank, 0);
        assert!(z.pivots.is_empty());
    }

    #[test]
    fn rank_of_dependent_rows() {
        let f = fp();
        let m = Matrix::from_i64(&f, 2, 2, &[1, 2, 2, 4]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernels() {
        let f = fp();
        assert!(Matrix::identity(&f, 3).kernel_basis().is_empty());
        assert_eq!(Matrix::zeros(&f, 2, 3).kernel_basis().len(), 3);
        let m = Matrix::from_i64(&f, 1, 2, &[1, 1]);
        let k = m.kernel_basis();
        assert_eq!(k, vec![vec![f.from_i64(-1), 1]]);
    }

    #[test]
    fn int_rank_examples() {
        assert_eq!(int_rank(&[vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(int_rank(&[vec![1, 1], vec![2, 2]]), 1);
        assert_eq!(int_rank::<i64>(&[]), 0);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let f = fp();
        let m = Matrix::from_i64(&f, 2, 2, &[1, 2, 2, 4]);
        assert!(m.solve(&[1, 0]).is_none());
        let x = m.solve(&[3, 6]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![3, 6]);
    }

    #[test]
    fn rationals_parse_and_format() {
        let q = Rationals;
        let x = q.parse_elem("-3/4").unwrap();
        assert_eq!(q.format_elem(&x), "-3/4");
        assert_eq!(q.format_elem(&q.from_i64(17)), "17");
        assert!(q.parse_elem("1/0").is_err());
        let f = fp();
        assert_eq!(f.parse_elem("1/2").unwrap(), 51);
        assert_eq!(f.parse_elem("-1").unwrap(), 100);
    }

    #[test]
    fn subspace_insert_reduce_intersection() {
        let f = fp();
        let mut s = Subspace::new(&f, 3);
        assert!(s.insert(&[1, 1, 0]));
        assert!(s.insert(&[0, 1, 1]));
        assert!(!s.insert(&[1, 2, 1]));
        assert_eq!(s.dim(), 2);
        let t = Subspace::spanned_by(&f, 3, &[vec![1, 0, 0], vec![0, 0, 1]]);
        let i = s.intersection(&t);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&[1, 0, f.from_i64(-1)]));
        assert_eq!(s.complement_indices().len(), 1);
    }

    #[test]
    fn inverse_roundtrip() {
        let f = fp();
        let m = Matrix::from_i64(&f, 2, 2, &[2, 1, 1, 1]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&f, 2));
        assert!(Matrix::from_i64(&f, 2, 2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn prime_field_rejects_composites() {
        assert!(PrimeField::new(100).is_none());
        assert!(PrimeField::new(2).is_some());
    }
}

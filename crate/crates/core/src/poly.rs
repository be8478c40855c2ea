//! Univariate polynomials, characteristic polynomials and factorization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{clear_denominators, Field, Matrix, PrimeField, Rationals};

/// Polynomial with coefficients in ascending degree order and no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<F: Field> {
    coeffs: Vec<F::Elem>,
}

/// One part of a coprime factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorPart<F: Field> {
    /// Monic.
    pub poly: Poly<F>,
    pub multiplicity: usize,
    /// Whether `poly` is known to be irreducible.
    pub irreducible: bool,
}

/// Pairwise coprime factors whose powers multiply to the monic associate of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization<F: Field> {
    pub parts: Vec<FactorPart<F>>,
}

impl<F: Field> Factorization<F> {
    pub fn is_complete(&self) -> bool {
        self.parts.iter().all(|p| p.irreducible)
    }
}

impl<F: Field> Poly<F> {
    pub fn new(field: &F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(field: &F, c: F::Elem) -> Self {
        Self::new(field, vec![c])
    }

    pub fn one(field: &F) -> Self {
        Self::constant(field, field.one())
    }

    /// `x - a`
    pub fn linear(field: &F, a: &F::Elem) -> Self {
        Self::new(field, vec![field.neg(a), field.one()])
    }

    pub fn x(field: &F) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn add(&self, field: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = field.zero();
        let c = (0..n)
            .map(|i| {
                field.add(
                    self.coeffs.get(i).unwrap_or(&z),
                    other.coeffs.get(i).unwrap_or(&z),
                )
            })
            .collect();
        Self::new(field, c)
    }

    pub fn sub(&self, field: &F, other: &Self) -> Self {
        self.add(field, &other.scale(field, &field.neg(&field.one())))
    }

    pub fn scale(&self, field: &F, c: &F::Elem) -> Self {
        Self::new(field, self.coeffs.iter().map(|a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &F, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if field.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = field.add(&c[i + j], &field.mul(a, b));
            }
        }
        Self::new(field, c)
    }

    pub fn pow(&self, field: &F, e: usize) -> Self {
        let mut acc = Self::one(field);
        for _ in 0..e {
            acc = acc.mul(field, self);
        }
        acc
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, field: &F, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = field.inv(d.lead().unwrap());
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![field.zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = field.mul(&r[k + dd], &inv);
            if field.is_zero(&c) {
                continue;
            }
            for (j, b) in d.coeffs.iter().enumerate() {
                r[k + j] = field.sub(&r[k + j], &field.mul(&c, b));
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(field, q), Self::new(field, r))
    }

    pub fn rem(&self, field: &F, d: &Self) -> Self {
        self.divrem(field, d).1
    }

    pub fn monic(&self, field: &F) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => self.scale(field, &field.inv(l)),
        }
    }

    /// Monic gcd; zero if both inputs are zero.
    pub fn gcd(&self, field: &F, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(field, &b);
            a = b;
            b = r;
        }
        a.monic(field)
    }

    pub fn derivative(&self, field: &F) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| field.mul(a, &field.from_i64(i as i64)))
            .collect();
        Self::new(field, c)
    }

    pub fn eval(&self, field: &F, x: &F::Elem) -> F::Elem {
        let mut acc = field.zero();
        for c in self.coeffs.iter().rev() {
            acc = field.add(&field.mul(&acc, x), c);
        }
        acc
    }

    /// Evaluates at a square matrix by Horner's rule.
    pub fn eval_matrix(&self, field: &F, a: &Matrix<F>) -> Matrix<F> {
        let n = a.rows();
        let mut acc = Matrix::zeros(field, n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a);
            acc = acc.add(&Matrix::identity(field, n).scale(c));
        }
        acc
    }

    /// `self^e mod m` by repeated squaring.
    pub fn powmod(&self, field: &F, mut e: u64, m: &Self) -> Self {
        let mut acc = Self::one(field).rem(field, m);
        let mut base = self.rem(field, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base).rem(field, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(field, &base).rem(field, m);
            }
        }
        acc
    }
}

/// Characteristic polynomial `det(x I - A)` via Hessenberg reduction.
pub fn char_poly<F: Field>(field: &F, a: &Matrix<F>) -> Poly<F> {
    assert!(a.is_square());
    let n = a.rows();
    let f = field;
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !f.is_zero(&h[(i, m - 1)])) else {
            continue;
        };
        if i != m {
            for j in 0..n {
                let t = h[(i, j)].clone();
                h[(i, j)] = h[(m, j)].clone();
                h[(m, j)] = t;
            }
            for j in 0..n {
                let t = h[(j, i)].clone();
                h[(j, i)] = h[(j, m)].clone();
                h[(j, m)] = t;
            }
        }
        let piv = f.inv(&h[(m, m - 1)]);
        for i in (m + 1)..n {
            if f.is_zero(&h[(i, m - 1)]) {
                continue;
            }
            let t = f.mul(&h[(i, m - 1)], &piv);
            for j in 0..n {
                let v = f.sub(&h[(i, j)], &f.mul(&t, &h[(m, j)]));
                h[(i, j)] = v;
            }
            for j in 0..n {
                let v = f.add(&h[(j, m)], &f.mul(&t, &h[(j, i)]));
                h[(j, m)] = v;
            }
        }
    }
    let mut p: Vec<Poly<F>> = vec![Poly::one(f)];
    for m in 1..=n {
        let mut next = Poly::linear(f, &h[(m - 1, m - 1)]).mul(f, &p[m - 1]);
        let mut t = f.one();
        for i in 1..m {
            t = f.mul(&t, &h[(m - i, m - i - 1)]);
            let c = f.mul(&t, &h[(m - i - 1, m - 1)]);
            if !f.is_zero(&c) {
                next = next.sub(f, &p[m - i - 1].scale(f, &c));
            }
        }
        p.push(next);
    }
    p.pop().unwrap()
}

/// Minimal polynomial of an element given by its successive powers.
///
/// `power(k)` returns the coordinate vector of `z^k`. Returns `None` if no
/// dependence appears up to degree `max_deg`.
pub fn minimal_polynomial<F: Field>(
    field: &F,
    mut power: impl FnMut(usize) -> Vec<F::Elem>,
    max_deg: usize,
) -> Option<Poly<F>> {
    let mut cols: Vec<Vec<F::Elem>> = Vec::new();
    for k in 0..=max_deg {
        let v = power(k);
        if !cols.is_empty() {
            let m = Matrix::from_col_vecs(field, v.len(), &cols);
            if let Some(x) = m.solve(&v) {
                let mut c: Vec<F::Elem> = x.iter().map(|a| field.neg(a)).collect();
                c.push(field.one());
                return Some(Poly::new(field, c));
            }
        } else if v.iter().all(|a| field.is_zero(a)) {
            return Some(Poly::one(field));
        }
        cols.push(v);
    }
    None
}

/// Squarefree decomposition over F_p: monic `f = prod a_i^i` with `a_i` squarefree, pairwise coprime.
fn squarefree_prime(fp: &PrimeField, f: &Poly<PrimeField>) -> Vec<(Poly<PrimeField>, usize)> {
    let p = fp.modulus() as usize;
    let f = f.monic(fp);
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let d = f.derivative(fp);
    if d.is_zero() {
        // f(x) = g(x^p); in F_p the p-th root of coefficients is themselves.
        let g = Poly::new(fp, f.coeffs.iter().step_by(p).cloned().collect());
        for (a, m) in squarefree_prime(fp, &g) {
            out.push((a, m * p));
        }
        return out;
    }
    let mut c = f.gcd(fp, &d);
    let mut w = f.divrem(fp, &c).0;
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(fp, &c);
        let z = w.divrem(fp, &y).0;
        if z.degree().unwrap_or(0) > 0 {
            out.push((z.monic(fp), i));
        }
        i += 1;
        w = y;
        c = c.divrem(fp, &w).0;
    }
    if c.degree().unwrap_or(0) > 0 {
        let g = Poly::new(fp, c.coeffs.iter().step_by(p).cloned().collect());
        for (a, m) in squarefree_prime(fp, &g) {
            out.push((a, m * p));
        }
    }
    merge_equal(fp, out)
}

fn merge_equal<F: Field>(field: &F, parts: Vec<(Poly<F>, usize)>) -> Vec<(Poly<F>, usize)> {
    let mut out: Vec<(Poly<F>, usize)> = Vec::new();
    for (a, m) in parts {
        let a = a.monic(field);
        if let Some(e) = out.iter_mut().find(|(b, _)| *b == a) {
            e.1 += m;
        } else {
            out.push((a, m));
        }
    }
    out
}

/// Irreducible factors of a monic squarefree polynomial over F_p (Berlekamp).
pub fn berlekamp(fp: &PrimeField, f: &Poly<PrimeField>) -> Vec<Poly<PrimeField>> {
    let n = f.degree().unwrap_or(0);
    if n <= 1 {
        return if n == 1 { vec![f.monic(fp)] } else { vec![] };
    }
    let p = fp.modulus();
    let xp = Poly::x(fp).powmod(fp, p, f);
    let mut q = Matrix::zeros(fp, n, n);
    let mut cur = Poly::one(fp);
    for i in 0..n {
        for (j, c) in cur.coeffs.iter().enumerate() {
            q[(j, i)] = *c;
        }
        cur = cur.mul(fp, &xp).rem(fp, f);
    }
    let kernel = q.sub(&Matrix::identity(fp, n)).kernel_basis();
    let k = kernel.len();
    let mut factors = vec![f.monic(fp)];
    if k == 1 {
        return factors;
    }
    let basis: Vec<Poly<PrimeField>> = kernel
        .into_iter()
        .map(|v| Poly::new(fp, v))
        .filter(|v| v.degree().unwrap_or(0) > 0)
        .collect();
    if p <= 1024 {
        'outer: for v in &basis {
            let mut next = Vec::new();
            for g in factors.drain(..) {
                if g.degree().unwrap_or(0) <= 1 {
                    next.push(g);
                    continue;
                }
                let mut rest = g;
                for s in 0..p {
                    if rest.degree().unwrap_or(0) <= 1 {
                        break;
                    }
                    let h = rest.gcd(fp, &v.sub(fp, &Poly::constant(fp, s)));
                    let dh = h.degree().unwrap_or(0);
                    if dh > 0 && dh < rest.degree().unwrap() {
                        rest = rest.divrem(fp, &h).0.monic(fp);
                        next.push(h);
                    }
                }
                next.push(rest);
            }
            factors = next;
            if factors.len() == k {
                break 'outer;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        while factors.len() < k {
            let mut v = Poly::zero();
            for b in &basis {
                v = v.add(fp, &b.scale(fp, &fp.random_elem(&mut rng)));
            }
            let mut next = Vec::new();
            for g in factors.drain(..) {
                if g.degree().unwrap_or(0) <= 1 {
                    next.push(g);
                    continue;
                }
                let w = v.powmod(fp, (p - 1) / 2, &g).sub(fp, &Poly::one(fp));
                let h = g.gcd(fp, &w);
                let dh = h.degree().unwrap_or(0);
                if dh > 0 && dh < g.degree().unwrap() {
                    next.push(g.divrem(fp, &h).0.monic(fp));
                    next.push(h);
                } else {
                    next.push(g);
                }
            }
            factors = next;
        }
    }
    factors.sort_by(|a, b| a.coeffs.len().cmp(&b.coeffs.len()).then(a.coeffs.cmp(&b.coeffs)));
    factors
}

/// Complete factorization over F_p.
pub fn factor_prime_field(fp: &PrimeField, f: &Poly<PrimeField>) -> Factorization<PrimeField> {
    let mut parts = Vec::new();
    for (a, m) in squarefree_prime(fp, f) {
        for g in berlekamp(fp, &a) {
            parts.push(FactorPart {
                poly: g,
                multiplicity: m,
                irreducible: true,
            });
        }
    }
    Factorization { parts }
}

/// Yun's squarefree decomposition in characteristic zero.
fn squarefree_rational(f: &Poly<Rationals>) -> Vec<(Poly<Rationals>, usize)> {
    let q = Rationals;
    let f = f.monic(&q);
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let d = f.derivative(&q);
    let a0 = f.gcd(&q, &d);
    let mut b = f.divrem(&q, &a0).0;
    let mut c = d.divrem(&q, &a0).0;
    let mut dd = c.sub(&q, &b.derivative(&q));
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&q, &dd);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.divrem(&q, &a).0;
        c = dd.divrem(&q, &a).0;
        dd = c.sub(&q, &b.derivative(&q));
        i += 1;
    }
    out
}

const DIVISOR_BOUND: u64 = 1_000_000;

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > DIVISOR_BOUND {
        return None;
    }
    Some(
        (1..=n)
            .filter(|d| n % d == 0)
            .map(BigInt::from)
            .collect(),
    )
}

/// Rational roots by the rational root test, or `None` if the coefficients are too large to enumerate.
fn rational_roots(f: &Poly<Rationals>) -> Option<Vec<BigRational>> {
    let q = Rationals;
    let ints = clear_denominators(f.coeffs());
    let mut shift = 0;
    while shift < ints.len() && ints[shift].is_zero() {
        shift += 1;
    }
    let mut roots = Vec::new();
    if shift > 0 {
        roots.push(BigRational::zero());
    }
    let trimmed = &ints[shift..];
    if trimmed.len() <= 1 {
        return Some(roots);
    }
    let nums = divisors(&trimmed[0])?;
    let dens = divisors(trimmed.last().unwrap())?;
    let mut seen = std::collections::BTreeSet::new();
    for a in &nums {
        for b in &dens {
            if !a.gcd(b).is_one() {
                continue;
            }
            for s in [BigInt::one(), -BigInt::one()] {
                let r = BigRational::new(a * &s, b.clone());
                if seen.insert(r.clone()) && q.is_zero(&f.eval(&q, &r)) {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}

const CERTIFY_PRIMES: [u64; 15] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// True if some reduction mod a small prime keeps the degree and is irreducible.
fn certified_irreducible(f: &Poly<Rationals>) -> bool {
    let n = f.degree().unwrap_or(0);
    if n <= 1 {
        return true;
    }
    let ints = clear_denominators(f.coeffs());
    for &p in &CERTIFY_PRIMES {
        let fp = PrimeField::new(p).unwrap();
        let lead = ints.last().unwrap();
        if (lead % BigInt::from(p)).is_zero() {
            continue;
        }
        let red = Poly::new(
            &fp,
            ints.iter()
                .map(|c| {
                    let m = BigInt::from(p);
                    (((c % &m) + &m) % &m).to_u64().unwrap()
                })
                .collect(),
        );
        let g = red.gcd(&fp, &red.derivative(&fp));
        if g.degree().unwrap_or(0) > 0 {
            continue;
        }
        if berlekamp(&fp, &red.monic(&fp)).len() == 1 {
            return true;
        }
    }
    false
}

/// Partial factorization over Q: squarefree parts, rational linear factors, and
/// irreducibility certificates by reduction modulo small primes.
pub fn factor_rationals(f: &Poly<Rationals>) -> Factorization<Rationals> {
    let q = Rationals;
    let mut parts = Vec::new();
    for (a, m) in squarefree_rational(f) {
        let mut rest = a;
        if let Some(roots) = rational_roots(&rest) {
            for r in roots {
                let lin = Poly::linear(&q, &r);
                rest = rest.divrem(&q, &lin).0;
                parts.push(FactorPart {
                    poly: lin,
                    multiplicity: m,
                    irreducible: true,
                });
            }
            if rest.degree().unwrap_or(0) > 0 {
                // Without rational roots, degree 2 and 3 are irreducible.
                let d = rest.degree().unwrap();
                let irreducible = d <= 3 || certified_irreducible(&rest);
                parts.push(FactorPart {
                    poly: rest.monic(&q),
                    multiplicity: m,
                    irreducible,
                });
            }
        } else {
            let irreducible = certified_irreducible(&rest);
            parts.push(FactorPart {
                poly: rest.monic(&q),
                multiplicity: m,
                irreducible,
            });
        }
    }
    Factorization { parts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    fn fp() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    fn det<F: Field>(f: &F, m: &Matrix<F>) -> F::Elem {
        // Gaussian elimination determinant as an independent route.
        let n = m.rows();
        let mut a = m.clone();
        let mut d = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !f.is_zero(&a[(i, c)])) else {
                return f.zero();
            };
            if p != c {
                for j in 0..n {
                    let t = a[(p, j)].clone();
                    a[(p, j)] = a[(c, j)].clone();
                    a[(c, j)] = t;
                }
                d = f.neg(&d);
            }
            d = f.mul(&d, &a[(c, c)]);
            let inv = f.inv(&a[(c, c)]);
            for i in (c + 1)..n {
                let t = f.mul(&a[(i, c)], &inv);
                for j in 0..n {
                    let v = f.sub(&a[(i, j)], &f.mul(&t, &a[(c, j)]));
                    a[(i, j)] = v;
                }
            }
        }
        d
    }

    #[test]
    fn char_poly_matches_determinant_at_points() {
        let f = fp();
        let a = Matrix::from_i64(&f, 4, 4, &[1, 2, 0, 3, 0, 0, 5, 1, 7, 1, 1, 0, 2, 0, 0, 4]);
        let cp = char_poly(&f, &a);
        assert_eq!(cp.degree(), Some(4));
        for x in 0..10 {
            let xi = Matrix::identity(&f, 4).scale(&x);
            assert_eq!(cp.eval(&f, &x), det(&f, &xi.sub(&a)));
        }
        assert!(cp.eval_matrix(&f, &a).is_zero());
    }

    #[test]
    fn char_poly_over_rationals() {
        let q = Rationals;
        let a = Matrix::from_i64(&q, 2, 2, &[0, -1, 1, 0]);
        let cp = char_poly(&q, &a);
        assert_eq!(cp, Poly::new(&q, vec![q.one(), q.zero(), q.one()]));
        let fact = factor_rationals(&cp);
        assert_eq!(fact.parts.len(), 1);
        assert!(fact.parts[0].irreducible);
    }

    #[test]
    fn berlekamp_splits_product() {
        let f = fp();
        // (x-1)(x-2)(x^2+1); x^2+1 is irreducible mod 101? 101 = 1 mod 4, so it splits.
        let g = Poly::linear(&f, &1)
            .mul(&f, &Poly::linear(&f, &2))
            .mul(&f, &Poly::new(&f, vec![1, 0, 1]));
        let fs = berlekamp(&f, &g);
        assert_eq!(fs.len(), 4);
        // x^2 + 2 is irreducible mod 101 since -2 is a non-residue.
        let h = Poly::new(&f, vec![2, 0, 1]);
        assert_eq!(berlekamp(&f, &h).len(), 1);
    }

    #[test]
    fn factor_with_multiplicities() {
        let f = fp();
        let g = Poly::linear(&f, &3).pow(&f, 3).mul(&f, &Poly::linear(&f, &5));
        let fact = factor_prime_field(&f, &g);
        let mut mults: Vec<usize> = fact.parts.iter().map(|p| p.multiplicity).collect();
        mults.sort();
        assert_eq!(mults, vec![1, 3]);
    }

    #[test]
    fn rational_factor_linear_roots() {
        let q = Rationals;
        let half = q.parse_elem("1/2").unwrap();
        let g = Poly::linear(&q, &half)
            .pow(&q, 2)
            .mul(&q, &Poly::linear(&q, &q.from_i64(-3)));
        let fact = factor_rationals(&g);
        assert_eq!(fact.parts.len(), 2);
        assert!(fact.is_complete());
    }

    #[test]
    fn minimal_polynomial_of_nilpotent() {
        let f = fp();
        let a = Matrix::from_i64(&f, 3, 3, &[0, 1, 0, 0, 0, 1, 0, 0, 0]);
        let mp = minimal_polynomial(&f, |k| a.pow(k as u64).data().to_vec(), 9).unwrap();
        assert_eq!(mp, Poly::new(&f, vec![0, 0, 0, 1]));
    }

    #[test]
    fn gcd_and_divrem() {
        let f = fp();
        let a = Poly::linear(&f, &1).mul(&f, &Poly::linear(&f, &2));
        let b = Poly::linear(&f, &1).mul(&f, &Poly::linear(&f, &3));
        assert_eq!(a.gcd(&f, &b), Poly::linear(&f, &1));
        let (qq, r) = a.divrem(&f, &Poly::linear(&f, &2));
        assert!(r.is_zero());
        assert_eq!(qq, Poly::linear(&f, &1));
    }
}

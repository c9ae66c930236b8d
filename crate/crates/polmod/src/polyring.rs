//! Sparse polynomials over ℚ in an `ell × n` matrix of variables `x[i,j]`.
//!
//! Row `i` is one set of `n` variables; the symmetric group acts on columns
//! simultaneously in every row. Indices in the public API are 1-based.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Exact rational coefficients.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("index ({i},{j}) out of range for a {ell}x{n} variable matrix")]
    IndexOutOfRange { i: usize, j: usize, ell: usize, n: usize },
    #[error("polynomial is not homogeneous: found terms of degree {first:?} and {second:?}")]
    NonHomogeneous { first: Vec<usize>, second: Vec<usize> },
    #[error("the zero polynomial has no multidegree")]
    ZeroPolynomial,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: String, found: String },
    #[error("not a permutation of 1..={0}")]
    InvalidPermutation(usize),
    #[error("exponent overflow")]
    ExponentOverflow,
}

/// Exponent matrix of a monomial, stored dense and row-major.
///
/// The derived order compares total degree first and then the flattened
/// exponents lexicographically, which is the graded-lex order used for
/// pivots everywhere in the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    deg: u32,
    exps: SmallVec<[u8; 24]>,
}

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial { deg: 0, exps: SmallVec::from_elem(0, len) }
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        Monomial { deg: exps.iter().map(|&e| e as u32).sum(), exps: SmallVec::from_slice(exps) }
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps
    }

    pub fn total_degree(&self) -> u32 {
        self.deg
    }

    #[inline]
    pub(crate) fn bump(&mut self, idx: usize, by: i32) {
        let v = self.exps[idx] as i32 + by;
        assert!((0..=255).contains(&v), "exponent out of u8 range");
        self.exps[idx] = v as u8;
        self.deg = (self.deg as i32 + by) as u32;
    }

    /// Row degrees `(d_1, …, d_ell)` for a monomial in `n` columns.
    pub fn row_degrees(&self, n: usize) -> Vec<usize> {
        self.exps.chunks(n).map(|r| r.iter().map(|&e| e as usize).sum()).collect()
    }

    fn mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        let mut exps = self.exps.clone();
        for (a, b) in exps.iter_mut().zip(other.exps.iter()) {
            *a = a.checked_add(*b).ok_or(PolyError::ExponentOverflow)?;
        }
        Ok(Monomial { deg: self.deg + other.deg, exps })
    }

    /// Relabel columns: the exponent of `x[i,j]` moves to `x[i,σ(j)]`.
    pub fn permuted(&self, n: usize, sigma: &Permutation) -> Monomial {
        let mut exps = SmallVec::from_elem(0u8, self.exps.len());
        for (row_in, row_out) in self.exps.chunks(n).zip(exps.chunks_mut(n)) {
            for (j, &e) in row_in.iter().enumerate() {
                row_out[sigma.images[j] - 1] = e;
            }
        }
        Monomial { deg: self.deg, exps }
    }
}

/// Multidegree `(d_1, …, d_ell)`; ordered by total degree, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct MultiDegree(pub Vec<usize>);

impl MultiDegree {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `d! = d_1! ⋯ d_ell!`
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&d| factorial(d)).product()
    }

    /// Weakly decreasing, i.e. a dominant weight.
    pub fn is_partition_shaped(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }
}

impl Ord for MultiDegree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).map(BigInt::from).product()
}

/// `a (a-1) ⋯ (a-p+1)`
fn falling(a: u8, p: u8) -> BigInt {
    (0..p).map(|t| BigInt::from(a - t)).product()
}

/// A permutation of the columns `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, PolyError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(PolyError::InvalidPermutation(n));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n).collect() }
    }

    /// The transposition swapping columns `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (1..=n).collect();
        images.swap(a - 1, b - 1);
        Permutation { images }
    }

    /// Canonical representative of a cycle type: consecutive blocks
    /// `(1 2 … μ_1)(μ_1+1 …)…`.
    pub fn from_cycle_type(parts: &[usize]) -> Self {
        let n = parts.iter().sum();
        let mut images = vec![0; n];
        let mut start = 0;
        for &len in parts {
            for k in 0..len {
                images[start + k] = start + (k + 1) % len + 1;
            }
            start += len;
        }
        Permutation { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, j: usize) -> usize {
        self.images[j - 1]
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&j| self.images[j - 1]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (j, &v) in self.images.iter().enumerate() {
            images[v - 1] = j + 1;
        }
        Permutation { images }
    }

    /// Cycle lengths, sorted decreasingly.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut j = s;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j] - 1;
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(j, &v)| v == j + 1).count()
    }
}

/// A polynomial in `x[i,j]`, `1 ≤ i ≤ ell`, `1 ≤ j ≤ n`, with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    ell: usize,
    n: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(ell: usize, n: usize) -> Self {
        assert!(ell >= 1 && n >= 1, "dimensions must be positive");
        Poly { ell, n, terms: BTreeMap::new() }
    }

    pub fn constant(ell: usize, n: usize, c: Q) -> Self {
        let mut p = Poly::zero(ell, n);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ell * n), c);
        }
        p
    }

    pub fn one(ell: usize, n: usize) -> Self {
        Poly::constant(ell, n, Q::one())
    }

    /// The variable `x[i,j]`.
    ///
    /// Panics if the index is out of range; use [`Poly::try_var`] otherwise.
    pub fn var(ell: usize, n: usize, i: usize, j: usize) -> Self {
        Poly::try_var(ell, n, i, j).expect("variable index")
    }

    pub fn try_var(ell: usize, n: usize, i: usize, j: usize) -> Result<Self, PolyError> {
        check_index(ell, n, i, j)?;
        let mut m = Monomial::one(ell * n);
        m.bump((i - 1) * n + (j - 1), 1);
        Ok(Poly::from_monomial(ell, n, m, Q::one()))
    }

    pub fn from_monomial(ell: usize, n: usize, m: Monomial, c: Q) -> Self {
        let mut p = Poly::zero(ell, n);
        assert_eq!(m.exps.len(), ell * n, "monomial shape");
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Build from `(row-major exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I>(ell: usize, n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u8>, Q)>,
    {
        let mut p = Poly::zero(ell, n);
        for (e, c) in terms {
            assert_eq!(e.len(), ell * n, "monomial shape");
            p.add_term(Monomial::from_exponents(&e), c);
        }
        p
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.ell, self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&Q> {
        self.terms.get(m)
    }

    /// Greatest monomial in graded-lex order with its coefficient.
    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, other: &Poly, c: &Q) {
        self.same_dims(other);
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.ell, self.n);
        }
        Poly { ell: self.ell, n: self.n, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.ell, self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn same_dims(&self, other: &Poly) {
        assert_eq!(self.dims(), other.dims(), "polynomials live in different rings");
    }

    /// True if every term has the same multidegree (the zero polynomial counts).
    pub fn is_homogeneous(&self) -> bool {
        self.multidegree().is_ok() || self.is_zero()
    }

    /// Common multidegree of all terms.
    pub fn multidegree(&self) -> Result<MultiDegree, PolyError> {
        let mut it = self.terms.keys();
        let first = it.next().ok_or(PolyError::ZeroPolynomial)?.row_degrees(self.n);
        for m in it {
            let d = m.row_degrees(self.n);
            if d != first {
                return Err(PolyError::NonHomogeneous { first, second: d });
            }
        }
        Ok(MultiDegree(first))
    }

    /// Highest total degree of a term; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.deg).max().unwrap_or(0)
    }

    /// Degree in row `i` (1-based).
    pub fn row_degree(&self, i: usize) -> usize {
        self.terms.keys().map(|m| m.row_degrees(self.n)[i - 1]).max().unwrap_or(0)
    }

    /// `∂^p f / ∂x[i,j]^p`.
    pub fn derive(&self, i: usize, j: usize, p: u32) -> Result<Poly, PolyError> {
        check_index(self.ell, self.n, i, j)?;
        Ok(self.derive0((i - 1) * self.n + (j - 1), p))
    }

    /// Derivative with respect to the flat variable index `idx`.
    pub(crate) fn derive0(&self, idx: usize, p: u32) -> Poly {
        let mut out = Poly::zero(self.ell, self.n);
        if p == 0 {
            return self.clone();
        }
        for (m, c) in &self.terms {
            let a = m.exps[idx];
            if (a as u32) < p {
                continue;
            }
            let mut m2 = m.clone();
            m2.bump(idx, -(p as i32));
            out.add_term(m2, c * Q::from_integer(falling(a, p as u8)));
        }
        out
    }

    /// `E_{i,k}^{(p)} f = Σ_j x[i,j] ∂^p f / ∂x[k,j]^p`.
    pub fn polarize(&self, i: usize, k: usize, p: u32) -> Result<Poly, PolyError> {
        check_index(self.ell, self.n, i, 1)?;
        check_index(self.ell, self.n, k, 1)?;
        Ok(self.polarize0(i - 1, k - 1, p))
    }

    pub(crate) fn polarize0(&self, i: usize, k: usize, p: u32) -> Poly {
        let n = self.n;
        let mut out = Poly::zero(self.ell, n);
        for (m, c) in &self.terms {
            for j in 0..n {
                let src = k * n + j;
                let a = m.exps[src];
                if (a as u32) < p {
                    continue;
                }
                let mut m2 = m.clone();
                m2.bump(src, -(p as i32));
                m2.bump(i * n + j, 1);
                out.add_term(m2, c * Q::from_integer(falling(a, p as u8)));
            }
        }
        out
    }

    /// Replace every `x[i,j]` by `x[i,σ(j)]`.
    pub fn permute(&self, sigma: &Permutation) -> Result<Poly, PolyError> {
        if sigma.n() != self.n {
            return Err(PolyError::DimensionMismatch(format!(
                "permutation of {} points acting on {} columns",
                sigma.n(),
                self.n
            )));
        }
        Ok(Poly {
            ell: self.ell,
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.permuted(self.n, sigma), c.clone())).collect(),
        })
    }

    /// Substitute `x[i,j] ← Σ_k g[i][k] x[k,j]` (the linear action on rows).
    pub fn substitute_rows(&self, g: &[Vec<Q>]) -> Poly {
        assert_eq!(g.len(), self.ell);
        let (ell, n) = self.dims();
        let images: Vec<Poly> = (0..ell * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let mut p = Poly::zero(ell, n);
                for (k, gik) in g[i].iter().enumerate() {
                    p.add_scaled(&Poly::var(ell, n, k + 1, j + 1), gik);
                }
                p
            })
            .collect();
        let mut out = Poly::zero(ell, n);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(ell, n, c.clone());
            for (idx, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    t = &t * &images[idx].pow(e as u32);
                }
            }
            out.add_scaled(&t, &Q::one());
        }
        out
    }

    /// Reinterpret in a ring with at least as many rows, keeping the columns.
    pub fn with_rows(&self, ell: usize) -> Poly {
        assert!(ell >= self.ell || self.terms.keys().all(|m| m.row_degrees(self.n)[ell..].iter().all(|&d| d == 0)));
        let n = self.n;
        let mut out = Poly::zero(ell, n);
        for (m, c) in &self.terms {
            let mut e = vec![0u8; ell * n];
            let keep = ell.min(self.ell) * n;
            e[..keep].copy_from_slice(&m.exps[..keep]);
            out.terms.insert(Monomial::from_exponents(&e), c.clone());
        }
        out
    }

    /// Divide through by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }
}

fn check_index(ell: usize, n: usize, i: usize, j: usize) -> Result<(), PolyError> {
    if i == 0 || i > ell || j == 0 || j > n {
        Err(PolyError::IndexOutOfRange { i, j, ell, n })
    } else {
        Ok(())
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.same_dims(rhs);
        let mut out = Poly::zero(self.ell, self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb).expect("exponent overflow in product");
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

/// `E^d`: polarize a row-1 polynomial of degree `|d|` into multidegree `d`,
/// normalized by `d_1!/|d|!`.
pub fn polarization_up(f: &Poly, d: &MultiDegree) -> Result<Poly, PolyError> {
    check_row_one(f, d)?;
    let mut g = f.clone();
    for (i, &di) in d.0.iter().enumerate().skip(1) {
        for _ in 0..di {
            g = g.polarize0(i, 0, 1);
        }
    }
    let c = Q::new(factorial(d.0[0]), factorial(d.total()));
    Ok(g.scale(&c))
}

/// `E_d`: collapse a polynomial of multidegree `d` back into row 1,
/// normalized by `1/(d_2! ⋯ d_ell!)`.
pub fn restitution(f: &Poly, d: &MultiDegree) -> Result<Poly, PolyError> {
    if d.len() != f.ell() {
        return Err(PolyError::DimensionMismatch(format!("multidegree {} for {} rows", d, f.ell())));
    }
    if !f.is_zero() {
        let got = f.multidegree()?;
        if &got != d {
            return Err(PolyError::DegreeMismatch { expected: d.to_string(), found: got.to_string() });
        }
    }
    let mut g = f.clone();
    let mut denom = BigInt::one();
    for (i, &di) in d.0.iter().enumerate().skip(1).rev() {
        for _ in 0..di {
            g = g.polarize0(0, i, 1);
        }
        denom *= factorial(di);
    }
    Ok(g.scale(&Q::new(BigInt::one(), denom)))
}

fn check_row_one(f: &Poly, d: &MultiDegree) -> Result<(), PolyError> {
    if d.len() != f.ell() {
        return Err(PolyError::DimensionMismatch(format!("multidegree {} for {} rows", d, f.ell())));
    }
    if f.is_zero() {
        return Ok(());
    }
    let got = f.multidegree()?;
    let mut want = vec![0; f.ell()];
    want[0] = d.total();
    if got.0 != want {
        return Err(PolyError::DegreeMismatch { expected: MultiDegree(want).to_string(), found: got.to_string() });
    }
    Ok(())
}

/// Render a rational as `p` or `p/q`.
pub fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps.as_slice())
    }
}

impl Poly {
    fn fmt_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (idx, &e) in m.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let (i, j) = (idx / self.n + 1, idx % self.n + 1);
            if e == 1 {
                parts.push(format!("x[{i},{j}]"));
            } else {
                parts.push(format!("x[{i},{j}]^{e}"));
            }
        }
        parts.join("*")
    }
}

/// Canonical text, leading term first: `3*x[1,2]^2*x[2,1] - 1/2*x[1,1]`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            let mono = self.fmt_monomial(m);
            let body = if mono.is_empty() {
                fmt_q(&a)
            } else if a.is_one() {
                mono
            } else {
                format!("{}*{}", fmt_q(&a), mono)
            };
            match (k, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

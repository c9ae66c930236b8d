//! Partitions, the classical symmetric-function bases realized as polynomials
//! in one row of variables, symmetric-group characters, and conversions of
//! symmetric polynomials into the Schur and complete-homogeneous bases.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::polyring::{factorial, Monomial, MultiDegree, Poly, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymError {
    #[error("parts must be positive and weakly decreasing: {0:?}")]
    InvalidPartition(Vec<usize>),
    #[error("partition {partition} has more than {n} parts")]
    TooManyParts { partition: Partition, n: usize },
    #[error("size mismatch: |lambda| = {0}, |mu| = {1}")]
    SizeMismatch(usize, usize),
    #[error("polynomial is not symmetric (offending monomial {0})")]
    NotSymmetric(String),
    #[error("expected a polynomial in a single row of variables")]
    NotSingleRow,
    #[error("the zero multidegree is not allowed here")]
    ZeroDegree,
    #[error("row {row} out of range for {ell} rows")]
    RowOutOfRange { row: usize, ell: usize },
    #[error("expected a series in the {expected:?} basis, found {found:?}")]
    WrongBasis { expected: Basis, found: Basis },
}

/// A weakly decreasing sequence of positive integers. The empty partition
/// stands for the constant 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize, Default)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self, SymError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(SymError::InvalidPartition(parts));
        }
        Ok(Partition(parts))
    }

    /// Sort decreasingly and drop zeros.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let w = self.0.first().copied().unwrap_or(0);
        Partition((1..=w).map(|c| self.0.iter().filter(|&&p| p >= c).count()).collect())
    }

    /// Multiset of parts as `(part, multiplicity)`.
    fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.0 {
            match out.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    fn hooks(&self) -> Vec<(usize, i64)> {
        // (hook length, content) per cell
        let conj = self.conjugate();
        let mut out = Vec::with_capacity(self.size());
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row {
                let arm = row - j - 1;
                let leg = conj.0[j] - i - 1;
                out.push((arm + leg + 1, j as i64 - i as i64));
            }
        }
        out
    }

    /// `f^λ`, the number of standard tableaux, by the hook length formula.
    pub fn num_standard_tableaux(&self) -> BigInt {
        let h: BigInt = self.hooks().iter().map(|&(h, _)| BigInt::from(h)).product();
        factorial(self.size()) / h
    }

    /// `s_λ(1^k)`, the number of semistandard tableaux with entries in `1..=k`,
    /// by the hook-content formula.
    pub fn schur_dimension(&self, k: usize) -> BigInt {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (h, c) in self.hooks() {
            let v = k as i64 + c;
            if v <= 0 {
                return BigInt::zero();
            }
            num *= BigInt::from(v);
            den *= BigInt::from(h);
        }
        num / den
    }

    /// Size of the conjugacy class of `S_n` with this cycle type.
    pub fn class_size(&self) -> BigInt {
        let z: BigInt =
            self.multiplicities().iter().map(|&(i, c)| BigInt::from(i).pow(c as u32) * factorial(c)).product();
        factorial(self.size()) / z
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Presentation order: by size, then lexicographically decreasing.
pub fn display_cmp(a: &Partition, b: &Partition) -> std::cmp::Ordering {
    a.size().cmp(&b.size()).then_with(|| b.cmp(a))
}

/// All partitions of `n` in lexicographically decreasing order.
pub fn partitions(n: usize) -> Vec<Partition> {
    partitions_bounded(n, usize::MAX)
}

/// Partitions of `n` with at most `max_len` parts, lexicographically decreasing.
pub fn partitions_bounded(n: usize, max_len: usize) -> Vec<Partition> {
    fn rec(rest: usize, max_part: usize, max_len: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if cur.len() == max_len {
            return;
        }
        for p in (1..=rest.min(max_part)).rev() {
            cur.push(p);
            rec(rest - p, p, max_len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, max_len, &mut Vec::new(), &mut out);
    out
}

/// A cycle type of `S_n` together with its class size.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycleType {
    pub partition: Partition,
    pub class_size: BigInt,
}

impl CycleType {
    pub fn new(partition: Partition) -> Self {
        let class_size = partition.class_size();
        CycleType { partition, class_size }
    }

    /// Every conjugacy class of `S_n`.
    pub fn all(n: usize) -> Vec<CycleType> {
        partitions(n).into_iter().map(CycleType::new).collect()
    }
}

type MemoKey = (Vec<usize>, Vec<usize>);
static MN_MEMO: LazyLock<RwLock<HashMap<MemoKey, i64>>> = LazyLock::new(Default::default);
static KOSTKA_MEMO: LazyLock<RwLock<HashMap<MemoKey, u64>>> = LazyLock::new(Default::default);
static SCHUR_MEMO: LazyLock<RwLock<HashMap<(Partition, usize), Poly>>> = LazyLock::new(Default::default);

/// Irreducible character `χ^λ(μ)` by the Murnaghan–Nakayama rule on beta-sets.
pub fn mn_character(lambda: &Partition, mu: &CycleType) -> Result<i64, SymError> {
    if lambda.size() != mu.partition.size() {
        return Err(SymError::SizeMismatch(lambda.size(), mu.partition.size()));
    }
    Ok(mn(&lambda.0, &mu.partition.0))
}

fn mn(lambda: &[usize], mu: &[usize]) -> i64 {
    let Some((&r, rest)) = mu.split_first() else {
        return if lambda.is_empty() { 1 } else { 0 };
    };
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(&v) = MN_MEMO.read().unwrap().get(&key) {
        return v;
    }
    let len = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p + len - 1 - i).collect();
    let mut total = 0i64;
    for (i, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let between = beta.iter().filter(|&&c| c > b - r && c < b).count();
        let mut nb = beta.clone();
        nb[i] = b - r;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let shape: Vec<usize> = nb.iter().enumerate().map(|(k, &c)| c - (len - 1 - k)).filter(|&p| p > 0).collect();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        total += sign * mn(&shape, rest);
    }
    MN_MEMO.write().unwrap().insert(key, total);
    total
}

/// Kostka number `K_{λμ}`: semistandard tableaux of shape `λ` and content `μ`
/// (any ordering of `μ` gives the same count).
pub fn kostka(lambda: &Partition, mu: &[usize]) -> u64 {
    if lambda.size() != mu.iter().sum::<usize>() {
        return 0;
    }
    kostka_rec(&lambda.0, mu)
}

fn kostka_rec(lambda: &[usize], mu: &[usize]) -> u64 {
    let Some((&last, init)) = mu.split_last() else {
        return u64::from(lambda.is_empty());
    };
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(&v) = KOSTKA_MEMO.read().unwrap().get(&key) {
        return v;
    }
    // remove a horizontal strip of size `last`
    fn strips(lambda: &[usize], i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == lambda.len() {
            if left == 0 {
                out.push(cur.iter().copied().filter(|&p| p > 0).collect());
            }
            return;
        }
        let lo = lambda.get(i + 1).copied().unwrap_or(0);
        for v in (lo..=lambda[i]).rev() {
            let take = lambda[i] - v;
            if take > left {
                break;
            }
            cur.push(v);
            strips(lambda, i + 1, left - take, cur, out);
            cur.pop();
        }
    }
    let mut shapes = Vec::new();
    strips(lambda, 0, last, &mut Vec::new(), &mut shapes);
    let total = shapes.iter().map(|nu| kostka_rec(nu, init)).sum();
    KOSTKA_MEMO.write().unwrap().insert(key, total);
    total
}

/// The classical bases of symmetric functions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Elementary,
    Homogeneous,
    PowerSum,
    Schur,
}

impl Basis {
    pub fn letter(self) -> char {
        match self {
            Basis::Monomial => 'm',
            Basis::Elementary => 'e',
            Basis::Homogeneous => 'h',
            Basis::PowerSum => 'p',
            Basis::Schur => 's',
        }
    }

    pub fn from_letter(c: char) -> Option<Basis> {
        Some(match c {
            'm' => Basis::Monomial,
            'e' => Basis::Elementary,
            'h' => Basis::Homogeneous,
            'p' => Basis::PowerSum,
            's' => Basis::Schur,
            _ => return None,
        })
    }
}

fn row_var(ell: usize, n: usize, row: usize, j: usize) -> Poly {
    Poly::var(ell, n, row, j)
}

/// `m_λ` in `x[row,1..n]`: the sum over distinct rearrangements of `λ` padded to length `n`.
pub fn monomial_symmetric(lambda: &Partition, row: usize, ell: usize, n: usize) -> Result<Poly, SymError> {
    if lambda.len() > n {
        return Err(SymError::TooManyParts { partition: lambda.clone(), n });
    }
    check_row(row, ell)?;
    let mut padded: Vec<u8> = lambda.0.iter().map(|&p| p as u8).collect();
    padded.resize(n, 0);
    padded.sort_unstable();
    let mut out = Poly::zero(ell, n);
    loop {
        let mut e = vec![0u8; ell * n];
        e[(row - 1) * n..row * n].copy_from_slice(&padded);
        out.add_term(Monomial::from_exponents(&e), Q::one());
        if !next_permutation(&mut padded) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn check_row(row: usize, ell: usize) -> Result<(), SymError> {
    if row == 0 || row > ell {
        Err(SymError::RowOutOfRange { row, ell })
    } else {
        Ok(())
    }
}

fn single_part(basis: Basis, k: usize, row: usize, ell: usize, n: usize) -> Poly {
    match basis {
        Basis::PowerSum => {
            let mut p = Poly::zero(ell, n);
            for j in 1..=n {
                p.add_scaled(&row_var(ell, n, row, j).pow(k as u32), &Q::one());
            }
            p
        }
        Basis::Elementary => {
            if k > n {
                Poly::zero(ell, n)
            } else {
                monomial_symmetric(&Partition(vec![1; k]), row, ell, n).unwrap()
            }
        }
        Basis::Homogeneous => {
            let mut p = Poly::zero(ell, n);
            for mu in partitions_bounded(k, n) {
                p.add_scaled(&monomial_symmetric(&mu, row, ell, n).unwrap(), &Q::one());
            }
            p
        }
        Basis::Monomial | Basis::Schur => unreachable!("not multiplicative"),
    }
}

/// The basis element indexed by `λ` in the variables `x[row,1..n]` of an `ell`-row ring.
pub fn expand_basis(basis: Basis, lambda: &Partition, row: usize, ell: usize, n: usize) -> Result<Poly, SymError> {
    check_row(row, ell)?;
    match basis {
        Basis::Monomial => monomial_symmetric(lambda, row, ell, n),
        Basis::Schur => {
            if lambda.len() > n {
                return Err(SymError::TooManyParts { partition: lambda.clone(), n });
            }
            let mut p = Poly::zero(ell, n);
            for mu in partitions_bounded(lambda.size(), n) {
                let k = kostka(lambda, &mu.0);
                if k > 0 {
                    p.add_scaled(&monomial_symmetric(&mu, row, ell, n)?, &Q::from_integer(k.into()));
                }
            }
            Ok(p)
        }
        _ => {
            let mut p = Poly::one(ell, n);
            for &k in &lambda.0 {
                p = &p * &single_part(basis, k, row, ell, n);
            }
            Ok(p)
        }
    }
}

/// Schur polynomial `s_λ(q_1, …, q_k)` as a one-row polynomial, cached.
pub fn schur_polynomial(lambda: &Partition, k: usize) -> Poly {
    let key = (lambda.clone(), k);
    if let Some(p) = SCHUR_MEMO.read().unwrap().get(&key) {
        return p.clone();
    }
    let p = if lambda.len() > k { Poly::zero(1, k) } else { expand_basis(Basis::Schur, lambda, 1, 1, k).unwrap() };
    SCHUR_MEMO.write().unwrap().insert(key, p.clone());
    p
}

/// Diagonal power sum `p_d(X) = Σ_j Π_i x[i,j]^{d_i}`.
pub fn diag_power_sum(d: &MultiDegree, n: usize) -> Result<Poly, SymError> {
    if d.total() == 0 {
        return Err(SymError::ZeroDegree);
    }
    let ell = d.len();
    let mut out = Poly::zero(ell, n);
    for j in 0..n {
        let mut e = vec![0u8; ell * n];
        for (i, &di) in d.0.iter().enumerate() {
            e[i * n + j] = di as u8;
        }
        out.add_term(Monomial::from_exponents(&e), Q::one());
    }
    Ok(out)
}

/// Multisymmetric elementary polynomial: the coefficient of `t^d` in
/// `Π_j (1 + Σ_i t_i x[i,j])`. Zero when `|d| > n`.
pub fn multi_elementary(d: &MultiDegree, n: usize) -> Poly {
    let ell = d.len();
    let mut out = Poly::zero(ell, n);
    fn rec(j: usize, n: usize, ell: usize, left: &mut Vec<usize>, e: &mut Vec<u8>, out: &mut Poly) {
        let remaining: usize = left.iter().sum();
        if remaining == 0 {
            out.add_term(Monomial::from_exponents(e), Q::one());
            return;
        }
        if n - j < remaining {
            return;
        }
        rec(j + 1, n, ell, left, e, out);
        for i in 0..ell {
            if left[i] > 0 {
                left[i] -= 1;
                e[i * n + j] = 1;
                rec(j + 1, n, ell, left, e, out);
                e[i * n + j] = 0;
                left[i] += 1;
            }
        }
    }
    rec(0, n, ell, &mut d.0.clone(), &mut vec![0u8; ell * n], &mut out);
    out
}

/// A finite linear combination of basis elements with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymSeries {
    pub basis: Basis,
    pub coeffs: BTreeMap<Partition, Q>,
}

impl SymSeries {
    pub fn new(basis: Basis) -> Self {
        SymSeries { basis, coeffs: BTreeMap::new() }
    }

    pub fn add(&mut self, lambda: Partition, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(lambda.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&lambda);
        }
    }

    pub fn get(&self, lambda: &Partition) -> Q {
        self.coeffs.get(lambda).cloned().unwrap_or_else(Q::zero)
    }

    /// Terms in presentation order.
    pub fn sorted_terms(&self) -> Vec<(&Partition, &Q)> {
        let mut v: Vec<_> = self.coeffs.iter().collect();
        v.sort_by(|a, b| display_cmp(a.0, b.0));
        v
    }

    /// Drop terms indexed by partitions with more than `k` parts.
    pub fn truncate_length(&self, k: usize) -> SymSeries {
        SymSeries {
            basis: self.basis,
            coeffs: self.coeffs.iter().filter(|(p, _)| p.len() <= k).map(|(p, c)| (p.clone(), c.clone())).collect(),
        }
    }

    /// True if every coefficient is a nonnegative integer.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer() && !c.is_negative())
    }
}

impl fmt::Display for SymSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let letter = self.basis.letter();
        for (k, (p, c)) in self.sorted_terms().into_iter().enumerate() {
            let a = c.abs();
            let atom = if p.is_empty() { String::new() } else { format!("{letter}{p}") };
            let body = match (atom.is_empty(), a.is_one()) {
                (true, _) => crate::polyring::fmt_q(&a),
                (false, true) => atom,
                (false, false) => format!("{} {}", crate::polyring::fmt_q(&a), atom),
            };
            match (k, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Schur expansion of a symmetric polynomial in a single row of `k` variables,
/// by repeatedly subtracting the Schur polynomial of the leading monomial.
pub fn to_schur(f: &Poly) -> Result<SymSeries, SymError> {
    if f.ell() != 1 {
        return Err(SymError::NotSingleRow);
    }
    let k = f.n();
    let mut rest = f.clone();
    let mut out = SymSeries::new(Basis::Schur);
    while let Some((m, c)) = rest.leading() {
        let e = m.exponents();
        if e.windows(2).any(|w| w[0] < w[1]) {
            return Err(SymError::NotSymmetric(rest.to_string()));
        }
        let lambda = Partition::from_unsorted(e.iter().map(|&x| x as usize).collect());
        let c = c.clone();
        rest.add_scaled(&schur_polynomial(&lambda, k), &-c.clone());
        out.add(lambda, c);
    }
    Ok(out)
}

/// Coordinates of a symmetric polynomial in one row on the monomial basis.
pub fn to_monomial_basis(f: &Poly, row: usize) -> Result<SymSeries, SymError> {
    let (ell, n) = f.dims();
    check_row(row, ell)?;
    let mut out = SymSeries::new(Basis::Monomial);
    for (m, c) in f.terms() {
        let e = m.exponents();
        if e.iter().enumerate().any(|(idx, &x)| x > 0 && idx / n != row - 1) {
            return Err(SymError::NotSingleRow);
        }
        let r = &e[(row - 1) * n..row * n];
        if r.windows(2).all(|w| w[0] >= w[1]) {
            out.add(Partition::from_unsorted(r.iter().map(|&x| x as usize).collect()), c.clone());
        }
    }
    let mut check = Poly::zero(ell, n);
    for (p, c) in &out.coeffs {
        check.add_scaled(&monomial_symmetric(p, row, ell, n)?, c);
    }
    if &check != f {
        return Err(SymError::NotSymmetric(f.to_string()));
    }
    Ok(out)
}

/// Jacobi–Trudi: `s_λ = det(h_{λ_i - i + j})`, expanded into products `h_μ`.
pub fn jacobi_trudi(lambda: &Partition) -> BTreeMap<Partition, BigInt> {
    let l = lambda.len();
    let mut out: BTreeMap<Partition, BigInt> = BTreeMap::new();
    let mut perm: Vec<usize> = (0..l).collect();
    permutations_with_sign(&mut perm, 0, 1, &mut |p, sign| {
        let mut parts = Vec::with_capacity(l);
        for (i, &j) in p.iter().enumerate() {
            let idx = lambda.0[i] as i64 - i as i64 + j as i64;
            if idx < 0 {
                return;
            }
            if idx > 0 {
                parts.push(idx as usize);
            }
        }
        let e = out.entry(Partition::from_unsorted(parts)).or_insert_with(BigInt::zero);
        *e += sign;
    });
    out.retain(|_, v| !v.is_zero());
    out
}

fn permutations_with_sign(v: &mut Vec<usize>, k: usize, sign: i64, f: &mut dyn FnMut(&[usize], i64)) {
    if k == v.len() {
        f(v, sign);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations_with_sign(v, k + 1, if i == k { sign } else { -sign }, f);
        v.swap(k, i);
    }
}

/// Change of basis from Schur functions to complete homogeneous products.
pub fn schur_to_h(series: &SymSeries) -> Result<SymSeries, SymError> {
    if series.basis != Basis::Schur {
        return Err(SymError::WrongBasis { expected: Basis::Schur, found: series.basis });
    }
    let mut out = SymSeries::new(Basis::Homogeneous);
    for (lambda, c) in &series.coeffs {
        for (mu, k) in jacobi_trudi(lambda) {
            out.add(mu, c * Q::from_integer(k));
        }
    }
    Ok(out)
}

/// Inverse of [`schur_to_h`]: `h_μ = Σ_λ K_{λμ} s_λ`.
pub fn h_to_schur(series: &SymSeries) -> Result<SymSeries, SymError> {
    if series.basis != Basis::Homogeneous {
        return Err(SymError::WrongBasis { expected: Basis::Homogeneous, found: series.basis });
    }
    let mut out = SymSeries::new(Basis::Schur);
    for (mu, c) in &series.coeffs {
        for lambda in partitions(mu.size()) {
            let k = kostka(&lambda, &mu.0);
            if k > 0 {
                out.add(lambda, c * Q::from_integer(k.into()));
            }
        }
    }
    Ok(out)
}

/// Convert a rational known to be integral.
pub(crate) fn q_to_i64(c: &Q) -> Option<i64> {
    if c.is_integer() {
        c.numer().to_i64()
    } else {
        None
    }
}

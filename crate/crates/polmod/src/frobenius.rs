//! Graded characters, isotypic multiplicities, Hilbert series and the graded
//! Frobenius characteristic `Σ b_{λμ} s_μ(q) s_λ(w)` of a polarization module,
//! together with closed-form series used as independent oracles.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::closure::{trace, GradedSpan};
use crate::exceptions::ClassTag;
use crate::polyring::{fmt_q, Monomial, MultiDegree, Permutation, Poly, Q};
use crate::symfunc::{
    display_cmp, jacobi_trudi, mn_character, partitions, q_to_i64, schur_to_h, to_schur, Basis, CycleType, Partition,
    SymError, SymSeries,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrobeniusError {
    #[error("character of {sigma:?} on component {degree} is not an integer: {value}")]
    NonIntegralCharacter { degree: String, sigma: Vec<usize>, value: String },
    #[error("multiplicity of {lambda} in component {degree} is {value}, not a natural number")]
    BadMultiplicity { degree: String, lambda: Partition, value: String },
    #[error("generating function for {lambda} is not symmetric in q: {source}")]
    NotSymmetric { lambda: Partition, source: SymError },
    #[error("negative or fractional coefficient {value} at s{mu} s{lambda}")]
    NegativeCoefficient { mu: Partition, lambda: Partition, value: String },
    #[error("oracle parameters out of range: {0}")]
    OutOfRange(String),
    #[error("series syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// Trace of `σ` on the component `d`; zero if the component is empty.
pub fn component_character(module: &GradedSpan, d: &MultiDegree, sigma: &Permutation) -> Q {
    match module.component(d) {
        Some(c) => trace(c, sigma, module.dims().1),
        None => Q::zero(),
    }
}

/// Multiplicities of the irreducibles `S^λ` in the component `d`.
pub fn component_isotype(module: &GradedSpan, d: &MultiDegree) -> Result<BTreeMap<Partition, u64>, FrobeniusError> {
    let n = module.dims().1;
    let classes = CycleType::all(n);
    let mut chars = Vec::with_capacity(classes.len());
    for ct in &classes {
        let sigma = Permutation::from_cycle_type(ct.partition.parts());
        let v = component_character(module, d, &sigma);
        if !v.is_integer() {
            return Err(FrobeniusError::NonIntegralCharacter {
                degree: d.to_string(),
                sigma: sigma.images().to_vec(),
                value: fmt_q(&v),
            });
        }
        chars.push(v.to_integer());
    }
    let order = crate::polyring::factorial(n);
    let mut out = BTreeMap::new();
    for lambda in partitions(n) {
        let mut s = BigInt::zero();
        for (ct, chi) in classes.iter().zip(&chars) {
            s += &ct.class_size * chi * BigInt::from(mn_character(&lambda, ct).expect("sizes agree"));
        }
        let m = Q::new(s, order.clone());
        if !m.is_integer() || m.is_negative() {
            return Err(FrobeniusError::BadMultiplicity { degree: d.to_string(), lambda, value: fmt_q(&m) });
        }
        let m = m.to_integer().to_u64().expect("multiplicity fits in u64");
        if m > 0 {
            out.insert(lambda, m);
        }
    }
    Ok(out)
}

/// `Σ b_{λμ} s_μ(q) s_λ(w)`, keyed by `(μ, λ)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FrobeniusSeries {
    pub n: usize,
    pub ell: usize,
    pub coeffs: BTreeMap<(Partition, Partition), u64>,
}

impl FrobeniusSeries {
    pub fn new(n: usize, ell: usize) -> Self {
        FrobeniusSeries { n, ell, coeffs: BTreeMap::new() }
    }

    pub fn add(&mut self, mu: Partition, lambda: Partition, c: u64) {
        if c > 0 {
            *self.coeffs.entry((mu, lambda)).or_insert(0) += c;
        }
    }

    pub fn get(&self, mu: &Partition, lambda: &Partition) -> u64 {
        self.coeffs.get(&(mu.clone(), lambda.clone())).copied().unwrap_or(0)
    }

    /// Largest `|μ|` present.
    pub fn max_degree(&self) -> usize {
        self.coeffs.keys().map(|(mu, _)| mu.size()).max().unwrap_or(0)
    }

    /// Keep only the `μ` visible with `k` variables `q`.
    pub fn truncate(&self, k: usize) -> FrobeniusSeries {
        FrobeniusSeries {
            n: self.n,
            ell: k.min(self.ell),
            coeffs: self.coeffs.iter().filter(|((mu, _), _)| mu.len() <= k).map(|(a, &b)| (a.clone(), b)).collect(),
        }
    }

    /// Coefficient of `s_λ(w)` as a series in `q`.
    pub fn q_part(&self, lambda: &Partition) -> SymSeries {
        let mut s = SymSeries::new(Basis::Schur);
        for ((mu, l), &c) in &self.coeffs {
            if l == lambda {
                s.add(mu.clone(), Q::from_integer(c.into()));
            }
        }
        s
    }

    /// The `λ` present, in lexicographically decreasing order.
    pub fn lambdas(&self) -> Vec<Partition> {
        let mut v: Vec<Partition> = self.coeffs.keys().map(|(_, l)| l.clone()).collect();
        v.sort_by(|a, b| b.cmp(a));
        v.dedup();
        v
    }

    /// Hilbert series: replace each `s_λ(w)` by `f^λ`.
    pub fn hilbert(&self) -> SymSeries {
        let mut s = SymSeries::new(Basis::Schur);
        for ((mu, lambda), &c) in &self.coeffs {
            s.add(mu.clone(), Q::from_integer(lambda.num_standard_tableaux() * BigInt::from(c)));
        }
        s
    }

    /// `Σ b_{λμ} f^λ s_μ(1^ℓ)`: the dimension of the module.
    pub fn total_dimension(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|((mu, lambda), &c)| BigInt::from(c) * lambda.num_standard_tableaux() * mu.schur_dimension(self.ell))
            .sum()
    }

    /// Both tensor factors rewritten in complete homogeneous functions.
    pub fn to_h_basis(&self) -> BTreeMap<(Partition, Partition), BigInt> {
        let mut out: BTreeMap<(Partition, Partition), BigInt> = BTreeMap::new();
        for ((mu, lambda), &c) in &self.coeffs {
            let jq = jacobi_trudi(mu);
            let jw = jacobi_trudi(lambda);
            for (a, ca) in &jq {
                for (b, cb) in &jw {
                    *out.entry((a.clone(), b.clone())).or_insert_with(BigInt::zero) += ca * cb * BigInt::from(c);
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Text in the style `(1 + s[1] + 2 s[2]) s[n] + s[1] s[n-1,1]`.
    pub fn pretty(&self) -> String {
        let mut groups: BTreeMap<Partition, Vec<(Partition, BigInt)>> = BTreeMap::new();
        for ((mu, lambda), &c) in &self.coeffs {
            groups.entry(lambda.clone()).or_default().push((mu.clone(), BigInt::from(c)));
        }
        pretty_grouped('s', self.n, groups)
    }

    /// The same series after [`FrobeniusSeries::to_h_basis`], e.g.
    /// `(1 + h[2]) h[n] + h[1] h[n-1,1]`.
    pub fn pretty_h(&self) -> String {
        let mut groups: BTreeMap<Partition, Vec<(Partition, BigInt)>> = BTreeMap::new();
        for ((mu, lambda), c) in self.to_h_basis() {
            groups.entry(lambda).or_default().push((mu, c));
        }
        pretty_grouped('h', self.n, groups)
    }

    pub fn to_json_terms(&self) -> Value {
        let mut terms: Vec<(&Partition, &Partition, u64)> = self.coeffs.iter().map(|((m, l), &c)| (m, l, c)).collect();
        terms.sort_by(|a, b| b.1.cmp(a.1).then_with(|| display_cmp(a.0, b.0)));
        Value::Array(
            terms
                .into_iter()
                .map(|(mu, lambda, c)| json!({"mu": mu.parts(), "lambda": lambda.parts(), "coeff": c}))
                .collect(),
        )
    }

    /// Parse the text produced by [`FrobeniusSeries::pretty`] for a concrete `n`.
    /// Terms whose `w`-shape is not a partition for this `n` vanish.
    pub fn parse(text: &str, n: usize, ell: usize) -> Result<FrobeniusSeries, FrobeniusError> {
        SeriesParser { s: text.as_bytes(), pos: 0, n }.parse(ell)
    }
}

/// `s[n]`, `s[n-1,1]`, … for a partition of `n`.
pub fn shape_text(letter: char, lambda: &Partition, n: usize) -> String {
    let tail = &lambda.parts()[1.min(lambda.len())..];
    let k: usize = tail.iter().sum();
    let head = if k == 0 { "n".to_string() } else { format!("n-{k}") };
    let mut s = format!("{letter}[{head}");
    for p in tail {
        let _ = write!(s, ",{p}");
    }
    let _ = n;
    s.push(']');
    s
}

fn q_text(letter: char, terms: &[(Partition, BigInt)]) -> String {
    let mut out = String::new();
    for (k, (mu, c)) in terms.iter().enumerate() {
        let a = c.abs();
        let atom = if mu.is_empty() { String::new() } else { format!("{letter}{mu}") };
        let body = match (atom.is_empty(), a == BigInt::from(1)) {
            (true, _) => a.to_string(),
            (false, true) => atom,
            (false, false) => format!("{a} {atom}"),
        };
        match (k, c.is_negative()) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body)
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body)
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body)
            }
        }
    }
    out
}

fn pretty_grouped(letter: char, n: usize, groups: BTreeMap<Partition, Vec<(Partition, BigInt)>>) -> String {
    if groups.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (lambda, mut terms) in groups.into_iter().rev() {
        terms.sort_by(|a, b| display_cmp(&a.0, &b.0));
        let w = shape_text(letter, &lambda, n);
        let single = terms.len() == 1 && !terms[0].1.is_negative();
        let piece = if single && terms[0].0.is_empty() && terms[0].1 == BigInt::from(1) {
            w
        } else if single {
            format!("{} {w}", q_text(letter, &terms))
        } else {
            format!("({}) {w}", q_text(letter, &terms))
        };
        parts.push(piece);
    }
    parts.join(" + ")
}

struct SeriesParser<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
}

impl SeriesParser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, FrobeniusError> {
        Err(FrobeniusError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn int(&mut self) -> Option<u64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    /// `s[...]` contents, or `None` if the next token is not an atom.
    fn atom(&mut self) -> Result<Option<String>, FrobeniusError> {
        if self.peek() != Some(b's') {
            return Ok(None);
        }
        self.pos += 1;
        if self.s.get(self.pos) != Some(&b'[') {
            return self.err("expected '[' after 's'");
        }
        let start = self.pos + 1;
        let Some(len) = self.s[start..].iter().position(|&c| c == b']') else {
            return self.err("unterminated '['");
        };
        self.pos = start + len + 1;
        Ok(Some(String::from_utf8_lossy(&self.s[start..start + len]).replace(' ', "")))
    }

    fn q_partition(&self, body: &str) -> Result<Partition, FrobeniusError> {
        if body.is_empty() {
            return Ok(Partition::empty());
        }
        let parts: Result<Vec<usize>, _> = body.split(',').map(str::parse).collect();
        let parts = parts.or_else(|_| self.err(&format!("bad partition '{body}'")))?;
        Partition::new(parts).or_else(|_| self.err(&format!("not a partition '{body}'")))
    }

    /// `n`, `n-k,a,b` or a literal partition; `None` if it is not a
    /// partition for this `n`.
    fn w_partition(&self, body: &str) -> Result<Option<Partition>, FrobeniusError> {
        let mut it = body.split(',');
        let head = it.next().unwrap_or("");
        let tail: Result<Vec<usize>, _> = it.map(str::parse).collect();
        let tail = tail.or_else(|_| self.err(&format!("bad shape '{body}'")))?;
        let first = if head == "n" {
            self.n as i64
        } else if let Some(k) = head.strip_prefix("n-") {
            let k: i64 = k.parse().or_else(|_| self.err(&format!("bad shape '{body}'")))?;
            self.n as i64 - k
        } else {
            let v: usize = head.parse().or_else(|_| self.err(&format!("bad shape '{body}'")))?;
            v as i64
        };
        if first <= 0 || tail.first().is_some_and(|&t| (t as i64) > first) {
            return Ok(None);
        }
        let mut parts = vec![first as usize];
        parts.extend(tail);
        let p = Partition::new(parts).or_else(|_| self.err(&format!("not a partition '{body}'")))?;
        if p.size() != self.n {
            return self.err(&format!("shape '{body}' is not a partition of n={}", self.n));
        }
        Ok(Some(p))
    }

    fn q_sum(&mut self) -> Result<Vec<(Partition, u64)>, FrobeniusError> {
        let mut out = Vec::new();
        loop {
            let c = self.int();
            let a = self.atom()?;
            let mu = match (&c, a) {
                (None, None) => return self.err("expected a term"),
                (_, Some(body)) => self.q_partition(&body)?,
                (Some(_), None) => Partition::empty(),
            };
            out.push((mu, c.unwrap_or(1)));
            if self.peek() == Some(b'+') {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }

    fn parse(mut self, ell: usize) -> Result<FrobeniusSeries, FrobeniusError> {
        let mut out = FrobeniusSeries::new(self.n, ell);
        if self.peek() == Some(b'0') {
            self.pos += 1;
            return if self.peek().is_none() { Ok(out) } else { self.err("trailing input") };
        }
        loop {
            let c = self.int().unwrap_or(1);
            let q: Vec<(Partition, u64)> = if self.peek() == Some(b'(') {
                self.pos += 1;
                let q = self.q_sum()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                q
            } else {
                Vec::new()
            };
            let first = self.atom()?;
            let second = self.atom()?;
            let (q, w) = match (q.is_empty(), first, second) {
                (true, Some(w), None) => (vec![(Partition::empty(), 1)], w),
                (true, Some(a), Some(w)) => (vec![(self.q_partition(&a)?, 1)], w),
                (false, Some(w), None) => (q, w),
                _ => return self.err("expected '<q-part> s[shape]'"),
            };
            if let Some(lambda) = self.w_partition(&w)? {
                for (mu, k) in q {
                    out.add(mu, lambda.clone(), c * k);
                }
            }
            match self.peek() {
                None => return Ok(out),
                Some(b'+') => self.pos += 1,
                Some(_) => return self.err("expected '+' or end of input"),
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn isotypes(module: &GradedSpan, degs: &[MultiDegree]) -> Vec<Result<BTreeMap<Partition, u64>, FrobeniusError>> {
    use rayon::prelude::*;
    degs.par_iter().map(|d| component_isotype(module, d)).collect()
}

#[cfg(not(feature = "parallel"))]
fn isotypes(module: &GradedSpan, degs: &[MultiDegree]) -> Vec<Result<BTreeMap<Partition, u64>, FrobeniusError>> {
    degs.iter().map(|d| component_isotype(module, d)).collect()
}

fn exponent_monomial(d: &MultiDegree) -> Monomial {
    Monomial::from_exponents(&d.0.iter().map(|&x| x as u8).collect::<Vec<_>>())
}

/// The graded Frobenius characteristic of a finished module.
pub fn frobenius_series(module: &GradedSpan) -> Result<FrobeniusSeries, FrobeniusError> {
    let (ell, n) = module.dims();
    let degs: Vec<MultiDegree> = module.components().map(|(d, _)| d.clone()).collect();
    let mut gen: BTreeMap<Partition, Poly> = BTreeMap::new();
    for (d, iso) in degs.iter().zip(isotypes(module, &degs)) {
        for (lambda, m) in iso? {
            gen.entry(lambda)
                .or_insert_with(|| Poly::zero(1, ell))
                .add_term(exponent_monomial(d), Q::from_integer(m.into()));
        }
    }
    let mut out = FrobeniusSeries::new(n, ell);
    for (lambda, g) in gen {
        let s = to_schur(&g).map_err(|source| FrobeniusError::NotSymmetric { lambda: lambda.clone(), source })?;
        for (mu, c) in s.coeffs {
            match q_to_i64(&c) {
                Some(v) if v > 0 => out.add(mu, lambda.clone(), v as u64),
                _ => return Err(FrobeniusError::NegativeCoefficient { mu, lambda, value: fmt_q(&c) }),
            }
        }
    }
    Ok(out)
}

/// `Σ_d dim(V_d) q^d` in the Schur basis.
pub fn hilbert_series(module: &GradedSpan) -> Result<SymSeries, FrobeniusError> {
    let (ell, _) = module.dims();
    let mut g = Poly::zero(1, ell);
    for (d, c) in module.components() {
        g.add_term(exponent_monomial(d), Q::from_integer(c.dim().into()));
    }
    to_schur(&g).map_err(|source| FrobeniusError::NotSymmetric { lambda: Partition::empty(), source })
}

/// Closed-form series from the classification theorems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// `e_1^d`
    E1Power(usize),
    /// `p_d`
    PowerSum(usize),
    /// `e_d`, requires `d ≤ n`
    Elementary(usize),
    /// `{x[1,j]^d}`
    FamilyA(usize),
    /// `{x[1,i]^d - x[1,j]^d}`
    FamilyB(usize),
    Degree2(ClassTag),
    Degree3(ClassTag),
}

/// `(n - |tail|, tail)` if that is a partition.
fn w_shape(n: usize, tail: &[usize]) -> Option<Partition> {
    let k: usize = tail.iter().sum();
    if k > n || tail.first().is_some_and(|&t| t > n - k) {
        return None;
    }
    let mut parts = vec![n - k];
    parts.extend_from_slice(tail);
    Partition::new(parts.into_iter().filter(|&p| p > 0).collect()).ok()
}

fn add_range(s: &mut FrobeniusSeries, lo: usize, hi: usize, tail: &[usize]) {
    if let Some(lambda) = w_shape(s.n, tail) {
        for j in lo..=hi {
            let mu = if j == 0 { Partition::empty() } else { Partition::new(vec![j]).unwrap() };
            s.add(mu, lambda.clone(), 1);
        }
    }
}

fn add_terms(s: &mut FrobeniusSeries, terms: &[(&[usize], u64)], tail: &[usize]) {
    if let Some(lambda) = w_shape(s.n, tail) {
        for (mu, c) in terms {
            s.add(Partition::new(mu.to_vec()).unwrap(), lambda.clone(), *c);
        }
    }
}

/// The closed-form series for `n` (all `μ`, no truncation).
pub fn oracle_series(kind: OracleKind, n: usize) -> Result<FrobeniusSeries, FrobeniusError> {
    let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(FrobeniusError::OutOfRange(what.to_string())) };
    need(n >= 1, "n >= 1")?;
    let mut s = FrobeniusSeries::new(n, usize::MAX);
    match kind {
        OracleKind::E1Power(d) => {
            need(d >= 1, "d >= 1")?;
            add_range(&mut s, 0, d, &[]);
        }
        OracleKind::PowerSum(d) => {
            need(d >= 1, "d >= 1")?;
            add_range(&mut s, 0, d, &[]);
            if d >= 2 {
                add_range(&mut s, 1, d - 1, &[1]);
            }
        }
        OracleKind::Elementary(d) => {
            need(d >= 1 && d <= n, "1 <= d <= n")?;
            for i in 0..=d / 2 {
                let tail: Vec<usize> = if i == 0 { vec![] } else { vec![i] };
                add_range(&mut s, i, d - i, &tail);
            }
        }
        OracleKind::FamilyA(d) => {
            need(d >= 1 && n >= 2, "d >= 1, n >= 2")?;
            add_range(&mut s, 0, d, &[]);
            add_range(&mut s, 1, d, &[1]);
        }
        OracleKind::FamilyB(d) => {
            need(d >= 1 && n >= 2, "d >= 1, n >= 2")?;
            add_range(&mut s, 0, d - 1, &[]);
            add_range(&mut s, 1, d, &[1]);
        }
        OracleKind::Degree2(tag) => {
            need(n >= 2, "n >= 2")?;
            add_range(&mut s, 0, 2, &[]);
            match tag {
                ClassTag::P1Squared => {}
                ClassTag::P2 => add_range(&mut s, 1, 1, &[1]),
                _ => return Err(FrobeniusError::OutOfRange(format!("{tag:?} is not a degree-2 class"))),
            }
        }
        OracleKind::Degree3(tag) => {
            need(n >= 2, "n >= 2")?;
            match tag {
                ClassTag::P1Cubed => add_range(&mut s, 0, 3, &[]),
                ClassTag::P3 => {
                    add_range(&mut s, 0, 3, &[]);
                    add_range(&mut s, 1, 2, &[1]);
                }
                ClassTag::H3 => {
                    add_terms(&mut s, &[(&[], 1), (&[1], 1), (&[2], 2), (&[3], 1)], &[]);
                    add_range(&mut s, 1, 2, &[1]);
                }
                _ => return Err(FrobeniusError::OutOfRange(format!("{tag:?} is not a degree-3 class"))),
            }
        }
    }
    Ok(s)
}

/// Compare at the module's `ell`: the engine sees exactly the `μ` with at most `ell` parts.
pub fn agrees_with(engine: &FrobeniusSeries, expected: &FrobeniusSeries) -> bool {
    engine.coeffs == expected.truncate(engine.ell).coeffs
}

/// Full JSON report for a computed module.
pub fn report_json(
    generators: &[String],
    module: &GradedSpan,
    series: &FrobeniusSeries,
) -> Result<Value, FrobeniusError> {
    let (ell, n) = module.dims();
    let hilbert = hilbert_series(module)?;
    let hilbert_h = schur_to_h(&hilbert).expect("Schur input");
    Ok(json!({
        "n": n,
        "ell": ell,
        "generators": generators,
        "frobenius": series.to_json_terms(),
        "hilbert": sym_json(&hilbert),
        "hilbert_h_basis": sym_json(&hilbert_h),
        "dimension": module.dimension(),
    }))
}

pub fn sym_json(s: &SymSeries) -> Value {
    Value::Array(
        s.sorted_terms()
            .into_iter()
            .map(|(mu, c)| {
                let coeff = match q_to_i64(c) {
                    Some(v) => json!(v),
                    None => json!(fmt_q(c)),
                };
                json!({"mu": mu.parts(), "coeff": coeff})
            })
            .collect(),
    )
}

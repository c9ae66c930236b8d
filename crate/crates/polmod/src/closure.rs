//! Graded reduced spans and the derivative/polarization closures that build
//! the polarization module `M_F`.
//!
//! Each multidegree component keeps a fully reduced echelon basis: every
//! element has a distinct pivot (its leading monomial) with coefficient 1 and
//! no element contains another's pivot. That form is unique for a given span,
//! so the computed bases do not depend on insertion order or scheduling.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_traits::Zero;
use serde_json::{json, Value};

use crate::polyring::{Monomial, MultiDegree, Permutation, Poly, PolyError, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClosureError {
    #[error("empty generator family")]
    EmptyFamily,
    #[error("generator {index} is not homogeneous: {source}")]
    NonHomogeneous { index: usize, source: PolyError },
    #[error("generator {index} lives in a {got:?} ring, expected {want:?}")]
    DimensionMismatch { index: usize, got: (usize, usize), want: (usize, usize) },
    #[error("family is not stable under the symmetric group: {0}")]
    NotStable(String),
    #[error("cannot insert a non-homogeneous polynomial: {0}")]
    InsertNonHomogeneous(PolyError),
}

/// Reduced echelon basis of one homogeneous component.
#[derive(Clone, Debug, Default)]
pub struct Component {
    basis: Vec<Poly>,
    pivots: HashMap<Monomial, usize>,
}

impl Component {
    pub fn basis(&self) -> &[Poly] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The basis ordered by decreasing pivot, independent of insertion order.
    pub fn canonical_basis(&self) -> Vec<&Poly> {
        let mut v: Vec<&Poly> = self.basis.iter().collect();
        v.sort_by(|x, y| y.leading().unwrap().0.cmp(x.leading().unwrap().0));
        v
    }

    /// Pivot monomial of the `k`-th basis element.
    pub fn pivot(&self, k: usize) -> &Monomial {
        self.basis[k].leading().expect("basis elements are nonzero").0
    }

    /// Remainder of `f` modulo the span. Because the basis is fully reduced,
    /// subtracting `f[m]·b` for every pivot `m` present in `f` clears all
    /// pivots in one pass.
    pub fn reduce(&self, f: &Poly) -> Poly {
        let mut r = f.clone();
        for (m, c) in f.terms() {
            if let Some(&k) = self.pivots.get(m) {
                r.add_scaled(&self.basis[k], &-c.clone());
            }
        }
        r
    }

    /// Insert `f`; returns the normalized new basis element if the span grew.
    fn insert(&mut self, f: &Poly) -> Option<Poly> {
        let r = self.reduce(f);
        if r.is_zero() {
            return None;
        }
        let r = r.monic();
        let lead = r.leading().unwrap().0.clone();
        for b in self.basis.iter_mut() {
            if let Some(c) = b.coeff(&lead).cloned() {
                b.add_scaled(&r, &-c);
            }
        }
        self.pivots.insert(lead, self.basis.len());
        self.basis.push(r.clone());
        Some(r)
    }
}

/// A graded subspace of the polynomial ring, stored component by component.
#[derive(Clone, Debug)]
pub struct GradedSpan {
    ell: usize,
    n: usize,
    components: BTreeMap<MultiDegree, Component>,
    generators: Vec<Poly>,
}

/// Which operators a closure applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operators {
    Derivatives,
    Polarizations,
    Both,
}

impl GradedSpan {
    pub fn new(ell: usize, n: usize) -> Self {
        GradedSpan { ell, n, components: BTreeMap::new(), generators: Vec::new() }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.ell, self.n)
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    /// Reduce `f` into the span. Returns whether the span grew.
    pub fn span_insert(&mut self, f: &Poly) -> Result<bool, ClosureError> {
        Ok(self.insert_get(f)?.is_some())
    }

    fn insert_get(&mut self, f: &Poly) -> Result<Option<Poly>, ClosureError> {
        if f.is_zero() {
            return Ok(None);
        }
        assert_eq!(f.dims(), self.dims(), "polynomial ring mismatch");
        let d = f.multidegree().map_err(ClosureError::InsertNonHomogeneous)?;
        Ok(self.components.entry(d).or_default().insert(f))
    }

    pub fn contains(&self, f: &Poly) -> bool {
        if f.is_zero() {
            return true;
        }
        let Ok(d) = f.multidegree() else {
            return false;
        };
        self.components.get(&d).is_some_and(|c| c.reduce(f).is_zero())
    }

    pub fn dimension(&self) -> usize {
        self.components.values().map(Component::dim).sum()
    }

    /// Nonempty components in increasing multidegree order.
    pub fn components(&self) -> impl Iterator<Item = (&MultiDegree, &Component)> {
        self.components.iter().filter(|(_, c)| c.dim() > 0)
    }

    pub fn component(&self, d: &MultiDegree) -> Option<&Component> {
        self.components.get(d)
    }

    /// Reduced echelon basis of the component `d` (empty if absent).
    pub fn component_basis(&self, d: &MultiDegree) -> &[Poly] {
        self.components.get(d).map(|c| c.basis()).unwrap_or(&[])
    }

    pub fn max_degree(&self) -> usize {
        self.components().map(|(d, _)| d.total()).max().unwrap_or(0)
    }

    /// Same span, compared component by component. Reduced echelon bases
    /// are unique up to order, so sorting by pivot makes them comparable.
    pub fn same_span(&self, other: &GradedSpan) -> bool {
        let sorted = Component::canonical_basis;
        let a: Vec<_> = self.components().collect();
        let b: Vec<_> = other.components().collect();
        a.len() == b.len() && a.iter().zip(b.iter()).all(|((da, ca), (db, cb))| da == db && sorted(ca) == sorted(cb))
    }

    /// Smallest span containing `self` closed under every `∂_{ij}`.
    pub fn derivative_closure(&self) -> GradedSpan {
        self.closed(Operators::Derivatives, self.max_degree() as u32)
    }

    /// Smallest span containing `self` closed under every `E_{i,k}^{(p)}`.
    pub fn polarization_closure(&self) -> GradedSpan {
        self.closed(Operators::Polarizations, self.max_degree() as u32)
    }

    fn closed(&self, ops: Operators, max_p: u32) -> GradedSpan {
        let mut out = self.clone();
        let seed: Vec<Poly> = self.components().flat_map(|(_, c)| c.basis.iter().cloned()).collect();
        close(&mut out, seed, ops, max_p);
        out
    }

    pub fn to_json(&self) -> Value {
        let comps: Vec<Value> = self
            .components()
            .map(|(d, c)| {
                json!({
                    "degree": d.0,
                    "dimension": c.dim(),
                    "basis": c.canonical_basis().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "ell": self.ell,
            "n": self.n,
            "generators": self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "dimension": self.dimension(),
            "components": comps,
        })
    }
}

/// Images of `g` under the chosen operators, skipping the Euler operators
/// `E_{i,i}^{(1)}` (they act by scalars) and exponents that annihilate.
fn images(g: &Poly, ops: Operators, max_p: u32) -> Vec<Poly> {
    let (ell, n) = g.dims();
    let mut out = Vec::new();
    if ops != Operators::Polarizations {
        for idx in 0..ell * n {
            let d = g.derive0(idx, 1);
            if !d.is_zero() {
                out.push(d);
            }
        }
    }
    if ops != Operators::Derivatives {
        let row_deg: Vec<u32> = (1..=ell).map(|k| g.row_degree(k) as u32).collect();
        for (k, &deg) in row_deg.iter().enumerate() {
            for p in 1..=max_p.min(deg) {
                for i in 0..ell {
                    if i == k && p == 1 {
                        continue;
                    }
                    let e = g.polarize0(i, k, p);
                    if !e.is_zero() {
                        out.push(e);
                    }
                }
            }
        }
    }
    out
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
fn par_map_mut<T: Send, U: Send>(items: &mut [T], f: impl Fn(&mut T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter_mut().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map_mut<T: Send, U: Send>(items: &mut [T], f: impl Fn(&mut T) -> U + Sync + Send) -> Vec<U> {
    items.iter_mut().map(f).collect()
}

/// Worklist to fixpoint, in waves: operator images of the current frontier
/// are computed in parallel, routed by multidegree, and each component
/// absorbs its batch under a single writer.
fn close(span: &mut GradedSpan, seed: Vec<Poly>, ops: Operators, max_p: u32) {
    let mut frontier = seed;
    while !frontier.is_empty() {
        let batches = par_map(&frontier, |g| images(g, ops, max_p));
        let mut routed: BTreeMap<MultiDegree, Vec<Poly>> = BTreeMap::new();
        for p in batches.into_iter().flatten() {
            let d = p.multidegree().expect("operators preserve homogeneity");
            routed.entry(d).or_default().push(p);
        }
        for d in routed.keys() {
            span.components.entry(d.clone()).or_default();
        }
        let mut pending = routed.into_iter().peekable();
        let mut work: Vec<(&mut Component, Vec<Poly>)> = Vec::new();
        for (d, c) in span.components.iter_mut() {
            if pending.peek().is_some_and(|(k, _)| k == d) {
                work.push((c, pending.next().unwrap().1));
            }
        }
        let grown = par_map_mut(&mut work, |(c, polys)| polys.iter().filter_map(|p| c.insert(p)).collect::<Vec<_>>());
        frontier = grown.into_iter().flatten().collect();
    }
}

/// How a generator family relates to the symmetric group action.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityMode {
    /// Replace each generator by its orbit.
    Orbit,
    /// Use the family as given; its span must be closed under permutations.
    Verbatim,
}

#[derive(Clone, Debug)]
pub struct GeneratorFamily {
    pub polys: Vec<Poly>,
    pub mode: StabilityMode,
}

impl GeneratorFamily {
    pub fn orbit(polys: Vec<Poly>) -> Self {
        GeneratorFamily { polys, mode: StabilityMode::Orbit }
    }

    pub fn verbatim(polys: Vec<Poly>) -> Self {
        GeneratorFamily { polys, mode: StabilityMode::Verbatim }
    }

    fn validate(&self, ell: usize, n: usize) -> Result<(), ClosureError> {
        if self.polys.is_empty() {
            return Err(ClosureError::EmptyFamily);
        }
        for (index, f) in self.polys.iter().enumerate() {
            if f.dims() != (ell, n) {
                return Err(ClosureError::DimensionMismatch { index, got: f.dims(), want: (ell, n) });
            }
            if !f.is_zero() {
                f.multidegree().map_err(|source| ClosureError::NonHomogeneous { index, source })?;
            }
        }
        Ok(())
    }

    /// The members after applying the stability mode.
    pub fn expanded(&self, n: usize) -> Result<Vec<Poly>, ClosureError> {
        match self.mode {
            StabilityMode::Orbit => {
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for f in &self.polys {
                    for g in orbit(f, n) {
                        if seen.insert(g.clone()) {
                            out.push(g);
                        }
                    }
                }
                Ok(out)
            }
            StabilityMode::Verbatim => {
                let (ell, _) = self.polys[0].dims();
                let mut span = GradedSpan::new(ell, n);
                for f in &self.polys {
                    span.span_insert(f)?;
                }
                for f in &self.polys {
                    for t in 1..n {
                        let g = f.permute(&Permutation::transposition(n, t, t + 1)).unwrap();
                        if !span.contains(&g) {
                            return Err(ClosureError::NotStable(f.to_string()));
                        }
                    }
                }
                Ok(self.polys.clone())
            }
        }
    }
}

/// `{σ·f}` by breadth-first search over adjacent transpositions.
pub fn orbit(f: &Poly, n: usize) -> Vec<Poly> {
    let gens: Vec<Permutation> = (1..n).map(|t| Permutation::transposition(n, t, t + 1)).collect();
    let mut seen: HashSet<Poly> = HashSet::from([f.clone()]);
    let mut out = vec![f.clone()];
    let mut queue = VecDeque::from([f.clone()]);
    while let Some(g) = queue.pop_front() {
        for t in &gens {
            let h = g.permute(t).unwrap();
            if seen.insert(h.clone()) {
                out.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    out
}

/// `M_F`: the smallest space containing `F` that is closed under all
/// derivatives and all polarization operators.
pub fn polarization_module(family: &GeneratorFamily, ell: usize, n: usize) -> Result<GradedSpan, ClosureError> {
    family.validate(ell, n)?;
    let members = family.expanded(n)?;
    let mut span = GradedSpan::new(ell, n);
    span.generators = family.polys.clone();
    let max_p = members.iter().map(|f| f.total_degree()).max().unwrap_or(0);
    let mut seed = Vec::new();
    for f in &members {
        if let Some(r) = span.insert_get(f)? {
            seed.push(r);
        }
    }
    close(&mut span, seed, Operators::Both, max_p);
    Ok(span)
}

/// Run `f` on a pool with the given number of worker threads (0 = default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if threads > 0 {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}

/// Coefficient of the pivot of `b_k` in `σ·b_k`, summed: the trace of `σ` on
/// the component. `σ·b` has at monomial `m` the coefficient `b` has at `σ⁻¹·m`.
pub fn trace(comp: &Component, sigma: &Permutation, n: usize) -> Q {
    let inv = sigma.inverse();
    let mut t = Q::zero();
    for (k, b) in comp.basis.iter().enumerate() {
        let m = comp.pivot(k).permuted(n, &inv);
        if let Some(c) = b.coeff(&m) {
            t += c;
        }
    }
    t
}

/// Every basis element maps back into its component under each adjacent transposition.
pub fn is_symmetric_group_stable(span: &GradedSpan) -> bool {
    let n = span.n;
    span.components().all(|(_, c)| {
        c.basis
            .iter()
            .all(|b| (1..n).all(|t| c.reduce(&b.permute(&Permutation::transposition(n, t, t + 1)).unwrap()).is_zero()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::{expand_basis, Basis, Partition};
    use num_bigint::BigInt;
    use num_traits::One;

    fn q(a: i64) -> Q {
        Q::from_integer(a.into())
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn sym(basis: Basis, parts: &[usize], ell: usize, n: usize) -> Poly {
        expand_basis(basis, &Partition::new(parts.to_vec()).unwrap(), 1, ell, n).unwrap()
    }

    #[test]
    fn insert_dependence() {
        let mut s = GradedSpan::new(1, 2);
        let x11 = Poly::var(1, 2, 1, 1);
        let x12 = Poly::var(1, 2, 1, 2);
        assert!(s.span_insert(&x11).unwrap());
        assert!(!s.span_insert(&x11.scale(&q(2))).unwrap());
        assert!(s.span_insert(&(&x11 + &x12)).unwrap());
        assert_eq!(s.dimension(), 2);
        assert!(!s.span_insert(&Poly::zero(1, 2)).unwrap());
        let bad = &x11 + &Poly::one(1, 2);
        assert!(matches!(s.span_insert(&bad), Err(ClosureError::InsertNonHomogeneous(_))));
    }

    #[test]
    fn family_b_top_component() {
        let (n, d) = (4, 3);
        let mut s = GradedSpan::new(1, n);
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    let f = &Poly::var(1, n, 1, i).pow(d) - &Poly::var(1, n, 1, j).pow(d);
                    s.span_insert(&f).unwrap();
                }
            }
        }
        assert_eq!(s.component_basis(&MultiDegree(vec![d as usize])).len(), n - 1);
    }

    #[test]
    fn reduced_echelon_invariants() {
        let n = 3;
        let f = sym(Basis::Homogeneous, &[3], 2, n);
        let m = polarization_module(&GeneratorFamily::orbit(vec![f]), 2, n).unwrap();
        for (_, c) in m.components() {
            let pivots: Vec<&Monomial> = (0..c.dim()).map(|k| c.pivot(k)).collect();
            for (k, b) in c.basis().iter().enumerate() {
                assert!(b.coeff(pivots[k]).unwrap().is_one());
                for (k2, p) in pivots.iter().enumerate() {
                    if k2 != k {
                        assert!(b.coeff(p).is_none());
                    }
                }
            }
        }
        assert!(is_symmetric_group_stable(&m));
    }

    #[test]
    fn e1_power_dimension() {
        for ell in 1..=3 {
            for d in 1..=4usize {
                let f = sym(Basis::PowerSum, &vec![1; d], ell, 3);
                let m = polarization_module(&GeneratorFamily::orbit(vec![f]), ell, 3).unwrap();
                assert_eq!(m.dimension(), binom(ell + d, d));
                for (_, c) in m.components() {
                    assert_eq!(c.dim(), 1);
                }
            }
        }
        let f = sym(Basis::PowerSum, &[1, 1, 1], 2, 2);
        assert_eq!(polarization_module(&GeneratorFamily::orbit(vec![f]), 2, 2).unwrap().dimension(), 10);
    }

    #[test]
    fn power_sum_basis_components() {
        // degree d component is spanned by p_b(X), lower ones by the X_j^a
        let (ell, n, d) = (2, 3, 3);
        let f = sym(Basis::PowerSum, &[d], ell, n);
        let m = polarization_module(&GeneratorFamily::orbit(vec![f]), ell, n).unwrap();
        for (deg, c) in m.components() {
            let want = match deg.total() {
                0 => 1,
                t if t == d => 1,
                _ => n,
            };
            assert_eq!(c.dim(), want, "component {deg}");
            if deg.total() == d {
                let pd = crate::symfunc::diag_power_sum(deg, n).unwrap();
                assert!(m.contains(&pd));
            }
        }
    }

    #[test]
    fn elementary_low_components() {
        let (ell, n, d) = (2, 5, 4);
        let f = sym(Basis::Elementary, &[d], ell, n);
        let m = polarization_module(&GeneratorFamily::orbit(vec![f]), ell, n).unwrap();
        for (deg, c) in m.components() {
            if deg.total() <= d / 2 {
                assert_eq!(c.dim(), binom(n, deg.total()), "component {deg}");
            }
        }
    }

    #[test]
    fn verbatim_mode_checks_stability() {
        let n = 3;
        let fam = GeneratorFamily::verbatim(vec![Poly::var(1, n, 1, 1)]);
        assert!(matches!(polarization_module(&fam, 1, n), Err(ClosureError::NotStable(_))));
        let all: Vec<Poly> = (1..=n).map(|j| Poly::var(1, n, 1, j)).collect();
        assert_eq!(polarization_module(&GeneratorFamily::verbatim(all), 1, n).unwrap().dimension(), n + 1);
        assert_eq!(polarization_module(&GeneratorFamily::orbit(vec![]), 1, n).unwrap_err(), ClosureError::EmptyFamily);
    }

    #[test]
    fn orbit_of_diagonal_monomial() {
        let (ell, n) = (3, 3);
        let f = &(&Poly::var(ell, n, 1, 1) * &Poly::var(ell, n, 2, 2)) * &Poly::var(ell, n, 3, 3);
        assert_eq!(orbit(&f, n).len(), 6);
    }

    #[test]
    fn scaling_invariance() {
        let f = sym(Basis::Monomial, &[2, 1], 2, 3);
        let a = polarization_module(&GeneratorFamily::orbit(vec![f.clone()]), 2, 3).unwrap();
        let b = polarization_module(
            &GeneratorFamily::orbit(vec![f.scale(&Q::new(BigInt::from(-7), BigInt::from(3)))]),
            2,
            3,
        )
        .unwrap();
        assert!(a.same_span(&b));
    }

    #[test]
    fn gl_stability() {
        let (ell, n) = (2, 3);
        let f = sym(Basis::Monomial, &[2, 1], ell, n);
        let m = polarization_module(&GeneratorFamily::orbit(vec![f]), ell, n).unwrap();
        let g = vec![vec![q(2), Q::new(1.into(), 3.into())], vec![q(-1), q(5)]];
        for (_, c) in m.components() {
            for b in c.basis() {
                let img = b.substitute_rows(&g);
                // the image is a sum of homogeneous pieces; each must lie in the span
                let mut pieces: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
                for (mono, coef) in img.terms() {
                    pieces
                        .entry(mono.row_degrees(n))
                        .or_insert_with(|| Poly::zero(ell, n))
                        .add_term(mono.clone(), coef.clone());
                }
                assert!(pieces.values().all(|p| m.contains(p)));
            }
        }
    }

    #[test]
    fn closures_commute_on_a_sample() {
        let (ell, n) = (2, 3);
        let f = &sym(Basis::Monomial, &[2, 1], ell, n) + &sym(Basis::PowerSum, &[3], ell, n);
        let mut v = GradedSpan::new(ell, n);
        v.span_insert(&f).unwrap();
        let a = v.derivative_closure().polarization_closure();
        let b = v.polarization_closure().derivative_closure();
        assert!(a.same_span(&b));
        let m = polarization_module(&GeneratorFamily::verbatim(vec![f]), ell, n).unwrap();
        assert!(a.same_span(&m));
    }

    #[test]
    fn json_shape() {
        let f = sym(Basis::PowerSum, &[2], 1, 2);
        let m = polarization_module(&GeneratorFamily::orbit(vec![f]), 1, 2).unwrap();
        let v = m.to_json();
        assert_eq!(v["dimension"], 4);
        assert_eq!(v["generators"][0], "x[1,1]^2 + x[1,2]^2");
        assert_eq!(v["components"][0]["degree"], json!([0]));
    }

    #[test]
    fn thread_count_does_not_change_bases() {
        let f = sym(Basis::Homogeneous, &[3], 2, 4);
        let fam = GeneratorFamily::orbit(vec![f]);
        let a = with_threads(1, || polarization_module(&fam, 2, 4).unwrap());
        let b = with_threads(4, || polarization_module(&fam, 2, 4).unwrap());
        assert_eq!(a.to_json(), b.to_json());
    }
}

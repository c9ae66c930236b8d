//! Degree-2 and degree-3 classification: the structured matrices, their Gram
//! determinants, the exception conic and the projective-point classifiers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::closure::GradedSpan;
use crate::matrix::Matrix;
use crate::polyring::{Poly, Q};
use crate::symfunc::{monomial_symmetric, Partition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExceptionError {
    #[error("all coordinates are zero")]
    ZeroPoint,
    #[error("{kind:?} is not defined for n = {n}")]
    InvalidSize { kind: MatrixKind, n: usize },
    #[error("{kind:?} takes {want} parameters, got {got}")]
    Params { kind: MatrixKind, want: usize, got: usize },
    #[error("degree must be 2 or 3, got {0}")]
    Degree(usize),
    #[error("expected {want} coefficients, got {got}")]
    Arity { want: usize, got: usize },
    #[error("the polynomial vanishes in {0} variables")]
    Vanishes(usize),
}

/// Isomorphism class of a degree-2 or degree-3 polarization module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassTag {
    P1Squared,
    P2,
    P1Cubed,
    P3,
    H3,
}

impl ClassTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::P1Squared => "P1_SQUARED",
            ClassTag::P2 => "P2",
            ClassTag::P1Cubed => "P1_CUBED",
            ClassTag::P3 => "P3",
            ClassTag::H3 => "H3",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `[a:b:c]` with equality up to a nonzero scalar.
#[derive(Clone, Debug)]
pub struct ProjectivePoint3 {
    coords: [Q; 3],
}

impl ProjectivePoint3 {
    pub fn new(a: Q, b: Q, c: Q) -> Result<Self, ExceptionError> {
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return Err(ExceptionError::ZeroPoint);
        }
        Ok(ProjectivePoint3 { coords: [a, b, c] })
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Result<Self, ExceptionError> {
        Self::new(Q::from_integer(a.into()), Q::from_integer(b.into()), Q::from_integer(c.into()))
    }

    pub fn coords(&self) -> &[Q; 3] {
        &self.coords
    }

    /// First nonzero coordinate scaled to 1.
    pub fn canonical(&self) -> [Q; 3] {
        let lead = self.coords.iter().find(|c| !c.is_zero()).expect("nonzero point").clone();
        self.coords.clone().map(|c| c / &lead)
    }

    pub fn is_136(&self) -> bool {
        let [a, b, c] = &self.coords;
        let q = |k: i64| Q::from_integer(k.into());
        b == &(a * q(3)) && c == &(a * q(6)) && c == &(b * q(2))
    }
}

impl PartialEq for ProjectivePoint3 {
    fn eq(&self, other: &Self) -> bool {
        let (u, v) = (&self.coords, &other.coords);
        (0..3).all(|i| (i + 1..3).all(|j| &u[i] * &v[j] == &u[j] * &v[i]))
    }
}

impl Eq for ProjectivePoint3 {}

impl fmt::Display for ProjectivePoint3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.canonical();
        write!(f, "[{}:{}:{}]", crate::polyring::fmt_q(&a), crate::polyring::fmt_q(&b), crate::polyring::fmt_q(&c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    T,
    H,
    F,
    E,
    D,
    G,
}

fn qi(k: i64) -> Q {
    Q::from_integer(k.into())
}

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Rows of `F_n`: positions `i < j` of the two `2b` entries, in lex order.
fn pair_rows(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Build one of the structured matrices. `params` is `(x,y,z,w,t)` for `T`,
/// `(x,y,z)` for `H` and `(a,b,c)` otherwise.
pub fn build_matrix(kind: MatrixKind, n: usize, params: &[Q]) -> Result<Matrix, ExceptionError> {
    let want = match kind {
        MatrixKind::T => 5,
        _ => 3,
    };
    if params.len() != want {
        return Err(ExceptionError::Params { kind, want, got: params.len() });
    }
    if n < 2 {
        return Err(ExceptionError::InvalidSize { kind, n });
    }
    let p = params;
    let m = match kind {
        MatrixKind::T => Matrix::from_fn(n, n, |i, j| {
            let last = n - 1;
            match (i == last, j == last) {
                (false, false) if i == j => p[0].clone(),
                (false, false) => p[1].clone(),
                (true, false) => p[2].clone(),
                (false, true) => p[3].clone(),
                (true, true) => p[4].clone(),
            }
        }),
        MatrixKind::H => Matrix::from_fn(n, n - 1, |i, j| {
            if i == n - 1 {
                p[2].clone()
            } else if i == j {
                p[0].clone()
            } else {
                p[1].clone()
            }
        }),
        MatrixKind::F => {
            let rows = pair_rows(n);
            let two_b = &p[1] * qi(2);
            Matrix::from_fn(rows.len(), n, |r, j| {
                let (a, b) = rows[r];
                if j == a || j == b {
                    two_b.clone()
                } else {
                    p[2].clone()
                }
            })
        }
        MatrixKind::E | MatrixKind::D | MatrixKind::G => {
            let f = build_matrix(MatrixKind::F, n, params)?;
            let (a, b) = (&p[0], &p[1]);
            let total = n + binom2(n);
            let full = Matrix::from_fn(total, n + 1, |i, j| {
                if i < n {
                    if j == n {
                        a * qi(6)
                    } else if i == j {
                        a * qi(3)
                    } else {
                        b.clone()
                    }
                } else if j == n {
                    b * qi(4)
                } else {
                    f.get(i - n, j).clone()
                }
            });
            match kind {
                MatrixKind::E => full,
                MatrixKind::D => Matrix::from_fn(total, n, |i, j| full.get(i, j).clone()),
                _ => Matrix::from_fn(total, n, |i, j| full.get(i, if j == n - 1 { n } else { j }).clone()),
            }
        }
    };
    Ok(m)
}

/// `(x−y)^{n−2}·(t(x+(n−2)y) − (n−1)wz)`.
pub fn det_t(x: &Q, y: &Q, z: &Q, w: &Q, t: &Q, n: usize) -> Q {
    let n = n as i64;
    num_traits::pow(x - y, (n - 2) as usize) * (t * (x + y * qi(n - 2)) - qi(n - 1) * w * z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxKind {
    P,
    Q,
    R,
    A,
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Exact evaluation of the auxiliary polynomials `P_n, Q_n, R_n, A_n`.
pub fn aux_poly(kind: AuxKind, a: &Q, b: &Q, c: &Q, n: usize) -> Q {
    let n = n as i64;
    let c2 = binom(n - 1, 2);
    match kind {
        AuxKind::P => qi(12) * a * b + qi(6 * (n - 2)) * a * c - qi(4 * (n - 1)) * b * b,
        AuxKind::Q => {
            qi(9) * a * a - qi(6) * a * b + qi(4 * n - 7) * b * b - qi(4 * (n - 2)) * b * c + qi(n - 2) * c * c
        }
        AuxKind::R => {
            qi(9) * a * a
                + qi(6 * (n - 1)) * a * b
                + qi((n - 1) * (n + 7)) * b * b
                + qi(4 * (n - 1) * (n - 2)) * b * c
                + qi((n - 2) * c2) * c * c
        }
        AuxKind::A => {
            let (a2, b2, c2q) = (a * a, b * b, c * c);
            qi(81) * &a2 * &a2 - qi(54) * &a2 * a * b
                + qi(18 * n * n + 18 * n - 63) * &a2 * &b2
                + qi(18 * (n - 2) * (n * n - 2 * n - 1)) * &a2 * b * c
                + Q::new((9 * n * (n - 2) * (n * n - 4 * n + 5)).into(), 2.into()) * &a2 * &c2q
                - qi(12 * (n - 1) * (n * n - 2 * n + 2)) * a * &b2 * b
                - qi(12 * (n - 1) * (n - 1) * c2) * a * &b2 * c
                + qi(2 * (n - 1) * (n * n * n - 3 * n * n + 7 * n - 8)) * &b2 * &b2
                - qi(8 * (n - 2) * (n - 1)) * &b2 * b * c
                + qi(2 * (n - 2) * (n - 1)) * &b2 * &c2q
        }
    }
}

/// The closed form claimed for `det(MᵗM)`, `M ∈ {E, D, G}`.
pub fn det_identity_rhs(kind: MatrixKind, a: &Q, b: &Q, c: &Q, n: usize) -> Option<Q> {
    let q = num_traits::pow(aux_poly(AuxKind::Q, a, b, c, n), n - 1);
    match kind {
        MatrixKind::E => {
            let p = aux_poly(AuxKind::P, a, b, c, n);
            Some(qi(binom(n as i64, 2)) * &p * &p * q)
        }
        MatrixKind::D => Some(aux_poly(AuxKind::R, a, b, c, n) * q),
        MatrixKind::G => Some(aux_poly(AuxKind::A, a, b, c, n) * q),
        _ => None,
    }
}

/// Compare the generic determinant of `MᵗM` with its claimed closed form.
pub fn det_identity_check(kind: MatrixKind, a: &Q, b: &Q, c: &Q, n: usize) -> Result<bool, ExceptionError> {
    let Some(rhs) = det_identity_rhs(kind, a, b, c, n) else {
        return Err(ExceptionError::InvalidSize { kind, n });
    };
    if n < 3 {
        return Err(ExceptionError::InvalidSize { kind, n });
    }
    let m = build_matrix(kind, n, &[a.clone(), b.clone(), c.clone()])?;
    Ok(m.gram().determinant() == rhs)
}

/// `det(GᵗG) = 4·A_n·Q_n^{n−2}`: since `GᵗG` has the shape `T_n`, the power
/// of `x − y = Q_n` is `n − 2`.
pub fn det_g_gram(a: &Q, b: &Q, c: &Q, n: usize) -> Q {
    qi(4) * aux_poly(AuxKind::A, a, b, c, n) * num_traits::pow(aux_poly(AuxKind::Q, a, b, c, n), n - 2)
}

/// `α_n, β_n` of the identity `HᵗH = T_{n−1}(α, β, β, β, α)`.
pub fn h_gram_params(x: &Q, y: &Q, z: &Q, n: usize) -> (Q, Q) {
    let n = n as i64;
    let alpha = x * x + qi(n - 2) * y * y + z * z;
    let beta = qi(2) * x * y + qi(n - 3) * y * y + z * z;
    (alpha, beta)
}

/// Checks `HᵗH = T_{n−1}(α,β,β,β,α)` entrywise and its determinant formula.
pub fn h_identity_check(x: &Q, y: &Q, z: &Q, n: usize) -> Result<bool, ExceptionError> {
    if n < 3 {
        return Err(ExceptionError::InvalidSize { kind: MatrixKind::H, n });
    }
    let g = build_matrix(MatrixKind::H, n, &[x.clone(), y.clone(), z.clone()])?.gram();
    let (al, be) = h_gram_params(x, y, z, n);
    let t = build_matrix(MatrixKind::T, n - 1, &[al.clone(), be.clone(), be.clone(), be, al])?;
    let k = n as i64;
    let closed = num_traits::pow(x - y, 2 * (n - 2))
        * ({
            let s = x + y * qi(k - 2);
            &s * &s + qi(k - 1) * z * z
        });
    Ok(g == t && g.determinant() == closed)
}

/// `f = a m_3 + b m_21 + c m_111` in the first row of `ℓ = 1`.
pub fn cubic(a: &Q, b: &Q, c: &Q, n: usize) -> Poly {
    let mut f = Poly::zero(1, n);
    for (coef, parts) in [(a, vec![3]), (b, vec![2, 1]), (c, vec![1, 1, 1])] {
        if coef.is_zero() || parts.len() > n {
            continue;
        }
        let m = monomial_symmetric(&Partition::new(parts).unwrap(), 1, 1, n).unwrap();
        f.add_scaled(&m, coef);
    }
    f
}

/// Dimension of the span of `∂_{11}f, …, ∂_{1n}f, E_{11}^{(2)} f`.
pub fn derivative_rank(f: &Poly) -> usize {
    let (ell, n) = f.dims();
    let mut span = GradedSpan::new(ell, n);
    for j in 1..=n {
        span.span_insert(&f.derive(1, j, 1).unwrap()).unwrap();
    }
    span.span_insert(&f.polarize(1, 1, 2).unwrap()).unwrap();
    span.dimension()
}

/// Whether the rank bound `≥ n` holds for `[a:b:c]`; see [`derivative_rank`].
pub fn rank_lower_bound_check(a: &Q, b: &Q, c: &Q, n: usize) -> bool {
    derivative_rank(&cubic(a, b, c, n)) >= n
}

/// The exception condition. For `n ≥ 3`: `[a:b:c] ≠ [1:3:6]` and
/// `6a(2b+(n−2)c) = 4(n−1)b²`. With two variables `m_111 = 0`, the rank drops
/// to `n = 2` exactly when `b = 0`, and `b = 3a` is the class of `p_1³`.
pub fn is_n_exception(a: &Q, b: &Q, c: &Q, n: usize) -> Result<bool, ExceptionError> {
    let pt = ProjectivePoint3::new(a.clone(), b.clone(), c.clone())?;
    if n == 2 {
        if a.is_zero() && b.is_zero() {
            return Err(ExceptionError::Vanishes(2));
        }
        return Ok(b.is_zero());
    }
    if n < 2 {
        return Err(ExceptionError::InvalidSize { kind: MatrixKind::E, n });
    }
    if pt.is_136() {
        return Ok(false);
    }
    Ok(aux_poly(AuxKind::P, a, b, c, n).is_zero())
}

/// `n₁ a(n₂ b + n₃ c) = n₄ b²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionEquation {
    pub n: usize,
    pub n1: i64,
    pub n2: i64,
    pub n3: i64,
    pub n4: i64,
}

fn coef_text(k: i64, var: &str) -> String {
    if k == 1 {
        var.to_string()
    } else {
        format!("{k}{var}")
    }
}

impl ExceptionEquation {
    pub fn lhs(&self) -> String {
        let inner = if self.n3 == 0 {
            coef_text(self.n2, "b")
        } else {
            format!("{}+{}", coef_text(self.n2, "b"), coef_text(self.n3, "c"))
        };
        format!("{}({inner})", coef_text(self.n1, "a"))
    }

    pub fn rhs(&self) -> String {
        coef_text(self.n4, "b^2")
    }

    pub fn holds(&self, a: &Q, b: &Q, c: &Q) -> bool {
        qi(self.n1) * a * (qi(self.n2) * b + qi(self.n3) * c) == qi(self.n4) * b * b
    }
}

impl fmt::Display for ExceptionEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.lhs(), self.rhs())
    }
}

/// Normal form of `12ab + 6(n−2)ac = 4(n−1)b²`: divide by the gcd of all
/// three coefficients, then pull the gcd of the left pair out front.
pub fn exception_equation(n: usize) -> Result<ExceptionEquation, ExceptionError> {
    if n < 3 {
        return Err(ExceptionError::InvalidSize { kind: MatrixKind::E, n });
    }
    let k = n as i64;
    let (ab, ac, bb) = (12i64, 6 * (k - 2), 4 * (k - 1));
    let g = ab.gcd(&ac).gcd(&bb);
    let (ab, ac, bb) = (ab / g, ac / g, bb / g);
    let n1 = ab.gcd(&ac);
    Ok(ExceptionEquation { n, n1, n2: ab / n1, n3: ac / n1, n4: bb })
}

/// The gcd-parametrized coefficients `n₁..n₄`.
pub fn gcd_form(n: usize) -> ExceptionEquation {
    let k = n as i64;
    let n1 = 3 / (k + 2).gcd(&3);
    let n2 = (k + 1).gcd(&(k - 1));
    let (n3, n4) =
        if k % 2 == 1 { (k - 2, (2 * k - 2) / (k - 1).gcd(&3)) } else { ((k - 2) / 2, (k - 1) / (k - 1).gcd(&6)) };
    ExceptionEquation { n, n1, n2, n3, n4 }
}

/// Whether the gcd form and [`is_n_exception`] agree at `[a:b:c]`.
pub fn gcd_form_check(a: &Q, b: &Q, c: &Q, n: usize) -> Result<bool, ExceptionError> {
    let pt = ProjectivePoint3::new(a.clone(), b.clone(), c.clone())?;
    let by_gcd = !pt.is_136() && gcd_form(n).holds(a, b, c);
    Ok(by_gcd == is_n_exception(a, b, c, n)?)
}

/// Class of `a m_2 + b m_11` (degree 2) or `a m_3 + b m_21 + c m_111` (degree 3).
pub fn classify(degree: usize, coeffs: &[Q], n: usize) -> Result<ClassTag, ExceptionError> {
    let want = match degree {
        2 => 2,
        3 => 3,
        d => return Err(ExceptionError::Degree(d)),
    };
    if coeffs.len() != want {
        return Err(ExceptionError::Arity { want, got: coeffs.len() });
    }
    if coeffs.iter().all(Zero::is_zero) {
        return Err(ExceptionError::ZeroPoint);
    }
    if n < 2 {
        return Err(ExceptionError::InvalidSize { kind: MatrixKind::E, n });
    }
    if degree == 2 {
        let (a, b) = (&coeffs[0], &coeffs[1]);
        return Ok(if b == &(a * qi(2)) { ClassTag::P1Squared } else { ClassTag::P2 });
    }
    let (a, b, c) = (&coeffs[0], &coeffs[1], &coeffs[2]);
    if n == 2 {
        if a.is_zero() && b.is_zero() {
            return Err(ExceptionError::Vanishes(2));
        }
        if b == &(a * qi(3)) {
            return Ok(ClassTag::P1Cubed);
        }
    } else if ProjectivePoint3::new(a.clone(), b.clone(), c.clone())?.is_136() {
        return Ok(ClassTag::P1Cubed);
    }
    Ok(if is_n_exception(a, b, c, n)? { ClassTag::P3 } else { ClassTag::H3 })
}

/// `p_2 p_1^{d−2}` in `n` variables.
pub fn p2_p1_power(d: usize, n: usize) -> Poly {
    let p1 = monomial_symmetric(&Partition::new(vec![1]).unwrap(), 1, 1, n).unwrap();
    let p2 = monomial_symmetric(&Partition::new(vec![2]).unwrap(), 1, 1, n).unwrap();
    &p2 * &p1.pow(d as u32 - 2)
}

/// `E_{11}^{(2)} g = Σ_j ∂_{1j} g`.
pub fn euler_like_identity(g: &Poly) -> bool {
    let n = g.dims().1;
    let mut s = Poly::zero(g.dims().0, n);
    for j in 1..=n {
        s = &s + &g.derive(1, j, 1).unwrap();
    }
    g.polarize(1, 1, 2).unwrap() == s
}

/// Sign of a rational as `-1, 0, 1`.
pub fn signum(q: &Q) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Integer `[a:b:c]` representative with coprime entries and positive lead.
pub fn primitive(pt: &ProjectivePoint3) -> [BigInt; 3] {
    let c = pt.canonical();
    let l = c.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let ints = c.map(|q| q.numer() * (&l / q.denom()));
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    ints.map(|v| v / &g)
}

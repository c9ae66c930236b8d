//! Text syntax for generators: symmetric-function atoms such as `p[3]` or
//! `m[2,1]`, raw variables `x[i,j]`, rational scalars, `+ - * ^` and
//! parentheses, plus the named families `family:A:d`, `family:B:d`,
//! `family:C:d`, `family:T:d` and `vandermonde`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::closure::GeneratorFamily;
use crate::polyring::{Monomial, Poly, Q};
use crate::symfunc::{expand_basis, Basis, Partition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("cannot expand in ell={ell}, n={n}: {msg}")]
    Expand { ell: usize, n: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Q),
    Sym(Basis, Partition),
    Var(usize, usize),
    Neg(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// `x[1,j]^d`
    A,
    /// `x[1,i]^d - x[1,j]^d`
    B,
    /// square-free monomials of degree `d`
    C,
    /// all monomials of degree `d`
    T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Expr(Expr),
    Family(FamilyKind, usize),
    Vandermonde,
}

impl Generator {
    pub fn parse(text: &str) -> Result<Generator, ExprError> {
        let t = text.trim();
        if t == "vandermonde" {
            return Ok(Generator::Vandermonde);
        }
        if let Some(rest) = t.strip_prefix("family:") {
            let (name, d) = rest.split_once(':').ok_or_else(|| ExprError::UnknownFamily(t.into()))?;
            let kind = match name {
                "A" => FamilyKind::A,
                "B" => FamilyKind::B,
                "C" => FamilyKind::C,
                "T" => FamilyKind::T,
                _ => return Err(ExprError::UnknownFamily(name.into())),
            };
            let d: usize =
                d.parse().map_err(|_| ExprError::Syntax { pos: t.len() - d.len(), msg: "bad degree".into() })?;
            if d == 0 {
                return Err(ExprError::Syntax { pos: t.len() - 1, msg: "degree must be positive".into() });
            }
            return Ok(Generator::Family(kind, d));
        }
        Ok(Generator::Expr(Expr::parse(t)?))
    }

    /// The polynomials of the family, already closed under the symmetric group
    /// for the named families.
    pub fn polys(&self, ell: usize, n: usize) -> Result<Vec<Poly>, ExprError> {
        let row_mono = |exps: &[u8]| {
            let mut e = vec![0u8; ell * n];
            e[..n].copy_from_slice(exps);
            Monomial::from_exponents(&e)
        };
        let one = Q::one();
        match self {
            Generator::Expr(e) => Ok(vec![e.eval(ell, n)?]),
            Generator::Vandermonde => {
                let mut v = Poly::one(ell, n);
                for i in 1..=n {
                    for j in i + 1..=n {
                        v = &v * &(&Poly::var(ell, n, 1, i) - &Poly::var(ell, n, 1, j));
                    }
                }
                Ok(vec![v])
            }
            Generator::Family(kind, d) => {
                let d8 = u8::try_from(*d).map_err(|_| expand_err(ell, n, "degree too large"))?;
                let unit = |j: usize, k: u8| {
                    let mut e = vec![0u8; n];
                    e[j] = k;
                    e
                };
                let out = match kind {
                    FamilyKind::A => {
                        (0..n).map(|j| Poly::from_monomial(ell, n, row_mono(&unit(j, d8)), one.clone())).collect()
                    }
                    FamilyKind::B => {
                        let mut v = Vec::new();
                        for i in 0..n {
                            for j in i + 1..n {
                                let mut p = Poly::from_monomial(ell, n, row_mono(&unit(i, d8)), one.clone());
                                p.add_term(row_mono(&unit(j, d8)), -one.clone());
                                v.push(p);
                            }
                        }
                        v
                    }
                    FamilyKind::C => {
                        if *d > n {
                            return Err(expand_err(ell, n, "family C needs d <= n"));
                        }
                        compositions(n, *d)
                            .into_iter()
                            .filter(|e| e.iter().all(|&x| x <= 1))
                            .map(|e| Poly::from_monomial(ell, n, row_mono(&e), one.clone()))
                            .collect()
                    }
                    FamilyKind::T => compositions(n, *d)
                        .into_iter()
                        .map(|e| Poly::from_monomial(ell, n, row_mono(&e), one.clone()))
                        .collect(),
                };
                Ok(out)
            }
        }
    }

    /// Family for the closure engine.
    pub fn family(&self, ell: usize, n: usize) -> Result<GeneratorFamily, ExprError> {
        let polys = self.polys(ell, n)?;
        Ok(match self {
            Generator::Family(..) => GeneratorFamily::verbatim(polys),
            _ => GeneratorFamily::orbit(polys),
        })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Expr(e) => write!(f, "{e}"),
            Generator::Vandermonde => f.write_str("vandermonde"),
            Generator::Family(k, d) => write!(f, "family:{k:?}:{d}"),
        }
    }
}

fn expand_err(ell: usize, n: usize, msg: &str) -> ExprError {
    ExprError::Expand { ell, n, msg: msg.into() }
}

/// Exponent vectors of length `n` summing to `d`.
fn compositions(n: usize, d: usize) -> Vec<Vec<u8>> {
    fn go(i: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i + 1 == cur.len() {
            cur[i] = left as u8;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k as u8;
            go(i + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(0, d, &mut vec![0; n], &mut out);
    }
    out
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.ws();
        if p.pos < p.s.len() {
            return p.err("unexpected trailing input");
        }
        Ok(e)
    }

    /// Expand in `ell` rows of `n` variables; symmetric atoms live in row 1.
    pub fn eval(&self, ell: usize, n: usize) -> Result<Poly, ExprError> {
        Ok(match self {
            Expr::Num(q) => Poly::constant(ell, n, q.clone()),
            Expr::Sym(b, l) => expand_basis(*b, l, 1, ell, n).map_err(|e| expand_err(ell, n, &e.to_string()))?,
            Expr::Var(i, j) => Poly::try_var(ell, n, *i, *j).map_err(|e| expand_err(ell, n, &e.to_string()))?,
            Expr::Neg(e) => -&e.eval(ell, n)?,
            Expr::Sum(v) => {
                let mut acc = Poly::zero(ell, n);
                for e in v {
                    acc = &acc + &e.eval(ell, n)?;
                }
                acc
            }
            Expr::Product(v) => {
                let mut acc = Poly::one(ell, n);
                for e in v {
                    acc = &acc * &e.eval(ell, n)?;
                }
                acc
            }
            Expr::Pow(e, k) => e.eval(ell, n)?.pow(*k),
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: sum context, 1: product factor, 2: power base
        let wrap = |f: &mut fmt::Formatter<'_>, need: bool, body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
            if need {
                f.write_str("(")?;
                body(f)?;
                f.write_str(")")
            } else {
                body(f)
            }
        };
        match self {
            Expr::Num(q) => {
                let frac = !q.is_integer();
                wrap(f, q.is_negative() || (frac && prec >= 3), &|f| {
                    if q.is_negative() {
                        f.write_str("-")?;
                    }
                    write!(f, "{}", q.abs())
                })
            }
            Expr::Sym(b, l) => {
                let parts: Vec<String> = l.parts().iter().map(ToString::to_string).collect();
                write!(f, "{}[{}]", b.letter(), parts.join(","))
            }
            Expr::Var(i, j) => write!(f, "x[{i},{j}]"),
            Expr::Neg(e) => wrap(f, prec >= 1, &|f| {
                f.write_str("-")?;
                e.fmt_prec(f, 1)
            }),
            Expr::Sum(v) => wrap(f, prec >= 1, &|f| {
                for (k, e) in v.iter().enumerate() {
                    match (k, e) {
                        (0, _) => e.fmt_prec(f, 0)?,
                        (_, Expr::Neg(inner)) => {
                            f.write_str(" - ")?;
                            inner.fmt_prec(f, 1)?
                        }
                        _ => {
                            f.write_str(" + ")?;
                            e.fmt_prec(f, 1)?
                        }
                    }
                }
                Ok(())
            }),
            Expr::Product(v) => wrap(f, prec >= 2, &|f| {
                for (k, e) in v.iter().enumerate() {
                    if k > 0 {
                        f.write_str("*")?;
                    }
                    e.fmt_prec(f, 2)?;
                }
                Ok(())
            }),
            Expr::Pow(e, k) => wrap(f, prec >= 3, &|f| {
                e.fmt_prec(f, 3)?;
                write!(f, "^{k}")
            }),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos, msg: msg.into() })
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<BigInt, ExprError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap())
    }

    fn small(&mut self) -> Result<usize, ExprError> {
        let at = self.pos;
        let v = self.uint()?;
        usize::try_from(v).map_err(|_| ExprError::Syntax { pos: at, msg: "number too large".into() })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = Vec::new();
        let first = if self.eat(b'-') { Expr::Neg(Box::new(self.term()?)) } else { self.term()? };
        terms.push(first);
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut factors = vec![self.power()?];
        while self.eat(b'*') {
            factors.push(self.power()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Product(factors) })
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let at = self.pos;
            let k = self.small()?;
            let k = u32::try_from(k).map_err(|_| ExprError::Syntax { pos: at, msg: "exponent too large".into() })?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn bracket_list(&mut self) -> Result<Vec<usize>, ExprError> {
        if !self.eat(b'[') {
            return self.err("expected '['");
        }
        let mut v = Vec::new();
        if self.eat(b']') {
            return Ok(v);
        }
        loop {
            v.push(self.small()?);
            if self.eat(b']') {
                return Ok(v);
            }
            if !self.eat(b',') {
                return self.err("expected ',' or ']'");
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let at = self.pos;
                    let den = self.uint()?;
                    if den.is_zero() {
                        return Err(ExprError::Syntax { pos: at, msg: "zero denominator".into() });
                    }
                    return Ok(Expr::Num(Q::new(num, den)));
                }
                Ok(Expr::Num(Q::from_integer(num)))
            }
            Some(b'x') => {
                self.pos += 1;
                let at = self.pos;
                let v = self.bracket_list()?;
                match v[..] {
                    [i, j] if i >= 1 && j >= 1 => Ok(Expr::Var(i, j)),
                    _ => Err(ExprError::Syntax { pos: at, msg: "expected x[i,j] with 1-based indices".into() }),
                }
            }
            Some(c) => {
                let Some(basis) = Basis::from_letter(c as char) else {
                    return self.err(&format!("unexpected '{}'", c as char));
                };
                self.pos += 1;
                let at = self.pos;
                let parts = self.bracket_list()?;
                let l = Partition::new(parts).map_err(|_| ExprError::Syntax {
                    pos: at,
                    msg: "parts must be positive and weakly decreasing".into(),
                })?;
                if l.is_empty() {
                    return Err(ExprError::Syntax { pos: at, msg: "empty partition".into() });
                }
                Ok(Expr::Sym(basis, l))
            }
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::polarization_module;
    use proptest::prelude::*;

    fn q(a: i64) -> Q {
        Q::from_integer(a.into())
    }

    #[test]
    fn parses_examples() {
        assert_eq!(Expr::parse("p[3]").unwrap(), Expr::Sym(Basis::PowerSum, Partition::new(vec![3]).unwrap()));
        let e = Expr::parse("m[2]+2*m[1,1]").unwrap();
        let p1 = Expr::parse("p[1]^2").unwrap();
        assert_eq!(e.eval(1, 4).unwrap(), p1.eval(1, 4).unwrap());
        let v = Expr::parse("x[1,1]*x[2,2]*x[3,3]").unwrap();
        assert_eq!(v.eval(3, 3).unwrap().len(), 1);
        assert!(v.eval(2, 3).is_err());
    }

    #[test]
    fn rationals_and_signs() {
        let e = Expr::parse("-3/2*p[2] - (p[1,1] - 1/3*e[2])").unwrap();
        assert_eq!(e.to_string(), "-3/2*p[2] - (p[1,1] - 1/3*e[2])");
        let f = e.eval(1, 3).unwrap();
        let x11 = Monomial::from_exponents(&[2, 0, 0]);
        assert_eq!(f.coeff(&x11), Some(&Q::new((-5).into(), 2.into())));
        let _ = q(0);
    }

    #[test]
    fn errors_have_positions() {
        for bad in ["p[3", "p[1,2]", "q[2]", "p[2] +", "x[0,1]", "2/0", "p[]"] {
            assert!(matches!(Expr::parse(bad), Err(ExprError::Syntax { .. })), "{bad}");
        }
        assert_eq!(Generator::parse("family:Z:3"), Err(ExprError::UnknownFamily("Z".into())));
        assert!(Generator::parse("family:A:x").is_err());
    }

    #[test]
    fn families() {
        let n = 3;
        assert_eq!(Generator::parse("family:A:2").unwrap().polys(1, n).unwrap().len(), 3);
        assert_eq!(Generator::parse("family:B:2").unwrap().polys(1, n).unwrap().len(), 3);
        assert_eq!(Generator::parse("family:C:2").unwrap().polys(1, n).unwrap().len(), 3);
        assert_eq!(Generator::parse("family:T:2").unwrap().polys(1, n).unwrap().len(), 6);
        let v = Generator::parse("vandermonde").unwrap();
        let m = polarization_module(&v.family(1, 3).unwrap(), 1, 3).unwrap();
        assert_eq!(m.dimension(), 6);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (1i64..20, 1i64..5).prop_map(|(a, b)| Expr::Num(Q::new(a.into(), b.into()))),
            (0usize..5, prop::collection::vec(1usize..4, 1..3)).prop_map(|(b, v)| {
                let basis = [Basis::Monomial, Basis::Elementary, Basis::Homogeneous, Basis::PowerSum, Basis::Schur][b];
                Expr::Sym(basis, Partition::from_unsorted(v))
            }),
            (1usize..3, 1usize..4).prop_map(|(i, j)| Expr::Var(i, j)),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Product),
                (inner, 1u32..4).prop_map(|(e, k)| Expr::Pow(Box::new(e), k)),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_round_trip(e in arb_expr()) {
            let once = Expr::parse(&e.to_string()).unwrap();
            prop_assert_eq!(Expr::parse(&once.to_string()).unwrap(), once.clone());
            prop_assert_eq!(once.eval(2, 3).unwrap(), e.eval(2, 3).unwrap());
        }
    }
}

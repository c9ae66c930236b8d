//! Integer-valued coefficient formulas in `n`, e.g. `binom(n+1,2)` or `n*(n+3)/2-1`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use polmod::Q;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad coefficient formula '{text}' at {pos}: {msg}")]
pub struct CoeffError {
    pub text: String,
    pub pos: usize,
    pub msg: String,
}

pub fn eval(text: &str, n: usize) -> Result<Q, CoeffError> {
    let mut p = P { s: text.as_bytes(), pos: 0, n, text };
    let v = p.sum()?;
    p.ws();
    if p.pos != p.s.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

struct P<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
    text: &'a str,
}

impl P<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, CoeffError> {
        Err(CoeffError { text: self.text.into(), pos: self.pos, msg: msg.into() })
    }

    fn ws(&mut self) {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Q, CoeffError> {
        let neg = self.eat(b'-');
        let mut v = self.product()?;
        if neg {
            v = -v;
        }
        loop {
            if self.eat(b'+') {
                v += self.product()?;
            } else if self.eat(b'-') {
                v -= self.product()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn product(&mut self) -> Result<Q, CoeffError> {
        let mut v = self.atom()?;
        loop {
            if self.eat(b'*') {
                v *= self.atom()?;
            } else if self.eat(b'/') {
                let d = self.atom()?;
                if d.is_zero() {
                    return self.err("division by zero");
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn atom(&mut self) -> Result<Q, CoeffError> {
        self.ws();
        if self.eat(b'(') {
            let v = self.sum()?;
            return if self.eat(b')') { Ok(v) } else { self.err("expected ')'") };
        }
        if self.s[self.pos..].starts_with(b"binom(") {
            self.pos += 6;
            let a = self.sum()?;
            if !self.eat(b',') {
                return self.err("expected ','");
            }
            let k = self.sum()?;
            if !self.eat(b')') {
                return self.err("expected ')'");
            }
            return Ok(binom(&a, &k));
        }
        if self.s.get(self.pos) == Some(&b'n') {
            self.pos += 1;
            return Ok(Q::from_integer(self.n.into()));
        }
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number, n, binom(..) or '('");
        }
        let v: BigInt = std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap();
        Ok(Q::from_integer(v))
    }
}

/// `a(a-1)...(a-k+1)/k!` for natural `k`; zero for negative `k`.
fn binom(a: &Q, k: &Q) -> Q {
    if !k.is_integer() || k < &Q::zero() {
        return Q::zero();
    }
    let mut out = Q::one();
    let mut i = Q::zero();
    while &i < k {
        out = out * (a - &i) / (&i + Q::one());
        i += Q::one();
    }
    out
}

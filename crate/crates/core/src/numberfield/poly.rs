// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monic polynomial with integer coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct MonicIntPoly {
    coeffs: Vec<i64>,
}

impl TryFrom<Vec<i64>> for MonicIntPoly {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        MonicIntPoly::new(v)
    }
}

impl From<MonicIntPoly> for Vec<i64> {
    fn from(p: MonicIntPoly) -> Self {
        p.coeffs
    }
}

impl MonicIntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidPolynomial("degree must be at least 1".into()));
        }
        if *coeffs.last().unwrap() != 1 {
            return Err(Error::InvalidPolynomial(
                "leading coefficient must be 1".into(),
            ));
        }
        Ok(MonicIntPoly { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients, constant term first.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> i64 {
        self.coeffs[0]
    }

    /// Accepts `"X^3 - 2*X^2 - 1"` or `"[-1, 0, -2, 1]"` (constant first).
    pub fn parse(text: &str) -> Result<Self> {
        MonicIntPoly::new(parse_int_poly(text)?)
    }

    pub fn eval_i128(&self, x: i128) -> Option<i128> {
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(x)?.checked_add(c as i128)?;
        }
        Some(acc)
    }

    pub(crate) fn to_qpoly(&self) -> QPoly {
        QPoly::from_ints(&self.coeffs)
    }

    /// Euclidean norm of the coefficient vector, rounded up.
    fn norm2_ceil(&self) -> i128 {
        let s: i128 = self.coeffs.iter().map(|&c| (c as i128) * (c as i128)).sum();
        let mut r = (s as f64).sqrt() as i128;
        while r * r < s {
            r += 1;
        }
        r
    }

    /// Decides irreducibility over the integers by exhaustive search for a
    /// monic factor of degree at most half the degree, with coefficients
    /// bounded by the Mignotte bound.
    pub fn is_irreducible(&self) -> bool {
        let d = self.degree();
        if d == 1 {
            return true;
        }
        let norm = self.norm2_ceil();
        let c0 = self.coeffs[0] as i128;
        if c0 == 0 {
            return false;
        }
        let divisors = divisors(c0.unsigned_abs());
        for m in 1..=d / 2 {
            // Mignotte: |g_i| <= C(m, i) * ||p||_2 for a factor g of degree m.
            let bounds: Vec<i128> = (0..m).map(|i| binom(m, i) * norm).collect();
            let mut g = vec![0i128; m + 1];
            g[m] = 1;
            for &dv in &divisors {
                for sign in [1i128, -1] {
                    g[0] = sign * dv as i128;
                    if search_factor(&self.coeffs, &mut g, 1, &bounds) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn search_factor(p: &[i64], g: &mut Vec<i128>, idx: usize, bounds: &[i128]) -> bool {
    let m = g.len() - 1;
    if idx == m {
        return divides_exactly(p, g);
    }
    let b = bounds[idx];
    for c in -b..=b {
        g[idx] = c;
        if search_factor(p, g, idx + 1, bounds) {
            return true;
        }
    }
    false
}

/// Exact division test of `p` by the monic integer polynomial `g`.
fn divides_exactly(p: &[i64], g: &[i128]) -> bool {
    let mut rem: Vec<i128> = p.iter().map(|&c| c as i128).collect();
    let m = g.len() - 1;
    let n = rem.len() - 1;
    if n < m {
        return false;
    }
    for k in (0..=n - m).rev() {
        let q = rem[k + m];
        if q == 0 {
            continue;
        }
        for (i, &gi) in g.iter().enumerate() {
            match gi.checked_mul(q).and_then(|v| rem[k + i].checked_sub(v)) {
                Some(v) => rem[k + i] = v,
                None => return false,
            }
        }
    }
    rem.iter().all(|&c| c == 0)
}

fn divisors(n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut i = 1u128;
    while i * i <= n {
        if n.is_multiple_of(i) {
            out.push(i);
            if i * i != n {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

fn binom(n: usize, k: usize) -> i128 {
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i as i128 + 1);
    }
    r
}

/// Integer coefficients, constant first, of a polynomial written either
/// symbolically in `X` or as a bracketed list.
pub fn parse_int_poly(text: &str) -> Result<Vec<i64>> {
    let t = text.trim();
    if t.starts_with('[') {
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("unbalanced brackets in {t:?}")))?;
        return inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad coefficient {c:?}: {e}")))
            })
            .collect();
    }
    parse_symbolic(t)
}

fn parse_symbolic(t: &str) -> Result<Vec<i64>> {
    let s: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut coeffs: Vec<i64> = Vec::new();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1i64, b),
            None => (1i64, term.strip_prefix('+').unwrap_or(&term)),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {t:?}")));
        }
        let (coef, exp) = match body.find(['X', 'x']) {
            None => (
                body.parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad term {body:?}: {e}")))?,
                0usize,
            ),
            Some(pos) => {
                let c = body[..pos].trim_end_matches('*');
                let c = if c.is_empty() {
                    1
                } else {
                    c.parse::<i64>()
                        .map_err(|e| Error::Parse(format!("bad coefficient {c:?}: {e}")))?
                };
                let rest = &body[pos + 1..];
                let e = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(|| Error::Parse(format!("bad exponent in {body:?}")))?
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad exponent in {body:?}: {e}")))?
                };
                (c, e)
            }
        };
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, 0);
        }
        coeffs[exp] += sign * coef;
    }
    Ok(coeffs)
}

impl fmt::Display for MonicIntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let neg = c < 0;
            let a = c.unsigned_abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (e, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "X")?,
                (1, _) => write!(f, "{a}*X")?,
                (_, 1) => write!(f, "X^{e}")?,
                _ => write!(f, "{a}*X^{e}")?,
            }
        }
        Ok(())
    }
}

/// Dense polynomial over the rationals, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn from_ints(c: &[i64]) -> Self {
        let mut p = QPoly(
            c.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        );
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn derivative(&self) -> Self {
        let mut p = QPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        );
        p.normalize();
        p
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.div_rem(d).1
    }

    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.0.clone();
        let dd = d.0.len() - 1;
        let lead = d.0[dd].clone();
        if r.len() <= dd {
            return (QPoly(vec![]), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (i, di) in d.0.iter().enumerate() {
                    r[k + i] = &r[k + i] - &c * di;
                }
            }
            q[k] = c;
        }
        let mut qp = QPoly(q);
        qp.normalize();
        let mut rp = QPoly(r);
        rp.normalize();
        (qp, rp)
    }

    pub fn monic(&self) -> QPoly {
        let lead = self.0.last().cloned().unwrap_or_else(BigRational::one);
        QPoly(self.0.iter().map(|c| c / &lead).collect())
    }

    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r;
        }
        if x.is_zero() {
            x
        } else {
            x.monic()
        }
    }

    /// Square-free part `p / gcd(p, p')`, made monic.
    pub fn squarefree(&self) -> QPoly {
        let g = QPoly::gcd(self, &self.derivative());
        if g.degree() == Some(0) || g.is_zero() {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }
}

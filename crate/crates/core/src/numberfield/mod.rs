// SPDX-License-Identifier: Apache-2.0

//! Exact arithmetic in `Z[β]` with certified numeric embeddings.

mod ball;
mod element;
mod poly;
mod roots;

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use ball::Enclosure;
pub use element::{ring_mul, FieldElement};
pub(crate) use element::common_denominator;
pub use poly::{parse_int_poly, MonicIntPoly};

pub(crate) use ball::{rat, rat_to_f64, sqrt_lower, sqrt_upper};
pub(crate) use poly::QPoly;

use crate::error::{Error, Result};

pub const START_PRECISION: u32 = roots::START_BITS;
pub const MAX_PRECISION: u32 = roots::MAX_BITS;

/// The ring `Z[β]` for `β` a root of a monic integer polynomial, together with
/// certified enclosures of all distinct roots.
#[derive(Debug)]
pub struct NumberField {
    minimal_poly: MonicIntPoly,
    qpoly: QPoly,
    embeddings: Vec<Enclosure>,
    roots_f64: Vec<Complex64>,
    expanding_index: usize,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minimal_poly == other.minimal_poly
    }
}

impl Eq for NumberField {}

/// Outcome of [`classify_polynomial`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyClass {
    pub irreducible: bool,
    pub pisot: bool,
    pub unit: bool,
}

/// Isolates every distinct root of `p` into a certified enclosure of radius
/// about `2^-precision`.
pub fn make_field(p: &MonicIntPoly, precision: u32) -> Result<Arc<NumberField>> {
    let qpoly = p.to_qpoly();
    let embeddings = roots::isolate(&qpoly, precision.clamp(START_PRECISION, MAX_PRECISION))?;
    let roots_f64: Vec<Complex64> = embeddings.iter().map(|e| e.center_f64()).collect();
    let mut expanding_index = 0;
    for i in 1..embeddings.len() {
        let a = roots_f64[i].norm();
        let b = roots_f64[expanding_index].norm();
        // Prefer the real root when moduli tie numerically.
        if a > b * (1.0 + 1e-12) {
            expanding_index = i;
        }
    }
    Ok(Arc::new(NumberField {
        minimal_poly: p.clone(),
        qpoly,
        embeddings,
        roots_f64,
        expanding_index,
    }))
}

/// Runs `f` at precision 64, 128, … until it returns a decision; fails with
/// [`Error::Indecisive`] once the 4096-bit cap is reached.
pub fn decide<T>(mut f: impl FnMut(u32) -> Option<T>) -> Result<T> {
    let mut bits = START_PRECISION;
    loop {
        if let Some(v) = f(bits) {
            return Ok(v);
        }
        if bits >= MAX_PRECISION {
            return Err(Error::Indecisive(MAX_PRECISION));
        }
        bits = (bits * 2).min(MAX_PRECISION);
    }
}

/// Decides irreducibility over the integers, the Pisot property and the unit
/// property of `p`.
pub fn classify_polynomial(p: &MonicIntPoly) -> PolyClass {
    let irreducible = p.is_irreducible();
    let unit = p.constant_term().abs() == 1;
    PolyClass {
        irreducible,
        pisot: is_pisot(p),
        unit,
    }
}

fn is_pisot(p: &MonicIntPoly) -> bool {
    let q = p.to_qpoly();
    let sf = q.squarefree();
    if sf.degree() != Some(p.degree()) {
        return false;
    }
    if p.eval_i128(1) == Some(0) || p.eval_i128(-1) == Some(0) {
        return false;
    }
    let Ok(field) = make_field(p, START_PRECISION) else {
        return false;
    };
    let one = BigRational::one();
    let res = decide(|bits| {
        let mut above = Vec::new();
        for i in 0..field.embeddings.len() {
            let e = field.root_enclosure(i, bits);
            match e.cmp_modulus(&one)? {
                Ordering::Greater => above.push(i),
                Ordering::Less => {}
                Ordering::Equal => return Some(false),
            }
        }
        if above.len() != 1 {
            return Some(false);
        }
        let e = field.root_enclosure(above[0], bits);
        Some(e.is_real_centered() && e.cmp_re(&one)? == Ordering::Greater)
    });
    res.unwrap_or(false)
}

impl NumberField {
    pub fn minimal_poly(&self) -> &MonicIntPoly {
        &self.minimal_poly
    }

    pub fn degree(&self) -> usize {
        self.minimal_poly.degree()
    }

    pub fn embeddings(&self) -> &[Enclosure] {
        &self.embeddings
    }

    pub fn num_embeddings(&self) -> usize {
        self.embeddings.len()
    }

    pub fn expanding_index(&self) -> usize {
        self.expanding_index
    }

    /// Whether embedding `i` is real (its enclosure is centered on the real
    /// axis and isolated from its mirror image).
    pub fn is_real(&self, i: usize) -> bool {
        self.embeddings[i].is_real_centered()
    }

    /// Index of the complex-conjugate embedding of `i` (itself if real).
    pub fn conjugate_of(&self, i: usize) -> usize {
        if self.is_real(i) {
            return i;
        }
        let c = self.embeddings[i].conj();
        self.embeddings
            .iter()
            .position(|e| *e.re() == *c.re() && *e.im() == *c.im())
            .unwrap_or(i)
    }

    /// All embeddings except the expanding one.
    pub fn contracting_indices(&self) -> Vec<usize> {
        (0..self.embeddings.len())
            .filter(|&i| i != self.expanding_index)
            .collect()
    }

    /// Contracting embeddings up to complex conjugation: real ones, and for
    /// each conjugate pair the member with positive imaginary part.
    pub fn contracting_representatives(&self) -> Vec<usize> {
        self.contracting_indices()
            .into_iter()
            .filter(|&i| self.is_real(i) || self.roots_f64[i].im > 0.0)
            .collect()
    }

    /// Certified enclosure of the `i`-th root refined to about `2^-bits`.
    pub fn root_enclosure(&self, i: usize, bits: u32) -> Enclosure {
        roots::refine(&self.qpoly, &self.embeddings[i], bits)
    }

    pub fn root_f64(&self, i: usize) -> Complex64 {
        self.roots_f64[i]
    }

    /// Whether every embedding other than the expanding one is certified to
    /// have modulus below one.
    pub fn is_pisot_field(&self) -> Result<bool> {
        let one = BigRational::one();
        decide(|bits| {
            for i in 0..self.embeddings.len() {
                let e = self.root_enclosure(i, bits);
                let c = e.cmp_modulus(&one)?;
                let want = if i == self.expanding_index {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
                if c != want {
                    return Some(false);
                }
            }
            Some(true)
        })
    }

    pub(crate) fn reduce(&self, mut c: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree();
        let p = self.minimal_poly.coeffs();
        while c.len() > d {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = c.len() - d;
            for (i, &pi) in p[..d].iter().enumerate() {
                c[k + i] -= &top * pi;
            }
        }
        c.resize(d, BigInt::zero());
        c
    }
}

impl Serialize for NumberField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("NumberField", 3)?;
        st.serialize_field("minimal_poly", &self.minimal_poly.to_string())?;
        st.serialize_field("coefficients", self.minimal_poly.coeffs())?;
        let roots: Vec<[f64; 3]> = self
            .embeddings
            .iter()
            .map(|e| {
                let c = e.center_f64();
                [c.re, c.im, e.radius_f64()]
            })
            .collect();
        st.serialize_field("roots", &roots)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> MonicIntPoly {
        MonicIntPoly::new(c.to_vec()).unwrap()
    }

    #[test]
    fn linear_field() {
        let f = make_field(&poly(&[-2, 1]), 64).unwrap();
        assert_eq!(f.num_embeddings(), 1);
        assert_eq!(f.root_f64(0).re, 2.0);
    }

    #[test]
    fn classify_examples() {
        let c = classify_polynomial(&poly(&[-1, 0, 1]));
        assert!(!c.irreducible);
        let c = classify_polynomial(&poly(&[-1, -1, 1]));
        assert!(c.irreducible && c.pisot && c.unit);
        let c = classify_polynomial(&poly(&[-1, -1, -3, 1]));
        assert!(c.irreducible && c.pisot && c.unit);
        // X^2 - 2 has a conjugate of modulus > 1.
        assert!(!classify_polynomial(&poly(&[-2, 0, 1])).pisot);
        // X^2 + 1 lies on the unit circle.
        assert!(!classify_polynomial(&poly(&[1, 0, 1])).pisot);
    }

    #[test]
    fn expanding_root_is_largest() {
        let f = make_field(&poly(&[-1, 0, -5, 1]), 64).unwrap();
        let e = f.root_f64(f.expanding_index());
        assert!(e.re >= 5.0 && e.re <= 5.0 + 2.0 / 5.0);
        for i in f.contracting_indices() {
            let m = f.root_f64(i).norm();
            assert!(m > 1.0 / (5.0f64 + 0.4).sqrt() && m < 1.0 / 5f64.sqrt());
        }
        assert!(f.is_pisot_field().unwrap());
        assert_eq!(f.contracting_representatives().len(), 1);
    }
}

// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::Serialize;

use super::ball::Enclosure;
use super::NumberField;
use crate::error::{Error, Result};

/// Element of `Z[β]` in the power basis `1, β, …, β^{d-1}`.
#[derive(Clone)]
pub struct FieldElement {
    coords: Vec<BigInt>,
    field: Arc<NumberField>,
}

impl FieldElement {
    /// Builds an element from coordinates of any length, reducing powers of
    /// `β` at or above the degree.
    pub fn new(field: &Arc<NumberField>, coords: Vec<BigInt>) -> Self {
        FieldElement {
            coords: field.reduce(coords),
            field: field.clone(),
        }
    }

    pub fn from_i64s(field: &Arc<NumberField>, coords: &[i64]) -> Self {
        FieldElement::new(field, coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        FieldElement::from_i64s(field, &[n])
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        FieldElement::from_int(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        FieldElement::from_int(field, 1)
    }

    /// The generator `β`.
    pub fn beta(field: &Arc<NumberField>) -> Self {
        FieldElement::from_i64s(field, &[0, 1])
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn to_i64_coords(&self) -> Result<Vec<i64>> {
        self.coords
            .iter()
            .map(|c| c.to_i64().ok_or(Error::Overflow("field coordinate exceeds 64 bits")))
            .collect()
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(FieldElement {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
            field: self.field.clone(),
        })
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(FieldElement {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
            field: self.field.clone(),
        })
    }

    pub fn scale(&self, k: &BigInt) -> FieldElement {
        FieldElement {
            coords: self.coords.iter().map(|c| c * k).collect(),
            field: self.field.clone(),
        }
    }

    pub fn pow(&self, mut n: u32) -> FieldElement {
        let mut base = self.clone();
        let mut acc = FieldElement::one(&self.field);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Matrix of multiplication by `self`; column `j` holds `self · β^j`.
    pub fn mul_matrix(&self) -> Vec<Vec<BigInt>> {
        let d = self.coords.len();
        let mut cols = Vec::with_capacity(d);
        let mut cur = self.clone();
        let beta = FieldElement::beta(&self.field);
        for _ in 0..d {
            cols.push(cur.coords.clone());
            cur = &cur * &beta;
        }
        (0..d)
            .map(|i| (0..d).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    /// Coordinates of `1/self` in the rational power basis; `None` for zero.
    pub fn inverse_rational(&self) -> Option<Vec<BigRational>> {
        let m = self.mul_matrix();
        let d = m.len();
        let mut rhs = vec![BigRational::zero(); d];
        rhs[0] = BigRational::one();
        solve_rational(&m, &rhs)
    }

    /// Inverse inside `Z[β]`; fails when the inverse is not integral.
    pub fn inverse(&self) -> Result<FieldElement> {
        let inv = self
            .inverse_rational()
            .ok_or_else(|| Error::InvalidArgument("zero has no inverse".into()))?;
        if inv.iter().any(|c| !c.is_integer()) {
            return Err(Error::InvalidArgument(format!(
                "{self} is not a unit of the ring"
            )));
        }
        Ok(FieldElement {
            coords: inv.into_iter().map(|c| c.to_integer()).collect(),
            field: self.field.clone(),
        })
    }

    /// Certified enclosure of the image under embedding `index`, with radius
    /// of order `2^-bits`.
    pub fn evaluate(&self, index: usize, bits: u32) -> Enclosure {
        if self.is_zero() {
            return Enclosure::zero();
        }
        let mag = self.coords.iter().map(|c| c.bits()).max().unwrap_or(0) as u32;
        let root_mag = self.field.root_f64(index).norm().max(1.0).log2().ceil() as u32;
        let work = bits + 32 + mag + root_mag * self.coords.len() as u32;
        let root = self.field.root_enclosure(index, work);
        let mut acc = Enclosure::zero();
        for c in self.coords.iter().rev() {
            acc = acc.mul(&root).add(&Enclosure::from_int(c)).normalize(work);
        }
        acc
    }

    /// Floating-point image under embedding `index`.
    pub fn evaluate_f64(&self, index: usize) -> Complex64 {
        let z = self.field.root_f64(index);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coords.iter().rev() {
            acc = acc * z + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }
}

/// Product in `Z[β]`; errors when the operands live in different fields.
pub fn ring_mul(x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
    x.same_field(y)?;
    let d = x.coords.len();
    let mut prod = vec![BigInt::zero(); 2 * d - 1];
    for (i, a) in x.coords.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.coords.iter().enumerate() {
            prod[i + j] += a * b;
        }
    }
    Ok(FieldElement {
        coords: x.field.reduce(prod),
        field: x.field.clone(),
    })
}

/// Solves `m x = rhs` over the rationals; `None` if `m` is singular.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve_rational(m: &[Vec<BigInt>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let d = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut v: Vec<BigRational> = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            v.push(r.clone());
            v
        })
        .collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = &*v / &p;
        }
        for r in 0..d {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=d {
                    let t = &a[col][c] * &f;
                    a[r][c] = &a[r][c] - t;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[d].clone()).collect())
}

/// Least positive integer clearing the denominators of `v`.
pub(crate) fn common_denominator(v: &[BigRational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.try_add(rhs).expect("elements of different fields")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("elements of different fields")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        ring_mul(self, rhs).expect("elements of different fields")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            coords: self.coords.iter().map(|c| -c).collect(),
            field: self.field.clone(),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coords.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let a = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = a.is_one();
            match e {
                0 => write!(f, "{a}")?,
                1 if unit => write!(f, "β")?,
                1 => write!(f, "{a}β")?,
                _ if unit => write!(f, "β^{e}")?,
                _ => write!(f, "{a}β^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for c in &self.coords {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{make_field, MonicIntPoly};

    fn trib() -> Arc<NumberField> {
        make_field(&MonicIntPoly::new(vec![-1, -1, -1, 1]).unwrap(), 64).unwrap()
    }

    #[test]
    fn ring_mul_examples() {
        let f = trib();
        let b = FieldElement::beta(&f);
        let b2 = &b * &b;
        assert_eq!(&b2 * &b, FieldElement::from_i64s(&f, &[1, 1, 1]));
        let x = FieldElement::from_i64s(&f, &[3, -2, 5]);
        assert_eq!(&FieldElement::one(&f) * &x, x);
        let one = FieldElement::one(&f);
        assert_eq!(&(&b - &one) * &(&b + &one), FieldElement::from_i64s(&f, &[-1, 0, 1]));
    }

    #[test]
    fn mixed_fields_rejected() {
        let f = trib();
        let g = make_field(&MonicIntPoly::new(vec![-1, -1, 1]).unwrap(), 64).unwrap();
        assert_eq!(
            ring_mul(&FieldElement::one(&f), &FieldElement::one(&g)),
            Err(Error::FieldMismatch)
        );
    }

    #[test]
    fn unit_inverse() {
        let f = trib();
        let b = FieldElement::beta(&f);
        let inv = b.inverse().unwrap();
        assert_eq!(&inv * &b, FieldElement::one(&f));
        assert!(FieldElement::from_int(&f, 2).inverse().is_err());
    }

    #[test]
    fn evaluation_contains_value() {
        let g = make_field(&MonicIntPoly::new(vec![-1, -1, 1]).unwrap(), 64).unwrap();
        let b = FieldElement::beta(&g);
        let e = b.evaluate(g.expanding_index(), 64);
        let phi = BigRational::from_float(1.618_033_988_749_895_f64).unwrap();
        assert!((e.center_f64().re - 1.618_033_988_7).abs() < 1e-10);
        assert!(e.radius_f64() < 1e-15);
        let _ = phi;
        assert!(FieldElement::zero(&g).evaluate(0, 64).is_exact_zero());
    }

    #[test]
    fn display() {
        let f = trib();
        assert_eq!(FieldElement::from_i64s(&f, &[-1, 2, -1]).to_string(), "-β^2 + 2β - 1");
    }
}

// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Certified complex disk: the true value lies within `radius` of `re + i im`.
///
/// Centers are kept on the dyadic grid `2^-precision`; every rounding error is
/// folded into the radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    re: BigRational,
    im: BigRational,
    radius: BigRational,
    precision: u32,
}

pub(crate) fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Nearest point of the grid `2^-bits`.
pub(crate) fn round_dyadic(q: &BigRational, bits: u32) -> BigRational {
    let scale = pow2(bits);
    let scaled = q * BigRational::from_integer(scale.clone());
    let n = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor();
    BigRational::new(n.to_integer(), scale)
}

/// Smallest grid point of `2^-bits` that is `>= q`.
pub(crate) fn ceil_dyadic(q: &BigRational, bits: u32) -> BigRational {
    let scale = pow2(bits);
    let n = (q * BigRational::from_integer(scale.clone())).ceil();
    BigRational::new(n.to_integer(), scale)
}

/// Dyadic upper bound of `sqrt(q)` within about `2^-bits`.
pub(crate) fn sqrt_upper(q: &BigRational, bits: u32) -> BigRational {
    if !q.is_positive() {
        return BigRational::zero();
    }
    let scale4 = BigRational::from_integer(pow2(2 * bits));
    let m = (q * scale4).ceil().to_integer();
    let mut s = m.sqrt();
    if &s * &s < m {
        s += 1;
    }
    BigRational::new(s, pow2(bits))
}

/// Dyadic lower bound of `sqrt(q)` within about `2^-bits`.
pub(crate) fn sqrt_lower(q: &BigRational, bits: u32) -> BigRational {
    if !q.is_positive() {
        return BigRational::zero();
    }
    let scale4 = BigRational::from_integer(pow2(2 * bits));
    let m = (q * scale4).floor().to_integer();
    BigRational::new(m.sqrt(), pow2(bits))
}

pub(crate) fn rat_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to shifting for very large numerators or denominators.
    let n = q.numer();
    let d = q.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = (nb - db - 60).max(0) as usize;
    let sh = (db - nb + 60).max(0) as usize;
    let num = (n << sh) / (d << shift);
    let v = num.to_f64().unwrap_or(f64::NAN);
    v * 2f64.powi(shift as i32 - sh as i32)
}

impl Enclosure {
    pub fn exact(re: BigRational, im: BigRational) -> Self {
        Enclosure {
            re,
            im,
            radius: BigRational::zero(),
            precision: 0,
        }
    }

    pub fn from_int(n: &BigInt) -> Self {
        Enclosure::exact(BigRational::from_integer(n.clone()), BigRational::zero())
    }

    pub fn zero() -> Self {
        Enclosure::exact(BigRational::zero(), BigRational::zero())
    }

    pub(crate) fn new(re: BigRational, im: BigRational, radius: BigRational, precision: u32) -> Self {
        Enclosure {
            re,
            im,
            radius,
            precision,
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn center_f64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn radius_f64(&self) -> f64 {
        rat_to_f64(&self.radius)
    }

    /// True when the enclosure is centered on the real axis.
    pub fn is_real_centered(&self) -> bool {
        self.im.is_zero()
    }

    fn abs_center_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Cheap upper bound of `|center|`.
    fn abs_center_upper_l1(&self) -> BigRational {
        self.re.abs() + self.im.abs()
    }

    /// Certified upper bound of the modulus of every point in the disk.
    pub fn modulus_upper(&self) -> BigRational {
        let bits = self.precision.max(64);
        sqrt_upper(&self.abs_center_sq(), bits) + &self.radius
    }

    /// Certified lower bound of the modulus of every point in the disk.
    pub fn modulus_lower(&self) -> BigRational {
        let bits = self.precision.max(64);
        let v = sqrt_lower(&self.abs_center_sq(), bits) - &self.radius;
        if v.is_negative() {
            BigRational::zero()
        } else {
            v
        }
    }

    /// Compares the modulus of the enclosed value with `t >= 0`.
    /// `None` when the disk straddles the circle of radius `t`.
    pub fn cmp_modulus(&self, t: &BigRational) -> Option<Ordering> {
        let c2 = self.abs_center_sq();
        if t > &self.radius {
            let lo = t - &self.radius;
            if c2 < &lo * &lo {
                return Some(Ordering::Less);
            }
        }
        let hi = t + &self.radius;
        if c2 > &hi * &hi {
            return Some(Ordering::Greater);
        }
        if self.radius.is_zero() && c2 == t * t {
            return Some(Ordering::Equal);
        }
        None
    }

    /// Compares the real part with `t`; `None` when undecided.
    pub fn cmp_re(&self, t: &BigRational) -> Option<Ordering> {
        if &self.re - &self.radius > *t {
            Some(Ordering::Greater)
        } else if &self.re + &self.radius < *t {
            Some(Ordering::Less)
        } else if self.radius.is_zero() {
            Some(self.re.cmp(t))
        } else {
            None
        }
    }

    /// Whether the point `(re, im)` lies in the closed disk.
    pub fn contains(&self, re: &BigRational, im: &BigRational) -> bool {
        let dr = &self.re - re;
        let di = &self.im - im;
        &dr * &dr + &di * &di <= &self.radius * &self.radius
    }

    /// Whether `other` lies entirely inside `self`.
    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        if other.radius > self.radius {
            return false;
        }
        let dr = &self.re - &other.re;
        let di = &self.im - &other.im;
        let slack = &self.radius - &other.radius;
        &dr * &dr + &di * &di <= &slack * &slack
    }

    /// Whether the two closed disks are certainly disjoint.
    pub fn disjoint(&self, other: &Enclosure) -> bool {
        let dr = &self.re - &other.re;
        let di = &self.im - &other.im;
        let s = &self.radius + &other.radius;
        &dr * &dr + &di * &di > &s * &s
    }

    pub fn conj(&self) -> Enclosure {
        Enclosure {
            re: self.re.clone(),
            im: -&self.im,
            radius: self.radius.clone(),
            precision: self.precision,
        }
    }

    /// Rounds the center to the grid `2^-bits` and the radius upward.
    pub(crate) fn normalize(mut self, bits: u32) -> Enclosure {
        let re = round_dyadic(&self.re, bits);
        let im = round_dyadic(&self.im, bits);
        let err = (&self.re - &re).abs() + (&self.im - &im).abs();
        self.radius = ceil_dyadic(&(&self.radius + err), bits);
        self.re = re;
        self.im = im;
        self.precision = bits;
        self
    }

    pub(crate) fn add(&self, o: &Enclosure) -> Enclosure {
        Enclosure {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            radius: &self.radius + &o.radius,
            precision: self.precision.max(o.precision),
        }
    }

    pub(crate) fn mul(&self, o: &Enclosure) -> Enclosure {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        let radius = self.abs_center_upper_l1() * &o.radius
            + o.abs_center_upper_l1() * &self.radius
            + &self.radius * &o.radius;
        Enclosure {
            re,
            im,
            radius,
            precision: self.precision.max(o.precision),
        }
    }

    pub(crate) fn scale_int(&self, k: &BigInt) -> Enclosure {
        let kq = BigRational::from_integer(k.clone());
        Enclosure {
            re: &self.re * &kq,
            im: &self.im * &kq,
            radius: &self.radius * kq.abs(),
            precision: self.precision,
        }
    }

    /// Ball product followed by rounding at `bits`.
    pub fn mul_rounded(&self, o: &Enclosure, bits: u32) -> Enclosure {
        self.mul(o).normalize(bits)
    }

    pub fn add_rounded(&self, o: &Enclosure, bits: u32) -> Enclosure {
        self.add(o).normalize(bits)
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure {
            re: -&self.re,
            im: -&self.im,
            radius: self.radius.clone(),
            precision: self.precision,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.radius.is_zero() && self.re.is_zero() && self.im.is_zero()
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.center_f64();
        write!(f, "({:.12}{:+.12}i ± {:.3e})", c.re, c.im, self.radius_f64())
    }
}

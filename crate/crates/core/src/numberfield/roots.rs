// SPDX-License-Identifier: Apache-2.0

//! Certified isolation of the distinct complex roots of a rational polynomial.
//!
//! Real roots are counted with a Sturm sequence. Floating-point approximations
//! of all roots are refined by Newton steps in exact dyadic arithmetic, and each
//! approximation `z` is certified by the disk of radius `n |p(z)| / |p'(z)|`,
//! which always contains a root. Once the `n` disks are pairwise disjoint each
//! holds exactly one root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ball::{pow2, rat, round_dyadic, sqrt_upper, Enclosure};
use super::poly::QPoly;
use crate::error::{Error, Result};

pub(crate) const MAX_BITS: u32 = 4096;
pub(crate) const START_BITS: u32 = 64;

#[cfg(test)]
fn sign_at(p: &QPoly, x: &BigRational) -> i32 {
    let v = p.eval(x);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_at_infinity(p: &QPoly, positive: bool) -> i32 {
    let d = p.degree().unwrap_or(0);
    let lead = p.0.last().map(|c| c.is_positive()).unwrap_or(false);
    let s = if lead { 1 } else { -1 };
    if positive || d.is_multiple_of(2) {
        s
    } else {
        -s
    }
}

pub(crate) struct Sturm(Vec<QPoly>);

impl Sturm {
    pub fn new(p: &QPoly) -> Sturm {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(QPoly(r.0.iter().map(|c| -c).collect()));
        }
        Sturm(seq)
    }

    fn variations(signs: impl Iterator<Item = i32>) -> usize {
        let mut last = 0;
        let mut v = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    /// Number of distinct real roots in `(a, b]`.
    #[cfg(test)]
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        let va = Self::variations(self.0.iter().map(|p| sign_at(p, a)));
        let vb = Self::variations(self.0.iter().map(|p| sign_at(p, b)));
        va.saturating_sub(vb)
    }

    pub fn count_all(&self) -> usize {
        let lo = Self::variations(self.0.iter().map(|p| sign_at_infinity(p, false)));
        let hi = Self::variations(self.0.iter().map(|p| sign_at_infinity(p, true)));
        lo.saturating_sub(hi)
    }
}

fn eval_c(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

/// Simultaneous root approximation (Aberth iteration) for a monic polynomial.
fn aberth(p: &[Complex64], seed: u64) -> Vec<Complex64> {
    let n = p.len() - 1;
    let bound = 1.0
        + p[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let r0 = bound.clamp(1e-3, 1e6) * 0.5 + 0.1;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4 + seed as f64 * 0.37;
            Complex64::from_polar(r0, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, dv) = eval_c(p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += Complex64::new(1.0, 0.0) / (z[i] - z[j]);
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn cx(re: &BigRational, im: &BigRational) -> (BigRational, BigRational) {
    (re.clone(), im.clone())
}

fn eval_exact(p: &QPoly, re: &BigRational, im: &BigRational) -> ((BigRational, BigRational), (BigRational, BigRational)) {
    let mut v = (BigRational::zero(), BigRational::zero());
    let mut dv = (BigRational::zero(), BigRational::zero());
    for c in p.0.iter().rev() {
        // dv = dv * z + v
        let ndr = &dv.0 * re - &dv.1 * im + &v.0;
        let ndi = &dv.0 * im + &dv.1 * re + &v.1;
        dv = (ndr, ndi);
        let nvr = &v.0 * re - &v.1 * im + c;
        let nvi = &v.0 * im + &v.1 * re;
        v = (nvr, nvi);
    }
    (v, dv)
}

/// One Newton step from `(re, im)` rounded to `bits`, and the certified radius
/// `n |p(z)| / |p'(z)|` at the starting point.
fn newton_step(p: &QPoly, re: &BigRational, im: &BigRational, bits: u32) -> Option<(BigRational, BigRational, BigRational)> {
    let n = p.degree().unwrap_or(0) as i64;
    let ((vr, vi), (dr, di)) = eval_exact(p, re, im);
    let dd = &dr * &dr + &di * &di;
    if dd.is_zero() {
        return None;
    }
    // v / dv = v * conj(dv) / |dv|^2
    let qr = (&vr * &dr + &vi * &di) / &dd;
    let qi = (&vi * &dr - &vr * &di) / &dd;
    let vv = &vr * &vr + &vi * &vi;
    let rad = sqrt_upper(&(vv / dd), bits + 8) * rat(n);
    let nr = round_dyadic(&(re - qr), bits);
    let ni = round_dyadic(&(im - qi), bits);
    Some((nr, ni, rad))
}

fn certify(p: &QPoly, re: &BigRational, im: &BigRational, bits: u32) -> Option<Enclosure> {
    let n = p.degree().unwrap_or(0) as i64;
    let ((vr, vi), (dr, di)) = eval_exact(p, re, im);
    let dd = &dr * &dr + &di * &di;
    if dd.is_zero() {
        return None;
    }
    let vv = &vr * &vr + &vi * &vi;
    let rad = sqrt_upper(&(vv / dd), bits + 8) * rat(n);
    let rad = super::ball::ceil_dyadic(&rad, bits + 8);
    let (r, i) = cx(re, im);
    Some(Enclosure::new(r, i, rad, bits))
}

/// Refines an approximate root by Newton steps until the certified radius is
/// below `2^-bits` or progress stalls.
fn refine_point(p: &QPoly, mut re: BigRational, mut im: BigRational, real: bool, bits: u32) -> Option<Enclosure> {
    let target = BigRational::new(BigInt::one(), pow2(bits));
    let work = bits + 16;
    let mut best: Option<Enclosure> = None;
    for _ in 0..(2 * bits.ilog2() as usize + 40) {
        let (nr, ni, rad) = newton_step(p, &re, &im, work)?;
        let enc = certify(p, &re, &im, work)?;
        let better = best.as_ref().is_none_or(|b| enc.radius() < b.radius());
        if better {
            best = Some(enc);
        }
        if rad <= target {
            break;
        }
        re = nr;
        im = if real { BigRational::zero() } else { ni };
    }
    best
}

/// Certified enclosures of all distinct roots of `p`, real roots first in
/// increasing order, then complex pairs (positive imaginary part first).
pub(crate) fn isolate(p: &QPoly, bits: u32) -> Result<Vec<Enclosure>> {
    let p = p.squarefree();
    let n = p.degree().ok_or_else(|| Error::InvalidPolynomial("zero polynomial".into()))?;
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        let root = -&p.0[0] / &p.0[1];
        return Ok(vec![Enclosure::exact(root, BigRational::zero())]);
    }
    let sturm = Sturm::new(&p);
    let n_real = sturm.count_all();
    if !(n - n_real).is_multiple_of(2) {
        return Err(Error::RootIsolation {
            bits,
            reason: "inconsistent real root count".into(),
        });
    }
    let coeffs_f: Vec<Complex64> = p
        .0
        .iter()
        .map(|c| Complex64::new(super::ball::rat_to_f64(c), 0.0))
        .collect();
    let mut last_reason = String::new();
    for seed in 0..4u64 {
        let mut approx = aberth(&coeffs_f, seed);
        approx.sort_by(|a, b| a.im.abs().partial_cmp(&b.im.abs()).unwrap_or(std::cmp::Ordering::Equal));
        let mut reals: Vec<f64> = approx[..n_real].iter().map(|z| z.re).collect();
        reals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mut uppers: Vec<Complex64> = approx[n_real..]
            .iter()
            .filter(|z| z.im > 0.0)
            .copied()
            .collect();
        if uppers.len() != (n - n_real) / 2 {
            last_reason = "approximations do not pair into conjugates".into();
            continue;
        }
        uppers.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap_or(std::cmp::Ordering::Equal));
        let mut prec = bits.max(START_BITS);
        loop {
            let mut encs = Vec::with_capacity(n);
            let mut ok = true;
            for &x in &reals {
                match refine_point(&p, f64_to_rat(x), BigRational::zero(), true, prec) {
                    Some(e) => encs.push(e),
                    None => ok = false,
                }
            }
            for &z in &uppers {
                match refine_point(&p, f64_to_rat(z.re), f64_to_rat(z.im), false, prec) {
                    Some(e) => {
                        encs.push(e.clone());
                        encs.push(e.conj());
                    }
                    None => ok = false,
                }
            }
            if ok && pairwise_disjoint(&encs) {
                return Ok(encs);
            }
            if prec >= MAX_BITS {
                last_reason = "enclosures not separated".into();
                break;
            }
            prec = (prec * 2).min(MAX_BITS);
        }
    }
    Err(Error::RootIsolation {
        bits: MAX_BITS,
        reason: last_reason,
    })
}

/// Shrinks an isolating enclosure to radius about `2^-bits`; the result is
/// kept only if it lies inside the original disk, so it encloses the same root.
pub(crate) fn refine(p: &QPoly, enc: &Enclosure, bits: u32) -> Enclosure {
    if enc.radius().is_zero() || enc.precision() >= bits {
        return enc.clone();
    }
    let p = p.squarefree();
    let real = enc.is_real_centered();
    match refine_point(&p, enc.re().clone(), enc.im().clone(), real, bits) {
        Some(e) if enc.contains_enclosure(&e) => e,
        _ => enc.clone(),
    }
}

fn pairwise_disjoint(encs: &[Enclosure]) -> bool {
    for i in 0..encs.len() {
        for j in i + 1..encs.len() {
            if !encs[i].disjoint(&encs[j]) {
                return false;
            }
        }
    }
    true
}

pub(crate) fn f64_to_rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: &[i64]) -> QPoly {
        QPoly::from_ints(c)
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(Sturm::new(&q(&[-1, -1, -1, 1])).count_all(), 1);
        assert_eq!(Sturm::new(&q(&[-2, 0, 1])).count_all(), 2);
        assert_eq!(Sturm::new(&q(&[1, 0, 1])).count_all(), 0);
        let s = Sturm::new(&q(&[-2, 0, 1]));
        assert_eq!(s.count(&rat(0), &rat(2)), 1);
    }

    #[test]
    fn golden_ratio() {
        let r = isolate(&q(&[-1, -1, 1]), 64).unwrap();
        assert_eq!(r.len(), 2);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r[1].center_f64().re - phi).abs() < 1e-15);
        assert!(r[1].radius_f64() < 1e-18);
    }

    #[test]
    fn tribonacci_roots() {
        let r = isolate(&q(&[-1, -1, -1, 1]), 64).unwrap();
        assert_eq!(r.len(), 3);
        let c = r[0].center_f64();
        assert!(c.re > 1.83 && c.re < 1.85 && c.im == 0.0);
        assert!(r[1].center_f64().norm() < 1.0);
        assert_eq!(r[1].conj(), r[2]);
    }

    #[test]
    fn repeated_roots_collapse() {
        // (X - 1)^2 (X^2 + 1)
        let r = isolate(&q(&[1, -2, 2, -2, 1]), 64).unwrap();
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn refinement_shrinks() {
        let p = q(&[-1, 0, -5, 1]);
        let r = isolate(&p, 64).unwrap();
        for e in &r {
            let f = refine(&p, e, 512);
            assert!(e.contains_enclosure(&f));
            assert!(f.radius() <= e.radius());
        }
    }
}

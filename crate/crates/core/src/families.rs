// SPDX-License-Identifier: Apache-2.0

//! Two infinite families: the disk-covering certificate for
//! `a→a^k b c, b→c, c→a`, and the inclusion `M² D_{u,a} ⊆ D_{v,a}` between
//! `a→a^k b` and `a→a^l b a^{k−l}` decided with automata.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::automata::DigitAlphabet;
use crate::error::{Error, Result};
use crate::interior::{decide_pure_discreteness, InteriorOptions, Status};
use crate::numberfield::{
    decide, make_field, rat, rat_to_f64, sqrt_lower, sqrt_upper, Enclosure, FieldElement, MonicIntPoly, NumberField,
    START_PRECISION,
};
use crate::par;
use crate::relations::{build_zero_automaton, q_inclusion, DEFAULT_STATE_BUDGET};
use crate::substitution::{prepare, word_value, Prepared, Substitution};

const ABC: [char; 3] = ['a', 'b', 'c'];

/// `a → a^k b c, b → c, c → a`.
pub fn sk_substitution(k: u32) -> Substitution {
    let mut a = vec![0; k as usize];
    a.extend([1, 2]);
    Substitution::from_images(ABC.to_vec(), vec![a, vec![2], vec![0]]).expect("valid images")
}

/// `a → a^k b, b → c, c → a`, the β-substitution of `X³ − kX² − 1`.
pub fn beta_substitution(k: u32) -> Result<Substitution> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut a = vec![0; k as usize];
    a.push(1);
    Substitution::from_images(ABC.to_vec(), vec![a, vec![2], vec![0]])
}

/// `a → a^l b a^{k−l}, b → c, c → a`.
pub fn slk_substitution(l: u32, k: u32) -> Result<Substitution> {
    if k == 0 || l > k {
        return Err(Error::InvalidArgument(format!("need 0 ≤ l ≤ k and k ≥ 1, got l = {l}, k = {k}")));
    }
    let mut a = vec![0; l as usize];
    a.push(1);
    a.extend(std::iter::repeat_n(0, (k - l) as usize));
    Substitution::from_images(ABC.to_vec(), vec![a, vec![2], vec![0]])
}

/// `Z[β]` for `β` a root of `X³ − kX² − X − 1`, with the index of the complex
/// embedding of negative imaginary part.
struct SkField {
    k: i64,
    field: Arc<NumberField>,
    idx: usize,
}

impl SkField {
    fn new(k: u32) -> Result<SkField> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let k = i64::from(k);
        let poly = MonicIntPoly::new(vec![-1, -1, -k, 1])?;
        let field = make_field(&poly, START_PRECISION)?;
        let idx = (0..field.num_embeddings())
            .find(|&i| !field.is_real(i) && field.root_f64(i).im < 0.0)
            .ok_or(Error::Precondition("no complex embedding".into()))?;
        Ok(SkField { k, field, idx })
    }

    fn el(&self, c: &[i64]) -> FieldElement {
        FieldElement::from_i64s(&self.field, c)
    }

    /// `γ = −β² + (k+1)β + 1 = β − 1/β`.
    fn gamma(&self) -> FieldElement {
        self.el(&[1, self.k + 1, -1])
    }

    fn enc(&self, x: &FieldElement, bits: u32) -> Enclosure {
        x.evaluate(self.idx, bits)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenvalueBounds {
    pub k: u32,
    /// `1/√(k + 2/k) < |β| < 1/√k`.
    pub modulus: bool,
    /// `−1/k < Re β < −1/(k + 2/k)`, as stated; false for `k ≥ 2`.
    pub real_part: bool,
    /// `−1/k < Re β < −1/(2(k + 2/k))`, which follows from
    /// `Re β = −1/(2β₊) − 1/(2β₊²)`.
    pub real_part_halved: bool,
    /// `−1/√k < Im β < −1/√(k + 2/k) + 1/k`.
    pub imaginary_part: bool,
    /// `√k − 1/√k < |γ| < √(k + 2/k) + 1/√k`.
    pub gamma: bool,
}

impl EigenvalueBounds {
    pub fn all(&self) -> bool {
        self.modulus && self.real_part && self.imaginary_part && self.gamma
    }

    /// All bounds, with the real part in its halved form.
    pub fn all_corrected(&self) -> bool {
        self.modulus && self.real_part_halved && self.imaginary_part && self.gamma
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn eigenvalue_bounds_at(f: &SkField, bits: u32) -> EigenvalueBounds {
    let k = f.k;
    let kk = q(k * k + 2, k); // k + 2/k
    let inv_k = q(1, k);
    let inv_kk = q(k, k * k + 2);
    let b = f.enc(&f.el(&[0, 1]), bits);
    let r = b.radius().clone();
    let (lo, hi) = (b.modulus_lower(), b.modulus_upper());
    let modulus = &lo * &lo > inv_kk && &hi * &hi < inv_k;
    let real_part = b.re() - &r > -&inv_k && b.re() + &r < -&inv_kk;
    let real_part_halved = b.re() - &r > -&inv_k && b.re() + &r < -(&inv_kk / rat(2));
    let im_lo = b.im() - &r;
    let im_hi = b.im() + &r;
    let slack = &inv_k - &im_hi;
    let imaginary_part =
        im_lo.is_negative() && &im_lo * &im_lo < inv_k && slack.is_positive() && &slack * &slack > inv_kk;
    let g = f.enc(&f.gamma(), bits);
    let s_lo = sqrt_lower(&rat(k), bits);
    let s_hi = sqrt_upper(&rat(k), bits);
    let gamma = g.modulus_lower() > &s_hi - s_hi.recip() && g.modulus_upper() < sqrt_lower(&kk, bits) + s_hi.recip()
        && s_lo.is_positive();
    EigenvalueBounds {
        k: k as u32,
        modulus,
        real_part,
        real_part_halved,
        imaginary_part,
        gamma,
    }
}

/// Certified check of the bounds on the complex root `β` (with `Im β < 0`) of
/// `X³ − kX² − X − 1`.
pub fn eigenvalue_bounds(k: u32) -> Result<EigenvalueBounds> {
    let f = SkField::new(k)?;
    let mut bits = START_PRECISION;
    loop {
        let b = eigenvalue_bounds_at(&f, bits);
        if b.all_corrected() || bits >= 1024 {
            return Ok(b);
        }
        bits *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Smallest certified slack of the inequalities in this check (negative
    /// when it fails).
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiskCertificate {
    pub k: u32,
    /// `t_k = k/2 − (√k/2) i`.
    pub target: [f64; 2],
    /// `1/(1 − 1/√k)`.
    pub radius: f64,
    /// Number of disk centers for letters a, b, c.
    pub centers: [usize; 3],
    /// Translations `t_{c,d}` with `|c|, |d| ≤ window` are checked disk by disk.
    pub window: i64,
    pub checks: Vec<CertificateCheck>,
    pub verdict: bool,
    /// Whether `k` is in the range where the argument is claimed to apply.
    pub complete: bool,
}

/// Running minimum of `|z| − R` over disks; `None` once some disk straddles
/// the circle of radius `R` at the current precision.
struct DiskScan<'a> {
    r_up: &'a BigRational,
    r_up_f64: f64,
    passed: bool,
    margin: f64,
    undecided: bool,
}

impl<'a> DiskScan<'a> {
    fn new(r_up: &'a BigRational) -> Self {
        DiskScan {
            r_up,
            r_up_f64: rat_to_f64(r_up),
            passed: true,
            margin: f64::INFINITY,
            undecided: false,
        }
    }

    fn push(&mut self, z: &Enclosure) {
        let m = z.center_f64().norm() - z.radius_f64() - self.r_up_f64;
        self.margin = self.margin.min(m);
        match z.cmp_modulus(self.r_up) {
            Some(std::cmp::Ordering::Greater) => {}
            Some(_) => self.passed = false,
            None => self.undecided = true,
        }
    }

    fn finish(self, name: &'static str) -> Option<CertificateCheck> {
        if self.undecided && self.passed {
            return None;
        }
        Some(CertificateCheck {
            name,
            passed: self.passed,
            margin: self.margin,
        })
    }
}

/// Disk centers of the three letters, as exact elements.
fn centers(f: &SkField) -> [Vec<FieldElement>; 3] {
    let k = f.k;
    let beta = f.el(&[0, 1]);
    let gamma = f.gamma();
    let mut sa = vec![&gamma * &beta];
    for i in 0..k {
        for j in 0..k {
            sa.push(f.el(&[i, j]));
        }
    }
    let sb = (0..k).map(|i| f.el(&[k, i])).collect();
    let mut sc = vec![f.el(&[0, k])];
    sc.extend((0..k).map(|i| &gamma + &f.el(&[0, i])));
    [sa, sb, sc]
}

struct CertContext {
    beta: Enclosure,
    gamma_beta: Enclosure,
    gamma: Enclosure,
    /// `−t_k`.
    minus_target: Enclosure,
    r_up: BigRational,
    bits: u32,
}

impl CertContext {
    fn new(f: &SkField, bits: u32) -> CertContext {
        let s_lo = sqrt_lower(&rat(f.k), bits);
        let s_hi = sqrt_upper(&rat(f.k), bits);
        let minus_target = Enclosure::new(
            -q(f.k, 2),
            (&s_lo + &s_hi) / rat(4),
            (&s_hi - &s_lo) / rat(4),
            bits,
        );
        let r_up = &s_hi / (&s_lo - rat(1));
        let beta = f.el(&[0, 1]);
        CertContext {
            beta: f.enc(&beta, bits),
            gamma_beta: f.enc(&(&f.gamma() * &beta), bits),
            gamma: f.enc(&f.gamma(), bits),
            minus_target,
            r_up,
            bits,
        }
    }

    fn int(&self, n: i64) -> Enclosure {
        Enclosure::from_int(&BigInt::from(n))
    }

    fn beta_times(&self, n: i64) -> Enclosure {
        self.beta.scale_int(&BigInt::from(n))
    }

    /// Feeds `t + shift − t_k` for the centers `t` of `letter` into `push`.
    /// In the square block of letter a, `near` keeps only the integers
    /// nearest to the real part (the others are farther from `t_k`), and
    /// otherwise keeps the two ends `i ∈ {0, k−1}`, where `|t − t_k|` is
    /// largest.
    fn scan_letter(&self, k: i64, letter: usize, shift: &Enclosure, near: bool, push: &mut dyn FnMut(&Enclosure)) {
        let base = shift.add(&self.minus_target).normalize(self.bits);
        match letter {
            0 => {
                push(&base.add(&self.gamma_beta));
                for j in 0..k {
                    let z = base.add(&self.beta_times(j)).normalize(self.bits);
                    let is: Vec<i64> = if near {
                        let i0 = (-rat_to_f64(z.re())).round().clamp(0.0, (k - 1) as f64) as i64;
                        ((i0 - 1).max(0)..=(i0 + 1).min(k - 1)).collect()
                    } else {
                        vec![0, k - 1]
                    };
                    for i in is {
                        push(&z.add(&self.int(i)));
                    }
                }
            }
            1 => {
                let b = base.add(&self.int(k));
                for i in 0..k {
                    push(&b.add(&self.beta_times(i)));
                }
            }
            _ => {
                push(&base.add(&self.beta_times(k)));
                let b = base.add(&self.gamma);
                for i in 0..k {
                    push(&b.add(&self.beta_times(i)));
                }
            }
        }
    }
}

fn certificate_at(f: &SkField, window: i64, bits: u32) -> Option<Vec<CertificateCheck>> {
    let k = f.k;
    let cx = CertContext::new(f, bits);
    let mut checks = Vec::new();

    // Radius lemma: |β| < 1/√k and every digit has modulus at most k.
    let b = eigenvalue_bounds_at(f, bits);
    let g_up = cx.gamma.modulus_upper();
    checks.push(CertificateCheck {
        name: "radius_lemma",
        passed: k >= 3 && b.modulus && g_up <= rat(k),
        margin: rat_to_f64(&(q(1, k) - cx.beta.modulus_upper() * cx.beta.modulus_upper())),
    });

    let zero = Enclosure::zero();
    for (letter, name) in [(1, "letter_b"), (2, "letter_c")] {
        let mut scan = DiskScan::new(&cx.r_up);
        cx.scan_letter(k, letter, &zero, true, &mut |z| scan.push(z));
        checks.push(scan.finish(name)?);
    }

    let t1 = f.enc(&f.el(&[-k - 2, 1]), bits);
    let t2 = f.enc(&f.el(&[-2, -k, 1]), bits);
    let translates: Vec<(i64, i64)> = (-window..=window)
        .flat_map(|c| (-window..=window).map(move |d| (c, d)))
        .filter(|&cd| cd != (0, 0))
        .collect();
    let per = par::map(&translates, |&(c, d)| {
        let shift = t1
            .scale_int(&BigInt::from(c))
            .add(&t2.scale_int(&BigInt::from(d)))
            .normalize(bits);
        let mut scan = DiskScan::new(&cx.r_up);
        for letter in 0..3 {
            cx.scan_letter(k, letter, &shift, true, &mut |z| scan.push(z));
        }
        (scan.passed, scan.margin, scan.undecided)
    });
    let passed = per.iter().all(|p| p.0);
    if passed && per.iter().any(|p| p.2) {
        return None;
    }
    checks.push(CertificateCheck {
        name: "window",
        passed,
        margin: per.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
    });

    // Tails. Every (c, d) outside the window has either |c| ≥ 1, 2|c| ≥ |d|
    // (then |t_{c,d}| ≥ |β−k−2| − 2|β²−kβ−2|) or |d| ≥ 3, |c| ≤ |d| (then
    // |Im t_{c,d}| ≥ 3(|Im(β²−kβ−2)| − |Im β|)).
    let mut d_max = BigRational::zero();
    let mut im_max = BigRational::zero();
    for letter in 0..3 {
        cx.scan_letter(k, letter, &zero, false, &mut |z| {
            let m = z.modulus_upper();
            if m > d_max {
                d_max = m;
            }
            let im = z.im().abs() + z.radius();
            if im > im_max {
                im_max = im;
            }
        });
    }
    let a_lo = t1.modulus_lower();
    let b_hi = t2.modulus_upper();
    let l1 = &a_lo - rat(2) * &b_hi;
    let m1 = &l1 - &d_max - &cx.r_up;
    checks.push(CertificateCheck {
        name: "tail_modulus",
        passed: window >= 2 && l1.is_positive() && m1.is_positive(),
        margin: rat_to_f64(&m1),
    });
    let id_lo = t2.im().abs() - t2.radius();
    let ic_hi = cx.beta.im().abs() + cx.beta.radius();
    let per_d = &id_lo - &ic_hi;
    let m2 = rat(3) * &per_d - &im_max - &cx.r_up;
    checks.push(CertificateCheck {
        name: "tail_imaginary",
        passed: window >= 2 && per_d.is_positive() && m2.is_positive(),
        margin: rat_to_f64(&m2),
    });
    Some(checks)
}

/// Certified disk-covering argument that `t_k` is outside the closure of the
/// projection of every other tile and every nonzero `Γ₀`-translate.
pub fn verify_sk_certificate(k: u32, window: i64) -> Result<DiskCertificate> {
    if window < 2 {
        return Err(Error::InvalidArgument("the translation window must be at least 2".into()));
    }
    let f = SkField::new(k)?;
    let checks = decide(|bits| certificate_at(&f, window, bits))?;
    let kf = f64::from(k);
    let c = centers(&f);
    Ok(DiskCertificate {
        k,
        target: [kf / 2.0, -kf.sqrt() / 2.0],
        radius: 1.0 / (1.0 - 1.0 / kf.sqrt()),
        centers: [c[0].len(), c[1].len(), c[2].len()],
        window,
        verdict: checks.iter().all(|c| c.passed),
        checks,
        complete: k >= 149,
    })
}

/// The languages of `s_k` (shifted by two zeros) and of `s_{l,k}`, over
/// their prefix digits, in the common field of `X³ − kX² − 1`.
pub struct SlkLanguages {
    pub shifted: crate::automata::Automaton,
    pub target: crate::automata::Automaton,
    pub base: FieldElement,
    pub beta: Prepared,
    pub slk: Prepared,
}

pub fn slk_languages(l: u32, k: u32) -> Result<SlkLanguages> {
    // Word reversal conjugates s_{0,k} to s_{k,k}.
    let l = if l == 0 { k } else { l };
    let pb = prepare(&beta_substitution(k)?)?;
    let pl = prepare(&slk_substitution(l, k)?)?;
    if pb.power.size() != 3 || pb.base != FieldElement::beta(pb.field()) || pl.base != pb.base {
        return Err(Error::Precondition("expected fixed points of the substitutions themselves".into()));
    }
    let lk = pb.language(0);
    let zero = lk.alphabet().zero()? as u32;
    Ok(SlkLanguages {
        shifted: lk.prepend_word(&[zero, zero]),
        target: pl.language(0),
        base: pb.base.clone(),
        beta: pb,
        slk: pl,
    })
}

/// Decides `β² Q_{L_k} ⊆ Q_{L_{l,k}}`, that is `M² D_{u,a} ⊆ D_{v,a}`.
pub fn verify_slk_inclusion(l: u32, k: u32) -> Result<bool> {
    let x = slk_languages(l, k)?;
    q_inclusion(&x.shifted, &x.target, &x.base, DEFAULT_STATE_BUDGET)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroLanguageCheck {
    pub l: u32,
    pub k: u32,
    pub digits: usize,
    pub states: usize,
    pub words: usize,
    pub ok: bool,
}

/// Zero automaton over the differences `Σ_k − Σ_{l,k}` of the two prefix
/// digit sets; every accepted word up to `max_len` must have value 0.
pub fn zero_language_check(l: u32, k: u32, max_len: usize) -> Result<ZeroLanguageCheck> {
    if l < 1 || l + 2 > k {
        return Err(Error::InvalidArgument(format!("need 1 ≤ l ≤ k − 2, got l = {l}, k = {k}")));
    }
    let x = slk_languages(l, k)?;
    let left = x.beta.digit_alphabet().scalars()?;
    let right = x.slk.digit_alphabet().scalars()?;
    let mut diffs: Vec<FieldElement> = Vec::new();
    for a in &left {
        for b in &right {
            let d = a - b;
            if !diffs.contains(&d) {
                diffs.push(d);
            }
        }
    }
    let alph = DigitAlphabet::from_scalars(diffs);
    let z = build_zero_automaton(&alph, &x.base, DEFAULT_STATE_BUDGET)?;
    let words = z.enumerate(max_len);
    let mut ok = true;
    for w in &words {
        if !word_value(&alph, &x.base, w)?.is_zero() {
            ok = false;
        }
    }
    Ok(ZeroLanguageCheck {
        l,
        k,
        digits: alph.len(),
        states: z.state_count(),
        words: words.len(),
        ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkRow {
    pub k: u32,
    pub method: &'static str,
    pub verdict: bool,
    /// Interior automaton size for letter a, when computed.
    pub states: Option<usize>,
    pub error: Option<String>,
}

/// Pure discreteness of `a → a^k b c`: the certificate from `k = 149` on,
/// the interior computation below.
pub fn family_sk_row(k: u32, window: i64) -> SkRow {
    if k >= 149 {
        return match verify_sk_certificate(k, window) {
            Ok(c) => SkRow {
                k,
                method: "certificate",
                verdict: c.verdict,
                states: None,
                error: None,
            },
            Err(e) => SkRow {
                k,
                method: "certificate",
                verdict: false,
                states: None,
                error: Some(e.to_string()),
            },
        };
    }
    let r = decide_pure_discreteness(&sk_substitution(k), &InteriorOptions::default());
    SkRow {
        k,
        method: "interior",
        verdict: r.status == Status::PureDiscrete,
        states: r.letters.first().map(|l| l.states),
        error: r.error.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlkRow {
    pub l: u32,
    pub k: u32,
    pub inclusion: Option<bool>,
    pub pure_discrete: Option<bool>,
    pub error: Option<String>,
}

/// Both routes for `s_{l,k}`: the inclusion and the direct interior test.
pub fn family_slk_rows(pairs: &[(u32, u32)], interior: bool) -> Vec<SlkRow> {
    par::map(pairs, |&(l, k)| {
        let inc = verify_slk_inclusion(l, k);
        let pd = interior.then(|| {
            slk_substitution(l, k)
                .map(|s| decide_pure_discreteness(&s, &InteriorOptions::default()).status == Status::PureDiscrete)
        });
        let mut error = None;
        let inclusion = match inc {
            Ok(b) => Some(b),
            Err(e) => {
                error = Some(e.to_string());
                None
            }
        };
        let pure_discrete = match pd {
            Some(Ok(b)) => Some(b),
            Some(Err(e)) => {
                error.get_or_insert(e.to_string());
                None
            }
            None => None,
        };
        SlkRow {
            l,
            k,
            inclusion,
            pure_discrete,
            error,
        }
    })
}

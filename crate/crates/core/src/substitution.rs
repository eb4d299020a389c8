// SPDX-License-Identifier: Apache-2.0

//! Substitutions, their incidence matrices, prefix automata and discrete lines.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::automata::{Automaton, Digit, DigitAlphabet};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::numberfield::{
    classify_polynomial, common_denominator, make_field, FieldElement, MonicIntPoly, NumberField,
    START_PRECISION,
};

/// Integer vector indexed by the alphabet (letter counts, or differences).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianVector(pub Vec<i64>);

impl AbelianVector {
    pub fn zero(d: usize) -> Self {
        AbelianVector(vec![0; d])
    }

    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = vec![0; d];
        v[i] = 1;
        AbelianVector(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &AbelianVector) -> AbelianVector {
        AbelianVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &AbelianVector) -> AbelianVector {
        AbelianVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for AbelianVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Word morphism over an alphabet of single ASCII alphanumeric letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Substitution {
    alphabet: Vec<char>,
    images: Vec<Vec<usize>>,
}

/// Parses `"a->ab;b->ac;c->a"`. The alphabet is ordered by first appearance
/// on the left-hand sides.
pub fn parse_substitution(text: &str) -> Result<Substitution> {
    let mut lhs: Vec<char> = Vec::new();
    let mut rhs: Vec<&str> = Vec::new();
    for rule in text.split([';', ',']).map(str::trim).filter(|r| !r.is_empty()) {
        let (l, r) = rule
            .split_once("->")
            .ok_or_else(|| Error::InvalidSubstitution(format!("rule {rule:?} lacks '->'")))?;
        let l = l.trim();
        let mut chars = l.chars();
        let letter = match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_alphanumeric() => c,
            _ => {
                return Err(Error::InvalidSubstitution(format!(
                    "left-hand side {l:?} is not a single letter"
                )))
            }
        };
        if lhs.contains(&letter) {
            return Err(Error::InvalidSubstitution(format!(
                "letter {letter:?} has two images"
            )));
        }
        lhs.push(letter);
        rhs.push(r.trim());
    }
    if lhs.is_empty() {
        return Err(Error::InvalidSubstitution("no rules".into()));
    }
    let mut images = Vec::with_capacity(lhs.len());
    for (letter, r) in lhs.iter().zip(&rhs) {
        if r.is_empty() {
            return Err(Error::InvalidSubstitution(format!(
                "image of {letter:?} is empty"
            )));
        }
        let img = r
            .chars()
            .map(|c| {
                lhs.iter().position(|&x| x == c).ok_or_else(|| {
                    Error::InvalidSubstitution(format!("unknown letter {c:?} in image of {letter:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        images.push(img);
    }
    Ok(Substitution {
        alphabet: lhs,
        images,
    })
}

impl std::str::FromStr for Substitution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_substitution(s)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, img) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{}->{}", self.alphabet[i], self.word_to_string(img))?;
        }
        Ok(())
    }
}

impl Serialize for Substitution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Substitution {
    /// Builds a substitution from letter-index images.
    pub fn from_images(alphabet: Vec<char>, images: Vec<Vec<usize>>) -> Result<Substitution> {
        if alphabet.len() != images.len() || alphabet.is_empty() {
            return Err(Error::InvalidSubstitution("one image per letter required".into()));
        }
        if images.iter().any(|w| w.is_empty()) {
            return Err(Error::InvalidSubstitution("empty image".into()));
        }
        if images.iter().flatten().any(|&c| c >= alphabet.len()) {
            return Err(Error::InvalidSubstitution("image letter out of range".into()));
        }
        Ok(Substitution { alphabet, images })
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn image(&self, letter: usize) -> &[usize] {
        &self.images[letter]
    }

    pub fn letter_index(&self, c: char) -> Option<usize> {
        self.alphabet.iter().position(|&x| x == c)
    }

    pub fn word_to_string(&self, w: &[usize]) -> String {
        w.iter().map(|&i| self.alphabet[i]).collect()
    }

    pub fn apply(&self, word: &[usize]) -> Vec<usize> {
        word.iter().flat_map(|&c| self.images[c].iter().copied()).collect()
    }

    /// `s^n(word)`.
    pub fn iterate(&self, word: &[usize], n: u32) -> Vec<usize> {
        let mut w = word.to_vec();
        for _ in 0..n {
            w = self.apply(&w);
        }
        w
    }

    /// The composition `s^k`.
    pub fn power(&self, k: u32) -> Substitution {
        let images = (0..self.size())
            .map(|c| self.iterate(&[c], k))
            .collect();
        Substitution {
            alphabet: self.alphabet.clone(),
            images,
        }
    }

    /// Abelianisation of a word.
    pub fn abelian(&self, word: &[usize]) -> AbelianVector {
        let mut v = vec![0i64; self.size()];
        for &c in word {
            v[c] += 1;
        }
        AbelianVector(v)
    }

    /// `M[a][b] = |s(b)|_a`.
    pub fn incidence_matrix(&self) -> Matrix {
        let d = self.size();
        let mut m = vec![vec![0i64; d]; d];
        for (b, img) in self.images.iter().enumerate() {
            for &a in img {
                m[a][b] += 1;
            }
        }
        m
    }

    /// `det(X I - M)`.
    pub fn char_poly(&self) -> Result<MonicIntPoly> {
        let c = linalg::char_poly(&self.incidence_matrix())
            .iter()
            .map(|x| x.to_i64().ok_or(Error::Overflow("characteristic polynomial")))
            .collect::<Result<Vec<_>>>()?;
        MonicIntPoly::new(c)
    }

    pub fn is_primitive(&self) -> bool {
        let d = self.size();
        let m: Vec<Vec<bool>> = self
            .incidence_matrix()
            .iter()
            .map(|r| r.iter().map(|&x| x > 0).collect())
            .collect();
        let mut p = m.clone();
        for _ in 0..(d - 1) * (d - 1) + 1 {
            if p.iter().all(|r| r.iter().all(|&x| x)) {
                return true;
            }
            p = (0..d)
                .map(|i| (0..d).map(|j| (0..d).any(|k| p[i][k] && m[k][j])).collect())
                .collect();
        }
        false
    }

    /// Smallest power `k` and letter `a` on the cycle of the first-letter map
    /// reached from the first letter, so that `s^k(a)` begins with `a`.
    pub fn periodic_seed(&self) -> (u32, usize) {
        let mut seen = vec![usize::MAX; self.size()];
        let mut c = 0usize;
        let mut step = 0usize;
        while seen[c] == usize::MAX {
            seen[c] = step;
            c = self.images[c][0];
            step += 1;
        }
        ((step - seen[c]) as u32, c)
    }

    /// Length of `s^n(a)` for every letter, with overflow checks.
    pub fn image_lengths(&self, n: u32) -> Result<Vec<u64>> {
        let mut len = vec![1u64; self.size()];
        for _ in 0..n {
            len = self
                .images
                .iter()
                .map(|img| {
                    img.iter()
                        .try_fold(0u64, |acc, &c| acc.checked_add(len[c]))
                        .ok_or(Error::Overflow("image length"))
                })
                .collect::<Result<_>>()?;
        }
        Ok(len)
    }
}

/// Outcome of [`classify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub primitive: bool,
    pub irreducible: bool,
    pub pisot: bool,
    pub unit: bool,
    pub power_for_fixed_point: u32,
    pub seed_letter: char,
    pub char_poly: String,
}

impl ClassificationReport {
    /// Reasons why the interior criterion does not apply; empty if it does.
    pub fn failures(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !self.primitive {
            v.push("not primitive".to_string());
        }
        if !self.irreducible {
            v.push("not irreducible".to_string());
        }
        if !self.pisot {
            v.push("not Pisot".to_string());
        }
        if !self.unit {
            v.push("not unit".to_string());
        }
        v
    }
}

pub fn classify(s: &Substitution) -> ClassificationReport {
    let (k, seed) = s.periodic_seed();
    let (irreducible, pisot, unit, text) = match s.char_poly() {
        Ok(p) => {
            let c = classify_polynomial(&p);
            (c.irreducible, c.pisot, c.unit, p.to_string())
        }
        Err(_) => (false, false, false, String::from("?")),
    };
    ClassificationReport {
        primitive: s.is_primitive(),
        irreducible,
        pisot,
        unit,
        power_for_fixed_point: k,
        seed_letter: s.alphabet[seed],
        char_poly: text,
    }
}

/// Left eigenvector map `ψ: Z^A → Z[β]` with `ψ(M x) = β ψ(x)`, normalised
/// so that `ψ(e_a) = scale` for the first letter `a`.
#[derive(Clone, Debug)]
pub struct Psi {
    field: Arc<NumberField>,
    images: Vec<FieldElement>,
    scale: BigInt,
}

impl Psi {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// `ψ(e_a)` for each letter.
    pub fn images(&self) -> &[FieldElement] {
        &self.images
    }

    /// Integer by which the normalised eigenvector was multiplied to make it
    /// integral (1 in all unimodular examples).
    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn apply(&self, v: &AbelianVector) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        for (x, img) in v.0.iter().zip(&self.images) {
            if *x != 0 {
                acc = &acc + &img.scale(&BigInt::from(*x));
            }
        }
        acc
    }
}

fn det_field(m: &[Vec<FieldElement>], field: &Arc<NumberField>) -> FieldElement {
    let n = m.len();
    if n == 0 {
        return FieldElement::one(field);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = FieldElement::zero(field);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<FieldElement>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * &det_field(&minor, field);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Computes `ψ` in the field of the characteristic polynomial of `M`.
pub fn psi(s: &Substitution) -> Result<Psi> {
    let poly = s.char_poly()?;
    if !poly.is_irreducible() {
        return Err(Error::Precondition(format!(
            "characteristic polynomial {poly} is reducible"
        )));
    }
    let field = make_field(&poly, START_PRECISION)?;
    psi_in_field(s, &field)
}

/// Same as [`psi`] with `β` taken as the generator of an existing field.
pub fn psi_in_field(s: &Substitution, field: &Arc<NumberField>) -> Result<Psi> {
    let d = s.size();
    let mt = linalg::transpose(&s.incidence_matrix());
    let beta = FieldElement::beta(field);
    // A = M^T - β I; its adjugate columns span the kernel.
    let a: Vec<Vec<FieldElement>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let x = FieldElement::from_int(field, mt[i][j]);
                    if i == j {
                        &x - &beta
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    let mut ell: Option<Vec<FieldElement>> = None;
    for row in 0..d {
        let v: Vec<FieldElement> = (0..d)
            .map(|i| {
                let minor: Vec<Vec<FieldElement>> = (0..d)
                    .filter(|&r| r != row)
                    .map(|r| (0..d).filter(|&c| c != i).map(|c| a[r][c].clone()).collect())
                    .collect();
                let m = det_field(&minor, field);
                if (i + row) % 2 == 0 {
                    m
                } else {
                    -&m
                }
            })
            .collect();
        if !v[0].is_zero() {
            ell = Some(v);
            break;
        }
    }
    let ell = ell.ok_or_else(|| {
        Error::Precondition("no eigenvector with non-zero first coordinate".into())
    })?;
    let inv0 = ell[0]
        .inverse_rational()
        .ok_or_else(|| Error::Precondition("degenerate eigenvector".into()))?;
    let normalized: Vec<Vec<BigRational>> = ell
        .iter()
        .map(|x| {
            let m = x.mul_matrix();
            m.iter()
                .map(|row| {
                    row.iter()
                        .zip(&inv0)
                        .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                        .fold(BigRational::zero(), |acc, t| acc + t)
                })
                .collect()
        })
        .collect();
    let all: Vec<BigRational> = normalized.iter().flatten().cloned().collect();
    let scale = common_denominator(&all);
    let sq = BigRational::from_integer(scale.clone());
    let images = normalized
        .into_iter()
        .map(|c| {
            FieldElement::new(
                field,
                c.into_iter().map(|x| (x * &sq).to_integer()).collect(),
            )
        })
        .collect();
    Ok(Psi {
        field: field.clone(),
        images,
        scale,
    })
}

/// Transitions `c →t d` for each occurrence of `d` in `s(c)`, with `t` the
/// abelianised strict prefix before it. Digits are deduplicated in discovery
/// order and carry `ψ(t)` when `psi` is given. States are the letters; no
/// initial or final states are set.
pub fn prefix_automaton(s: &Substitution, psi: Option<&Psi>) -> (Automaton, Arc<DigitAlphabet>) {
    let d = s.size();
    let mut vectors: Vec<AbelianVector> = Vec::new();
    let mut trans = Vec::new();
    for c in 0..d {
        let img = s.image(c);
        for (pos, &next) in img.iter().enumerate() {
            let t = s.abelian(&img[..pos]);
            let idx = match vectors.iter().position(|v| *v == t) {
                Some(i) => i,
                None => {
                    vectors.push(t);
                    vectors.len() - 1
                }
            };
            trans.push((c as u32, idx as u32, next as u32));
        }
    }
    let alphabet = DigitAlphabet::new(vectors.into_iter().map(|v| {
        let scalar = psi.map(|p| p.apply(&v));
        let mut digit = Digit::from_vector(v.clone(), scalar.clone());
        if let Some(x) = scalar {
            digit.name = format!("{x} | {v}");
        }
        digit
    }));
    let a = Automaton::new(alphabet.clone(), d, trans, [], [])
        .expect("prefix automaton is well formed");
    (a, alphabet)
}

/// Words labelling paths from `a` to `b` in the prefix automaton, read from
/// the most significant digit.
pub fn prefix_language(s: &Substitution, psi: Option<&Psi>, a: usize, b: usize) -> Automaton {
    let (aut, _) = prefix_automaton(s, psi);
    aut.with_initial(vec![a as u32]).with_finals(&[b as u32])
}

/// Mirror of [`prefix_language`]: the least-significant-digit-first language
/// whose values `Σ M^i t_i` are the discrete-line points followed by `b`.
pub fn mirrored_prefix_language(s: &Substitution, psi: Option<&Psi>, a: usize, b: usize) -> Automaton {
    prefix_language(s, psi, a, b).mirror()
}

/// Default bound on the length of generated prefixes.
pub const DEFAULT_POINT_BUDGET: u64 = 50_000_000;

/// Positions of `s^{kn}(seed)` as `(Ab(prefix), letter)`, where `k` and the
/// seed come from [`Substitution::periodic_seed`].
pub fn discrete_line(s: &Substitution, n: u32, budget: u64) -> Result<Vec<(AbelianVector, usize)>> {
    let (k, seed) = s.periodic_seed();
    let t = s.power(k);
    let len = t.image_lengths(n)?[seed];
    if len > budget {
        return Err(Error::PointBudget {
            budget,
            needed: len,
        });
    }
    let word = t.iterate(&[seed], n);
    let mut out = Vec::with_capacity(word.len());
    let mut cur = vec![0i64; s.size()];
    for &c in &word {
        out.push((AbelianVector(cur.clone()), c));
        cur[c] += 1;
    }
    Ok(out)
}

/// `{Ab(v) : v·b prefix of s^{kn}(seed)}` in positional order.
pub fn discrete_line_points(s: &Substitution, b: usize, n: u32, budget: u64) -> Result<Vec<AbelianVector>> {
    Ok(discrete_line(s, n, budget)?
        .into_iter()
        .filter(|(_, c)| *c == b)
        .map(|(v, _)| v)
        .collect())
}

/// `E_1(s)(x, e_a) = {(M x + t, e_b) : a →t b}`.
pub fn e_one(s: &Substitution, x: &AbelianVector, a: usize) -> Result<Vec<(AbelianVector, usize)>> {
    let mx = AbelianVector(linalg::mat_vec(&s.incidence_matrix(), &x.0)?);
    let img = s.image(a);
    Ok((0..img.len())
        .map(|pos| (mx.add(&s.abelian(&img[..pos])), img[pos]))
        .collect())
}

/// `E_1^*(s)(y, e_b^*) = {(M^{-1}(y - t), e_a^*) : a →t b}`.
pub fn e_one_star(s: &Substitution, y: &AbelianVector, b: usize) -> Result<Vec<(AbelianVector, usize)>> {
    let inv = linalg::inverse_unimodular(&s.incidence_matrix())?;
    let mut out = Vec::new();
    for a in 0..s.size() {
        let img = s.image(a);
        for pos in 0..img.len() {
            if img[pos] == b {
                let t = s.abelian(&img[..pos]);
                out.push((AbelianVector(linalg::mat_vec(&inv, &y.sub(&t).0)?), a));
            }
        }
    }
    Ok(out)
}

/// A substitution checked to be primitive, irreducible and Pisot, replaced by
/// the power `s^k` that has a fixed point, together with `ψ`.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub original: Substitution,
    pub power: Substitution,
    pub report: ClassificationReport,
    pub psi: Psi,
    /// `β^k`, the expansion base of the languages of `s^k`.
    pub base: FieldElement,
    pub seed: usize,
}

pub fn prepare(s: &Substitution) -> Result<Prepared> {
    let report = classify(s);
    if !report.primitive || !report.irreducible || !report.pisot || !report.unit {
        return Err(Error::Precondition(report.failures().join(", ")));
    }
    let psi = psi(s)?;
    let (k, seed) = s.periodic_seed();
    let base = FieldElement::beta(psi.field()).pow(k);
    Ok(Prepared {
        original: s.clone(),
        power: s.power(k),
        report,
        psi,
        base,
        seed,
    })
}

impl Prepared {
    pub fn field(&self) -> &Arc<NumberField> {
        self.psi.field()
    }

    /// Least-significant-first language of the discrete-line points followed
    /// by letter `b`, over the prefix digits of `s^k` with their `ψ`-images.
    pub fn language(&self, b: usize) -> Automaton {
        mirrored_prefix_language(&self.power, Some(&self.psi), self.seed, b)
    }

    pub fn digit_alphabet(&self) -> Arc<DigitAlphabet> {
        prefix_automaton(&self.power, Some(&self.psi)).1
    }

    /// `Q_u = Σ λ^i ψ(u_i)` for a word over `alphabet`.
    pub fn value(&self, alphabet: &DigitAlphabet, word: &[u32]) -> Result<FieldElement> {
        word_value(alphabet, &self.base, word)
    }
}

/// `Σ base^i x_i` for a least-significant-first word of scalar digits.
pub fn word_value(alphabet: &DigitAlphabet, base: &FieldElement, word: &[u32]) -> Result<FieldElement> {
    let field = base.field();
    let scalars = alphabet.scalars()?;
    let mut acc = FieldElement::zero(field);
    for &d in word.iter().rev() {
        acc = &(&acc * base) + &scalars[d as usize];
    }
    Ok(acc)
}

// SPDX-License-Identifier: Apache-2.0

//! The S-adic system directed by `σ: a→aab, b→c, c→a` and
//! `τ: a→aba, b→c, c→a`, which share the incidence matrix of `X³ − 2X² − 1`.
//! Builds the tagged prefix automaton, the languages `L`, `L_σ`, `L₀`, `L_*`
//! and searches inclusions `t + β^k ψ(D_{u_σ,a}) ⊆ ψ(D_{u,a})`.

use std::fmt;
use std::sync::{Arc, Mutex};

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::automata::{Automaton, Digit, DigitAlphabet, State};
use crate::error::{Error, Result};
use crate::numberfield::{make_field, FieldElement, MonicIntPoly, NumberField, START_PRECISION};
use crate::par;
use crate::relations::{build_zero_automaton, q_inclusion_with, RelationMachine, DEFAULT_STATE_BUDGET};
use crate::substitution::{parse_substitution, Substitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Directive {
    Sigma,
    Tau,
}

impl Directive {
    pub const ALL: [Directive; 2] = [Directive::Sigma, Directive::Tau];

    fn index(self) -> usize {
        self as usize
    }

    fn tag(self) -> &'static str {
        match self {
            Directive::Sigma => "σ",
            Directive::Tau => "τ",
        }
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Parses a directive word written with `σ`/`τ` or `s`/`t`.
pub fn parse_directives(text: &str) -> Result<Vec<Directive>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'σ' | 's' | 'S' => Ok(Directive::Sigma),
            'τ' | 't' | 'T' => Ok(Directive::Tau),
            _ => Err(Error::Parse(format!("unknown directive letter {c:?}"))),
        })
        .collect()
}

pub fn directives_to_string(p: &[Directive]) -> String {
    p.iter().map(|d| d.tag()).collect()
}

/// All components of the pipeline, built once.
pub struct SAdic {
    pub field: Arc<NumberField>,
    pub beta: FieldElement,
    pub substitutions: [Substitution; 2],
    /// `ψ(e_a), ψ(e_b), ψ(e_c) = 1, β − 2, β² − 2β`.
    pub psi: [FieldElement; 3],
    /// Tagged digits `(x, t)` of the prefix automaton.
    pub tagged: Arc<DigitAlphabet>,
    /// `Σ_σ = {0, 1, 2}` as scalar digits.
    pub sigma_digits: Arc<DigitAlphabet>,
    /// `Σ_σ × {σ, τ}`, the alphabet of `L_*`.
    pub star_alphabet: Arc<DigitAlphabet>,
    /// `Σ' = Σ_σ − (Σ_σ ∪ Σ_τ)`.
    pub differences: Arc<DigitAlphabet>,
    /// States a, b, c; no initial or final states.
    pub prefix: Automaton,
    /// Reachable subsets met when determinising the mirror of `L_a`.
    pub l_subsets: Vec<Vec<usize>>,
    pub l: Automaton,
    pub l_sigma: Automaton,
    pub l0: Automaton,
    pub l_star: Automaton,
    /// Relations over `Σ_σ × Σ_σ`, shared by all inclusion checks.
    rel: RelationMachine,
    /// Residual checks already decided, by state and remaining tags.
    memo: Mutex<FxHashMap<(State, Vec<Directive>), bool>>,
}

fn scalar_digits(xs: &[FieldElement]) -> Arc<DigitAlphabet> {
    DigitAlphabet::from_scalars(xs.iter().cloned())
}

fn tagged_digit(x: &FieldElement, t: Directive) -> Digit {
    Digit::from_scalar(x.clone()).with_tag(t.tag())
}

impl SAdic {
    pub fn build() -> Result<SAdic> {
        let field = make_field(&MonicIntPoly::new(vec![-1, 0, -2, 1])?, START_PRECISION)?;
        let el = |c: &[i64]| FieldElement::from_i64s(&field, c);
        let beta = el(&[0, 1]);
        let psi = [el(&[1]), el(&[-2, 1]), el(&[0, -2, 1])];
        let substitutions = [
            parse_substitution("a->aab;b->c;c->a")?,
            parse_substitution("a->aba;b->c;c->a")?,
        ];

        // Prefix automaton: d →(x,t) e when t(d) = v' e v'' with ψ(Ab v') = x.
        let mut digits: Vec<Digit> = Vec::new();
        let mut edges: Vec<(State, Digit, State)> = Vec::new();
        for t in Directive::ALL {
            let s = &substitutions[t.index()];
            for d in 0..3 {
                let mut x = FieldElement::zero(&field);
                for &e in s.image(d) {
                    let dig = tagged_digit(&x, t);
                    if !digits.contains(&dig) {
                        digits.push(dig.clone());
                    }
                    edges.push((d as State, dig, e as State));
                    x = &x + &psi[e];
                }
            }
        }
        let tagged = DigitAlphabet::new(digits);
        let prefix = Automaton::new(
            tagged.clone(),
            3,
            edges.iter().map(|(p, dig, q)| (*p, tagged.index_of(dig).unwrap() as u32, *q)),
            [],
            [],
        )?;

        // L is the mirror of L_a (initial a, final a), determinised.
        let la = prefix.with_initial(vec![0]).with_finals(&[0]);
        let (l_det, l_subsets) = subset_construction(&la.mirror());
        let l = l_det.minimize()?;

        let sigma_vals = [el(&[0]), el(&[1]), el(&[2])];
        let tau_vals = [el(&[0]), el(&[1]), el(&[-1, 1])];
        let sigma_digits = scalar_digits(&sigma_vals);

        // L_σ: the σ-tagged words of L, read as words over Σ_σ.
        let map: Vec<Option<usize>> = tagged
            .digits()
            .iter()
            .map(|d| {
                (d.tag.as_deref() == Some(Directive::Sigma.tag()))
                    .then(|| sigma_digits.index_of(&Digit::from_scalar(d.scalar.clone().unwrap())))
                    .flatten()
            })
            .collect();
        let l_sigma = l.map_labels(sigma_digits.clone(), &map)?.determinize().minimize()?;

        // The third component of m ranges over all scalars of L, so the
        // differences are Σ_σ − (Σ_σ ∪ Σ_τ).
        let y_vals: Vec<FieldElement> = sigma_vals.iter().chain(&tau_vals).cloned().collect();
        let mut diffs: Vec<FieldElement> = Vec::new();
        for x in &sigma_vals {
            for y in &y_vals {
                let d = x - y;
                if !diffs.contains(&d) {
                    diffs.push(d);
                }
            }
        }
        let differences = scalar_digits(&diffs);
        let l0 = build_zero_automaton(&differences, &beta, DEFAULT_STATE_BUDGET)?.minimize()?;

        let star_alphabet = DigitAlphabet::new(
            Directive::ALL
                .iter()
                .flat_map(|&t| sigma_vals.iter().map(move |x| tagged_digit(x, t))),
        );
        let rel = RelationMachine::build(&sigma_digits, &sigma_digits, &beta, DEFAULT_STATE_BUDGET)?;
        let mut sadic = SAdic {
            field,
            beta,
            substitutions,
            psi,
            tagged,
            sigma_digits,
            star_alphabet,
            differences,
            prefix,
            l_subsets,
            l,
            l_sigma,
            l0,
            l_star: Automaton::empty(DigitAlphabet::new([])),
            rel,
            memo: Mutex::new(FxHashMap::default()),
        };
        sadic.l_star = sadic.build_l_star()?;
        Ok(sadic)
    }

    /// `L_* = (Σ_σ × S)^* ∩ m(L₀ × L_σ × L)` where `m(t, x, (y, i)) = (x, i)`
    /// when `x − y = t` and `*` otherwise.
    fn build_l_star(&self) -> Result<Automaton> {
        let (a0, a1, a2) = (&self.l0, &self.l_sigma, &self.l);
        // Admissible letters (t, x, (y, i)) with their image (x, i).
        let mut letters: Vec<(u32, u32, u32, u32)> = Vec::new();
        for (ti, t) in self.differences.digits().iter().enumerate() {
            for (xi, x) in self.sigma_digits.digits().iter().enumerate() {
                for (yi, y) in self.tagged.digits().iter().enumerate() {
                    let (xs, ys, ts) = (x.scalar.as_ref().unwrap(), y.scalar.as_ref().unwrap(), t.scalar.as_ref().unwrap());
                    if &(xs - ys) != ts {
                        continue;
                    }
                    let tag = y.tag.clone().unwrap();
                    let img = Digit::from_scalar(xs.clone()).with_tag(tag);
                    let m = self.star_alphabet.index_of(&img).unwrap() as u32;
                    letters.push((ti as u32, xi as u32, yi as u32, m));
                }
            }
        }
        let start = (a0.initial()[0], a1.initial()[0], a2.initial()[0]);
        let mut ids: FxHashMap<(State, State, State), State> = FxHashMap::default();
        let mut states = vec![start];
        ids.insert(start, 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let (p0, p1, p2) = states[i];
            for &(t, x, y, m) in &letters {
                let (Some(q0), Some(q1), Some(q2)) = (a0.delta(p0, t), a1.delta(p1, x), a2.delta(p2, y)) else {
                    continue;
                };
                let key = (q0, q1, q2);
                let id = *ids.entry(key).or_insert_with(|| {
                    states.push(key);
                    (states.len() - 1) as State
                });
                trans.push((i as State, m, id));
            }
            i += 1;
        }
        let finals: Vec<State> = states
            .iter()
            .enumerate()
            .filter(|(_, (p0, p1, p2))| a0.is_final(*p0) && a1.is_final(*p1) && a2.is_final(*p2))
            .map(|(i, _)| i as State)
            .collect();
        Automaton::new(self.star_alphabet.clone(), states.len(), trans, [0], finals)?
            .determinize()
            .minimize()
    }

    /// `ψ(Ab(w))`.
    pub fn psi_of(&self, word: &[usize]) -> FieldElement {
        word.iter().fold(FieldElement::zero(&self.field), |acc, &c| &acc + &self.psi[c])
    }

    /// `s_0 s_1 … s_n (a)`.
    pub fn directed_word(&self, p: &[Directive]) -> Vec<usize> {
        let mut w = vec![0];
        for t in p.iter().rev() {
            w = self.substitutions[t.index()].apply(&w);
        }
        w
    }

    fn star_digit(&self, x: usize, t: Directive) -> u32 {
        (t.index() * self.sigma_digits.len() + x) as u32
    }

    /// Words `v` over `Σ_σ` such that reading `(v_j, t_j)` from `q` is
    /// accepted by `L_*` for every tag sequence starting with `tags`.
    fn universal_residual(&self, q: State, tags: &[Directive]) -> Result<Automaton> {
        let rejected = self.l_star.with_initial(vec![q]).complement();
        let m = tags.len();
        let mut t = Vec::new();
        for (j, &tag) in tags.iter().enumerate() {
            for x in 0..self.sigma_digits.len() {
                t.push((j as State, self.star_digit(x, tag), (j + 1) as State));
            }
        }
        for d in 0..self.star_alphabet.len() as u32 {
            t.push((m as State, d, m as State));
        }
        let constraint = Automaton::new(self.star_alphabet.clone(), m + 1, t, [0], 0..=m as State)?;
        let bad = rejected.intersect(&constraint)?;
        let n = self.sigma_digits.len();
        let map: Vec<Option<usize>> = (0..self.star_alphabet.len()).map(|d| Some(d % n)).collect();
        Ok(bad.map_labels(self.sigma_digits.clone(), &map)?.determinize().minimize()?.complement())
    }

    /// `Q_{L_σ} ⊆ Q_V` for `V` the universal residual at `q`.
    fn residual_covers(&self, q: State, tags: &[Directive]) -> Result<bool> {
        let key = (q, tags.to_vec());
        if let Some(&b) = self.memo.lock().unwrap().get(&key) {
            return Ok(b);
        }
        let v = self.universal_residual(q, tags)?;
        let b = q_inclusion_with(&self.rel, &self.l_sigma, &v)?;
        self.memo.lock().unwrap().insert(key, b);
        Ok(b)
    }

    /// Checks `Σ w_j β^j + β^k Q_{L_σ} ⊆ ψ(D_{u,a})` for every directive
    /// sequence starting with `prefix`, where `k = |w|` and `w` is over `Σ_σ`.
    pub fn verify_certificate(&self, prefix: &[Directive], w: &[usize]) -> Result<bool> {
        if w.len() > prefix.len() {
            return Err(Error::InvalidArgument("certificate word longer than the prefix".into()));
        }
        let mut q = self.l_star.initial()[0];
        for (j, &x) in w.iter().enumerate() {
            match self.l_star.delta(q, self.star_digit(x, prefix[j])) {
                Some(n) => q = n,
                None => return Ok(false),
            }
        }
        self.residual_covers(q, &prefix[w.len()..])
    }

    pub fn certificate_value(&self, w: &[usize]) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        for &x in w.iter().rev() {
            acc = &(&acc * &self.beta) + &FieldElement::from_int(&self.field, x as i64);
        }
        acc
    }

    /// Smallest `k ≤ max_k` (then lexicographically smallest word) giving a
    /// certificate for `prefix`.
    pub fn find_certificate(&self, prefix: &[Directive], max_k: usize) -> Result<Option<Certificate>> {
        let max_k = max_k.min(prefix.len());
        let mut level: Vec<(State, Vec<usize>)> = vec![(self.l_star.initial()[0], vec![])];
        for k in 0..=max_k {
            for (q, w) in &level {
                if self.residual_covers(*q, &prefix[k..])? {
                    return Ok(Some(Certificate::new(self, prefix, w)));
                }
            }
            if k == max_k {
                break;
            }
            let mut next: Vec<(State, Vec<usize>)> = Vec::new();
            for (q, w) in &level {
                for x in 0..self.sigma_digits.len() {
                    if let Some(n) = self.l_star.delta(*q, self.star_digit(x, prefix[k])) {
                        if !next.iter().any(|(m, _)| *m == n) {
                            let mut w2 = w.clone();
                            w2.push(x);
                            next.push((n, w2));
                        }
                    }
                }
            }
            level = next;
        }
        Ok(None)
    }

    pub fn certificates(&self, prefixes: &[Vec<Directive>], max_k: usize) -> Vec<Result<Option<Certificate>>> {
        par::map(prefixes, |p| self.find_certificate(p, max_k))
    }

    pub fn report(&self, certificates: &[(Vec<Directive>, Result<Option<Certificate>>)]) -> SAdicReport {
        SAdicReport {
            schema: "pisot-disc/sadic-report/1",
            prefix_automaton_transitions: self.prefix.transition_count(),
            l_subsets: self
                .l_subsets
                .iter()
                .map(|s| s.iter().map(|&i| ['a', 'b', 'c'][i]).collect())
                .collect(),
            l_states: self.l.state_count(),
            l_sigma_states: self.l_sigma.state_count(),
            l0_states: self.l0.state_count(),
            l_star_states: self.l_star.state_count(),
            differences: self.differences.digits().iter().map(|d| d.name.clone()).collect(),
            certificates: certificates
                .iter()
                .map(|(p, r)| match r {
                    Ok(c) => CertificateRow {
                        prefix: directives_to_string(p),
                        certificate: c.clone(),
                        error: None,
                    },
                    Err(e) => CertificateRow {
                        prefix: directives_to_string(p),
                        certificate: None,
                        error: Some(e.to_string()),
                    },
                })
                .collect(),
        }
    }
}

/// Determinisation by subsets, also returning the subset behind each state.
fn subset_construction(a: &Automaton) -> (Automaton, Vec<Vec<usize>>) {
    let mut start: Vec<usize> = a.initial().iter().map(|&q| q as usize).collect();
    start.sort_unstable();
    let mut ids: FxHashMap<Vec<usize>, State> = FxHashMap::default();
    let mut sets = vec![start.clone()];
    ids.insert(start, 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut by_digit: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
        for &p in &sets[i] {
            for &(d, q) in a.transitions_from(p as State) {
                by_digit.entry(d).or_default().push(q as usize);
            }
        }
        for (d, mut set) in by_digit {
            set.sort_unstable();
            set.dedup();
            let id = *ids.entry(set.clone()).or_insert_with(|| {
                sets.push(set);
                (sets.len() - 1) as State
            });
            trans.push((i as State, d, id));
        }
        i += 1;
    }
    let finals: Vec<State> = sets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().any(|&q| a.is_final(q as State)))
        .map(|(i, _)| i as State)
        .collect();
    let det = Automaton::new(a.alphabet().clone(), sets.len(), trans, [0], finals).expect("valid subsets");
    (det, sets)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub prefix: String,
    pub k: usize,
    /// Digits of `t` over `Σ_σ`, least significant first.
    pub digits: Vec<usize>,
    pub t: String,
}

impl Certificate {
    fn new(s: &SAdic, prefix: &[Directive], w: &[usize]) -> Certificate {
        Certificate {
            prefix: directives_to_string(prefix),
            k: w.len(),
            digits: w.to_vec(),
            t: s.certificate_value(w).to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateRow {
    pub prefix: String,
    pub certificate: Option<Certificate>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SAdicReport {
    pub schema: &'static str,
    pub prefix_automaton_transitions: usize,
    pub l_subsets: Vec<String>,
    pub l_states: usize,
    pub l_sigma_states: usize,
    pub l0_states: usize,
    pub l_star_states: usize,
    pub differences: Vec<String>,
    pub certificates: Vec<CertificateRow>,
}

/// All `2^n` directive words of length `n`, σ before τ.
pub fn all_prefixes(n: usize) -> Vec<Vec<Directive>> {
    (0..1usize << n)
        .map(|bits| {
            (0..n)
                .map(|i| if bits >> (n - 1 - i) & 1 == 0 { Directive::Sigma } else { Directive::Tau })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn sadic() -> &'static SAdic {
        static S: std::sync::OnceLock<SAdic> = std::sync::OnceLock::new();
        S.get_or_init(|| SAdic::build().unwrap())
    }

    /// `ψ(Ab(v))` for the prefixes `v` of `s_0 … s_n(a)` followed by `a`.
    fn prefix_values(s: &SAdic, p: &[Directive]) -> HashSet<FieldElement> {
        let w = s.directed_word(p);
        let mut out = HashSet::new();
        let mut x = FieldElement::zero(&s.field);
        for &c in &w {
            if c == 0 {
                out.insert(x.clone());
            }
            x = &x + &s.psi[c];
        }
        out
    }

    /// Values `Σ u_i β^i` of the words of `L` whose tags spell `p`.
    fn language_values(s: &SAdic, p: &[Directive]) -> HashSet<FieldElement> {
        let digits = s.l.alphabet().digits();
        let mut out = HashSet::new();
        let mut stack = vec![(s.l.initial()[0], 0usize, FieldElement::zero(&s.field), FieldElement::one(&s.field))];
        while let Some((q, j, v, pw)) = stack.pop() {
            if j == p.len() {
                if s.l.is_final(q) {
                    out.insert(v);
                }
                continue;
            }
            for &(d, r) in s.l.transitions_from(q) {
                let dig = &digits[d as usize];
                if dig.tag.as_deref() != Some(p[j].tag()) {
                    continue;
                }
                let x = dig.scalar.as_ref().unwrap();
                stack.push((r, j + 1, &v + &(x * &pw), &pw * &s.beta));
            }
        }
        out
    }

    #[test]
    fn components() {
        let s = sadic();
        assert_eq!(s.tagged.len(), 6);
        assert_eq!(s.differences.len(), 8);
        assert_eq!(s.prefix.state_count(), 3);
        assert_eq!(s.l_subsets, vec![vec![0], vec![0, 2], vec![0, 1, 2]]);
        assert_eq!(s.l.state_count(), 3);
        assert_eq!(s.l0.state_count(), 62);
        assert!(s.l0.accepts(&[]));
    }

    #[test]
    fn prefix_automaton_edges() {
        let s = sadic();
        let find = |x: &[i64], t: Directive| {
            let d = tagged_digit(&FieldElement::from_i64s(&s.field, x), t);
            s.tagged.index_of(&d).unwrap() as u32
        };
        let out = |q: State| -> Vec<(u32, State)> { s.prefix.transitions_from(q).to_vec() };
        for (x, e) in [(&[0][..], 0), (&[1][..], 0), (&[2][..], 1)] {
            assert!(out(0).contains(&(find(x, Directive::Sigma), e)));
        }
        for (x, e) in [(&[0][..], 0), (&[1][..], 1), (&[-1, 1][..], 0)] {
            assert!(out(0).contains(&(find(x, Directive::Tau), e)));
        }
        for t in Directive::ALL {
            assert!(out(1).contains(&(find(&[0], t), 2)));
        }
    }

    #[test]
    fn language_matches_prefixes() {
        let s = sadic();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let p: Vec<Directive> = (0..n).map(|_| Directive::ALL[rng.gen_range(0..2)]).collect();
            assert_eq!(prefix_values(s, &p), language_values(s, &p), "{}", directives_to_string(&p));
        }
    }

    #[test]
    fn sigma_language_is_all_sigma_words() {
        let s = sadic();
        let p = vec![Directive::Sigma; 5];
        let mut via_l_sigma = HashSet::new();
        let mut stack = vec![(s.l_sigma.initial()[0], 0usize, FieldElement::zero(&s.field), FieldElement::one(&s.field))];
        let digits = s.sigma_digits.scalars().unwrap();
        while let Some((q, j, v, pw)) = stack.pop() {
            if j == p.len() {
                if s.l_sigma.is_final(q) {
                    via_l_sigma.insert(v);
                }
                continue;
            }
            for &(d, r) in s.l_sigma.transitions_from(q) {
                stack.push((r, j + 1, &v + &(&digits[d as usize] * &pw), &pw * &s.beta));
            }
        }
        assert_eq!(via_l_sigma, language_values(s, &p));
    }

    #[test]
    fn reference_certificates() {
        let s = sadic();
        let p = parse_directives("sstt").unwrap();
        assert!(s.verify_certificate(&p, &[1, 1, 0, 1]).unwrap());
        let p = parse_directives("ttttt").unwrap();
        assert!(s.verify_certificate(&p, &[0; 5]).unwrap());
        // Only σ^ω itself makes k = 0 trivial; six σ's leave the tail free.
        let p = parse_directives("ssssss").unwrap();
        assert!(!s.verify_certificate(&p, &[]).unwrap());
    }

    #[test]
    fn found_certificates_hold_on_points() {
        let s = sadic();
        for text in ["sstt", "ttttt", "ststst"] {
            let p = parse_directives(text).unwrap();
            let c = s.find_certificate(&p, 6).unwrap().expect(text);
            assert!(s.verify_certificate(&p, &c.digits).unwrap());
            // t + β^k ψ(D_{u_σ,a}) against ψ(D_{u,a}), on finite pieces of both.
            let t = s.certificate_value(&c.digits);
            let scale = (0..c.k).fold(FieldElement::one(&s.field), |acc, _| &acc * &s.beta);
            let small = prefix_values(s, &[Directive::Sigma; 5]);
            let mut long = p.clone();
            long.resize(5 + c.k + 4, Directive::Sigma);
            let big = prefix_values(s, &long);
            for x in &small {
                assert!(big.contains(&(&t + &(&scale * x))), "{text}");
            }
        }
    }

    #[test]
    fn parse() {
        assert_eq!(parse_directives("σσττ").unwrap(), parse_directives("sstt").unwrap());
        assert!(parse_directives("x").is_err());
        assert_eq!(all_prefixes(2).len(), 4);
    }
}

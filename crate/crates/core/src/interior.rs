// SPDX-License-Identifier: Apache-2.0

//! Interior of the value set of a regular language, and the pure discreteness
//! test built on it.
//!
//! For `L` over `Σ` and an extended alphabet `Σ'` containing `0`,
//! `L_int = Z(S(Z(p₁(Σ'^* × L0^* ∩ L_rel))))` accepts `u` exactly when
//! `Q_u + λ^{n+|u|} Q_{Σ'^*} ⊆ Q_L` for some `n`. When `Q_{Σ'^*}` is a
//! neighbourhood of `0` this says that `Q_u` is an interior point of `Q_L`.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::automata::{Automaton, Digit, DigitAlphabet};
use crate::error::{Error, Result};
use crate::numberfield::FieldElement;
use crate::par;
use crate::relations::{RelationMachine, DEFAULT_STATE_BUDGET};
use crate::substitution::{classify, prepare, AbelianVector, Prepared, Substitution};

/// How the extended alphabet `Σ'` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AlphabetPreset {
    /// `(Σ_s + S_r) ∩ N^A` with `S_r` the combinations `Σ c_ab (e_a − e_b)`,
    /// `Σ|c_ab| ≤ r`.
    Lattice { radius: u32 },
    /// `Σ_s` itself.
    SubstitutionDigits,
    /// `Σ_s ∪ {0, 1, …, ⌈β⌉ − 2}`.
    SmallIntegers,
}

impl Default for AlphabetPreset {
    fn default() -> Self {
        AlphabetPreset::Lattice { radius: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct InteriorOptions {
    pub preset: AlphabetPreset,
    /// Compute the interior for every letter, not only the seed letter.
    pub all_letters: bool,
    pub state_budget: usize,
}

impl Default for InteriorOptions {
    fn default() -> Self {
        InteriorOptions {
            preset: AlphabetPreset::default(),
            all_letters: false,
            state_budget: DEFAULT_STATE_BUDGET,
        }
    }
}

/// Combinations `Σ c_ab (e_a − e_b)` over pairs `a < b` with `Σ|c_ab| ≤ r`.
pub fn lattice_ball(d: usize, r: u32) -> Vec<AbelianVector> {
    let gens: Vec<AbelianVector> = (0..d)
        .flat_map(|a| (a + 1..d).map(move |b| AbelianVector::unit(d, a).sub(&AbelianVector::unit(d, b))))
        .collect();
    let mut out = vec![AbelianVector::zero(d)];
    let mut frontier = out.clone();
    for _ in 0..r {
        let mut next = Vec::new();
        for v in &frontier {
            for g in &gens {
                for w in [v.add(g), v.sub(g)] {
                    if !out.contains(&w) {
                        out.push(w.clone());
                        next.push(w);
                    }
                }
            }
        }
        frontier = next;
    }
    out
}

/// Extended alphabet for a prepared substitution. It always contains `Σ_s`
/// (first, in its own order) and the zero digit.
pub fn default_extended_alphabet(p: &Prepared, preset: AlphabetPreset) -> Result<Arc<DigitAlphabet>> {
    let sigma = p.digit_alphabet();
    let d = p.power.size();
    let digit = |v: AbelianVector| {
        let x = p.psi.apply(&v);
        let mut g = Digit::from_vector(v.clone(), Some(x.clone()));
        g.name = format!("{x} | {v}");
        g
    };
    let mut digits: Vec<Digit> = sigma.digits().to_vec();
    digits.push(digit(AbelianVector::zero(d)));
    match preset {
        AlphabetPreset::Lattice { radius } => {
            let ball = lattice_ball(d, radius);
            for t in sigma.digits() {
                let v = t.vector.as_ref().ok_or_else(|| Error::MissingScalar(t.name.clone()))?;
                for y in &ball {
                    digits.push(digit(v.add(y)));
                }
            }
        }
        AlphabetPreset::SubstitutionDigits => {}
        AlphabetPreset::SmallIntegers => {
            let beta = p.field().root_f64(p.field().expanding_index()).re;
            let top = beta.ceil() as i64 - 2;
            let field = p.field();
            // Integers have no abelian form in general; they are scalar digits,
            // scaled like the ψ-images.
            for n in -1..=top.max(0) {
                let x = FieldElement::from_int(field, n).scale(p.psi.scale());
                if !digits.iter().any(|g| g.scalar.as_ref() == Some(&x)) {
                    digits.push(Digit::from_scalar(x));
                }
            }
        }
    }
    // Every value in `Q_L` is a non-negative vector, so a digit outside the
    // positive cone makes `S` reject everything; such digits are dropped.
    let e = p.field().expanding_index();
    digits.retain(|g| match (&g.vector, &g.scalar) {
        (Some(v), _) => v.0.iter().all(|&x| x >= 0),
        (None, Some(x)) => x.evaluate_f64(e).re >= 0.0,
        _ => false,
    });
    // Deduplicate by value; ψ is injective, so vectors and values agree.
    let mut seen = std::collections::HashSet::new();
    digits.retain(|g| seen.insert(g.value()));
    Ok(DigitAlphabet::new(digits))
}

/// `L_int` over `sigma_prime` for a language `l` (least significant digit
/// first) over scalar digits, in expansion base `base`.
pub fn compute_l_int(l: &Automaton, sigma_prime: &Arc<DigitAlphabet>, base: &FieldElement, budget: usize) -> Result<Automaton> {
    sigma_prime.zero()?;
    let rel = RelationMachine::build(sigma_prime, l.alphabet(), base, budget)?;
    let padded = l.concat_zero_star()?;
    let projected = rel.project_left(None, &padded)?;
    let det = projected.determinize();
    if det.state_count() > budget {
        return Err(Error::StateBudget(budget));
    }
    let z1 = det.minimize()?.z_closure()?.minimize()?;
    let s = z1.s_stabilizer()?.minimize()?;
    s.z_closure()?.minimize()
}

/// Minimal automaton of `L ∩ L_int` for the least-significant-first language
/// `L` of the discrete-line points followed by `letter`.
pub fn interior_language(p: &Prepared, letter: usize, sigma_prime: &Arc<DigitAlphabet>, budget: usize) -> Result<Automaton> {
    let l = p.language(letter);
    let sigma_prime = sigma_prime.union(l.alphabet());
    let l_int = compute_l_int(&l, &sigma_prime, &p.base, budget)?;
    let ext = l.extend_alphabet(sigma_prime)?;
    ext.intersect(&l_int)?.determinize().minimize()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    PureDiscrete,
    NotDetected,
    PreconditionFailed,
}

impl Status {
    /// Process exit code used by the command line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::PureDiscrete => 0,
            Status::NotDetected => 3,
            Status::PreconditionFailed => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LetterResult {
    pub letter: char,
    /// States of the minimal (sink-free) automaton of the interior language.
    pub states: usize,
    pub empty: bool,
    /// Shortest accepted word, as digit names, least significant first.
    pub witness: Option<Vec<String>>,
    pub witness_value: Option<String>,
    pub millis: u64,
    #[serde(skip)]
    pub automaton: Automaton,
}

#[derive(Clone, Debug, Serialize)]
pub struct InteriorReport {
    pub schema: &'static str,
    pub substitution: String,
    pub status: Status,
    pub reasons: Vec<String>,
    pub seed_letter: Option<char>,
    pub power: Option<u32>,
    pub preset: AlphabetPreset,
    pub extended_alphabet: Vec<String>,
    pub letters: Vec<LetterResult>,
    /// Whether emptiness agrees across letters (only with all letters).
    pub letters_consistent: Option<bool>,
    pub adequacy_assumption: String,
    pub suggestion: Option<String>,
    pub error: Option<String>,
    pub millis: u64,
}

const ADEQUACY: &str = "verdicts assume that the values of the extended alphabet have non-empty interior; \
this is not checked, and an empty interior language is never read as a negative answer";

impl InteriorReport {
    fn new(s: &Substitution, preset: AlphabetPreset) -> InteriorReport {
        InteriorReport {
            schema: "pisot-disc/interior-report/1",
            substitution: s.to_string(),
            status: Status::NotDetected,
            reasons: Vec::new(),
            seed_letter: None,
            power: None,
            preset,
            extended_alphabet: Vec::new(),
            letters: Vec::new(),
            letters_consistent: None,
            adequacy_assumption: ADEQUACY.into(),
            suggestion: None,
            error: None,
            millis: 0,
        }
    }

    pub fn witness(&self) -> Option<&[String]> {
        self.letters.iter().find_map(|l| l.witness.as_deref())
    }

    /// JSON form; `meta = false` drops the timings so that identical runs give
    /// identical bytes.
    pub fn to_json(&self, meta: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serialises");
        if !meta {
            v.as_object_mut().map(|o| o.remove("millis"));
            if let Some(ls) = v.get_mut("letters").and_then(|l| l.as_array_mut()) {
                for l in ls {
                    l.as_object_mut().map(|o| o.remove("millis"));
                }
            }
        }
        v
    }
}

fn letter_result(p: &Prepared, letter: usize, sigma_prime: &Arc<DigitAlphabet>, budget: usize) -> Result<LetterResult> {
    let start = Instant::now();
    let a = interior_language(p, letter, sigma_prime, budget)?;
    let witness = a.shortest_word();
    if let Some(w) = &witness {
        // Membership re-check: the witness lies in the interior language and in L.
        let l = p.language(letter).extend_alphabet(a.alphabet().clone())?;
        if !a.accepts(w) || !l.accepts(w) {
            return Err(Error::InvalidArgument("witness failed membership re-check".into()));
        }
    }
    let names = witness
        .as_ref()
        .map(|w| w.iter().map(|&d| a.alphabet().digit(d as usize).name.clone()).collect());
    let value = match &witness {
        Some(w) => Some(p.value(a.alphabet(), w)?.to_string()),
        None => None,
    };
    Ok(LetterResult {
        letter: p.power.alphabet()[letter],
        states: a.state_count(),
        empty: witness.is_none(),
        witness: names,
        witness_value: value,
        millis: start.elapsed().as_millis() as u64,
        automaton: a,
    })
}

/// Classifies `s` and, when it qualifies, tests the interior of the seed
/// letter's language (or of every letter's).
pub fn decide_pure_discreteness(s: &Substitution, opts: &InteriorOptions) -> InteriorReport {
    let start = Instant::now();
    let mut report = InteriorReport::new(s, opts.preset);
    let class = classify(s);
    let failures = class.failures();
    if !failures.is_empty() {
        report.status = Status::PreconditionFailed;
        report.reasons = failures;
        report.millis = start.elapsed().as_millis() as u64;
        return report;
    }
    let mut run = || -> Result<()> {
        let p = prepare(s)?;
        report.seed_letter = Some(s.alphabet()[p.seed]);
        report.power = Some(class.power_for_fixed_point);
        let sigma_prime = default_extended_alphabet(&p, opts.preset)?;
        report.extended_alphabet = sigma_prime.digits().iter().map(|d| d.name.clone()).collect();
        let letters: Vec<usize> = if opts.all_letters {
            (0..s.size()).collect()
        } else {
            vec![p.seed]
        };
        let results = par::map(&letters, |&b| letter_result(&p, b, &sigma_prime, opts.state_budget));
        for r in results {
            report.letters.push(r?);
        }
        if opts.all_letters {
            let first = report.letters[0].empty;
            report.letters_consistent = Some(report.letters.iter().all(|l| l.empty == first));
        }
        Ok(())
    };
    match run() {
        Ok(()) => {
            if report.letters.iter().any(|l| !l.empty) {
                report.status = Status::PureDiscrete;
            } else {
                report.status = Status::NotDetected;
                report.suggestion = Some("retry with a larger lattice radius".into());
            }
        }
        Err(Error::Precondition(m)) => {
            report.status = Status::PreconditionFailed;
            report.reasons.push(m);
        }
        Err(e) => {
            report.status = Status::NotDetected;
            report.error = Some(e.to_string());
            report.suggestion = Some("raise the state budget or lower the lattice radius".into());
        }
    }
    report.millis = start.elapsed().as_millis() as u64;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::parse_substitution;

    fn prepared(t: &str) -> Prepared {
        prepare(&parse_substitution(t).unwrap()).unwrap()
    }

    #[test]
    fn lattice_ball_sizes() {
        assert_eq!(lattice_ball(3, 0).len(), 1);
        assert_eq!(lattice_ball(3, 1).len(), 7);
        assert_eq!(lattice_ball(2, 2).len(), 5);
    }

    #[test]
    fn radius_zero_is_sigma() {
        let p = prepared("a->ab;b->a");
        let a = default_extended_alphabet(&p, AlphabetPreset::Lattice { radius: 0 }).unwrap();
        assert_eq!(a.len(), p.digit_alphabet().len());
        let a1 = default_extended_alphabet(&p, AlphabetPreset::Lattice { radius: 1 }).unwrap();
        // {0, e_a} + {0, ±(e_a − e_b)}, keeping non-negative vectors: {0, e_a, e_b}
        assert_eq!(a1.len(), 3);
    }

    #[test]
    fn fibonacci_interior_is_everything() {
        let p = prepared("a->ab;b->a");
        let sp = default_extended_alphabet(&p, AlphabetPreset::default()).unwrap();
        for b in 0..2 {
            let int = interior_language(&p, b, &sp, DEFAULT_STATE_BUDGET).unwrap();
            let l = p.language(b).extend_alphabet(int.alphabet().clone()).unwrap();
            assert!(int.equivalent(&l.determinize()).unwrap());
        }
    }

    #[test]
    fn reducible_is_rejected() {
        let r = decide_pure_discreteness(&parse_substitution("a->ab;b->ab").unwrap(), &InteriorOptions::default());
        assert_eq!(r.status, Status::PreconditionFailed);
        assert!(r.reasons.iter().any(|m| m.contains("irreducible")));
    }
}

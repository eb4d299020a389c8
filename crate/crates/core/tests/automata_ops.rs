// SPDX-License-Identifier: Apache-2.0

//! Automata operations against a naive oracle that simulates the raw
//! transition relation on every word up to length 7.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use pisot_core::automata::{Automaton, DigitAlphabet, State};
use proptest::prelude::*;

const MAX_LEN: usize = 7;

#[derive(Clone, Debug)]
struct Raw {
    k: usize,
    n: usize,
    trans: Vec<(State, u32, State)>,
    initial: Vec<State>,
    finals: Vec<State>,
}

impl Raw {
    fn alphabet(&self) -> Arc<DigitAlphabet> {
        let names: Vec<String> = (0..self.k).map(|i| i.to_string()).collect();
        DigitAlphabet::from_names(&names)
    }

    fn build(&self, alphabet: &Arc<DigitAlphabet>) -> Automaton {
        Automaton::new(
            alphabet.clone(),
            self.n,
            self.trans.clone(),
            self.initial.clone(),
            self.finals.clone(),
        )
        .unwrap()
    }

    fn start(&self) -> BTreeSet<State> {
        self.initial.iter().copied().collect()
    }

    fn step(&self, s: &BTreeSet<State>, d: u32) -> BTreeSet<State> {
        self.trans
            .iter()
            .filter(|(p, e, _)| *e == d && s.contains(p))
            .map(|t| t.2)
            .collect()
    }

    fn run(&self, w: &[u32]) -> BTreeSet<State> {
        w.iter().fold(self.start(), |s, &d| self.step(&s, d))
    }

    fn accepting(&self, s: &BTreeSet<State>) -> bool {
        s.iter().any(|q| self.finals.contains(q))
    }

    fn accepts(&self, w: &[u32]) -> bool {
        self.accepting(&self.run(w))
    }

    /// `∃ n, w 0^n ∈ L`; the state sets along the zeros repeat within
    /// `2^n` steps.
    fn z_accepts(&self, w: &[u32]) -> bool {
        let mut s = self.run(w);
        for _ in 0..=(1usize << self.n) {
            if self.accepting(&s) {
                return true;
            }
            s = self.step(&s, 0);
        }
        false
    }

    /// `w Σ* ⊆ L`, by exploring every state set reachable after `w`.
    fn s_accepts(&self, w: &[u32]) -> bool {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([self.run(w)]);
        while let Some(s) = queue.pop_front() {
            if !seen.insert(s.clone()) {
                continue;
            }
            if !self.accepting(&s) {
                return false;
            }
            for d in 0..self.k as u32 {
                queue.push_back(self.step(&s, d));
            }
        }
        true
    }
}

fn words(k: usize, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for d in 0..k as u32 {
                let mut v = w.clone();
                v.push(d);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn raw_with(k: usize) -> impl Strategy<Value = Raw> {
    (1usize..=5).prop_flat_map(move |n| {
        let t = (0..n as State, 0..k as u32, 0..n as State);
        (
            prop::collection::vec(t, 0..=3 * n),
            prop::collection::vec(0..n as State, 1..=2),
            prop::collection::vec(0..n as State, 0..=n),
        )
            .prop_map(move |(trans, initial, finals)| Raw {
                k,
                n,
                trans,
                initial,
                finals,
            })
    })
}

fn raw() -> impl Strategy<Value = Raw> {
    (1usize..=4).prop_flat_map(raw_with)
}

fn pair() -> impl Strategy<Value = (Raw, Raw)> {
    (1usize..=4).prop_flat_map(|k| (raw_with(k), raw_with(k)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn determinize_and_minimize_keep_the_language(r in raw()) {
        let a = r.build(&r.alphabet());
        let d = a.determinize();
        let m = a.determinize().minimize().unwrap();
        prop_assert!(d.is_deterministic() && m.is_deterministic());
        for w in words(r.k, MAX_LEN) {
            let expect = r.accepts(&w);
            prop_assert_eq!(a.accepts(&w), expect);
            prop_assert_eq!(d.accepts(&w), expect);
            prop_assert_eq!(m.accepts(&w), expect);
        }
        prop_assert!(m.state_count() <= d.state_count().max(1));
    }

    #[test]
    fn minimize_is_idempotent_and_canonical(r in raw()) {
        let a = r.build(&r.alphabet());
        let m = a.determinize().minimize().unwrap();
        prop_assert!(m.minimize().unwrap().same_structure(&m));
        // The same language presented differently: mirror twice, then add
        // an unreachable copy of every state.
        let mut t = r.trans.clone();
        t.extend(r.trans.iter().map(|&(p, d, q)| (p + r.n as State, d, q + r.n as State)));
        let f: Vec<State> = r.finals.iter().flat_map(|&q| [q, q + r.n as State]).collect();
        let b = Automaton::new(r.alphabet(), 2 * r.n, t, r.initial.clone(), f).unwrap();
        let b = b.mirror().mirror();
        prop_assert!(b.determinize().minimize().unwrap().same_structure(&m));
    }

    #[test]
    fn complement_and_mirror(r in raw()) {
        let a = r.build(&r.alphabet());
        let c = a.complement();
        let rev = a.mirror();
        for w in words(r.k, MAX_LEN) {
            prop_assert_eq!(c.accepts(&w), !r.accepts(&w));
            let back: Vec<u32> = w.iter().rev().copied().collect();
            prop_assert_eq!(rev.accepts(&w), r.accepts(&back));
        }
    }

    #[test]
    fn intersection_and_inclusion((r, s) in pair()) {
        let alpha = r.alphabet();
        let a = r.build(&alpha);
        let b = s.build(&alpha);
        let i = a.intersect(&b).unwrap();
        let mut counterexample = false;
        for w in words(r.k, MAX_LEN) {
            prop_assert_eq!(i.accepts(&w), r.accepts(&w) && s.accepts(&w));
            counterexample |= r.accepts(&w) && !s.accepts(&w);
        }
        let sub = a.is_subset(&b).unwrap();
        if counterexample {
            prop_assert!(!sub);
        }
        if !sub {
            // The certificate of non-inclusion is a real word.
            let w = a.intersect(&b.complement()).unwrap().shortest_word().unwrap();
            prop_assert!(r.accepts(&w) && !s.accepts(&w));
        }
        prop_assert!(i.is_subset(&a).unwrap() && i.is_subset(&b).unwrap());
        prop_assert!(a.equivalent(&a.determinize().minimize().unwrap()).unwrap());
    }

    #[test]
    fn zero_closures(r in raw()) {
        let a = r.build(&r.alphabet());
        let z = a.z_closure().unwrap();
        let c = a.concat_zero_star().unwrap();
        let zc = c.z_closure().unwrap();
        for w in words(r.k, MAX_LEN) {
            prop_assert_eq!(z.accepts(&w), r.z_accepts(&w));
            let cut = w.iter().rposition(|&d| d != 0).map_or(0, |i| i + 1);
            let padded = (cut..=w.len()).any(|j| r.accepts(&w[..j]));
            prop_assert_eq!(c.accepts(&w), padded);
            // L ⊆ Z(L·0*).
            if r.accepts(&w) {
                prop_assert!(zc.accepts(&w));
            }
        }
    }

    #[test]
    fn stabilizer(r in raw()) {
        let a = r.build(&r.alphabet()).determinize();
        let s = a.s_stabilizer().unwrap();
        for w in words(r.k, MAX_LEN) {
            let inside = s.accepts(&w);
            prop_assert_eq!(inside, r.s_accepts(&w));
            // S(L)·Σ ⊆ S(L) ⊆ L.
            if inside {
                prop_assert!(r.accepts(&w));
                for d in 0..r.k as u32 {
                    let mut v = w.clone();
                    v.push(d);
                    prop_assert!(s.accepts(&v));
                }
            }
        }
    }

    #[test]
    fn prepend_and_serialisation(r in raw(), prefix in prop::collection::vec(0u32..1, 0..3)) {
        let alpha = r.alphabet();
        let a = r.build(&alpha);
        let p = a.prepend_word(&prefix);
        let back = Automaton::from_json(&a.to_json(), None).unwrap();
        let dot = Automaton::from_dot(&a.to_dot("t"), alpha.clone()).unwrap();
        for w in words(r.k, 5) {
            let mut v = prefix.clone();
            v.extend(&w);
            prop_assert_eq!(p.accepts(&v), r.accepts(&w));
            prop_assert_eq!(back.accepts(&w), r.accepts(&w));
            prop_assert_eq!(dot.accepts(&w), r.accepts(&w));
        }
    }
}

#[test]
fn trivial_inclusions() {
    let alpha = DigitAlphabet::from_names(&["0", "1"]);
    let l = Automaton::from_words(alpha.clone(), &[vec![1], vec![0, 1]]);
    assert!(l.is_subset(&l).unwrap());
    assert!(Automaton::empty(alpha.clone()).is_subset(&l).unwrap());
    assert!(l.is_subset(&Automaton::universal(alpha)).unwrap());
}

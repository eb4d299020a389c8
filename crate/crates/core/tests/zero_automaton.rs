// SPDX-License-Identifier: Apache-2.0

//! Zero and relations automata against exact evaluation of every word.

use std::collections::VecDeque;
use std::sync::Arc;

use pisot_core::automata::{Automaton, DigitAlphabet, State};
use pisot_core::numberfield::{make_field, FieldElement, MonicIntPoly, NumberField};
use pisot_core::relations::{build_relations_automaton, build_zero_automaton, q_inclusion, DEFAULT_STATE_BUDGET};
use proptest::prelude::*;
use rustc_hash::FxHashMap;

fn field(coeffs: &[i64]) -> Arc<NumberField> {
    make_field(&MonicIntPoly::new(coeffs.to_vec()).unwrap(), 64).unwrap()
}

fn digits(f: &Arc<NumberField>, ds: &[&[i64]]) -> Arc<DigitAlphabet> {
    DigitAlphabet::from_scalars(ds.iter().map(|c| FieldElement::from_i64s(f, c)))
}

/// `Σ β^i w_i`, least significant digit first.
fn value(alpha: &DigitAlphabet, beta: &FieldElement, w: &[u32]) -> FieldElement {
    let xs: Vec<FieldElement> = alpha.digits().iter().map(|d| d.scalar.clone().unwrap()).collect();
    let mut acc = FieldElement::zero(beta.field());
    for &d in w.iter().rev() {
        acc = &(&acc * beta) + &xs[d as usize];
    }
    acc
}

fn all_words(k: usize, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for d in 0..k as u32 {
                let mut v: Vec<u32> = Vec::clone(w);
                v.push(d);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn exhaustive(f: &Arc<NumberField>, ds: &[&[i64]], max_len: usize) -> usize {
    let alpha = digits(f, ds);
    let beta = FieldElement::beta(f);
    let z = build_zero_automaton(&alpha, &beta, DEFAULT_STATE_BUDGET).unwrap();
    let mut zeros = 0;
    for w in all_words(alpha.len(), max_len) {
        let is_zero = value(&alpha, &beta, &w).is_zero();
        assert_eq!(z.accepts(&w), is_zero, "{w:?} over {alpha:?}");
        zeros += is_zero as usize;
    }
    zeros
}

#[test]
fn exhaustive_small_instances() {
    let fib = field(&[-1, -1, 1]);
    let trib = field(&[-1, -1, -1, 1]);
    let small = field(&[-1, -1, 0, 1]);
    let sadic = field(&[-1, 0, -2, 1]);
    assert!(exhaustive(&fib, &[&[-1], &[0], &[1]], 7) > 1);
    assert!(exhaustive(&fib, &[&[-2], &[-1], &[0], &[1], &[2]], 7) > 1);
    assert!(exhaustive(&trib, &[&[-1], &[0], &[1]], 7) > 1);
    assert!(exhaustive(&trib, &[&[0], &[1], &[-1, 1], &[0, -1]], 7) > 1);
    assert!(exhaustive(&small, &[&[-1], &[0], &[1], &[0, 1], &[0, -1]], 7) > 1);
    assert!(exhaustive(&sadic, &[&[-1], &[0], &[1], &[2], &[1, -1]], 7) > 1);
    // Digits {0}: the language is 0*.
    assert_eq!(exhaustive(&trib, &[&[0]], 7), 8);
}

/// Remainder machine explored without any pruning, up to a state budget,
/// then cut down to the states that return to zero.
fn unpruned(alpha: &Arc<DigitAlphabet>, beta: &FieldElement, budget: usize) -> Automaton {
    let inv = beta.inverse().unwrap();
    let xs: Vec<FieldElement> = alpha.digits().iter().map(|d| d.scalar.clone().unwrap()).collect();
    let zero = FieldElement::zero(beta.field());
    let mut ids: FxHashMap<FieldElement, State> = FxHashMap::default();
    let mut states = vec![zero.clone()];
    ids.insert(zero, 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0 as State]);
    while let Some(p) = queue.pop_front() {
        for (d, x) in xs.iter().enumerate() {
            let r = &(&states[p as usize] + x) * &inv;
            let q = match ids.get(&r) {
                Some(&q) => q,
                None if states.len() < budget => {
                    let q = states.len() as State;
                    ids.insert(r.clone(), q);
                    states.push(r);
                    queue.push_back(q);
                    q
                }
                None => continue,
            };
            edges.push((p, d as u32, q));
        }
    }
    Automaton::new(alpha.clone(), states.len(), edges, [0], [0]).unwrap()
}

#[test]
fn pruning_drops_only_useless_states() {
    let cases: Vec<(Vec<i64>, Vec<Vec<i64>>)> = vec![
        (vec![-1, -1, 1], vec![vec![-1], vec![0], vec![1]]),
        (vec![-1, -1, -1, 1], vec![vec![-1], vec![0], vec![1]]),
        (vec![-1, -1, 0, 1], vec![vec![0], vec![1], vec![-1]]),
    ];
    for (poly, ds) in cases {
        let f = field(&poly);
        let ds: Vec<&[i64]> = ds.iter().map(|d| d.as_slice()).collect();
        let alpha = digits(&f, &ds);
        let beta = FieldElement::beta(&f);
        let pruned = build_zero_automaton(&alpha, &beta, DEFAULT_STATE_BUDGET).unwrap();
        let full = unpruned(&alpha, &beta, 10_000);
        let a = pruned.determinize().minimize().unwrap();
        let b = full.determinize().minimize().unwrap();
        assert!(a.same_structure(&b), "{poly:?}");
        assert_eq!(pruned.state_count(), full.trim().state_count(), "{poly:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn random_digit_sets(
        which in 0usize..3,
        ds in prop::collection::btree_set((-2i64..=2, -1i64..=1), 1..=4),
    ) {
        let poly: &[i64] = [&[-1, -1, 1][..], &[-1, -1, -1, 1], &[-1, 0, -2, 1]][which];
        let f = field(poly);
        let mut ds: Vec<[i64; 2]> = ds.into_iter().map(|(a, b)| [a, b]).collect();
        if !ds.contains(&[0, 0]) {
            ds.push([0, 0]);
        }
        let refs: Vec<&[i64]> = ds.iter().map(|d| d.as_slice()).collect();
        let alpha = digits(&f, &refs);
        let beta = FieldElement::beta(&f);
        let z = build_zero_automaton(&alpha, &beta, DEFAULT_STATE_BUDGET).unwrap();
        for w in all_words(alpha.len(), 5) {
            prop_assert_eq!(z.accepts(&w), value(&alpha, &beta, &w).is_zero());
        }
    }
}

#[test]
fn relations_match_brute_force() {
    let trib = field(&[-1, -1, -1, 1]);
    let beta = FieldElement::beta(&trib);
    let a = digits(&trib, &[&[0], &[1]]);
    let b = digits(&trib, &[&[0], &[1], &[-1, 1]]);
    let rel = build_relations_automaton(&a, &b, &beta, DEFAULT_STATE_BUDGET).unwrap();
    let mut equal = 0;
    for w in all_words(a.len() * b.len(), 5) {
        let (u, v): (Vec<u32>, Vec<u32>) = w
            .iter()
            .map(|&p| ((p as usize / b.len()) as u32, (p as usize % b.len()) as u32))
            .unzip();
        let same = value(&a, &beta, &u) == value(&b, &beta, &v);
        assert_eq!(rel.accepts(&w), same, "{u:?} {v:?}");
        equal += same as usize;
    }
    assert!(equal > 0);
    // (u, u) is always accepted.
    let same = build_relations_automaton(&a, &a, &beta, DEFAULT_STATE_BUDGET).unwrap();
    for u in all_words(2, 5) {
        let w: Vec<u32> = u.iter().map(|&d| d * 2 + d).collect();
        assert!(same.accepts(&w));
    }
}

#[test]
fn golden_mean_defining_relation() {
    let fib = field(&[-1, -1, 1]);
    let beta = FieldElement::beta(&fib);
    let a = digits(&fib, &[&[0], &[1]]);
    let rel = build_relations_automaton(&a, &a, &beta, DEFAULT_STATE_BUDGET).unwrap();
    // (001, 110) least significant first: β² = 1 + β.
    let pair = |x: u32, y: u32| x * 2 + y;
    assert!(rel.accepts(&[pair(0, 1), pair(0, 1), pair(1, 0)]));
    assert!(!rel.accepts(&[pair(1, 1), pair(0, 1), pair(1, 0)]));
}

#[test]
fn value_inclusion_examples() {
    let trib = field(&[-1, -1, -1, 1]);
    let beta = FieldElement::beta(&trib);
    let a = digits(&trib, &[&[0], &[1]]);
    let l = Automaton::from_words(a.clone(), &[vec![1], vec![0, 1], vec![1, 1, 0, 1]]);
    assert!(q_inclusion(&l, &l, &beta, DEFAULT_STATE_BUDGET).unwrap());
    let zero = Automaton::from_words(a.clone(), &[vec![0]]);
    let with_zero = Automaton::from_words(a.clone(), &[vec![], vec![1]]);
    assert!(q_inclusion(&zero, &with_zero, &beta, DEFAULT_STATE_BUDGET).unwrap());
    assert!(!q_inclusion(&zero, &l, &beta, DEFAULT_STATE_BUDGET).unwrap());
    // 1 + β + β² = β³: the word 111 has the value of 0001.
    let cube = Automaton::from_words(a.clone(), &[vec![0, 0, 0, 1]]);
    let ones = Automaton::from_words(a.clone(), &[vec![1, 1, 1]]);
    assert!(q_inclusion(&ones, &cube, &beta, DEFAULT_STATE_BUDGET).unwrap());
    assert!(q_inclusion(&cube, &ones, &beta, DEFAULT_STATE_BUDGET).unwrap());
}

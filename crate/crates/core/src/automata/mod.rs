// SPDX-License-Identifier: Apache-2.0

//! Finite automata over digit alphabets.
//!
//! Automata are immutable values. Deterministic automata may be partial;
//! a missing transition leads to an implicit non-accepting sink. Operations
//! that need completeness add the sink themselves.

mod alphabet;
mod determinize;
mod io;
mod minimize;

use std::collections::VecDeque;
use std::sync::Arc;

pub use alphabet::{Digit, DigitAlphabet};

use crate::error::{Error, Result};

pub type State = u32;
pub(crate) const NONE: State = State::MAX;

#[derive(Clone, Debug)]
pub struct Automaton {
    alphabet: Arc<DigitAlphabet>,
    /// Outgoing transitions `(digit, target)` per state, sorted and unique.
    trans: Vec<Vec<(u32, State)>>,
    initial: Vec<State>,
    finals: Vec<bool>,
    deterministic: bool,
}

impl Automaton {
    /// Builds an automaton from a transition list `(from, digit, to)`.
    pub fn new(
        alphabet: Arc<DigitAlphabet>,
        n_states: usize,
        transitions: impl IntoIterator<Item = (State, u32, State)>,
        initial: impl IntoIterator<Item = State>,
        finals: impl IntoIterator<Item = State>,
    ) -> Result<Automaton> {
        let mut trans = vec![Vec::new(); n_states];
        for (p, d, q) in transitions {
            if p as usize >= n_states || q as usize >= n_states {
                return Err(Error::InvalidArgument(format!(
                    "transition {p} -> {q} outside {n_states} states"
                )));
            }
            if d as usize >= alphabet.len() {
                return Err(Error::InvalidArgument(format!(
                    "digit index {d} outside alphabet of size {}",
                    alphabet.len()
                )));
            }
            trans[p as usize].push((d, q));
        }
        let mut fin = vec![false; n_states];
        for f in finals {
            *fin.get_mut(f as usize).ok_or_else(|| {
                Error::InvalidArgument(format!("final state {f} outside {n_states} states"))
            })? = true;
        }
        let mut init: Vec<State> = initial.into_iter().collect();
        if init.iter().any(|&i| i as usize >= n_states) {
            return Err(Error::InvalidArgument("initial state out of range".into()));
        }
        init.sort_unstable();
        init.dedup();
        Ok(Automaton::from_parts(alphabet, trans, init, fin))
    }

    pub(crate) fn from_parts(
        alphabet: Arc<DigitAlphabet>,
        mut trans: Vec<Vec<(u32, State)>>,
        initial: Vec<State>,
        finals: Vec<bool>,
    ) -> Automaton {
        let mut deterministic = initial.len() <= 1;
        for t in trans.iter_mut() {
            t.sort_unstable();
            t.dedup();
            if deterministic && t.windows(2).any(|w| w[0].0 == w[1].0) {
                deterministic = false;
            }
        }
        Automaton {
            alphabet,
            trans,
            initial,
            finals,
            deterministic,
        }
    }

    /// Automaton with no states, recognising the empty language.
    pub fn empty(alphabet: Arc<DigitAlphabet>) -> Automaton {
        Automaton::from_parts(alphabet, vec![], vec![], vec![])
    }

    /// One-state automaton recognising every word.
    pub fn universal(alphabet: Arc<DigitAlphabet>) -> Automaton {
        let t = (0..alphabet.len() as u32).map(|d| (d, 0)).collect();
        Automaton::from_parts(alphabet, vec![t], vec![0], vec![true])
    }

    /// Automaton recognising exactly the given words.
    pub fn from_words(alphabet: Arc<DigitAlphabet>, words: &[Vec<u32>]) -> Automaton {
        let mut trans: Vec<Vec<(u32, State)>> = vec![vec![]];
        let mut finals = vec![false];
        for w in words {
            let mut q = 0usize;
            for &d in w {
                let next = trans[q].iter().find(|t| t.0 == d).map(|t| t.1);
                q = match next {
                    Some(n) => n as usize,
                    None => {
                        trans.push(vec![]);
                        finals.push(false);
                        let n = trans.len() - 1;
                        trans[q].push((d, n as State));
                        n
                    }
                };
            }
            finals[q] = true;
        }
        Automaton::from_parts(alphabet, trans, vec![0], finals)
    }

    pub fn alphabet(&self) -> &Arc<DigitAlphabet> {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn transition_count(&self) -> usize {
        self.trans.iter().map(|t| t.len()).sum()
    }

    pub fn initial(&self) -> &[State] {
        &self.initial
    }

    pub fn is_final(&self, q: State) -> bool {
        self.finals[q as usize]
    }

    pub fn finals(&self) -> Vec<State> {
        (0..self.trans.len() as State).filter(|&q| self.finals[q as usize]).collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn transitions_from(&self, q: State) -> &[(u32, State)] {
        &self.trans[q as usize]
    }

    /// All transitions `(from, digit, to)` in state then digit order.
    pub fn transitions(&self) -> impl Iterator<Item = (State, u32, State)> + '_ {
        self.trans
            .iter()
            .enumerate()
            .flat_map(|(p, t)| t.iter().map(move |&(d, q)| (p as State, d, q)))
    }

    /// Successor in a deterministic automaton.
    pub fn delta(&self, q: State, d: u32) -> Option<State> {
        let t = &self.trans[q as usize];
        t.binary_search_by_key(&d, |x| x.0).ok().map(|i| t[i].1)
    }

    /// Whether every state has a transition on every digit.
    pub fn is_complete(&self) -> bool {
        let k = self.alphabet.len();
        !self.initial.is_empty() && self.trans.iter().all(|t| t.len() == k)
    }

    fn check_same_alphabet(&self, other: &Automaton) -> Result<()> {
        if Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "{} digits vs {} digits",
                self.alphabet.len(),
                other.alphabet.len()
            )))
        }
    }

    /// Dense transition table of a deterministic automaton (`NONE` when missing).
    pub(crate) fn table(&self) -> Vec<State> {
        let k = self.alphabet.len();
        let mut tab = vec![NONE; self.trans.len() * k];
        for (p, t) in self.trans.iter().enumerate() {
            for &(d, q) in t {
                tab[p * k + d as usize] = q;
            }
        }
        tab
    }

    /// Deterministic automaton with an explicit sink where transitions are missing.
    pub fn complete(&self) -> Result<Automaton> {
        if !self.deterministic {
            return Err(Error::NotDeterministic);
        }
        if self.is_complete() {
            return Ok(self.clone());
        }
        let k = self.alphabet.len() as u32;
        let n = self.trans.len();
        let sink = n as State;
        let mut trans = self.trans.clone();
        trans.push((0..k).map(|d| (d, sink)).collect());
        for t in trans.iter_mut().take(n) {
            if t.len() as u32 != k {
                let have: Vec<u32> = t.iter().map(|x| x.0).collect();
                for d in 0..k {
                    if have.binary_search(&d).is_err() {
                        t.push((d, sink));
                    }
                }
            }
        }
        let initial = if self.initial.is_empty() {
            vec![sink]
        } else {
            self.initial.clone()
        };
        let mut finals = self.finals.clone();
        finals.push(false);
        Ok(Automaton::from_parts(self.alphabet.clone(), trans, initial, finals))
    }

    /// Keeps only the states reachable from an initial state.
    pub fn accessible(&self) -> Automaton {
        let keep = self.reachable_from(&self.initial);
        self.restrict(&keep)
    }

    /// Keeps only states that are both accessible and co-accessible.
    pub fn trim(&self) -> Automaton {
        let acc = self.reachable_from(&self.initial);
        let co = self.coreachable();
        let keep: Vec<bool> = acc.iter().zip(&co).map(|(a, b)| *a && *b).collect();
        self.restrict(&keep)
    }

    pub(crate) fn reachable_from(&self, start: &[State]) -> Vec<bool> {
        let mut seen = vec![false; self.trans.len()];
        let mut stack: Vec<State> = Vec::new();
        for &s in start {
            if !seen[s as usize] {
                seen[s as usize] = true;
                stack.push(s);
            }
        }
        while let Some(p) = stack.pop() {
            for &(_, q) in &self.trans[p as usize] {
                if !seen[q as usize] {
                    seen[q as usize] = true;
                    stack.push(q);
                }
            }
        }
        seen
    }

    /// Reverse adjacency, optionally restricted to one digit.
    pub(crate) fn reverse_adjacency(&self, only: Option<u32>) -> Vec<Vec<State>> {
        let mut rev = vec![Vec::new(); self.trans.len()];
        for (p, t) in self.trans.iter().enumerate() {
            for &(d, q) in t {
                if only.is_none_or(|o| o == d) {
                    rev[q as usize].push(p as State);
                }
            }
        }
        rev
    }

    fn backward_closure(&self, targets: &[bool], only: Option<u32>) -> Vec<bool> {
        let rev = self.reverse_adjacency(only);
        let mut seen = targets.to_vec();
        let mut stack: Vec<State> = (0..self.trans.len() as State)
            .filter(|&q| targets[q as usize])
            .collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub(crate) fn coreachable(&self) -> Vec<bool> {
        self.backward_closure(&self.finals, None)
    }

    /// Sub-automaton on the kept states, renumbered in increasing order.
    pub(crate) fn restrict(&self, keep: &[bool]) -> Automaton {
        let mut map = vec![NONE; self.trans.len()];
        let mut n = 0;
        for (q, &k) in keep.iter().enumerate() {
            if k {
                map[q] = n;
                n += 1;
            }
        }
        let mut trans = Vec::with_capacity(n as usize);
        let mut finals = Vec::with_capacity(n as usize);
        for (q, t) in self.trans.iter().enumerate() {
            if map[q] == NONE {
                continue;
            }
            trans.push(
                t.iter()
                    .filter(|x| map[x.1 as usize] != NONE)
                    .map(|&(d, r)| (d, map[r as usize]))
                    .collect(),
            );
            finals.push(self.finals[q]);
        }
        let initial = self
            .initial
            .iter()
            .filter(|&&i| map[i as usize] != NONE)
            .map(|&i| map[i as usize])
            .collect();
        Automaton::from_parts(self.alphabet.clone(), trans, initial, finals)
    }

    /// Product automaton recognising the intersection of both languages.
    pub fn intersect(&self, other: &Automaton) -> Result<Automaton> {
        self.check_same_alphabet(other)?;
        let n2 = other.trans.len() as u64;
        let mut ids: rustc_hash::FxHashMap<u64, State> = Default::default();
        let mut pairs: Vec<(State, State)> = Vec::new();
        let mut queue = VecDeque::new();
        let mut initial = Vec::new();
        for &a in &self.initial {
            for &b in &other.initial {
                let key = a as u64 * n2 + b as u64;
                let id = pairs.len() as State;
                ids.insert(key, id);
                pairs.push((a, b));
                queue.push_back(id);
                initial.push(id);
            }
        }
        let mut trans: Vec<Vec<(u32, State)>> = Vec::new();
        while let Some(id) = queue.pop_front() {
            let (a, b) = pairs[id as usize];
            let ta = &self.trans[a as usize];
            let tb = &other.trans[b as usize];
            let mut out = Vec::new();
            let (mut i, mut j) = (0, 0);
            while i < ta.len() && j < tb.len() {
                let (da, db) = (ta[i].0, tb[j].0);
                if da < db {
                    i += 1;
                } else if db < da {
                    j += 1;
                } else {
                    let j0 = j;
                    while i < ta.len() && ta[i].0 == da {
                        j = j0;
                        while j < tb.len() && tb[j].0 == da {
                            let key = ta[i].1 as u64 * n2 + tb[j].1 as u64;
                            let tgt = *ids.entry(key).or_insert_with(|| {
                                pairs.push((ta[i].1, tb[j].1));
                                queue.push_back(pairs.len() as State - 1);
                                pairs.len() as State - 1
                            });
                            out.push((da, tgt));
                            j += 1;
                        }
                        i += 1;
                    }
                }
            }
            if trans.len() <= id as usize {
                trans.resize(id as usize + 1, Vec::new());
            }
            trans[id as usize] = out;
        }
        trans.resize(pairs.len(), Vec::new());
        let finals = pairs
            .iter()
            .map(|&(a, b)| self.finals[a as usize] && other.finals[b as usize])
            .collect();
        Ok(Automaton::from_parts(self.alphabet.clone(), trans, initial, finals))
    }

    /// Automaton of the complement language over the same alphabet.
    pub fn complement(&self) -> Automaton {
        let d = if self.deterministic {
            self.complete().expect("deterministic")
        } else {
            self.determinize()
        };
        let finals = d.finals.iter().map(|f| !f).collect();
        Automaton::from_parts(d.alphabet.clone(), d.trans, d.initial, finals)
    }

    /// Automaton of the reversed words.
    pub fn mirror(&self) -> Automaton {
        let n = self.trans.len();
        let mut trans = vec![Vec::new(); n];
        for (p, t) in self.trans.iter().enumerate() {
            for &(d, q) in t {
                trans[q as usize].push((d, p as State));
            }
        }
        let initial = self.finals();
        let mut finals = vec![false; n];
        for &i in &self.initial {
            finals[i as usize] = true;
        }
        Automaton::from_parts(self.alphabet.clone(), trans, initial, finals)
    }

    /// Relabels transitions through `mapping` (indexed by digit of `self`);
    /// transitions whose digit maps to `None` are deleted.
    pub fn map_labels(&self, target: Arc<DigitAlphabet>, mapping: &[Option<usize>]) -> Result<Automaton> {
        if mapping.len() != self.alphabet.len() {
            return Err(Error::AlphabetMismatch("mapping length differs from alphabet".into()));
        }
        if mapping.iter().flatten().any(|&m| m >= target.len()) {
            return Err(Error::AlphabetMismatch("mapping outside target alphabet".into()));
        }
        let trans = self
            .trans
            .iter()
            .map(|t| {
                t.iter()
                    .filter_map(|&(d, q)| mapping[d as usize].map(|m| (m as u32, q)))
                    .collect()
            })
            .collect();
        Ok(Automaton::from_parts(target, trans, self.initial.clone(), self.finals.clone()))
    }

    /// Restricts the alphabet to a sub-alphabet, deleting other transitions.
    pub fn restrict_alphabet(&self, target: Arc<DigitAlphabet>) -> Result<Automaton> {
        let mapping: Vec<Option<usize>> = self
            .alphabet
            .digits()
            .iter()
            .map(|d| target.index_of(d))
            .collect();
        self.map_labels(target, &mapping)
    }

    /// Re-expresses the automaton over a larger alphabet containing its digits.
    pub fn extend_alphabet(&self, target: Arc<DigitAlphabet>) -> Result<Automaton> {
        let mapping: Vec<Option<usize>> = self.alphabet.embedding_into(&target);
        if let Some(i) = mapping.iter().position(|m| m.is_none()) {
            return Err(Error::AlphabetMismatch(format!(
                "digit {} missing from target alphabet",
                self.alphabet.digit(i)
            )));
        }
        self.map_labels(target, &mapping)
    }

    /// Automaton of `{u 0^n : u ∈ L, n ≥ 0}`.
    pub fn concat_zero_star(&self) -> Result<Automaton> {
        let zero = self.alphabet.zero()? as u32;
        let n = self.trans.len();
        let z = n as State;
        let mut trans = self.trans.clone();
        trans.push(vec![(zero, z)]);
        for (q, t) in trans.iter_mut().enumerate().take(n) {
            if self.finals[q] {
                t.push((zero, z));
            }
        }
        let mut finals = self.finals.clone();
        finals.push(true);
        Ok(Automaton::from_parts(self.alphabet.clone(), trans, self.initial.clone(), finals))
    }

    /// `Z(L) = {u : ∃n, u 0^n ∈ L}`: states with a zero-path to a final state
    /// become final.
    pub fn z_closure(&self) -> Result<Automaton> {
        let zero = self.alphabet.zero()? as u32;
        let finals = self.backward_closure(&self.finals, Some(zero));
        Ok(Automaton::from_parts(
            self.alphabet.clone(),
            self.trans.clone(),
            self.initial.clone(),
            finals,
        ))
    }

    /// `S(L) = {u : uΣ* ⊆ L}`: a state stays final when every state reachable
    /// from it is final. Requires a deterministic automaton.
    pub fn s_stabilizer(&self) -> Result<Automaton> {
        let c = self.complete()?;
        let bad: Vec<bool> = c.finals.iter().map(|f| !f).collect();
        let reach_bad = c.backward_closure(&bad, None);
        let finals = reach_bad.iter().map(|b| !b).collect();
        Ok(Automaton::from_parts(c.alphabet.clone(), c.trans, c.initial, finals))
    }

    /// Prefixes every accepted word with `word`.
    pub fn prepend_word(&self, word: &[u32]) -> Automaton {
        if word.is_empty() {
            return self.clone();
        }
        let n = self.trans.len() as State;
        let mut trans = self.trans.clone();
        let mut finals = self.finals.clone();
        let m = word.len();
        // Chain states n, n+1, …, n+m-1; the last letter enters the old initials.
        for (i, &d) in word.iter().enumerate() {
            let from = n + i as State;
            let t = if i + 1 < m {
                vec![(d, from + 1)]
            } else {
                self.initial.iter().map(|&q| (d, q)).collect()
            };
            trans.push(t);
            finals.push(false);
        }
        Automaton::from_parts(self.alphabet.clone(), trans, vec![n], finals)
    }

    pub fn is_empty(&self) -> bool {
        let acc = self.reachable_from(&self.initial);
        !acc.iter().zip(&self.finals).any(|(a, f)| *a && *f)
    }

    /// Shortest accepted word, smallest in digit order among the shortest.
    pub fn shortest_word(&self) -> Option<Vec<u32>> {
        let d = if self.deterministic {
            self.clone()
        } else {
            self.determinize()
        };
        let n = d.trans.len();
        let mut parent: Vec<Option<(State, u32)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        let &start = d.initial.first()?;
        seen[start as usize] = true;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            if d.finals[p as usize] {
                let mut w = Vec::new();
                let mut cur = p;
                while let Some((prev, dig)) = parent[cur as usize] {
                    w.push(dig);
                    cur = prev;
                }
                w.reverse();
                return Some(w);
            }
            for &(dig, q) in &d.trans[p as usize] {
                if !seen[q as usize] {
                    seen[q as usize] = true;
                    parent[q as usize] = Some((p, dig));
                    queue.push_back(q);
                }
            }
        }
        None
    }

    /// Membership test by subset simulation.
    pub fn accepts(&self, word: &[u32]) -> bool {
        let mut cur: Vec<State> = self.initial.clone();
        for &d in word {
            let mut next = Vec::new();
            for &p in &cur {
                for &(e, q) in &self.trans[p as usize] {
                    if e == d {
                        next.push(q);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return false;
            }
            cur = next;
        }
        cur.iter().any(|&q| self.finals[q as usize])
    }

    /// Accepted words of length at most `max_len`, by length then digit order.
    pub fn enumerate(&self, max_len: usize) -> Vec<Vec<u32>> {
        let d = self.determinize();
        let co = d.coreachable();
        let mut out = Vec::new();
        let mut layer: Vec<(State, Vec<u32>)> = match d.initial.first() {
            Some(&s) if co[s as usize] => vec![(s, vec![])],
            _ => return out,
        };
        for len in 0..=max_len {
            for (q, w) in &layer {
                if d.finals[*q as usize] {
                    out.push(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (q, w) in &layer {
                for &(dig, r) in &d.trans[*q as usize] {
                    if co[r as usize] {
                        let mut w2 = w.clone();
                        w2.push(dig);
                        next.push((r, w2));
                    }
                }
            }
            layer = next;
        }
        out
    }

    /// Decides `L(self) ⊆ L(other)`.
    pub fn is_subset(&self, other: &Automaton) -> Result<bool> {
        self.check_same_alphabet(other)?;
        Ok(self.intersect(&other.complement())?.is_empty())
    }

    /// Decides language equality.
    pub fn equivalent(&self, other: &Automaton) -> Result<bool> {
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }

    /// Structural equality of two automata (same numbering, same labels).
    pub fn same_structure(&self, other: &Automaton) -> bool {
        self.alphabet == other.alphabet
            && self.trans == other.trans
            && self.initial == other.initial
            && self.finals == other.finals
    }

    /// Replaces the initial states.
    pub fn with_initial(&self, initial: Vec<State>) -> Automaton {
        let mut init = initial;
        init.sort_unstable();
        init.dedup();
        Automaton::from_parts(self.alphabet.clone(), self.trans.clone(), init, self.finals.clone())
    }

    /// Replaces the final states.
    pub fn with_finals(&self, finals: &[State]) -> Automaton {
        let mut f = vec![false; self.trans.len()];
        for &q in finals {
            f[q as usize] = true;
        }
        Automaton::from_parts(self.alphabet.clone(), self.trans.clone(), self.initial.clone(), f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin() -> Arc<DigitAlphabet> {
        DigitAlphabet::from_names(&["0", "1"])
    }

    /// Words over {0,1} ending with 1.
    fn ends_with_one() -> Automaton {
        Automaton::new(bin(), 2, [(0, 0, 0), (0, 1, 1), (1, 0, 0), (1, 1, 1)], [0], [1]).unwrap()
    }

    #[test]
    fn basic_queries() {
        let a = ends_with_one();
        assert!(a.is_deterministic());
        assert!(a.accepts(&[0, 1]));
        assert!(!a.accepts(&[1, 0]));
        assert_eq!(a.shortest_word(), Some(vec![1]));
        assert_eq!(a.enumerate(2), vec![vec![1], vec![0, 1], vec![1, 1]]);
        assert!(Automaton::empty(bin()).is_empty());
        assert!(!Automaton::universal(bin()).is_empty());
    }

    #[test]
    fn closures() {
        let l = Automaton::from_words(bin(), &[vec![1, 0], vec![1, 0, 0]]);
        let z = l.z_closure().unwrap();
        let got: Vec<Vec<u32>> = z.enumerate(3);
        assert_eq!(got, vec![vec![1], vec![1, 0], vec![1, 0, 0]]);
        let u = Automaton::universal(bin());
        assert!(u.s_stabilizer().unwrap().equivalent(&u).unwrap());
        let s = ends_with_one().s_stabilizer().unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn zero_padding() {
        let eps = Automaton::from_words(bin(), &[vec![]]);
        let z = eps.concat_zero_star().unwrap();
        assert_eq!(z.enumerate(2), vec![vec![], vec![0], vec![0, 0]]);
        assert!(Automaton::empty(bin()).concat_zero_star().unwrap().is_empty());
    }

    #[test]
    fn subset_and_complement() {
        let a = ends_with_one();
        let w = Automaton::from_words(bin(), &[vec![0, 1], vec![1]]);
        assert!(w.is_subset(&a).unwrap());
        assert!(!a.is_subset(&w).unwrap());
        assert!(a.complement().accepts(&[]));
        assert!(a.intersect(&a.complement()).unwrap().is_empty());
    }

    #[test]
    fn prepend() {
        let a = ends_with_one().prepend_word(&[0, 0]);
        assert!(a.accepts(&[0, 0, 1]));
        assert!(!a.accepts(&[0, 1]));
    }
}

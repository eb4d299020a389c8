// SPDX-License-Identifier: Apache-2.0

//! Zero automata and relations automata over `Z[β]`.
//!
//! Every language here is read least significant digit first: the word
//! `u_0 u_1 … u_n` has value `Σ λ^i u_i` for the expansion base `λ` (a Pisot
//! unit, usually `β` or a power of it). After reading a prefix `u` of length
//! `j` the machine sits in the remainder `r = Q_u / λ^j`, and reading `d`
//! moves it to `(r + d) / λ`; a word has value zero exactly when it ends in
//! remainder zero. Remainders on accepting paths are bounded under every
//! embedding, which makes the machine finite.

use std::collections::VecDeque;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;

use crate::automata::{Automaton, DigitAlphabet, State, NONE};
use crate::error::{Error, Result};
use crate::numberfield::FieldElement;
use crate::par;

pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

const MAXD: usize = 8;
type Coords = [i64; MAXD];

/// Relative and absolute slack applied to the floating-point pruning bounds.
const SLACK: f64 = 1e-9;

struct Pruner {
    /// Powers `σ(β)^i` per embedding.
    pows: Vec<Vec<Complex64>>,
    bounds: Vec<f64>,
}

impl Pruner {
    fn new(values: &[FieldElement], base: &FieldElement) -> Result<Pruner> {
        let field = base.field();
        let d = field.degree();
        let mut pows = Vec::new();
        let mut bounds = Vec::new();
        let mut expanding = 0;
        for e in 0..field.num_embeddings() {
            let root = field.root_f64(e);
            let mut p = Vec::with_capacity(d);
            let mut z = Complex64::new(1.0, 0.0);
            for _ in 0..d {
                p.push(z);
                z *= root;
            }
            let lam = base.evaluate_f64(e).norm();
            if (lam - 1.0).abs() < 1e-9 {
                return Err(Error::Precondition(
                    "expansion base has a conjugate of modulus one".into(),
                ));
            }
            let dmax = values
                .iter()
                .map(|v| v.evaluate_f64(e).norm())
                .fold(0.0f64, f64::max);
            let bound = if lam > 1.0 {
                expanding += 1;
                dmax / (lam - 1.0)
            } else {
                dmax / (1.0 - lam)
            };
            pows.push(p);
            bounds.push(bound * (1.0 + SLACK) + SLACK);
        }
        if expanding != 1 {
            return Err(Error::Precondition(format!(
                "expansion base has {expanding} conjugates of modulus above one"
            )));
        }
        Ok(Pruner { pows, bounds })
    }

    fn admits(&self, c: &Coords, d: usize) -> bool {
        for (p, &b) in self.pows.iter().zip(&self.bounds) {
            let mut z = Complex64::new(0.0, 0.0);
            let mut mag = 0.0;
            for i in 0..d {
                let t = p[i] * c[i] as f64;
                mag += t.norm();
                z += t;
            }
            if z.norm() > b + mag * 1e-12 {
                return false;
            }
        }
        true
    }
}

fn coords_of(x: &FieldElement) -> Result<Coords> {
    let mut c = [0i64; MAXD];
    for (i, v) in x.coords().iter().enumerate() {
        c[i] = v.to_i64().ok_or(Error::Overflow("digit coordinate"))?;
    }
    Ok(c)
}

/// Deterministic machine of remainders for a list of digit values.
#[derive(Clone, Debug)]
pub struct ZeroMachine {
    n_states: usize,
    n_values: usize,
    /// `delta[state * n_values + value]`, `NONE` if absent.
    delta: Vec<State>,
    remainders: Vec<Vec<i64>>,
    values: Vec<FieldElement>,
    base: FieldElement,
}

impl ZeroMachine {
    /// Builds the trimmed machine of remainders: every state lies on a path
    /// from 0 back to 0. State 0 is the zero remainder.
    pub fn build(values: &[FieldElement], base: &FieldElement, budget: usize) -> Result<ZeroMachine> {
        let field = base.field();
        let d = field.degree();
        if d > MAXD {
            return Err(Error::InvalidArgument(format!(
                "degree {d} above the supported maximum {MAXD}"
            )));
        }
        let pruner = Pruner::new(values, base)?;
        let inv = base.inverse()?.mul_matrix();
        let inv: Vec<Vec<i64>> = inv
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().ok_or(Error::Overflow("inverse base"))).collect())
            .collect::<Result<_>>()?;
        let digits: Vec<Coords> = values.iter().map(coords_of).collect::<Result<_>>()?;
        let k = values.len();

        let step = |r: &Coords, t: &Coords| -> Result<Option<Coords>> {
            let mut s = [0i64; MAXD];
            for i in 0..d {
                s[i] = r[i].checked_add(t[i]).ok_or(Error::Overflow("remainder"))?;
            }
            let mut out = [0i64; MAXD];
            for i in 0..d {
                let mut acc: i64 = 0;
                for j in 0..d {
                    acc = inv[i][j]
                        .checked_mul(s[j])
                        .and_then(|v| acc.checked_add(v))
                        .ok_or(Error::Overflow("remainder"))?;
                }
                out[i] = acc;
            }
            Ok(pruner.admits(&out, d).then_some(out))
        };

        let mut states: Vec<Coords> = vec![[0; MAXD]];
        let mut ids: FxHashMap<Coords, State> = FxHashMap::default();
        ids.insert([0; MAXD], 0);
        let mut delta: Vec<State> = Vec::new();
        let mut layer: Vec<State> = vec![0];
        while !layer.is_empty() {
            let expand = |&id: &State| -> Result<Vec<Option<Coords>>> {
                let r = states[id as usize];
                digits.iter().map(|t| step(&r, t)).collect()
            };
            let succ: Vec<Result<Vec<Option<Coords>>>> = if layer.len() >= 256 {
                par::map(&layer, expand)
            } else {
                layer.iter().map(expand).collect()
            };
            let mut next = Vec::new();
            for (&id, s) in layer.iter().zip(succ) {
                let s = s?;
                if delta.len() < (id as usize + 1) * k {
                    delta.resize((id as usize + 1) * k, NONE);
                }
                for (v, target) in s.into_iter().enumerate() {
                    let Some(c) = target else { continue };
                    let t = match ids.get(&c) {
                        Some(&t) => t,
                        None => {
                            if states.len() >= budget {
                                return Err(Error::StateBudget(budget));
                            }
                            let t = states.len() as State;
                            ids.insert(c, t);
                            states.push(c);
                            next.push(t);
                            t
                        }
                    };
                    delta[id as usize * k + v] = t;
                }
            }
            layer = next;
        }
        delta.resize(states.len() * k, NONE);

        // Keep the states from which the zero remainder is reachable, then
        // renumber breadth-first from 0.
        let n = states.len();
        let mut rev: Vec<Vec<State>> = vec![Vec::new(); n];
        for p in 0..n {
            for v in 0..k {
                let q = delta[p * k + v];
                if q != NONE {
                    rev[q as usize].push(p as State);
                }
            }
        }
        let mut co = vec![false; n];
        co[0] = true;
        let mut stack = vec![0 as State];
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !co[p as usize] {
                    co[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        let mut map = vec![NONE; n];
        let mut order = vec![0 as State];
        map[0] = 0;
        let mut queue = VecDeque::from([0 as State]);
        while let Some(p) = queue.pop_front() {
            for v in 0..k {
                let q = delta[p as usize * k + v];
                if q != NONE && co[q as usize] && map[q as usize] == NONE {
                    map[q as usize] = order.len() as State;
                    order.push(q);
                    queue.push_back(q);
                }
            }
        }
        let mut nd = vec![NONE; order.len() * k];
        for (new, &old) in order.iter().enumerate() {
            for v in 0..k {
                let q = delta[old as usize * k + v];
                if q != NONE && map[q as usize] != NONE {
                    nd[new * k + v] = map[q as usize];
                }
            }
        }
        Ok(ZeroMachine {
            n_states: order.len(),
            n_values: k,
            delta: nd,
            remainders: order.iter().map(|&q| states[q as usize][..d].to_vec()).collect(),
            values: values.to_vec(),
            base: base.clone(),
        })
    }

    pub fn state_count(&self) -> usize {
        self.n_states
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn base(&self) -> &FieldElement {
        &self.base
    }

    /// Remainder carried by a state, in power-basis coordinates.
    pub fn remainder(&self, q: State) -> FieldElement {
        FieldElement::from_i64s(self.base.field(), &self.remainders[q as usize])
    }

    #[inline]
    pub fn step(&self, q: State, value: usize) -> Option<State> {
        let t = self.delta[q as usize * self.n_values + value];
        (t != NONE).then_some(t)
    }

    /// Automaton over `alphabet`, where digit `i` acts as value `value_of[i]`.
    pub fn to_automaton(&self, alphabet: Arc<DigitAlphabet>, value_of: &[usize]) -> Automaton {
        let trans = (0..self.n_states as State).flat_map(|p| {
            value_of
                .iter()
                .enumerate()
                .filter_map(move |(i, &v)| self.step(p, v).map(|q| (p, i as u32, q)))
        });
        Automaton::new(alphabet, self.n_states, trans.collect::<Vec<_>>(), [0], [0])
            .expect("zero machine is well formed")
    }
}

/// Distinct values and, for each input position, the index of its value.
fn dedup_values(values: Vec<FieldElement>) -> (Vec<FieldElement>, Vec<usize>) {
    let mut uniq: Vec<FieldElement> = Vec::new();
    let mut index: FxHashMap<FieldElement, usize> = FxHashMap::default();
    let mut of = Vec::with_capacity(values.len());
    for v in values {
        let i = *index.entry(v.clone()).or_insert_with(|| {
            uniq.push(v);
            uniq.len() - 1
        });
        of.push(i);
    }
    (uniq, of)
}

/// Automaton of the words over `digits` (read least significant first) whose
/// value `Σ λ^i u_i` is zero. It is deterministic and minimal: distinct
/// remainders have disjoint non-empty residual languages.
pub fn build_zero_automaton(digits: &Arc<DigitAlphabet>, base: &FieldElement, budget: usize) -> Result<Automaton> {
    let (vals, of) = dedup_values(digits.scalars()?);
    let m = ZeroMachine::build(&vals, base, budget)?;
    Ok(m.to_automaton(digits.clone(), &of))
}

/// Machine recognising pairs `(u, v)` over `Σ1 × Σ2` with `Q_u = Q_v`.
#[derive(Clone, Debug)]
pub struct RelationMachine {
    pub machine: ZeroMachine,
    pub left: Arc<DigitAlphabet>,
    pub right: Arc<DigitAlphabet>,
    /// Value index of pair `(i, j)` at position `i * |Σ2| + j`.
    pair_value: Vec<usize>,
}

impl RelationMachine {
    pub fn build(left: &Arc<DigitAlphabet>, right: &Arc<DigitAlphabet>, base: &FieldElement, budget: usize) -> Result<RelationMachine> {
        let a = left.scalars()?;
        let b = right.scalars()?;
        let diffs: Vec<FieldElement> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| x.try_sub(y)))
            .collect::<Result<_>>()?;
        let (vals, pair_value) = dedup_values(diffs);
        Ok(RelationMachine {
            machine: ZeroMachine::build(&vals, base, budget)?,
            left: left.clone(),
            right: right.clone(),
            pair_value,
        })
    }

    #[inline]
    pub fn step(&self, q: State, i: usize, j: usize) -> Option<State> {
        self.machine.step(q, self.pair_value[i * self.right.len() + j])
    }

    /// Explicit automaton over the product alphabet.
    pub fn to_automaton(&self) -> Automaton {
        let alphabet = DigitAlphabet::product(&self.left, &self.right);
        self.machine.to_automaton(alphabet, &self.pair_value)
    }

    /// Projection on the left component of
    /// `(A1 × A2) ∩ L_rel`, where `A1 = None` stands for `Σ1^*`.
    /// The result is a (generally nondeterministic) automaton over `Σ1`.
    pub fn project_left(&self, a1: Option<&Automaton>, a2: &Automaton) -> Result<Automaton> {
        if let Some(a) = a1 {
            if **a.alphabet() != *self.left {
                return Err(Error::AlphabetMismatch("left language".into()));
            }
        }
        if **a2.alphabet() != *self.right {
            return Err(Error::AlphabetMismatch("right language".into()));
        }
        let n1 = self.left.len();
        let k1 = a1.map_or(1, |a| a.state_count().max(1)) as u64;
        let k2 = a2.state_count() as u64;
        let key = |r: State, p: State, q: State| (r as u64 * k1 + p as u64) * k2 + q as u64;
        let init1: Vec<State> = a1.map_or(vec![0], |a| a.initial().to_vec());
        let mut ids: FxHashMap<u64, State> = FxHashMap::default();
        let mut triples: Vec<(State, State, State)> = Vec::new();
        let mut initial = Vec::new();
        for &p in &init1 {
            for &q in a2.initial() {
                let id = triples.len() as State;
                ids.insert(key(0, p, q), id);
                triples.push((0, p, q));
                initial.push(id);
            }
        }
        let mut trans: Vec<Vec<(u32, State)>> = Vec::new();
        let mut i = 0usize;
        while i < triples.len() {
            let (r, p, q) = triples[i];
            let mut out = Vec::new();
            for x in 0..n1 {
                let succ1: Vec<State> = match a1 {
                    None => vec![0],
                    Some(a) => a
                        .transitions_from(p)
                        .iter()
                        .filter(|t| t.0 as usize == x)
                        .map(|t| t.1)
                        .collect(),
                };
                if succ1.is_empty() {
                    continue;
                }
                for &(y, q2) in a2.transitions_from(q) {
                    let Some(r2) = self.step(r, x, y as usize) else { continue };
                    for &p2 in &succ1 {
                        let k = key(r2, p2, q2);
                        let t = match ids.get(&k) {
                            Some(&t) => t,
                            None => {
                                let t = triples.len() as State;
                                ids.insert(k, t);
                                triples.push((r2, p2, q2));
                                t
                            }
                        };
                        out.push((x as u32, t));
                    }
                }
            }
            trans.push(out);
            i += 1;
        }
        let finals: Vec<State> = triples
            .iter()
            .enumerate()
            .filter(|(_, &(r, p, q))| {
                r == 0 && a1.is_none_or(|a| a.is_final(p)) && a2.is_final(q)
            })
            .map(|(i, _)| i as State)
            .collect();
        Automaton::new(
            self.left.clone(),
            triples.len(),
            trans
                .into_iter()
                .enumerate()
                .flat_map(|(p, t)| t.into_iter().map(move |(d, q)| (p as State, d, q)))
                .collect::<Vec<_>>(),
            initial,
            finals,
        )
    }
}

/// Relations automaton over `Σ1 × Σ2` recognising equal-length pairs with
/// equal values; pair `(i, j)` has index `i * |Σ2| + j`.
pub fn build_relations_automaton(
    left: &Arc<DigitAlphabet>,
    right: &Arc<DigitAlphabet>,
    base: &FieldElement,
    budget: usize,
) -> Result<Automaton> {
    Ok(RelationMachine::build(left, right, base, budget)?.to_automaton())
}

/// Decides `Q_{L1} ⊆ Q_{L2}` with `Q_L = {Σ λ^i u_i : u ∈ L}`.
pub fn q_inclusion(l1: &Automaton, l2: &Automaton, base: &FieldElement, budget: usize) -> Result<bool> {
    let rel = RelationMachine::build(l1.alphabet(), l2.alphabet(), base, budget)?;
    q_inclusion_with(&rel, l1, l2)
}

/// [`q_inclusion`] with a relation machine built beforehand for the
/// alphabets of `l1` and `l2`.
pub fn q_inclusion_with(rel: &RelationMachine, l1: &Automaton, l2: &Automaton) -> Result<bool> {
    if **l1.alphabet() != *rel.left || **l2.alphabet() != *rel.right {
        return Err(Error::AlphabetMismatch("relation machine built for other alphabets".into()));
    }
    let a1 = l1.concat_zero_star()?;
    let a2 = l2.concat_zero_star()?;
    let p = rel.project_left(Some(&a1), &a2)?;
    let z = p.determinize().minimize()?.z_closure()?;
    l1.is_subset(&z)
}

// SPDX-License-Identifier: Apache-2.0

use rustc_hash::FxHashMap;

use super::{Automaton, State};
use crate::par;

/// Layers smaller than this are expanded sequentially.
const PAR_LAYER: usize = 64;

impl Automaton {
    /// Subset construction. The result is complete (the empty subset is an
    /// explicit sink) and numbered breadth-first from the initial subset,
    /// digits in alphabet order.
    pub fn determinize(&self) -> Automaton {
        let k = self.alphabet.len();
        let mut start = self.initial.clone();
        start.sort_unstable();
        start.dedup();
        let mut subsets: Vec<Vec<State>> = vec![start.clone()];
        let mut ids: FxHashMap<Vec<State>, State> = FxHashMap::default();
        ids.insert(start, 0);
        let mut trans: Vec<Vec<(u32, State)>> = Vec::new();
        let mut layer: Vec<State> = vec![0];

        let successors = |set: &Vec<State>| -> Vec<Vec<State>> {
            let mut buckets: Vec<Vec<State>> = vec![Vec::new(); k];
            for &p in set {
                for &(d, q) in &self.trans[p as usize] {
                    buckets[d as usize].push(q);
                }
            }
            for b in buckets.iter_mut() {
                b.sort_unstable();
                b.dedup();
            }
            buckets
        };

        while !layer.is_empty() {
            let expanded: Vec<Vec<Vec<State>>> = if layer.len() >= PAR_LAYER {
                par::map(&layer, |&id| successors(&subsets[id as usize]))
            } else {
                layer.iter().map(|&id| successors(&subsets[id as usize])).collect()
            };
            let mut next = Vec::new();
            for (&id, succ) in layer.iter().zip(expanded) {
                let mut out = Vec::with_capacity(k);
                for (d, set) in succ.into_iter().enumerate() {
                    let tgt = match ids.get(&set) {
                        Some(&t) => t,
                        None => {
                            let t = subsets.len() as State;
                            ids.insert(set.clone(), t);
                            subsets.push(set);
                            next.push(t);
                            t
                        }
                    };
                    out.push((d as u32, tgt));
                }
                if trans.len() <= id as usize {
                    trans.resize(id as usize + 1, Vec::new());
                }
                trans[id as usize] = out;
            }
            layer = next;
        }
        trans.resize(subsets.len(), Vec::new());
        let finals = subsets
            .iter()
            .map(|s| s.iter().any(|&q| self.finals[q as usize]))
            .collect();
        Automaton::from_parts(self.alphabet.clone(), trans, vec![0], finals)
    }
}

#[cfg(test)]
mod tests {
    use super::super::DigitAlphabet;
    use super::*;

    #[test]
    fn contains_digit_is_two_states() {
        let a = DigitAlphabet::from_names(&["0", "1"]);
        // Words containing the digit 1.
        let n = Automaton::new(
            a,
            2,
            [(0, 0, 0), (0, 1, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)],
            [0],
            [1],
        )
        .unwrap();
        assert!(!n.is_deterministic());
        let d = n.determinize();
        assert!(d.is_deterministic() && d.is_complete());
        assert_eq!(d.state_count(), 2);
        assert!(d.equivalent(&n).unwrap());
    }
}

// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;

use super::{Automaton, State, NONE};
use crate::error::{Error, Result};

/// Partition refinement state for Hopcroft's algorithm.
struct Partition {
    elems: Vec<State>,
    loc: Vec<u32>,
    blk: Vec<u32>,
    start: Vec<u32>,
    end: Vec<u32>,
    marked: Vec<u32>,
}

impl Partition {
    fn new(classes: &[bool]) -> Partition {
        let n = classes.len();
        let mut elems: Vec<State> = (0..n as State).filter(|&q| classes[q as usize]).collect();
        let split = elems.len() as u32;
        elems.extend((0..n as State).filter(|&q| !classes[q as usize]));
        let mut loc = vec![0; n];
        let mut blk = vec![0; n];
        for (i, &q) in elems.iter().enumerate() {
            loc[q as usize] = i as u32;
        }
        let mut start = Vec::new();
        let mut end = Vec::new();
        if split > 0 {
            start.push(0);
            end.push(split);
        }
        if (split as usize) < n {
            start.push(split);
            end.push(n as u32);
        }
        for b in 0..start.len() {
            for i in start[b]..end[b] {
                blk[elems[i as usize] as usize] = b as u32;
            }
        }
        let nb = start.len();
        Partition {
            elems,
            loc,
            blk,
            start,
            end,
            marked: vec![0; nb],
        }
    }

    fn size(&self, b: usize) -> u32 {
        self.end[b] - self.start[b]
    }

    fn mark(&mut self, p: State, touched: &mut Vec<u32>) {
        let b = self.blk[p as usize] as usize;
        let boundary = self.start[b] + self.marked[b];
        let pos = self.loc[p as usize];
        if pos < boundary {
            return;
        }
        let other = self.elems[boundary as usize];
        self.elems.swap(pos as usize, boundary as usize);
        self.loc[other as usize] = pos;
        self.loc[p as usize] = boundary;
        if self.marked[b] == 0 {
            touched.push(b as u32);
        }
        self.marked[b] += 1;
    }
}

impl Automaton {
    /// Minimal deterministic automaton of the language, without the sink:
    /// the states are the non-empty residuals `u⁻¹L`. States are numbered
    /// breadth-first from the initial state, digits in alphabet order, so two
    /// automata of the same language give structurally equal results.
    pub fn minimize(&self) -> Result<Automaton> {
        if !self.deterministic {
            return Err(Error::NotDeterministic);
        }
        let trimmed = self.trim();
        if trimmed.initial.is_empty() {
            return Ok(Automaton::empty(self.alphabet.clone()));
        }
        let c = trimmed.complete()?;
        let n = c.trans.len();
        let k = c.alphabet.len();
        let table = c.table();

        // Inverse transitions in CSR form, indexed by (digit, target).
        let mut count = vec![0u32; k * n + 1];
        for p in 0..n {
            for a in 0..k {
                let q = table[p * k + a] as usize;
                count[a * n + q + 1] += 1;
            }
        }
        for i in 1..count.len() {
            count[i] += count[i - 1];
        }
        let mut fill = count.clone();
        let mut inv = vec![0 as State; n * k];
        for p in 0..n {
            for a in 0..k {
                let q = table[p * k + a] as usize;
                let slot = &mut fill[a * n + q];
                inv[*slot as usize] = p as State;
                *slot += 1;
            }
        }

        let mut part = Partition::new(&c.finals);
        let mut in_w: Vec<bool> = vec![false; part.start.len() * k];
        let mut work: Vec<(u32, u32)> = Vec::new();
        if part.start.len() == 2 {
            let small = if part.size(0) <= part.size(1) { 0 } else { 1 };
            for a in 0..k as u32 {
                work.push((small, a));
                in_w[small as usize * k + a as usize] = true;
            }
        }
        let mut touched: Vec<u32> = Vec::new();
        let mut members: Vec<State> = Vec::new();
        while let Some((b, a)) = work.pop() {
            in_w[b as usize * k + a as usize] = false;
            members.clear();
            members.extend_from_slice(
                &part.elems[part.start[b as usize] as usize..part.end[b as usize] as usize],
            );
            for &q in &members {
                let lo = count[a as usize * n + q as usize] as usize;
                let hi = count[a as usize * n + q as usize + 1] as usize;
                for &p in &inv[lo..hi] {
                    part.mark(p, &mut touched);
                }
            }
            for &x in &touched {
                let x = x as usize;
                let m = part.marked[x];
                part.marked[x] = 0;
                if m == part.size(x) {
                    continue;
                }
                let y = part.start.len();
                let s = part.start[x];
                part.start.push(s);
                part.end.push(s + m);
                part.marked.push(0);
                part.start[x] = s + m;
                for i in s..s + m {
                    let q = part.elems[i as usize];
                    part.blk[q as usize] = y as u32;
                }
                in_w.resize(part.start.len() * k, false);
                let smaller = if part.size(y) <= part.size(x) { y } else { x };
                for c2 in 0..k {
                    if in_w[x * k + c2] {
                        in_w[y * k + c2] = true;
                        work.push((y as u32, c2 as u32));
                    } else {
                        in_w[smaller * k + c2] = true;
                        work.push((smaller as u32, c2 as u32));
                    }
                }
            }
            touched.clear();
        }

        // Quotient automaton.
        let nb = part.start.len();
        let mut trans = vec![Vec::with_capacity(k); nb];
        let mut finals = vec![false; nb];
        for b in 0..nb {
            let rep = part.elems[part.start[b] as usize] as usize;
            finals[b] = c.finals[rep];
            for a in 0..k {
                let q = table[rep * k + a];
                trans[b].push((a as u32, part.blk[q as usize]));
            }
        }
        let init = part.blk[c.initial[0] as usize];
        let quotient = Automaton::from_parts(c.alphabet.clone(), trans, vec![init], finals);
        Ok(quotient.trim().canonical())
    }

    /// Breadth-first renumbering of a deterministic automaton from its initial
    /// state; unreachable states are dropped.
    pub fn canonical(&self) -> Automaton {
        let Some(&start) = self.initial.first() else {
            return Automaton::empty(self.alphabet.clone());
        };
        let n = self.trans.len();
        let mut map = vec![NONE; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        map[start as usize] = 0;
        order.push(start);
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for &(_, q) in &self.trans[p as usize] {
                if map[q as usize] == NONE {
                    map[q as usize] = order.len() as State;
                    order.push(q);
                    queue.push_back(q);
                }
            }
        }
        let trans = order
            .iter()
            .map(|&p| {
                self.trans[p as usize]
                    .iter()
                    .map(|&(d, q)| (d, map[q as usize]))
                    .collect()
            })
            .collect();
        let finals = order.iter().map(|&p| self.finals[p as usize]).collect();
        let initial = self
            .initial
            .iter()
            .map(|&i| map[i as usize])
            .filter(|&i| i != NONE)
            .collect();
        Automaton::from_parts(self.alphabet.clone(), trans, initial, finals)
    }
}

#[cfg(test)]
mod tests {
    use super::super::DigitAlphabet;
    use super::*;

    #[test]
    fn ends_with_one_has_two_states() {
        let a = DigitAlphabet::from_names(&["0", "1"]);
        // Redundant 4-state machine for "ends with 1".
        let d = Automaton::new(
            a,
            4,
            [
                (0, 0, 2),
                (0, 1, 1),
                (1, 0, 2),
                (1, 1, 3),
                (2, 0, 0),
                (2, 1, 3),
                (3, 0, 0),
                (3, 1, 1),
            ],
            [0],
            [1, 3],
        )
        .unwrap();
        let m = d.minimize().unwrap();
        assert_eq!(m.state_count(), 2);
        assert!(m.equivalent(&d).unwrap());
        assert!(m.minimize().unwrap().same_structure(&m));
    }

    #[test]
    fn sink_is_dropped() {
        let a = DigitAlphabet::from_names(&["0", "1"]);
        let d = Automaton::from_words(a.clone(), &[vec![1, 0]]).determinize();
        assert_eq!(d.minimize().unwrap().state_count(), 3);
        assert_eq!(Automaton::empty(a).minimize().unwrap().state_count(), 0);
    }
}

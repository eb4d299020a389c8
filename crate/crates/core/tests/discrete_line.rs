// SPDX-License-Identifier: Apache-2.0

//! Discrete lines against their automaton descriptions.

use std::collections::HashMap;

use pisot_core::automata::{Automaton, State};
use pisot_core::families::{eigenvalue_bounds, sk_substitution, slk_substitution};
use pisot_core::geometry::exchange_orbit;
use pisot_core::substitution::{
    discrete_line_points, e_one_star, mirrored_prefix_language, parse_substitution, prepare, AbelianVector,
    Substitution,
};

fn bundled() -> Vec<Substitution> {
    vec![
        parse_substitution("a->ab;b->a").unwrap(),
        parse_substitution("a->ab;b->ac;c->a").unwrap(),
        parse_substitution("a->ab;b->ca;c->a").unwrap(),
        parse_substitution("a->b;b->c;c->ab").unwrap(),
        slk_substitution(1, 3).unwrap(),
        sk_substitution(2),
    ]
}

fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `Σ M^i w_i` for every accepted word of length `n`, one entry per path.
fn path_values(l: &Automaton, m: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let digits = l.alphabet().digits();
    let d = m.len();
    let mut out = Vec::new();
    // (state, length, value, M^length)
    let id: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| (i == j) as i64).collect()).collect();
    type Frame = (State, usize, Vec<i64>, Vec<Vec<i64>>);
    let mut stack: Vec<Frame> =
        l.initial().iter().map(|&q| (q, 0, vec![0; d], id.clone())).collect();
    while let Some((q, len, v, pw)) = stack.pop() {
        if len == n {
            if l.is_final(q) {
                out.push(v);
            }
            continue;
        }
        for &(dig, r) in l.transitions_from(q) {
            let t = &digits[dig as usize].vector.as_ref().unwrap().0;
            let add = mat_vec(&pw, t);
            let v2: Vec<i64> = v.iter().zip(&add).map(|(a, b)| a + b).collect();
            let pw2: Vec<Vec<i64>> = (0..d)
                .map(|i| (0..d).map(|j| (0..d).map(|k| pw[i][k] * m[k][j]).sum()).collect())
                .collect();
            stack.push((r, len + 1, v2, pw2));
        }
    }
    out
}

#[test]
fn prefix_language_describes_the_discrete_line() {
    for s in bundled() {
        let (k, seed) = s.periodic_seed();
        let t = s.power(k);
        let m = t.incidence_matrix();
        for b in 0..t.size() {
            let l = mirrored_prefix_language(&t, None, seed, b);
            for n in 0..=6u32 {
                let mut line: Vec<Vec<i64>> = discrete_line_points(&s, b, n, 10_000_000)
                    .unwrap()
                    .into_iter()
                    .map(|v| v.0)
                    .collect();
                let mut auto = path_values(&l, &m, n as usize);
                line.sort();
                auto.sort();
                assert_eq!(line, auto, "{s} letter {b} depth {n}");
            }
        }
    }
}

#[test]
fn scalar_values_are_psi_images() {
    for s in bundled() {
        let Ok(p) = prepare(&s) else { continue };
        for b in 0..s.size() {
            let l = p.language(b);
            for n in [3u32, 5] {
                let pts = discrete_line_points(&s, b, n, 10_000_000).unwrap();
                let mut expect: Vec<String> = pts.iter().map(|v| p.psi.apply(v).to_string()).collect();
                let mut got: Vec<String> = Vec::new();
                let mut stack: Vec<(State, Vec<u32>)> = l.initial().iter().map(|&q| (q, vec![])).collect();
                while let Some((q, w)) = stack.pop() {
                    if w.len() == n as usize {
                        if l.is_final(q) {
                            got.push(p.value(l.alphabet(), &w).unwrap().to_string());
                        }
                        continue;
                    }
                    for &(d, r) in l.transitions_from(q) {
                        let mut w2 = w.clone();
                        w2.push(d);
                        stack.push((r, w2));
                    }
                }
                expect.sort();
                got.sort();
                assert_eq!(expect, got, "{s} letter {b} depth {n}");
            }
        }
    }
}

/// Membership in `D_{u,a}` by desubstitution: `x = M y + t` with `y` in
/// `D_{u,c}` and `c →t a`, down to the origin.
struct Oracle {
    t: Substitution,
    seed: usize,
    memo: HashMap<(Vec<i64>, usize), bool>,
}

impl Oracle {
    fn member(&mut self, x: &AbelianVector, a: usize) -> bool {
        if x.0.iter().any(|&c| c < 0) {
            return false;
        }
        if x.is_zero() {
            return a == self.seed;
        }
        if let Some(&b) = self.memo.get(&(x.0.clone(), a)) {
            return b;
        }
        let size: i64 = x.0.iter().sum();
        let mut found = false;
        for (y, c) in e_one_star(&self.t, x, a).unwrap() {
            let ys: i64 = y.0.iter().sum();
            if ys < size && self.member(&y, c) {
                found = true;
                break;
            }
        }
        self.memo.insert((x.0.clone(), a), found);
        found
    }
}

#[test]
fn exchange_orbit_follows_the_prefixes() {
    const N: usize = 10_000;
    for s in bundled() {
        let (k, seed) = s.periodic_seed();
        let orbit = exchange_orbit(&s, N).unwrap();
        assert_eq!(orbit.points.len(), N + 1);
        let mut oracle = Oracle {
            t: s.power(k),
            seed,
            memo: HashMap::new(),
        };
        let d = s.size();
        let mut x = AbelianVector::zero(d);
        for i in 0..N {
            let owners: Vec<usize> = (0..d).filter(|&a| oracle.member(&x, a)).collect();
            assert_eq!(owners.len(), 1, "{s} step {i}: {x:?} in {owners:?}");
            assert_eq!(owners[0], orbit.letters[i], "{s} step {i}");
            x = x.add(&AbelianVector::unit(d, owners[0]));
            assert_eq!(x, orbit.points[i + 1]);
        }
    }
}

#[test]
fn eigenvalue_bounds_up_to_one_hundred() {
    for k in 1..=100 {
        let b = eigenvalue_bounds(k).unwrap();
        assert!(b.modulus, "modulus k={k}");
        assert!(b.imaginary_part, "imaginary part k={k}");
        assert!(b.gamma, "gamma k={k}");
        assert!(b.real_part_halved, "halved real part k={k}");
        // The literal real-part bound only holds at k = 1.
        assert_eq!(b.real_part, k == 1, "real part k={k}");
    }
}

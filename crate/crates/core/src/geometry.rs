// SPDX-License-Identifier: Apache-2.0

//! Floating-point side: projected discrete lines, overlap sampling, the
//! domain exchange, cut-and-project words and image output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::automata::{Automaton, DigitAlphabet, State};
use crate::error::{Error, Result};
use crate::interior::lattice_ball;
use crate::par;
use crate::substitution::{prefix_automaton, AbelianVector, Prepared, Substitution};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CloudPoint {
    pub coords: Vec<f64>,
    pub letter: usize,
    pub interior: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCloud {
    pub depth: u32,
    pub letters: Vec<char>,
    pub points: Vec<CloudPoint>,
}

/// Images under the contracting embeddings: one coordinate per real
/// embedding, two (real and imaginary part) per conjugate pair.
pub struct Projection {
    reps: Vec<(usize, bool)>,
}

impl Projection {
    pub fn new(p: &Prepared) -> Projection {
        let f = p.field();
        Projection {
            reps: f
                .contracting_representatives()
                .into_iter()
                .map(|i| (i, f.is_real(i)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.iter().map(|&(_, real)| if real { 1 } else { 2 }).sum()
    }

    fn flatten(&self, zs: &[Complex64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for (z, &(_, real)) in zs.iter().zip(&self.reps) {
            out.push(z.re);
            if !real {
                out.push(z.im);
            }
        }
        out
    }

    pub fn vector(&self, p: &Prepared, v: &AbelianVector) -> Vec<f64> {
        let x = p.psi.apply(v);
        let zs: Vec<Complex64> = self.reps.iter().map(|&(i, _)| x.evaluate_f64(i)).collect();
        self.flatten(&zs)
    }
}

/// Per-letter interior languages (least significant digit first) used to
/// flag cloud points.
pub type InteriorFlags<'a> = &'a [(usize, Automaton)];

struct FlagMachine {
    /// Deterministic machine of the mirrored interior language.
    dfa: Automaton,
    /// Index in `dfa`'s alphabet of each prefix digit.
    map: Vec<Option<u32>>,
}

impl FlagMachine {
    fn new(int: &Automaton, sigma: &Arc<DigitAlphabet>) -> FlagMachine {
        FlagMachine {
            dfa: int.mirror().determinize(),
            map: sigma
                .embedding_into(int.alphabet())
                .into_iter()
                .map(|o| o.map(|i| i as u32))
                .collect(),
        }
    }

    fn step(&self, q: Option<State>, digit: u32) -> Option<State> {
        let q = q?;
        let d = self.map[digit as usize]?;
        self.dfa.delta(q, d)
    }
}

/// Geometric-series bound on the modulus of every projected point, per
/// contracting embedding: `max |σ(t)| / (1 − |σ(λ)|)`.
pub fn cloud_radius_bound(p: &Prepared) -> Vec<f64> {
    let sigma = p.digit_alphabet();
    let f = p.field();
    f.contracting_representatives()
        .into_iter()
        .map(|i| {
            let dmax = sigma
                .digits()
                .iter()
                .filter_map(|d| d.scalar.as_ref())
                .map(|x| x.evaluate_f64(i).norm())
                .fold(0.0, f64::max);
            dmax / (1.0 - p.base.evaluate_f64(i).norm())
        })
        .collect()
}

/// Projection of the discrete line of `s^{k·depth}(seed)`: one point per
/// position, in positional order.
pub fn project_cloud(p: &Prepared, depth: u32, budget: u64, interior: Option<InteriorFlags>) -> Result<PointCloud> {
    let t = &p.power;
    let len = t.image_lengths(depth)?[p.seed];
    if len > budget {
        return Err(Error::PointBudget { budget, needed: len });
    }
    let (aut, sigma) = prefix_automaton(t, Some(&p.psi));
    let proj = Projection::new(p);
    let reps = &proj.reps;
    let digit_z: Vec<Vec<Complex64>> = sigma
        .digits()
        .iter()
        .map(|d| {
            let x = d.scalar.as_ref().expect("prefix digits carry scalars");
            reps.iter().map(|&(i, _)| x.evaluate_f64(i)).collect()
        })
        .collect();
    let lam: Vec<Complex64> = reps.iter().map(|&(i, _)| p.base.evaluate_f64(i)).collect();
    let flags: Vec<Option<FlagMachine>> = (0..t.size())
        .map(|b| {
            interior
                .and_then(|fs| fs.iter().find(|(l, _)| *l == b))
                .map(|(_, a)| FlagMachine::new(a, &sigma))
        })
        .collect();

    // A search node: letter, remaining depth, projected value, flag states.
    #[derive(Clone)]
    struct Node {
        letter: usize,
        rest: u32,
        z: Vec<Complex64>,
        q: Vec<Option<State>>,
    }
    let step = |n: &Node| -> Vec<Node> {
        aut.transitions_from(n.letter as State)
            .iter()
            .map(|&(d, next)| Node {
                letter: next as usize,
                rest: n.rest - 1,
                z: n
                    .z
                    .iter()
                    .zip(&lam)
                    .zip(&digit_z[d as usize])
                    .map(|((z, l), t)| z * l + t)
                    .collect(),
                q: n
                    .q
                    .iter()
                    .zip(&flags)
                    .map(|(&q, f)| f.as_ref().and_then(|f| f.step(q, d)))
                    .collect(),
            })
            .collect()
    };
    let leaf = |n: &Node| CloudPoint {
        coords: proj.flatten(&n.z),
        letter: n.letter,
        interior: flags[n.letter]
            .as_ref()
            .is_some_and(|f| n.q[n.letter].is_some_and(|q| f.dfa.is_final(q))),
    };
    let start = Node {
        letter: p.seed,
        rest: depth,
        z: vec![Complex64::new(0.0, 0.0); reps.len()],
        q: flags
            .iter()
            .map(|f| f.as_ref().and_then(|f| f.dfa.initial().first().copied()))
            .collect(),
    };
    // Breadth-first until there is enough work to share, then depth-first
    // per subtree; the transition order of the prefix automaton is the
    // positional order.
    let mut frontier = vec![start];
    while frontier.len() < 256 && frontier.iter().any(|n| n.rest > 0) {
        frontier = frontier
            .iter()
            .flat_map(|n| if n.rest == 0 { vec![n.clone()] } else { step(n) })
            .collect();
    }
    let dfs = |root: &Node| -> Vec<CloudPoint> {
        let mut out = Vec::new();
        let mut stack = vec![root.clone()];
        while let Some(n) = stack.pop() {
            if n.rest == 0 {
                out.push(leaf(&n));
            } else {
                let mut kids = step(&n);
                kids.reverse();
                stack.extend(kids);
            }
        }
        out
    };
    let points: Vec<CloudPoint> = par::map(&frontier, dfs).into_iter().flatten().collect();
    Ok(PointCloud {
        depth,
        letters: t.alphabet().to_vec(),
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapReport {
    pub epsilon: f64,
    pub points: usize,
    /// Fraction of points of the exchanged pieces `π(D_{u,a}) + π(e_a)` lying
    /// within `ε` of a point of another exchanged piece.
    pub exchange_overlap: f64,
    /// Fraction of points lying within `ε` of a nonzero `π(Γ₀)`-translate of
    /// the cloud.
    pub translate_overlap: f64,
    pub heuristic: bool,
}

struct Grid {
    eps: f64,
    cells: FxHashMap<Vec<i64>, Vec<usize>>,
}

impl Grid {
    fn new(pts: &[Vec<f64>], eps: f64) -> Grid {
        let mut cells: FxHashMap<Vec<i64>, Vec<usize>> = FxHashMap::default();
        for (i, p) in pts.iter().enumerate() {
            cells.entry(Grid::key(p, eps)).or_default().push(i);
        }
        Grid { eps, cells }
    }

    fn key(p: &[f64], eps: f64) -> Vec<i64> {
        p.iter().map(|x| (x / eps).floor() as i64).collect()
    }

    /// Indices of stored points within `eps` of `p`.
    fn near<'a>(&'a self, pts: &'a [Vec<f64>], p: &'a [f64]) -> impl Iterator<Item = usize> + 'a {
        let k = Grid::key(p, self.eps);
        let d = k.len();
        let n = 3usize.pow(d as u32);
        (0..n).flat_map(move |code| {
            let mut c = code;
            let cell: Vec<i64> = k
                .iter()
                .map(|&x| {
                    let o = (c % 3) as i64 - 1;
                    c /= 3;
                    x + o
                })
                .collect();
            self.cells
                .get(&cell)
                .into_iter()
                .flatten()
                .copied()
                .filter(move |&j| dist2(&pts[j], p) <= self.eps * self.eps)
        })
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sampled overlap statistics of a cloud; a heuristic report, not a verdict.
pub fn sample_disjointness(p: &Prepared, cloud: &PointCloud, eps: f64) -> OverlapReport {
    let proj = Projection::new(p);
    let d = p.power.size();
    let shifts: Vec<Vec<f64>> = (0..d).map(|a| proj.vector(p, &AbelianVector::unit(d, a))).collect();
    let n = cloud.points.len();
    let add = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(a, b)| a + b).collect() };

    let moved: Vec<Vec<f64>> = cloud
        .points
        .iter()
        .map(|q| add(&q.coords, &shifts[q.letter]))
        .collect();
    let grid = Grid::new(&moved, eps);
    let hits = par::map_range(n, |i| {
        grid.near(&moved, &moved[i])
            .any(|j| cloud.points[j].letter != cloud.points[i].letter)
    });
    let exchange = hits.iter().filter(|&&h| h).count();

    let base: Vec<Vec<f64>> = cloud.points.iter().map(|q| q.coords.clone()).collect();
    let grid = Grid::new(&base, eps);
    let translates: Vec<Vec<f64>> = lattice_ball(d, 2)
        .into_iter()
        .filter(|g| !g.is_zero())
        .map(|g| proj.vector(p, &g))
        .collect();
    let hits = par::map_range(n, |i| {
        translates
            .iter()
            .any(|t| grid.near(&base, &add(&base[i], t)).next().is_some())
    });
    let translate = hits.iter().filter(|&&h| h).count();
    let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    OverlapReport {
        epsilon: eps,
        points: n,
        exchange_overlap: frac(exchange),
        translate_overlap: frac(translate),
        heuristic: true,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExchangeOrbit {
    pub letters: Vec<usize>,
    pub points: Vec<AbelianVector>,
}

/// Orbit of `0` under `E: x ↦ x + e_a` for `x ∈ D_{u,a}`, where membership is
/// decided by position in the periodic point. Returns `n + 1` points.
pub fn exchange_orbit(s: &Substitution, n: usize) -> Result<ExchangeOrbit> {
    let (k, seed) = s.periodic_seed();
    let t = s.power(k);
    let mut word = vec![seed];
    while word.len() <= n {
        let next = t.apply(&word);
        if next.len() <= word.len() {
            return Err(Error::InvalidArgument("substitution is not growing".into()));
        }
        word = next;
    }
    let d = s.size();
    let mut prefix = AbelianVector::zero(d);
    let mut x = AbelianVector::zero(d);
    let mut letters = Vec::with_capacity(n);
    let mut points = vec![x.clone()];
    for (i, &c) in word.iter().enumerate().take(n) {
        // x ∈ D_u exactly when it is the abelianised prefix of its length.
        let level: i64 = x.0.iter().sum();
        if level as usize != i || x != prefix {
            return Err(Error::InvalidArgument(format!("orbit left the discrete line at step {i}")));
        }
        letters.push(c);
        x = x.add(&AbelianVector::unit(d, c));
        prefix = prefix.add(&AbelianVector::unit(d, c));
        points.push(x.clone());
    }
    Ok(ExchangeOrbit { letters, points })
}

/// Letters `1..=d` of the hyperfaces of the unit cube tiling crossed by the
/// line `c + t v`, `t > 0`.
pub fn cut_and_project_word(v: &[f64], c: &[f64], n: usize) -> Result<Vec<usize>> {
    if v.len() != c.len() || v.is_empty() {
        return Err(Error::InvalidArgument("direction and offset must have the same positive length".into()));
    }
    if v.iter().any(|&x| !x.is_finite() || x <= 0.0) {
        return Err(Error::InvalidArgument("direction must be strictly positive".into()));
    }
    let mut k: Vec<f64> = c.iter().map(|x| x.floor()).collect();
    let mut out = Vec::with_capacity(n);
    for step in 0..n {
        let times: Vec<f64> = (0..v.len()).map(|j| (k[j] + 1.0 - c[j]) / v[j]).collect();
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let i = order[0];
        if order.len() > 1 {
            let gap = times[order[1]] - times[i];
            if gap <= 1e-12 * times[i].abs().max(1.0) {
                return Err(Error::Degenerate(step));
            }
        }
        k[i] += 1.0;
        out.push(i + 1);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Svg,
    Ppm,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> ImageFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("ppm") => ImageFormat::Ppm,
            _ => ImageFormat::Svg,
        }
    }
}

const SIZE: usize = 1000;
const PALETTE: [[u8; 3]; 8] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
];
const HIGHLIGHT: [u8; 3] = [214, 39, 40];

/// Planar position of a point: the first two coordinates, or for a
/// one-dimensional projection the coordinate and a row per letter.
fn planar(p: &CloudPoint) -> (f64, f64) {
    match p.coords.len() {
        0 => (0.0, p.letter as f64),
        1 => (p.coords[0], p.letter as f64 * 0.05),
        _ => (p.coords[0], p.coords[1]),
    }
}

struct Fit {
    x0: f64,
    y0: f64,
    scale: f64,
    ox: f64,
    oy: f64,
}

impl Fit {
    fn new(cloud: &PointCloud) -> Fit {
        let (mut lx, mut hx, mut ly, mut hy) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in &cloud.points {
            let (x, y) = planar(p);
            lx = lx.min(x);
            hx = hx.max(x);
            ly = ly.min(y);
            hy = hy.max(y);
        }
        let span = (hx - lx).max(hy - ly).max(1e-12);
        let inner = SIZE as f64 * 0.9;
        let scale = inner / span;
        Fit {
            x0: lx,
            y0: ly,
            scale,
            ox: (SIZE as f64 - (hx - lx) * scale) / 2.0,
            oy: (SIZE as f64 - (hy - ly) * scale) / 2.0,
        }
    }

    fn map(&self, p: &CloudPoint) -> (f64, f64) {
        let (x, y) = planar(p);
        (
            self.ox + (x - self.x0) * self.scale,
            SIZE as f64 - (self.oy + (y - self.y0) * self.scale),
        )
    }
}

fn color(p: &CloudPoint) -> [u8; 3] {
    if p.interior {
        HIGHLIGHT
    } else {
        PALETTE[p.letter % PALETTE.len()]
    }
}

/// Image bytes for a cloud: SVG text or binary PPM on a 1000×1000 canvas.
pub fn render_bytes(cloud: &PointCloud, format: ImageFormat) -> Result<Vec<u8>> {
    if cloud.points.is_empty() {
        return Err(Error::InvalidArgument("empty point cloud".into()));
    }
    let fit = Fit::new(cloud);
    match format {
        ImageFormat::Svg => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
            );
            let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
            let r = if cloud.points.len() > 10_000 { 0.8 } else { 2.0 };
            for p in &cloud.points {
                let (x, y) = fit.map(p);
                let [cr, cg, cb] = color(p);
                let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r}\" fill=\"#{cr:02x}{cg:02x}{cb:02x}\"/>");
            }
            s.push_str("</svg>\n");
            Ok(s.into_bytes())
        }
        ImageFormat::Ppm => {
            let mut px = vec![255u8; SIZE * SIZE * 3];
            for p in &cloud.points {
                let (x, y) = fit.map(p);
                let (xi, yi) = (x.floor() as i64, y.floor() as i64);
                for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let (a, b) = (xi + dx, yi + dy);
                    if (0..SIZE as i64).contains(&a) && (0..SIZE as i64).contains(&b) {
                        let o = (b as usize * SIZE + a as usize) * 3;
                        px[o..o + 3].copy_from_slice(&color(p));
                    }
                }
            }
            let mut out = format!("P6\n{SIZE} {SIZE}\n255\n").into_bytes();
            out.extend_from_slice(&px);
            Ok(out)
        }
    }
}

pub fn render(cloud: &PointCloud, path: &Path, format: ImageFormat) -> Result<()> {
    let bytes = render_bytes(cloud, format)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

//! Brute-force reference models shared by the integration tests.
#![allow(dead_code)]

use packman::{BinDims, BoxDims, ContainerState, MultiBinState, Orientation, Placement};
use rand::Rng;

/// Plain nested-vector heightmap with its own feasibility rule.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBin {
    pub l: usize,
    pub b: usize,
    pub h: usize,
    pub cells: Vec<Vec<usize>>,
    pub packed: usize,
}

impl NaiveBin {
    pub fn new(l: usize, b: usize, h: usize) -> Self {
        Self { l, b, h, cells: vec![vec![0; b]; l], packed: 0 }
    }

    pub fn rest(&self, d: BoxDims, (i, j): (usize, usize)) -> Option<usize> {
        if d.l == 0 || d.b == 0 || i + d.l > self.l || j + d.b > self.b {
            return None;
        }
        let mut seen = Vec::new();
        for row in &self.cells[i..i + d.l] {
            for &c in &row[j..j + d.b] {
                if !seen.contains(&c) {
                    seen.push(c);
                }
            }
        }
        match seen[..] {
            [v] if v + d.h <= self.h => Some(v),
            _ => None,
        }
    }

    pub fn place(&mut self, d: BoxDims, (i, j): (usize, usize)) -> Option<usize> {
        let v = self.rest(d, (i, j))?;
        for row in &mut self.cells[i..i + d.l] {
            for c in &mut row[j..j + d.b] {
                *c = v + d.h;
            }
        }
        self.packed += d.volume();
        Some(v)
    }

    pub fn fill(&self) -> f64 {
        self.packed as f64 / (self.l * self.b * self.h) as f64
    }

    pub fn matches(&self, s: &ContainerState) -> bool {
        (0..self.l).all(|i| (0..self.b).all(|j| self.cells[i][j] == s.height(i, j)))
    }

    /// Every feasible `(anchor, orientation, resting height)`, as given first.
    pub fn feasible(&self, next: BoxDims) -> Vec<((usize, usize), Orientation, usize)> {
        let mut out = Vec::new();
        for &o in next.orientations() {
            let d = next.oriented(o);
            for i in 0..self.l {
                for j in 0..self.b {
                    if let Some(v) = self.rest(d, (i, j)) {
                        out.push(((i, j), o, v));
                    }
                }
            }
        }
        out
    }
}

pub fn naive_of(s: &ContainerState) -> NaiveBin {
    let d = s.dims();
    let mut n = NaiveBin::new(d.length, d.width, d.height);
    for i in 0..d.length {
        for j in 0..d.width {
            n.cells[i][j] = s.height(i, j);
        }
    }
    n.packed = s.placed().iter().map(|p| p.dims.volume()).sum();
    n
}

pub fn random_box<R: Rng>(rng: &mut R, bin: BinDims) -> BoxDims {
    BoxDims::new(
        rng.gen_range(1..=bin.length.min(5)),
        rng.gen_range(1..=bin.width.min(5)),
        rng.gen_range(1..=bin.height.min(5)),
    )
}

/// A bin with up to `boxes` boxes dropped at random feasible anchors.
pub fn random_state<R: Rng>(rng: &mut R, bin: BinDims, boxes: usize) -> ContainerState {
    let mut s = ContainerState::new(bin).unwrap();
    for _ in 0..boxes {
        let d = random_box(rng, bin);
        let spots: Vec<_> = (0..bin.length)
            .flat_map(|i| (0..bin.width).map(move |j| (i, j)))
            .filter(|&a| s.is_feasible(d, a))
            .collect();
        if spots.is_empty() {
            continue;
        }
        s.place(d, spots[rng.gen_range(0..spots.len())]).unwrap();
    }
    s
}

pub fn random_bin_dims<R: Rng>(rng: &mut R) -> BinDims {
    BinDims::new(rng.gen_range(2..=10), rng.gen_range(2..=10), rng.gen_range(2..=10))
}

/// Several open bins filled at random.
pub fn random_multi<R: Rng>(rng: &mut R, bins: usize, capacity: usize) -> MultiBinState {
    let dims = random_bin_dims(rng);
    let mut ms = MultiBinState::new(dims, capacity).unwrap();
    for _ in 0..bins {
        let k = ms.open_next_bin().unwrap();
        let n = rng.gen_range(0..=8);
        let s = random_state(rng, dims, n);
        for p in s.placed() {
            let placement = Placement { bin: k, anchor: p.anchor, orientation: Orientation::AsIs };
            ms.place(p.dims, placement).unwrap();
        }
    }
    ms
}

/// Brute-force stability score, written out term by term.
pub fn naive_walle(n: &NaiveBin, d: BoxDims, (i, j): (usize, usize), alpha: [f64; 5]) -> Option<f64> {
    let v = n.rest(d, (i, j))?;
    let top = (v + d.h) as i64;
    let mut border = Vec::new();
    for di in 0..d.l {
        border.push((i as i64 + di as i64, j as i64 - 1));
        border.push((i as i64 + di as i64, (j + d.b) as i64));
    }
    for dj in 0..d.b {
        border.push((i as i64 - 1, j as i64 + dj as i64));
        border.push(((i + d.l) as i64, j as i64 + dj as i64));
    }
    let (mut var, mut high, mut flush) = (0i64, 0, 0);
    for (a, b) in border {
        if a < 0 || b < 0 || a >= n.l as i64 || b >= n.b as i64 {
            continue;
        }
        let c = n.cells[a as usize][b as usize] as i64;
        var += (c - top).abs();
        if c > top {
            high += 1;
        } else if c == top {
            flush += 1;
        }
    }
    Some(
        -alpha[0] * var as f64 + alpha[1] * high as f64 + alpha[2] * flush as f64
            - alpha[3] * (i + j) as f64
            - alpha[4] * top as f64,
    )
}

pub type Option3 = ((usize, usize), Orientation, usize);

/// First open bin that admits the box, with its feasible options, or the
/// fresh bin that would be opened.
pub fn target_bin(ms: &MultiBinState, next: BoxDims) -> (usize, NaiveBin, Vec<Option3>, bool) {
    for (k, b) in ms.bins().iter().enumerate() {
        let n = naive_of(b);
        let opts = n.feasible(next);
        if !opts.is_empty() {
            return (k, n, opts, false);
        }
    }
    let d = ms.bin_dims();
    let n = NaiveBin::new(d.length, d.width, d.height);
    let opts = n.feasible(next);
    (ms.open_count(), n, opts, true)
}

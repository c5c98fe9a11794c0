//! Baseline online placement rules and the WallE stability score.
//!
//! All policies consider every open bin and both footprint orientations.
//! When nothing fits in the open bins they apply the same rule to a fresh
//! empty bin and report that a new bin has to be opened.

use serde::{Deserialize, Serialize};

use crate::error::{PackError, Result};
use crate::grid::{BoxDims, ContainerState, FeasibilityMap, MultiBinState, Orientation, Placement};
use crate::policy::{Decision, Policy};

/// Non-negative weights of the stability score terms, in order: surface
/// variation, snugness, flushness, position and height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallEParams {
    pub alpha: [f64; 5],
}

impl Default for WallEParams {
    fn default() -> Self {
        Self { alpha: [0.75, 1.0, 1.0, 0.01, 1.0] }
    }
}

impl WallEParams {
    pub fn new(alpha: [f64; 5]) -> Result<Self> {
        if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(PackError::InvalidArgument(format!("WallE weights must be non-negative, got {alpha:?}")));
        }
        Ok(Self { alpha })
    }
}

/// Surface statistics of the cells bordering a footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BorderStats {
    pub variation: usize,
    pub higher: usize,
    pub flush: usize,
}

/// Compares the orthogonal neighbours of the footprint with `top`. Cells
/// beyond a wall are skipped, so they add nothing to any term.
pub fn border_stats(state: &ContainerState, dims: BoxDims, (i, j): (usize, usize), top: usize) -> BorderStats {
    let bin = state.dims();
    let mut s = BorderStats::default();
    let mut visit = |h: usize| {
        s.variation += h.abs_diff(top);
        if h > top {
            s.higher += 1;
        } else if h == top {
            s.flush += 1;
        }
    };
    if i > 0 {
        (j..j + dims.b).for_each(|c| visit(state.height(i - 1, c)));
    }
    if i + dims.l < bin.length {
        (j..j + dims.b).for_each(|c| visit(state.height(i + dims.l, c)));
    }
    if j > 0 {
        (i..i + dims.l).for_each(|r| visit(state.height(r, j - 1)));
    }
    if j + dims.b < bin.width {
        (i..i + dims.l).for_each(|r| visit(state.height(r, j + dims.b)));
    }
    s
}

fn score_at(state: &ContainerState, dims: BoxDims, anchor: (usize, usize), rest: usize, p: &WallEParams) -> f64 {
    let top = rest + dims.h;
    let g = border_stats(state, dims, anchor, top);
    let [a1, a2, a3, a4, a5] = p.alpha;
    -a1 * g.variation as f64 + a2 * g.higher as f64 + a3 * g.flush as f64
        - a4 * (anchor.0 + anchor.1) as f64
        - a5 * top as f64
}

/// Stability score of dropping the (already oriented) box at `anchor`.
pub fn walle_score(state: &ContainerState, dims: BoxDims, anchor: (usize, usize), params: &WallEParams) -> Result<f64> {
    let rest = state.resting_height(dims, anchor).ok_or_else(|| {
        PackError::PreconditionViolation(format!("infeasible anchor {anchor:?} for {dims:?}"))
    })?;
    Ok(score_at(state, dims, anchor, rest, params))
}

/// One feasible option seen during a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Scanned {
    bin: usize,
    orientation: Orientation,
    anchor: (usize, usize),
    rest: usize,
}

impl Scanned {
    fn tie_key(&self) -> (usize, usize, usize, Orientation) {
        (self.bin, self.anchor.0, self.anchor.1, self.orientation)
    }
}

fn maps_for(state: &ContainerState, next: BoxDims) -> Vec<(Orientation, FeasibilityMap)> {
    let free = state.dims().volume() - state.volume();
    if free < next.volume() {
        return Vec::new();
    }
    next.orientations()
        .iter()
        .map(|&o| (o, state.feasibility_map(next.oriented(o))))
        .collect()
}

/// Picks the option in one bin maximizing `score`; ties go to the smallest
/// `(i, j, orientation)`.
fn argmax_in<F>(bin: usize, state: &ContainerState, next: BoxDims, mut score: F) -> Option<Scanned>
where
    F: FnMut(&ContainerState, &Scanned) -> f64,
{
    let mut best: Option<(f64, Scanned)> = None;
    for (orientation, map) in maps_for(state, next) {
        for (anchor, rest) in map.feasible() {
            let opt = Scanned { bin, orientation, anchor, rest };
            let s = score(state, &opt);
            let better = match &best {
                None => true,
                Some((bs, bo)) => s > *bs || (s == *bs && opt.tie_key() < bo.tie_key()),
            };
            if better {
                best = Some((s, opt));
            }
        }
    }
    best.map(|(_, o)| o)
}

/// Visits the open bins in index order and returns the choice made in the
/// first one that admits the box at all, falling back to a fresh bin.
fn decide_with<F>(ms: &MultiBinState, next: BoxDims, mut choose: F) -> Result<Decision>
where
    F: FnMut(usize, &ContainerState) -> Option<Scanned>,
{
    let to_decision = |o: Scanned, opened_new_bin| Decision {
        placement: Placement { bin: o.bin, anchor: o.anchor, orientation: o.orientation },
        opened_new_bin,
    };
    for (k, state) in ms.bins().iter().enumerate() {
        if let Some(o) = choose(k, state) {
            return Ok(to_decision(o, false));
        }
    }
    if ms.open_count() >= ms.capacity() {
        return Err(PackError::CapacityExhausted { capacity: ms.capacity() });
    }
    let fresh = ContainerState::new(ms.bin_dims())?;
    match choose(ms.open_count(), &fresh) {
        Some(o) => Ok(to_decision(o, true)),
        None => Err(PackError::PreconditionViolation(format!(
            "box {next:?} does not fit an empty {:?} bin",
            ms.bin_dims()
        ))),
    }
}

/// First feasible placement: bins in order, then the box as given before
/// rotating it, then cells row by row.
pub fn first_fit(ms: &MultiBinState, next: BoxDims) -> Result<Decision> {
    decide_with(ms, next, |bin, state| {
        if state.dims().volume() - state.volume() < next.volume() {
            return None;
        }
        next.orientations().iter().find_map(|&orientation| {
            let map = state.feasibility_map(next.oriented(orientation));
            let first = map.feasible().next();
            first.map(|(anchor, rest)| Scanned { bin, orientation, anchor, rest })
        })
    })
}

/// Lowest feasible resting height in the first bin with room.
pub fn floor_build(ms: &MultiBinState, next: BoxDims) -> Result<Decision> {
    decide_with(ms, next, |bin, state| argmax_in(bin, state, next, |_, o| -(o.rest as f64)))
}

/// Highest feasible resting height in the first bin with room.
pub fn column_build(ms: &MultiBinState, next: BoxDims) -> Result<Decision> {
    decide_with(ms, next, |bin, state| argmax_in(bin, state, next, |_, o| o.rest as f64))
}

/// Highest stability score over the feasible locations and orientations of
/// the first bin with room.
pub fn walle_decide(ms: &MultiBinState, next: BoxDims, params: &WallEParams) -> Result<Decision> {
    decide_with(ms, next, |bin, state| {
        argmax_in(bin, state, next, |state, o| score_at(state, next.oriented(o.orientation), o.anchor, o.rest, params))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    FirstFit,
    Floor,
    Column,
}

impl Policy for Baseline {
    fn name(&self) -> &str {
        match self {
            Baseline::FirstFit => "firstfit",
            Baseline::Floor => "floor",
            Baseline::Column => "column",
        }
    }

    fn decide(&mut self, ms: &MultiBinState, next: BoxDims, _lookahead: &[BoxDims]) -> Result<Decision> {
        match self {
            Baseline::FirstFit => first_fit(ms, next),
            Baseline::Floor => floor_build(ms, next),
            Baseline::Column => column_build(ms, next),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WallE {
    pub params: WallEParams,
}

impl Policy for WallE {
    fn name(&self) -> &str {
        "walle"
    }

    fn decide(&mut self, ms: &MultiBinState, next: BoxDims, _lookahead: &[BoxDims]) -> Result<Decision> {
        walle_decide(ms, next, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BinDims;

    fn one_bin(l: usize, b: usize, h: usize) -> MultiBinState {
        let mut ms = MultiBinState::new(BinDims::new(l, b, h), 4).unwrap();
        ms.open_next_bin().unwrap();
        ms
    }

    fn at(bin: usize, anchor: (usize, usize), orientation: Orientation) -> Placement {
        Placement { bin, anchor, orientation }
    }

    #[test]
    fn first_fit_on_empty_bin() {
        let ms = one_bin(10, 10, 10);
        let d = first_fit(&ms, BoxDims::new(3, 4, 2)).unwrap();
        assert_eq!(d, Decision { placement: at(0, (0, 0), Orientation::AsIs), opened_new_bin: false });
    }

    #[test]
    fn first_fit_fig3_state() {
        for (cap, want) in [(5, at(0, (3, 0), Orientation::Rot90)), (6, at(0, (0, 0), Orientation::AsIs))] {
            let mut ms = one_bin(5, 3, cap);
            ms.place(BoxDims::new(3, 2, 5), at(0, (0, 0), Orientation::AsIs)).unwrap();
            let d = first_fit(&ms, BoxDims::new(3, 2, 1)).unwrap();
            assert_eq!(d.placement, want, "H = {cap}");
        }
    }

    #[test]
    fn oversize_for_open_bins_opens_new_bin() {
        let mut ms = one_bin(4, 4, 4);
        ms.place(BoxDims::new(4, 4, 3), at(0, (0, 0), Orientation::AsIs)).unwrap();
        let d = first_fit(&ms, BoxDims::new(2, 2, 2)).unwrap();
        assert_eq!(d, Decision { placement: at(1, (0, 0), Orientation::AsIs), opened_new_bin: true });
    }

    #[test]
    fn capacity_exhausted_propagates() {
        let mut ms = MultiBinState::new(BinDims::new(2, 2, 2), 1).unwrap();
        ms.open_next_bin().unwrap();
        ms.place(BoxDims::new(2, 2, 2), at(0, (0, 0), Orientation::AsIs)).unwrap();
        for r in [first_fit(&ms, BoxDims::new(1, 1, 1)), walle_decide(&ms, BoxDims::new(1, 1, 1), &WallEParams::default())] {
            assert!(matches!(r, Err(PackError::CapacityExhausted { capacity: 1 })));
        }
    }

    #[test]
    fn floor_prefers_the_floor() {
        let mut ms = one_bin(5, 3, 5);
        assert_eq!(floor_build(&ms, BoxDims::new(2, 2, 2)).unwrap().placement, at(0, (0, 0), Orientation::AsIs));
        ms.place(BoxDims::new(3, 2, 5), at(0, (0, 0), Orientation::AsIs)).unwrap();
        let d = floor_build(&ms, BoxDims::new(2, 3, 2)).unwrap();
        assert_eq!(d.placement, at(0, (3, 0), Orientation::AsIs));
    }

    #[test]
    fn floor_picks_lowest_surface() {
        let mut ms = one_bin(4, 4, 10);
        ms.place(BoxDims::new(4, 2, 3), at(0, (0, 0), Orientation::AsIs)).unwrap();
        ms.place(BoxDims::new(4, 2, 5), at(0, (0, 2), Orientation::AsIs)).unwrap();
        let d = floor_build(&ms, BoxDims::new(2, 2, 1)).unwrap();
        assert_eq!(d.placement, at(0, (0, 0), Orientation::AsIs));
        assert_eq!(ms.bin(0).resting_height(BoxDims::new(2, 2, 1), (0, 0)), Some(3));
    }

    #[test]
    fn column_stacks() {
        let mut ms = one_bin(10, 10, 10);
        assert_eq!(column_build(&ms, BoxDims::new(2, 2, 2)).unwrap().placement, at(0, (0, 0), Orientation::AsIs));
        ms.place(BoxDims::new(2, 2, 2), at(0, (0, 0), Orientation::AsIs)).unwrap();
        let d = column_build(&ms, BoxDims::new(2, 2, 2)).unwrap();
        assert_eq!(d.placement, at(0, (0, 0), Orientation::AsIs));
        assert_eq!(ms.bin(0).resting_height(BoxDims::new(2, 2, 2), (0, 0)), Some(2));
    }

    #[test]
    fn column_skips_full_stack() {
        let mut ms = one_bin(6, 6, 10);
        ms.place(BoxDims::new(2, 2, 9), at(0, (0, 0), Orientation::AsIs)).unwrap();
        ms.place(BoxDims::new(2, 2, 4), at(0, (4, 4), Orientation::AsIs)).unwrap();
        let d = column_build(&ms, BoxDims::new(2, 2, 2)).unwrap();
        assert_eq!(d.placement, at(0, (4, 4), Orientation::AsIs));
    }

    #[test]
    fn walle_spot_values() {
        let s = ContainerState::new(BinDims::new(10, 10, 10)).unwrap();
        let p = WallEParams::default();
        let b = BoxDims::new(2, 2, 2);
        assert_eq!(walle_score(&s, b, (0, 0), &p).unwrap(), -8.0);
        assert!((walle_score(&s, b, (4, 4), &p).unwrap() - -14.08).abs() < 1e-12);
        let g = border_stats(&s, b, (4, 4), 2);
        assert_eq!(g, BorderStats { variation: 16, higher: 0, flush: 0 });
    }

    #[test]
    fn walle_snug_hole() {
        let mut ms = one_bin(4, 4, 5);
        for (dims, anchor) in [((1, 4, 3), (0, 0)), ((1, 4, 3), (3, 0)), ((2, 1, 3), (1, 0)), ((2, 1, 3), (1, 3))] {
            ms.place(BoxDims::from([dims.0, dims.1, dims.2]), at(0, anchor, Orientation::AsIs)).unwrap();
        }
        let b = BoxDims::new(2, 2, 2);
        let g = border_stats(ms.bin(0), b, (1, 1), 2);
        assert_eq!(g, BorderStats { variation: 8, higher: 8, flush: 0 });
        let s = walle_score(ms.bin(0), b, (1, 1), &WallEParams::default()).unwrap();
        assert!((s - (-6.0 + 8.0 - 0.02 - 2.0)).abs() < 1e-12);
        assert!(walle_score(ms.bin(0), b, (0, 1), &WallEParams::default()).is_err());
    }

    #[test]
    fn walle_empty_bin_goes_to_corner() {
        let ms = one_bin(10, 10, 10);
        let d = walle_decide(&ms, BoxDims::new(2, 3, 2), &WallEParams::default()).unwrap();
        let (i, j) = d.placement.anchor;
        let dims = BoxDims::new(2, 3, 2).oriented(d.placement.orientation);
        assert!(i == 0 || i + dims.l == 10);
        assert!(j == 0 || j + dims.b == 10);
        assert_eq!(d.placement.anchor, (0, 0));
    }

    #[test]
    fn walle_params_reject_negative() {
        assert!(WallEParams::new([0.75, 1.0, -1.0, 0.01, 1.0]).is_err());
        assert!(WallEParams::new([0.0; 5]).is_ok());
    }
}

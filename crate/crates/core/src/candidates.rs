//! Corner-point shortlist of placements for the learned policy.
//!
//! Rather than scoring every cell, only anchors where a corner of the box
//! meets a container corner or the edge of an already placed box are
//! proposed. Along each axis the anchor coordinates come from the walls
//! (`0` and `L - l'`) and, for every placed box `k`, from its near edge
//! `i_k`, its far edge `i_k + l_k`, and the two positions that align the new
//! box's far edge with those (`i_k + l_k - l'` and `i_k - l'`). The two
//! coordinate sets are combined and filtered by feasibility.

use std::collections::BTreeSet;

use crate::error::{PackError, Result};
use crate::grid::{BoxDims, ContainerState, MultiBinState, Placement};

/// Upper bound on the shortlist length; the lexicographically first
/// candidates are kept.
pub const MAX_CANDIDATES: usize = 512;

/// A feasible corner placement. `dims` is the oriented box and `z` the
/// height it would rest at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub placement: Placement,
    pub dims: BoxDims,
    pub z: usize,
}

impl Candidate {
    /// State after hypothetically placing the box here.
    pub fn projected_state(&self, ms: &MultiBinState, unrotated: BoxDims) -> Result<MultiBinState> {
        let mut next = ms.clone();
        if self.placement.bin == next.open_count() {
            next.open_next_bin()?;
        }
        next.place(unrotated, self.placement)?;
        Ok(next)
    }

    /// Hypothetical bin after placement, cloning only the affected bin.
    pub fn projected_bin(&self, bin: &ContainerState) -> Result<ContainerState> {
        let mut next = bin.clone();
        next.place(self.dims, self.placement.anchor)?;
        Ok(next)
    }
}

fn push_clipped(set: &mut BTreeSet<usize>, v: isize, max: isize) {
    if (0..=max).contains(&v) {
        set.insert(v as usize);
    }
}

/// Anchor coordinates for an oriented footprint `(l, b)` in one bin.
pub fn anchor_axes(state: &ContainerState, dims: BoxDims) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let bin = state.dims();
    let (mut is, mut js) = (BTreeSet::new(), BTreeSet::new());
    if dims.l > bin.length || dims.b > bin.width {
        return (is, js);
    }
    let max_i = (bin.length - dims.l) as isize;
    let max_j = (bin.width - dims.b) as isize;
    let (l, b) = (dims.l as isize, dims.b as isize);
    is.insert(0);
    is.insert(max_i as usize);
    js.insert(0);
    js.insert(max_j as usize);
    for p in state.placed() {
        let (pi, pj) = (p.anchor.0 as isize, p.anchor.1 as isize);
        let (pl, pb) = (p.dims.l as isize, p.dims.b as isize);
        for v in [pi, pi + pl, pi + pl - l, pi - l] {
            push_clipped(&mut is, v, max_i);
        }
        for v in [pj, pj + pb, pj + pb - b, pj - b] {
            push_clipped(&mut js, v, max_j);
        }
    }
    (is, js)
}

fn bin_candidates(bin: usize, state: &ContainerState, next: BoxDims, out: &mut Vec<Candidate>) {
    if state.dims().volume() - state.volume() < next.volume() {
        return;
    }
    for &o in next.orientations() {
        let dims = next.oriented(o);
        let (is, js) = anchor_axes(state, dims);
        if is.is_empty() {
            continue;
        }
        let map = state.feasibility_map(dims);
        for &i in &is {
            for &j in &js {
                if let Some(z) = map.resting_height(i, j) {
                    out.push(Candidate { placement: Placement { bin, anchor: (i, j), orientation: o }, dims, z });
                }
            }
        }
    }
}

/// Feasible corner placements over all open bins, ordered by
/// `(bin, orientation, i, j)` and capped at [`MAX_CANDIDATES`].
pub fn corner_candidates(ms: &MultiBinState, next: BoxDims) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (k, state) in ms.bins().iter().enumerate() {
        bin_candidates(k, state, next, &mut out);
        if out.len() >= MAX_CANDIDATES {
            out.truncate(MAX_CANDIDATES);
            break;
        }
    }
    out
}

/// Shortlist size for the current state.
pub fn candidate_count_bound(ms: &MultiBinState, next: BoxDims) -> usize {
    corner_candidates(ms, next).len()
}

/// Corner candidates, or the candidates of a fresh bin when no open bin
/// admits the box. The flag reports whether a new bin is needed.
pub fn candidates_or_new_bin(ms: &MultiBinState, next: BoxDims) -> Result<(Vec<Candidate>, bool)> {
    let found = corner_candidates(ms, next);
    if !found.is_empty() {
        return Ok((found, false));
    }
    if ms.open_count() >= ms.capacity() {
        return Err(PackError::CapacityExhausted { capacity: ms.capacity() });
    }
    let fresh = ContainerState::new(ms.bin_dims())?;
    let mut out = Vec::new();
    bin_candidates(ms.open_count(), &fresh, next, &mut out);
    if out.is_empty() {
        return Err(PackError::PreconditionViolation(format!(
            "box {next:?} does not fit an empty {:?} bin",
            ms.bin_dims()
        )));
    }
    Ok((out, true))
}

/// Whether some vertical face of the candidate is flush with a wall or with
/// an edge coordinate of a placed box.
pub fn touches_corner_structure(state: &ContainerState, c: &Candidate) -> bool {
    let bin = state.dims();
    let (i, j) = c.placement.anchor;
    let (l, b) = (c.dims.l, c.dims.b);
    let i_edges = |v: usize| v == 0 || v == bin.length || state.placed().iter().any(|p| v == p.anchor.0 || v == p.anchor.0 + p.dims.l);
    let j_edges = |v: usize| v == 0 || v == bin.width || state.placed().iter().any(|p| v == p.anchor.1 || v == p.anchor.1 + p.dims.b);
    (i_edges(i) || i_edges(i + l)) && (j_edges(j) || j_edges(j + b))
}

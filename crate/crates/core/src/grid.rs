//! Discretized container model.
//!
//! A container is an `L × B` heightmap where each cell stores how high boxes
//! are stacked at that footprint position, capped at `H`. Boxes are placed
//! from above, may only be rotated about the vertical axis, and must rest on a
//! perfectly flat base. Several containers are grouped in a [`MultiBinState`]
//! that opens bins strictly in index order up to a fixed capacity.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{PackError, Result};

/// Cuboid dimensions in grid cells: `l` along the i-axis, `b` along the
/// j-axis and `h` vertically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct BoxDims {
    pub l: usize,
    pub b: usize,
    pub h: usize,
}

impl BoxDims {
    pub const fn new(l: usize, b: usize, h: usize) -> Self {
        Self { l, b, h }
    }

    pub fn volume(&self) -> usize {
        self.l * self.b * self.h
    }

    /// Footprint after rotating about the vertical axis.
    pub fn oriented(&self, orientation: Orientation) -> BoxDims {
        match orientation {
            Orientation::AsIs => *self,
            Orientation::Rot90 => BoxDims::new(self.b, self.l, self.h),
        }
    }

    /// Distinct orientations of this box; a square footprint only has one.
    pub fn orientations(&self) -> &'static [Orientation] {
        if self.l == self.b {
            &[Orientation::AsIs]
        } else {
            &[Orientation::AsIs, Orientation::Rot90]
        }
    }
}

impl From<[usize; 3]> for BoxDims {
    fn from(v: [usize; 3]) -> Self {
        BoxDims::new(v[0], v[1], v[2])
    }
}

impl From<BoxDims> for [usize; 3] {
    fn from(b: BoxDims) -> Self {
        [b.l, b.b, b.h]
    }
}

/// Free-function form of [`BoxDims::oriented`].
pub fn oriented_dims(dims: BoxDims, orientation: Orientation) -> BoxDims {
    dims.oriented(orientation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    AsIs,
    Rot90,
}

/// Container dimensions `(L, B, H)` in grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct BinDims {
    pub length: usize,
    pub width: usize,
    pub height: usize,
}

impl BinDims {
    pub const fn new(length: usize, width: usize, height: usize) -> Self {
        Self { length, width, height }
    }

    pub fn volume(&self) -> usize {
        self.length * self.width * self.height
    }

    pub fn cells(&self) -> usize {
        self.length * self.width
    }

    /// Whether a box (in either orientation) can ever fit in an empty bin.
    pub fn admits(&self, dims: BoxDims) -> bool {
        dims.h <= self.height
            && dims.orientations().iter().any(|&o| {
                let d = dims.oriented(o);
                d.l <= self.length && d.b <= self.width
            })
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 || self.width == 0 || self.height == 0 {
            return Err(PackError::InvalidArgument(format!(
                "container dimensions must be positive, got {}x{}x{}",
                self.length, self.width, self.height
            )));
        }
        Ok(())
    }
}

impl From<[usize; 3]> for BinDims {
    fn from(v: [usize; 3]) -> Self {
        BinDims::new(v[0], v[1], v[2])
    }
}

impl From<BinDims> for [usize; 3] {
    fn from(d: BinDims) -> Self {
        [d.length, d.width, d.height]
    }
}

/// Where a box goes: bin index, minimum-index footprint corner and rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub bin: usize,
    pub anchor: (usize, usize),
    pub orientation: Orientation,
}

/// A box already sitting in a container, with its oriented dimensions and
/// the height of its base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedBox {
    pub anchor: (usize, usize),
    pub dims: BoxDims,
    pub z: usize,
}

/// Heightmap of a single container.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerState {
    dims: BinDims,
    heights: Vec<u32>,
    placed: Vec<PlacedBox>,
}

impl ContainerState {
    pub fn new(dims: BinDims) -> Result<Self> {
        dims.validate()?;
        Ok(Self {
            dims,
            heights: vec![0; dims.cells()],
            placed: Vec::new(),
        })
    }

    pub fn dims(&self) -> BinDims {
        self.dims
    }

    /// Row-major (`i * B + j`) cell heights.
    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    #[inline]
    pub fn height(&self, i: usize, j: usize) -> usize {
        self.heights[i * self.dims.width + j] as usize
    }

    pub fn placed(&self) -> &[PlacedBox] {
        &self.placed
    }

    /// Total stacked volume, i.e. the sum of all cell heights.
    pub fn volume(&self) -> usize {
        self.heights.iter().map(|&h| h as usize).sum()
    }

    pub fn fill_fraction(&self) -> f64 {
        self.volume() as f64 / self.dims.volume() as f64
    }

    fn footprint_in_grid(&self, dims: BoxDims, (i, j): (usize, usize)) -> bool {
        dims.l >= 1
            && dims.b >= 1
            && i + dims.l <= self.dims.length
            && j + dims.b <= self.dims.width
    }

    /// Height the box would rest at, or `None` if the placement is infeasible.
    /// `dims` must already be oriented.
    pub fn resting_height(&self, dims: BoxDims, anchor: (usize, usize)) -> Option<usize> {
        if !self.footprint_in_grid(dims, anchor) {
            return None;
        }
        let (i0, j0) = anchor;
        let base = self.height(i0, j0);
        for i in i0..i0 + dims.l {
            let row = &self.heights[i * self.dims.width + j0..i * self.dims.width + j0 + dims.b];
            if row.iter().any(|&h| h as usize != base) {
                return None;
            }
        }
        (base + dims.h <= self.dims.height).then_some(base)
    }

    pub fn is_feasible(&self, dims: BoxDims, anchor: (usize, usize)) -> bool {
        self.resting_height(dims, anchor).is_some()
    }

    /// Drops an oriented box at `anchor` and returns its base height.
    pub fn place(&mut self, dims: BoxDims, anchor: (usize, usize)) -> Result<usize> {
        let z = self.resting_height(dims, anchor).ok_or_else(|| {
            PackError::PreconditionViolation(format!(
                "box {}x{}x{} cannot be placed at {:?}",
                dims.l, dims.b, dims.h, anchor
            ))
        })?;
        let top = (z + dims.h) as u32;
        let (i0, j0) = anchor;
        for i in i0..i0 + dims.l {
            let start = i * self.dims.width + j0;
            self.heights[start..start + dims.b].fill(top);
        }
        self.placed.push(PlacedBox { anchor, dims, z });
        Ok(z)
    }

    /// Precomputes feasibility of every anchor for one oriented box.
    pub fn feasibility_map(&self, dims: BoxDims) -> FeasibilityMap {
        FeasibilityMap::build(self, dims)
    }
}

/// Free-function form of [`ContainerState::new`].
pub fn new_container(length: usize, width: usize, height: usize) -> Result<ContainerState> {
    ContainerState::new(BinDims::new(length, width, height))
}

/// Sliding-window min/max over one line of cells.
fn sliding_min_max(src: &[u32], window: usize, min_out: &mut Vec<u32>, max_out: &mut Vec<u32>) {
    min_out.clear();
    max_out.clear();
    let mut lo: VecDeque<usize> = VecDeque::with_capacity(window + 1);
    let mut hi: VecDeque<usize> = VecDeque::with_capacity(window + 1);
    for (k, &v) in src.iter().enumerate() {
        while lo.back().is_some_and(|&b| src[b] >= v) {
            lo.pop_back();
        }
        lo.push_back(k);
        while hi.back().is_some_and(|&b| src[b] <= v) {
            hi.pop_back();
        }
        hi.push_back(k);
        if k + 1 >= window {
            let start = k + 1 - window;
            while lo.front().is_some_and(|&f| f < start) {
                lo.pop_front();
            }
            while hi.front().is_some_and(|&f| f < start) {
                hi.pop_front();
            }
            min_out.push(src[lo[0]]);
            max_out.push(src[hi[0]]);
        }
    }
}

/// Resting height for every anchor of one oriented box in one container,
/// computed with separable sliding-window min/max in `O(L·B)`.
#[derive(Debug, Clone)]
pub struct FeasibilityMap {
    dims: BoxDims,
    rows: usize,
    cols: usize,
    cap: usize,
    min: Vec<u32>,
    max: Vec<u32>,
}

impl FeasibilityMap {
    fn build(state: &ContainerState, dims: BoxDims) -> Self {
        let bin = state.dims;
        let cap = bin.height;
        if dims.l == 0 || dims.b == 0 || dims.l > bin.length || dims.b > bin.width || dims.h > cap {
            return Self { dims, rows: 0, cols: 0, cap, min: Vec::new(), max: Vec::new() };
        }
        let rows = bin.length - dims.l + 1;
        let cols = bin.width - dims.b + 1;

        // Pass 1: along j within each row.
        let mut row_min = vec![0u32; bin.length * cols];
        let mut row_max = vec![0u32; bin.length * cols];
        let (mut mn, mut mx) = (Vec::with_capacity(cols), Vec::with_capacity(cols));
        for i in 0..bin.length {
            let line = &state.heights[i * bin.width..(i + 1) * bin.width];
            sliding_min_max(line, dims.b, &mut mn, &mut mx);
            row_min[i * cols..(i + 1) * cols].copy_from_slice(&mn);
            row_max[i * cols..(i + 1) * cols].copy_from_slice(&mx);
        }

        // Pass 2: along i within each column of the row results.
        let mut min = vec![0u32; rows * cols];
        let mut max = vec![0u32; rows * cols];
        let mut col_lo = Vec::with_capacity(bin.length);
        let mut col_hi = Vec::with_capacity(bin.length);
        let (mut tmp_lo, mut tmp_hi) = (Vec::with_capacity(rows), Vec::with_capacity(rows));
        for j in 0..cols {
            col_lo.clear();
            col_hi.clear();
            for i in 0..bin.length {
                col_lo.push(row_min[i * cols + j]);
                col_hi.push(row_max[i * cols + j]);
            }
            sliding_min_max(&col_lo, dims.l, &mut tmp_lo, &mut mn);
            sliding_min_max(&col_hi, dims.l, &mut tmp_hi, &mut mx);
            for i in 0..rows {
                min[i * cols + j] = tmp_lo[i];
                max[i * cols + j] = mx[i];
            }
        }
        Self { dims, rows, cols, cap, min, max }
    }

    pub fn dims(&self) -> BoxDims {
        self.dims
    }

    /// Number of anchor rows and columns that keep the footprint in the grid.
    pub fn anchor_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn resting_height(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.rows || j >= self.cols {
            return None;
        }
        let k = i * self.cols + j;
        let v = self.min[k] as usize;
        (self.min[k] == self.max[k] && v + self.dims.h <= self.cap).then_some(v)
    }

    /// Feasible anchors in row-major order with their resting heights.
    pub fn feasible(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (0..self.cols).filter_map(move |j| self.resting_height(i, j).map(|v| ((i, j), v)))
        })
    }
}

/// A row of up to `capacity` containers, opened strictly in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiBinState {
    bin_dims: BinDims,
    capacity: usize,
    bins: Vec<ContainerState>,
}

impl MultiBinState {
    /// Creates the state with no bins open yet.
    pub fn new(bin_dims: BinDims, capacity: usize) -> Result<Self> {
        bin_dims.validate()?;
        if capacity == 0 {
            return Err(PackError::InvalidArgument("bin capacity must be at least 1".into()));
        }
        Ok(Self { bin_dims, capacity, bins: Vec::with_capacity(capacity) })
    }

    pub fn bin_dims(&self) -> BinDims {
        self.bin_dims
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn open_count(&self) -> usize {
        self.bins.len()
    }

    pub fn bins(&self) -> &[ContainerState] {
        &self.bins
    }

    pub fn bin(&self, k: usize) -> &ContainerState {
        &self.bins[k]
    }

    /// Opens the next empty bin and returns its index.
    pub fn open_next_bin(&mut self) -> Result<usize> {
        if self.bins.len() >= self.capacity {
            return Err(PackError::CapacityExhausted { capacity: self.capacity });
        }
        self.bins.push(ContainerState::new(self.bin_dims)?);
        Ok(self.bins.len() - 1)
    }

    /// Places an unrotated box according to `placement`; returns the base height.
    pub fn place(&mut self, dims: BoxDims, placement: Placement) -> Result<usize> {
        let bin = self.bins.get_mut(placement.bin).ok_or_else(|| {
            PackError::PreconditionViolation(format!("bin {} is not open", placement.bin))
        })?;
        bin.place(dims.oriented(placement.orientation), placement.anchor)
    }

    pub fn is_feasible(&self, dims: BoxDims, placement: Placement) -> bool {
        self.bins
            .get(placement.bin)
            .is_some_and(|b| b.is_feasible(dims.oriented(placement.orientation), placement.anchor))
    }

    pub fn total_volume(&self) -> usize {
        self.bins.iter().map(ContainerState::volume).sum()
    }

    /// Fill fraction of the first `n` bins, counting unopened bins as empty.
    pub fn fill_first(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let v: usize = self.bins.iter().take(n).map(ContainerState::volume).sum();
        v as f64 / (n * self.bin_dims.volume()) as f64
    }
}

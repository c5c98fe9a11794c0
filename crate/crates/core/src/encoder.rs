//! Fixed-size network input for container rows of any size.
//!
//! The `T` bins are laid side by side along the j-axis into one
//! `L × (T·B)` heightmap, which is split into 144 disjoint tiles (4 row
//! bands × 36 column bands, band sizes balanced to within one cell). Each
//! tile contributes its mean, max and max − min height, all divided by `H`.
//! The border channel lists the heights around a proposed footprint and the
//! field channel is a one-hot of the tile holding the anchor.

use serde::{Deserialize, Serialize};

use crate::candidates::Candidate;
use crate::error::{PackError, Result};
use crate::grid::{BinDims, BoxDims, ContainerState, MultiBinState};

pub const TILES: usize = 144;
pub const STATE_LEN: usize = 3 * TILES;
pub const BORDER_LEN: usize = 144;

/// Network input for one candidate placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedInput {
    /// Mean, max and max − min blocks of [`TILES`] entries each.
    pub x: Vec<f32>,
    pub y: Vec<f32>,
    /// Index of the hot entry in the one-hot field channel.
    pub field: usize,
}

impl EncodedInput {
    pub fn z(&self) -> Vec<f32> {
        let mut z = vec![0.0; TILES];
        z[self.field] = 1.0;
        z
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.x.len() != STATE_LEN || self.y.len() != BORDER_LEN || self.field >= TILES {
            return Err(PackError::InvalidArgument(format!(
                "encoded input has shape ({}, {}, field {}), expected ({STATE_LEN}, {BORDER_LEN}, <{TILES})",
                self.x.len(),
                self.y.len(),
                self.field
            )));
        }
        Ok(())
    }
}

/// Tiling of the global heightmap into disjoint receptive fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldPartition {
    pub rows: usize,
    pub cols: usize,
    #[serde(skip)]
    row_bounds: Vec<usize>,
    #[serde(skip)]
    col_bounds: Vec<usize>,
}

fn balanced_bounds(n: usize, bands: usize) -> Vec<usize> {
    (0..=bands).map(|k| k * n / bands).collect()
}

impl FieldPartition {
    pub const DEFAULT_ROWS: usize = 4;
    pub const DEFAULT_COLS: usize = 36;

    pub fn new(rows: usize, cols: usize, grid_rows: usize, grid_cols: usize) -> Result<Self> {
        if rows * cols != TILES {
            return Err(PackError::InvalidArgument(format!("partition {rows}x{cols} must have {TILES} tiles")));
        }
        Ok(Self {
            rows,
            cols,
            row_bounds: balanced_bounds(grid_rows, rows),
            col_bounds: balanced_bounds(grid_cols, cols),
        })
    }

    /// Default 4 × 36 partition for `capacity` bins in a row.
    pub fn for_layout(bin: BinDims, capacity: usize) -> Self {
        Self::new(Self::DEFAULT_ROWS, Self::DEFAULT_COLS, bin.length, bin.width * capacity)
            .expect("default partition has 144 tiles")
    }

    pub fn grid_shape(&self) -> (usize, usize) {
        (self.row_bounds[self.rows], self.col_bounds[self.cols])
    }

    fn band(bounds: &[usize], v: usize) -> usize {
        // last band whose start is <= v, skipping empty bands
        bounds.partition_point(|&b| b <= v).saturating_sub(1).min(bounds.len() - 2)
    }

    /// Tile holding global cell `(gi, gj)`.
    pub fn tile_of(&self, gi: usize, gj: usize) -> usize {
        Self::band(&self.row_bounds, gi) * self.cols + Self::band(&self.col_bounds, gj)
    }

    /// Cell ranges `(rows, cols)` covered by tile `t`.
    pub fn tile_ranges(&self, t: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let (r, c) = (t / self.cols, t % self.cols);
        (self.row_bounds[r]..self.row_bounds[r + 1], self.col_bounds[c]..self.col_bounds[c + 1])
    }

    /// Tiles intersecting the global rectangle `rows × cols`, row-major.
    fn tiles_touching(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<usize> {
        let (r0, r1) = (Self::band(&self.row_bounds, rows.start), Self::band(&self.row_bounds, rows.end - 1));
        let (c0, c1) = (Self::band(&self.col_bounds, cols.start), Self::band(&self.col_bounds, cols.end - 1));
        (r0..=r1).flat_map(|r| (c0..=c1).map(move |c| r * self.cols + c)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct TileStats {
    sum: u64,
    max: u32,
    min: u32,
    area: u32,
}

impl TileStats {
    fn write(&self, t: usize, cap: f32, x: &mut [f32]) {
        if self.area == 0 {
            x[t] = 0.0;
            x[TILES + t] = 0.0;
            x[2 * TILES + t] = 0.0;
            return;
        }
        x[t] = (self.sum as f64 / self.area as f64 / cap as f64) as f32;
        x[TILES + t] = self.max as f32 / cap;
        x[2 * TILES + t] = (self.max - self.min) as f32 / cap;
    }
}

/// Heights of the global row-of-bins grid, with unopened bins reading 0.
fn global_height(ms: &MultiBinState, gi: usize, gj: usize) -> u32 {
    let width = ms.bin_dims().width;
    let bin = gj / width;
    ms.bins().get(bin).map_or(0, |b| b.heights()[gi * width + gj % width])
}

/// Pooling encoder for a fixed bin size and capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEncoder {
    bin: BinDims,
    capacity: usize,
    partition: FieldPartition,
}

/// Pooled statistics of one state, reused across its candidates.
#[derive(Debug, Clone)]
pub struct PooledState {
    stats: Vec<TileStats>,
    pub x: Vec<f32>,
}

impl StateEncoder {
    pub fn new(bin: BinDims, capacity: usize) -> Self {
        Self { bin, capacity, partition: FieldPartition::for_layout(bin, capacity) }
    }

    pub fn with_partition(bin: BinDims, capacity: usize, rows: usize, cols: usize) -> Result<Self> {
        let partition = FieldPartition::new(rows, cols, bin.length, bin.width * capacity)?;
        Ok(Self { bin, capacity, partition })
    }

    pub fn partition(&self) -> &FieldPartition {
        &self.partition
    }

    pub fn bin_dims(&self) -> BinDims {
        self.bin
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn check_layout(&self, ms: &MultiBinState) {
        debug_assert_eq!(ms.bin_dims(), self.bin);
        debug_assert!(ms.capacity() <= self.capacity);
    }

    fn tile_stats<F: Fn(usize, usize) -> u32>(&self, t: usize, height: F) -> TileStats {
        let (rows, cols) = self.partition.tile_ranges(t);
        let mut s = TileStats { sum: 0, max: 0, min: u32::MAX, area: 0 };
        for gi in rows {
            for gj in cols.clone() {
                let h = height(gi, gj);
                s.sum += h as u64;
                s.max = s.max.max(h);
                s.min = s.min.min(h);
                s.area += 1;
            }
        }
        if s.area == 0 {
            s.min = 0;
        }
        s
    }

    pub fn pool(&self, ms: &MultiBinState) -> PooledState {
        self.check_layout(ms);
        let cap = self.bin.height as f32;
        let mut x = vec![0.0; STATE_LEN];
        let stats: Vec<TileStats> = (0..TILES)
            .map(|t| {
                let s = self.tile_stats(t, |gi, gj| global_height(ms, gi, gj));
                s.write(t, cap, &mut x);
                s
            })
            .collect();
        PooledState { stats, x }
    }

    /// The 432-entry pooled state vector.
    pub fn encode_state(&self, ms: &MultiBinState) -> Vec<f32> {
        self.pool(ms).x
    }

    /// Pooled state after placing a candidate, recomputing only the tiles
    /// its footprint touches. Returns the vector and the changed tiles.
    pub fn project(&self, ms: &MultiBinState, base: &PooledState, c: &Candidate) -> (Vec<f32>, Vec<usize>) {
        let cap = self.bin.height as f32;
        let (i, j) = c.placement.anchor;
        let gj = c.placement.bin * self.bin.width + j;
        let (rows, cols) = (i..i + c.dims.l, gj..gj + c.dims.b);
        let top = (c.z + c.dims.h) as u32;
        let touched = self.partition.tiles_touching(rows.clone(), cols.clone());
        let mut x = base.x.clone();
        for &t in &touched {
            let s = self.tile_stats(t, |gi, gj| {
                if rows.contains(&gi) && cols.contains(&gj) {
                    top
                } else {
                    global_height(ms, gi, gj)
                }
            });
            debug_assert!(s.sum >= base.stats[t].sum);
            s.write(t, cap, &mut x);
        }
        (x, touched)
    }

    pub fn field_index(&self, anchor: (usize, usize), bin: usize) -> usize {
        self.partition.tile_of(anchor.0, bin * self.bin.width + anchor.1)
    }

    /// Full input for one candidate of the state `ms`.
    pub fn encode_candidate(&self, ms: &MultiBinState, base: &PooledState, c: &Candidate) -> EncodedInput {
        let (x, _) = self.project(ms, base, c);
        let bin_state = ms.bins().get(c.placement.bin);
        let y = match bin_state {
            Some(b) => encode_border(b, c.dims, c.placement.anchor),
            None => encode_border(&ContainerState::new(self.bin).expect("valid bin"), c.dims, c.placement.anchor),
        };
        EncodedInput { x, y, field: self.field_index(c.placement.anchor, c.placement.bin) }
    }
}

/// Border cells of an oriented footprint, walked clockwise starting at the
/// cell above the anchor: along the top edge, down the right side, back
/// along the bottom and up the left side. `None` marks a wall.
pub fn border_walk(bin: BinDims, dims: BoxDims, (i, j): (usize, usize)) -> Vec<Option<(usize, usize)>> {
    let (i, j) = (i as isize, j as isize);
    let (l, b) = (dims.l as isize, dims.b as isize);
    let inside = |r: isize, c: isize| {
        (r >= 0 && c >= 0 && (r as usize) < bin.length && (c as usize) < bin.width).then_some((r as usize, c as usize))
    };
    let mut cells = Vec::with_capacity(2 * (dims.l + dims.b));
    cells.extend((j..j + b).map(|c| inside(i - 1, c)));
    cells.extend((i..i + l).map(|r| inside(r, j + b)));
    cells.extend((j..j + b).rev().map(|c| inside(i + l, c)));
    cells.extend((i..i + l).rev().map(|r| inside(r, j - 1)));
    cells
}

/// Heights around the footprint divided by `H`, walls reading 1. Short
/// borders are zero-padded; long ones are sampled with a constant skip.
pub fn encode_border(state: &ContainerState, dims: BoxDims, anchor: (usize, usize)) -> Vec<f32> {
    let bin = state.dims();
    let cap = bin.height as f32;
    let walk = border_walk(bin, dims, anchor);
    let skip = walk.len().div_ceil(BORDER_LEN).max(1);
    let mut y = vec![0.0; BORDER_LEN];
    for (slot, cell) in y.iter_mut().zip(walk.iter().step_by(skip)) {
        *slot = match cell {
            Some((r, c)) => state.height(*r, *c) as f32 / cap,
            None => 1.0,
        };
    }
    y
}

/// One-hot of the tile holding the anchor of `bin`.
pub fn encode_field_onehot(partition: &FieldPartition, bin_width: usize, anchor: (usize, usize), bin: usize) -> Vec<f32> {
    let mut z = vec![0.0; TILES];
    z[partition.tile_of(anchor.0, bin * bin_width + anchor.1)] = 1.0;
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Orientation, Placement};

    fn layout() -> (BinDims, MultiBinState) {
        let bin = BinDims::new(45, 80, 45);
        let mut ms = MultiBinState::new(bin, 16).unwrap();
        ms.open_next_bin().unwrap();
        (bin, ms)
    }

    #[test]
    fn partition_covers_grid_disjointly() {
        let p = FieldPartition::for_layout(BinDims::new(45, 80, 45), 16);
        assert_eq!(p.grid_shape(), (45, 1280));
        let mut hits = vec![0u8; 45 * 1280];
        for t in 0..TILES {
            let (rows, cols) = p.tile_ranges(t);
            assert!(!rows.is_empty() && !cols.is_empty());
            for r in rows {
                for c in cols.clone() {
                    hits[r * 1280 + c] += 1;
                    assert_eq!(p.tile_of(r, c), t);
                }
            }
        }
        assert!(hits.iter().all(|&h| h == 1));
        let sizes: Vec<_> = (0..36).map(|c| p.tile_ranges(c).1.len()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn zero_state_encodes_to_zero() {
        let (bin, ms) = layout();
        let x = StateEncoder::new(bin, 16).encode_state(&ms);
        assert_eq!(x.len(), STATE_LEN);
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn full_state_encodes_to_ones() {
        let bin = BinDims::new(8, 9, 5);
        let mut ms = MultiBinState::new(bin, 4).unwrap();
        for k in 0..4 {
            ms.open_next_bin().unwrap();
            ms.place(BoxDims::new(8, 9, 5), Placement { bin: k, anchor: (0, 0), orientation: Orientation::AsIs }).unwrap();
        }
        let x = StateEncoder::new(bin, 4).encode_state(&ms);
        for t in 0..TILES {
            assert_eq!((x[t], x[TILES + t], x[2 * TILES + t]), (1.0, 1.0, 0.0));
        }
    }

    #[test]
    fn single_tall_cell() {
        let (bin, mut ms) = layout();
        ms.place(BoxDims::new(1, 1, 45), Placement { bin: 0, anchor: (0, 0), orientation: Orientation::AsIs }).unwrap();
        let enc = StateEncoder::new(bin, 16);
        let x = enc.encode_state(&ms);
        let (rows, cols) = enc.partition().tile_ranges(0);
        let area = (rows.len() * cols.len()) as f32;
        assert!((x[0] - 1.0 / area).abs() < 1e-7);
        assert_eq!((x[TILES], x[2 * TILES]), (1.0, 1.0));
        assert!((1..TILES).all(|t| x[t] == 0.0 && x[TILES + t] == 0.0 && x[2 * TILES + t] == 0.0));
    }

    #[test]
    fn border_walk_from_corner() {
        let s = ContainerState::new(BinDims::new(10, 10, 10)).unwrap();
        let y = encode_border(&s, BoxDims::new(2, 2, 2), (0, 0));
        assert_eq!(&y[..8], &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        assert!(y[8..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn border_sampling() {
        // perimeter exactly 144: 2 * (36 + 36)
        let bin = BinDims::new(40, 40, 10);
        let mut s = ContainerState::new(bin).unwrap();
        s.place(BoxDims::new(40, 40, 3), (0, 0)).unwrap();
        let y = encode_border(&s, BoxDims::new(36, 36, 1), (2, 2));
        assert!(y.iter().all(|&v| (v - 0.3).abs() < 1e-6));

        // perimeter 288 in a larger bin: every second cell, all 144 slots used
        let bin = BinDims::new(80, 80, 10);
        let s = ContainerState::new(bin).unwrap();
        let dims = BoxDims::new(72, 72, 1);
        let walk = border_walk(bin, dims, (0, 4));
        assert_eq!(walk.len(), 288);
        let y = encode_border(&s, dims, (0, 4));
        for (k, v) in y.iter().enumerate() {
            let expect = if walk[2 * k].is_none() { 1.0 } else { 0.0 };
            assert_eq!(*v, expect, "slot {k}");
        }
    }

    #[test]
    fn onehot_field() {
        let bin = BinDims::new(45, 80, 45);
        let p = FieldPartition::for_layout(bin, 16);
        let z = encode_field_onehot(&p, 80, (0, 0), 0);
        assert_eq!(z[0], 1.0);
        let z = encode_field_onehot(&p, 80, (44, 79), 15);
        assert_eq!(z[143], 1.0);
        assert_eq!(z.iter().sum::<f32>(), 1.0);
    }

    #[test]
    fn projection_matches_full_encoding() {
        let (bin, mut ms) = layout();
        ms.place(BoxDims::new(10, 20, 7), Placement { bin: 0, anchor: (0, 0), orientation: Orientation::AsIs }).unwrap();
        ms.open_next_bin().unwrap();
        let enc = StateEncoder::new(bin, 16);
        let base = enc.pool(&ms);
        let next = BoxDims::new(12, 30, 9);
        for c in crate::candidates::corner_candidates(&ms, next) {
            let (x, _) = enc.project(&ms, &base, &c);
            let full = enc.encode_state(&c.projected_state(&ms, next).unwrap());
            assert_eq!(x, full);
        }
    }
}

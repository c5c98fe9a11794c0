//! Synthetic box streams that tile a known number of bins exactly.
//!
//! Every bin starts as one full-size box. The largest splittable box is cut
//! with an axis-aligned guillotine cut at a random integer offset until the
//! target box count is reached, then the leaves are shuffled. Because the
//! pieces of each bin reassemble into that bin, the optimal bin count of the
//! stream is known by construction and the recorded split tree is a witness
//! packing.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PackError, Result};
use crate::grid::{BinDims, BoxDims, MultiBinState, Orientation, Placement};

/// Container used throughout the experiments: 45 × 80 footprint, 45 high.
pub const DEFAULT_BIN: BinDims = BinDims::new(45, 80, 45);

/// Smallest piece edge produced by a cut.
pub const MIN_PIECE_EDGE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub seed: u64,
    pub opt_bins: usize,
    pub bin_dims: BinDims,
    /// Inclusive `(min, max)` box count.
    pub count_range: (usize, usize),
    /// Number of upcoming boxes visible after the current one.
    pub lookahead: usize,
    #[serde(default)]
    pub cut_rule: CutRule,
    /// Height cuts land on multiples of this step.
    #[serde(default = "default_height_step")]
    pub height_step: usize,
}

fn default_height_step() -> usize {
    DEFAULT_HEIGHT_STEP
}

/// Height quantum used by the standard generators.
pub const DEFAULT_HEIGHT_STEP: usize = 15;

/// How the cut axis is chosen when a box is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutRule {
    /// Uniform over the axes long enough to cut.
    Uniform,
    /// Cut the height with probability `percent`/100 when a footprint axis
    /// could be cut instead; otherwise a uniform footprint axis. Heights are
    /// only cut unconditionally once the footprint is too small to split.
    HeightBiased { percent: u8 },
}

impl Default for CutRule {
    fn default() -> Self {
        CutRule::HeightBiased { percent: 20 }
    }
}

impl CutRule {
    fn pick<R: Rng>(self, axes: &[Axis], rng: &mut R) -> Axis {
        match self {
            CutRule::Uniform => axes[rng.gen_range(0..axes.len())],
            CutRule::HeightBiased { percent } => {
                let footprint: Vec<Axis> = axes.iter().copied().filter(|&a| a != Axis::H).collect();
                if footprint.is_empty() || (axes.contains(&Axis::H) && rng.gen_range(0..100u32) < u32::from(percent)) {
                    Axis::H
                } else {
                    footprint[rng.gen_range(0..footprint.len())]
                }
            }
        }
    }
}

impl EpisodeSpec {
    /// Ten default bins, 230 to 370 boxes.
    pub fn standard(seed: u64) -> Self {
        Self { seed, opt_bins: 10, bin_dims: DEFAULT_BIN, count_range: (230, 370), lookahead: 2, cut_rule: CutRule::default(), height_step: DEFAULT_HEIGHT_STEP }
    }

    /// Three default bins with the box count scaled down proportionally.
    pub fn transfer(seed: u64) -> Self {
        Self { seed, opt_bins: 3, bin_dims: DEFAULT_BIN, count_range: (69, 111), lookahead: 2, cut_rule: CutRule::default(), height_step: DEFAULT_HEIGHT_STEP }
    }

    fn validate(&self) -> Result<()> {
        self.bin_dims.validate()?;
        let (min, max) = self.count_range;
        if let CutRule::HeightBiased { percent } = self.cut_rule {
            if percent > 100 {
                return Err(PackError::InvalidArgument(format!("height cut percent {percent} exceeds 100")));
            }
        }
        if self.height_step == 0 {
            return Err(PackError::InvalidArgument("height step must be at least 1".into()));
        }
        if self.opt_bins == 0 {
            return Err(PackError::InvalidArgument("opt_bins must be at least 1".into()));
        }
        if min > max {
            return Err(PackError::InvalidArgument(format!("count range {min}..={max} is empty")));
        }
        if min < self.opt_bins || max > self.opt_bins * self.bin_dims.volume() {
            return Err(PackError::InvalidArgument(format!(
                "count range {min}..={max} unachievable for {} bins",
                self.opt_bins
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    I,
    J,
    H,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::I => 0,
            Axis::J => 1,
            Axis::H => 2,
        }
    }

    const ALL: [Axis; 3] = [Axis::I, Axis::J, Axis::H];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub axis: Axis,
    /// Size of the first child along `axis`.
    pub offset: usize,
    pub children: [usize; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitNode {
    pub bin: usize,
    /// `[i, j, z]` of the minimum corner inside its bin.
    pub origin: [usize; 3],
    pub dims: BoxDims,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<Cut>,
}

/// The cut history of a stream. `leaves[k]` is the node of the `k`-th box
/// in presentation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitTree {
    pub nodes: Vec<SplitNode>,
    pub leaves: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxStream {
    pub spec: EpisodeSpec,
    /// Boxes in presentation order.
    pub boxes: Vec<BoxDims>,
    pub split_tree: SplitTree,
}

impl BoxStream {
    pub fn total_volume(&self) -> usize {
        self.boxes.iter().map(BoxDims::volume).sum()
    }

    /// The boxes visible after position `k`.
    pub fn lookahead(&self, k: usize) -> &[BoxDims] {
        let start = (k + 1).min(self.boxes.len());
        let end = (start + self.spec.lookahead).min(self.boxes.len());
        &self.boxes[start..end]
    }
}

fn split_dims(dims: BoxDims, axis: Axis, offset: usize) -> (BoxDims, BoxDims, [usize; 3]) {
    let mut a: [usize; 3] = dims.into();
    let mut b = a;
    a[axis.index()] = offset;
    b[axis.index()] -= offset;
    let mut shift = [0; 3];
    shift[axis.index()] = offset;
    (a.into(), b.into(), shift)
}

/// Smallest and largest legal offset along `axis`, if any.
fn offset_range(d: usize, axis: Axis, step: usize) -> Option<(usize, usize)> {
    if axis != Axis::H {
        return (d >= 2 * MIN_PIECE_EDGE).then_some((MIN_PIECE_EDGE, d - MIN_PIECE_EDGE));
    }
    let lo = MIN_PIECE_EDGE.div_ceil(step) * step;
    let hi = d.checked_sub(MIN_PIECE_EDGE).map(|m| m / step * step)?;
    (lo <= hi).then_some((lo, hi))
}

fn cuttable_axes(dims: BoxDims, step: usize) -> Vec<Axis> {
    let d: [usize; 3] = dims.into();
    Axis::ALL.into_iter().filter(|&a| offset_range(d[a.index()], a, step).is_some()).collect()
}

fn split_bins(spec: &EpisodeSpec, target: usize, rng: &mut ChaCha8Rng) -> Result<Vec<SplitNode>> {
    let root = BoxDims::new(spec.bin_dims.length, spec.bin_dims.width, spec.bin_dims.height);
    let mut nodes: Vec<SplitNode> = (0..spec.opt_bins)
        .map(|bin| SplitNode { bin, origin: [0; 3], dims: root, cut: None })
        .collect();
    // max-heap on volume, lowest node index first among equals
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| !cuttable_axes(n.dims, spec.height_step).is_empty())
        .map(|(k, n)| (n.dims.volume(), Reverse(k)))
        .collect();
    let mut count = spec.opt_bins;

    while count < target {
        let Some((_, Reverse(k))) = heap.pop() else { break };
        let parent = nodes[k];
        let axis = spec.cut_rule.pick(&cuttable_axes(parent.dims, spec.height_step), rng);
        let extent = <[usize; 3]>::from(parent.dims)[axis.index()];
        let step = if axis == Axis::H { spec.height_step } else { 1 };
        let (lo, hi) = offset_range(extent, axis, spec.height_step).expect("axis was cuttable");
        let offset = step * rng.gen_range(lo / step..=hi / step);
        let (first, second, shift) = split_dims(parent.dims, axis, offset);
        let second_origin = [
            parent.origin[0] + shift[0],
            parent.origin[1] + shift[1],
            parent.origin[2] + shift[2],
        ];
        let ids = [nodes.len(), nodes.len() + 1];
        nodes.push(SplitNode { bin: parent.bin, origin: parent.origin, dims: first, cut: None });
        nodes.push(SplitNode { bin: parent.bin, origin: second_origin, dims: second, cut: None });
        nodes[k].cut = Some(Cut { axis, offset, children: ids });
        for id in ids {
            if !cuttable_axes(nodes[id].dims, spec.height_step).is_empty() {
                heap.push((nodes[id].dims.volume(), Reverse(id)));
            }
        }
        count += 1;
    }

    if count < spec.count_range.0 {
        return Err(PackError::InvalidArgument(format!(
            "only {count} boxes reachable with minimum edge {MIN_PIECE_EDGE}, need at least {}",
            spec.count_range.0
        )));
    }
    Ok(nodes)
}

/// Generates a stream whose boxes exactly fill `spec.opt_bins` bins.
pub fn generate_episode(spec: &EpisodeSpec) -> Result<BoxStream> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let target = rng.gen_range(spec.count_range.0..=spec.count_range.1);
    let nodes = split_bins(spec, target, &mut rng)?;
    let mut leaves: Vec<usize> = (0..nodes.len()).filter(|&k| nodes[k].cut.is_none()).collect();
    leaves.shuffle(&mut rng);
    let boxes = leaves.iter().map(|&k| nodes[k].dims).collect();
    Ok(BoxStream { spec: spec.clone(), boxes, split_tree: SplitTree { nodes, leaves } })
}

/// Same generator with the box count range doubled, giving smaller boxes.
pub fn small_box_episode(spec: &EpisodeSpec) -> Result<BoxStream> {
    let mut doubled = spec.clone();
    doubled.count_range = (spec.count_range.0 * 2, spec.count_range.1 * 2);
    generate_episode(&doubled)
}

/// One step of the witness packing recorded in a split tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessStep {
    /// Index into [`BoxStream::boxes`].
    pub box_index: usize,
    pub placement: Placement,
    pub z: usize,
}

/// Orders the leaves bottom-up per bin so that every box can be dropped at
/// its recorded position.
pub fn witness_plan(stream: &BoxStream) -> Vec<WitnessStep> {
    let tree = &stream.split_tree;
    let mut steps: Vec<WitnessStep> = tree
        .leaves
        .iter()
        .enumerate()
        .filter_map(|(box_index, &node)| {
            let n = tree.nodes.get(node)?;
            Some(WitnessStep {
                box_index,
                placement: Placement {
                    bin: n.bin,
                    anchor: (n.origin[0], n.origin[1]),
                    orientation: Orientation::AsIs,
                },
                z: n.origin[2],
            })
        })
        .collect();
    steps.sort_by_key(|s| (s.placement.bin, s.z, s.placement.anchor, s.box_index));
    steps
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_tree(stream: &BoxStream, out: &mut Vec<String>) {
    let spec = &stream.spec;
    let tree = &stream.split_tree;
    let root = BoxDims::new(spec.bin_dims.length, spec.bin_dims.width, spec.bin_dims.height);

    for bin in 0..spec.opt_bins {
        match tree.nodes.get(bin) {
            Some(n) if n.bin == bin && n.origin == [0; 3] && n.dims == root => {}
            _ => out.push(format!("root node {bin} is not a full bin")),
        }
    }
    let mut parents = vec![0usize; tree.nodes.len()];
    for (k, n) in tree.nodes.iter().enumerate() {
        let Some(cut) = n.cut else { continue };
        let extent = <[usize; 3]>::from(n.dims)[cut.axis.index()];
        if cut.offset == 0 || cut.offset >= extent {
            out.push(format!("node {k}: cut offset {} outside 1..{extent}", cut.offset));
            continue;
        }
        let (a, b, shift) = split_dims(n.dims, cut.axis, cut.offset);
        let expect = [
            (a, n.origin),
            (b, [n.origin[0] + shift[0], n.origin[1] + shift[1], n.origin[2] + shift[2]]),
        ];
        for (c, (dims, origin)) in cut.children.iter().zip(expect) {
            match tree.nodes.get(*c) {
                Some(child) if child.dims == dims && child.origin == origin && child.bin == n.bin => {
                    parents[*c] += 1;
                }
                _ => out.push(format!("node {k}: child {c} does not match its cut")),
            }
        }
    }
    for (k, &p) in parents.iter().enumerate() {
        let expected = usize::from(k >= spec.opt_bins);
        if p != expected {
            out.push(format!("node {k} has {p} parents, expected {expected}"));
        }
    }

    if tree.leaves.len() != stream.boxes.len() {
        out.push(format!("{} leaves recorded for {} boxes", tree.leaves.len(), stream.boxes.len()));
    }
    let mut seen = vec![false; tree.nodes.len()];
    for (k, (&leaf, dims)) in tree.leaves.iter().zip(&stream.boxes).enumerate() {
        match tree.nodes.get(leaf) {
            Some(n) if n.cut.is_none() && !seen[leaf] => {
                seen[leaf] = true;
                if n.dims != *dims {
                    out.push(format!("box {k}: dims {dims:?} differ from leaf {leaf} {:?}", n.dims));
                }
            }
            _ => out.push(format!("box {k}: leaf {leaf} is missing, internal or reused")),
        }
    }
    let unused = tree.nodes.iter().enumerate().filter(|(k, n)| n.cut.is_none() && !seen[*k]).count();
    if unused > 0 {
        out.push(format!("{unused} leaves not presented in the stream"));
    }
}

fn check_witness(stream: &BoxStream, out: &mut Vec<String>) {
    let spec = &stream.spec;
    let Ok(mut ms) = MultiBinState::new(spec.bin_dims, spec.opt_bins) else { return };
    for _ in 0..spec.opt_bins {
        let _ = ms.open_next_bin();
    }
    for step in witness_plan(stream) {
        let dims = stream.boxes[step.box_index];
        match ms.place(dims, step.placement) {
            Ok(z) if z == step.z => {}
            Ok(z) => {
                out.push(format!("witness: box {} rests at {z}, recorded {}", step.box_index, step.z));
                return;
            }
            Err(e) => {
                out.push(format!("witness: box {}: {e}", step.box_index));
                return;
            }
        }
    }
    for (k, bin) in ms.bins().iter().enumerate() {
        if bin.volume() != spec.bin_dims.volume() {
            out.push(format!("witness: bin {k} filled to {:.4}", bin.fill_fraction()));
        }
    }
}

/// Checks the stream invariants and replays the split tree as a packing.
pub fn validate_stream(stream: &BoxStream) -> ValidationReport {
    let spec = &stream.spec;
    let mut violations = Vec::new();

    let (min, max) = spec.count_range;
    let n = stream.boxes.len();
    if n < min || n > max {
        violations.push(format!("box count {n} outside {min}..={max}"));
    }
    let bin = spec.bin_dims;
    for (k, d) in stream.boxes.iter().enumerate() {
        if d.l == 0 || d.b == 0 || d.h == 0 || d.l > bin.length || d.b > bin.width || d.h > bin.height {
            violations.push(format!("box {k} {d:?} oversize or degenerate for bin {bin:?}"));
        }
    }
    let expected = spec.opt_bins * bin.volume();
    let total = stream.total_volume();
    if total != expected {
        violations.push(format!("volume mismatch: boxes {total}, bins {expected}"));
    }

    let before = violations.len();
    check_tree(stream, &mut violations);
    if violations.len() == before {
        check_witness(stream, &mut violations);
    }
    ValidationReport { violations }
}

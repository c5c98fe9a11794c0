//! Lists the corner candidates offered to the learned policy for a box in a
//! partly filled container.
//!
//! ```text
//! cargo run -p packman --example corner_candidates
//! ```

use packman::candidates::{anchor_axes, candidates_or_new_bin, corner_candidates};
use packman::{BinDims, BoxDims, MultiBinState, Orientation, Placement};

pub fn run_example() -> packman::Result<()> {
    let mut ms = MultiBinState::new(BinDims::new(10, 10, 10), 2)?;
    ms.open_next_bin()?;
    let at = |anchor| Placement { bin: 0, anchor, orientation: Orientation::AsIs };
    ms.place(BoxDims::new(4, 6, 3), at((0, 0)))?;
    ms.place(BoxDims::new(3, 3, 5), at((6, 0)))?;

    let next = BoxDims::new(2, 3, 2);
    let (is, js) = anchor_axes(ms.bin(0), next);
    println!("anchor rows {is:?}, columns {js:?}");
    let cands = corner_candidates(&ms, next);
    println!("{} candidates:", cands.len());
    for c in &cands {
        println!("  {:?} {:?} footprint {}x{} rests at {}", c.placement.anchor, c.placement.orientation, c.dims.l, c.dims.b, c.z);
    }

    let (fresh, opened) = candidates_or_new_bin(&ms, BoxDims::new(10, 10, 8))?;
    println!("a 10x10x8 box: opens a new bin = {opened}, {} candidate(s) there", fresh.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> packman::Result<()> {
    run_example()
}

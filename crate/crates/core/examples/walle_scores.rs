//! Scores every feasible anchor of a box with the WallE stability score and
//! prints the best few, next to the border statistics behind them.
//!
//! ```text
//! cargo run -p packman --example walle_scores
//! ```

use packman::heuristics::{border_stats, walle_decide, walle_score, WallEParams};
use packman::{BinDims, BoxDims, ContainerState, MultiBinState, Orientation, Placement};

pub fn run_example() -> packman::Result<()> {
    let params = WallEParams::default();
    let empty = ContainerState::new(BinDims::new(10, 10, 10))?;
    let cube = BoxDims::new(2, 2, 2);
    println!("empty 10x10: corner {:.2}, centre {:.2}", walle_score(&empty, cube, (0, 0), &params)?, walle_score(&empty, cube, (4, 4), &params)?);

    let mut ms = MultiBinState::new(BinDims::new(10, 10, 10), 2)?;
    ms.open_next_bin()?;
    let at = |anchor| Placement { bin: 0, anchor, orientation: Orientation::AsIs };
    ms.place(BoxDims::new(10, 3, 4), at((0, 0)))?;
    ms.place(BoxDims::new(3, 4, 4), at((0, 3)))?;
    ms.place(BoxDims::new(3, 3, 4), at((0, 7)))?;

    let next = BoxDims::new(3, 4, 3);
    let bin = ms.bin(0);
    let mut scored = Vec::new();
    for &o in next.orientations() {
        let d = next.oriented(o);
        for (anchor, rest) in bin.feasibility_map(d).feasible() {
            let s = walle_score(bin, d, anchor, &params)?;
            scored.push((s, anchor, o, border_stats(bin, d, anchor, rest + d.h)));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (s, anchor, o, st) in scored.iter().take(5) {
        println!("{s:>8.2} at {anchor:?} {o:?}: variation {}, higher {}, flush {}", st.variation, st.higher, st.flush);
    }
    let d = walle_decide(&ms, next, &params)?;
    println!("walle picks {:?}", d.placement);
    Ok(())
}

#[allow(dead_code)]
fn main() -> packman::Result<()> {
    run_example()
}

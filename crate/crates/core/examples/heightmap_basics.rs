//! Drops a few boxes into a small container and shows which anchors stay
//! feasible under the flat-base rule.
//!
//! ```text
//! cargo run -p packman --example heightmap_basics
//! ```

use packman::{BinDims, BoxDims, ContainerState, Orientation};

fn print_heights(s: &ContainerState) {
    let d = s.dims();
    for i in 0..d.length {
        let row: Vec<String> = (0..d.width).map(|j| format!("{:>2}", s.height(i, j))).collect();
        println!("  {}", row.join(" "));
    }
}

pub fn run_example() -> packman::Result<()> {
    let mut bin = ContainerState::new(BinDims::new(5, 3, 6))?;
    let tower = BoxDims::new(2, 2, 5);
    bin.place(tower, (0, 0))?;
    println!("after a 2x2x5 box at (0, 0):");
    print_heights(&bin);

    let slab = BoxDims::new(3, 2, 1);
    for anchor in [(0, 0), (1, 0), (2, 0), (0, 1)] {
        match bin.resting_height(slab, anchor) {
            Some(z) => println!("3x2x1 at {anchor:?}: rests at z = {z}"),
            None => println!("3x2x1 at {anchor:?}: infeasible"),
        }
    }

    let turned = slab.oriented(Orientation::Rot90);
    let map = bin.feasibility_map(turned);
    let spots: Vec<_> = map.feasible().collect();
    println!("rotated to {}x{}: {} feasible anchors, first {:?}", turned.l, turned.b, spots.len(), spots.first());

    bin.place(slab, (2, 0))?;
    println!("after a 3x2x1 box at (2, 0), fill {:.3}:", bin.fill_fraction());
    print_heights(&bin);
    Ok(())
}

#[allow(dead_code)]
fn main() -> packman::Result<()> {
    run_example()
}

//! Encodes a row of containers into the network input and shows that the
//! same input shapes come out for a different number of bins.
//!
//! ```text
//! cargo run -p packman --example encode_state
//! ```

use packman::candidates::corner_candidates;
use packman::datagen::DEFAULT_BIN;
use packman::encoder::{StateEncoder, TILES};
use packman::{BoxDims, MultiBinState, Orientation, Placement};

pub fn run_example() -> packman::Result<()> {
    for capacity in [16, 6] {
        let mut ms = MultiBinState::new(DEFAULT_BIN, capacity)?;
        ms.open_next_bin()?;
        ms.place(BoxDims::new(20, 30, 15), Placement { bin: 0, anchor: (0, 0), orientation: Orientation::AsIs })?;
        let enc = StateEncoder::new(DEFAULT_BIN, capacity);
        let base = enc.pool(&ms);
        let next = BoxDims::new(10, 12, 9);
        let cands = corner_candidates(&ms, next);
        let c = &cands[0];
        let input = enc.encode_candidate(&ms, &base, c);
        let (_, touched) = enc.project(&ms, &base, c);
        let (rows, cols) = enc.partition().grid_shape();
        println!(
            "{capacity:>2} bins: grid {rows}x{cols}, x {}, y {}, z {} (field {}), {} candidates, first touches {} tiles",
            input.x.len(),
            input.y.len(),
            input.z().len(),
            input.field,
            cands.len(),
            touched.len()
        );
        let busy: Vec<_> = (0..TILES).filter(|&t| base.x[TILES + t] > 0.0).collect();
        println!("   tiles with height before placing: {busy:?}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> packman::Result<()> {
    run_example()
}

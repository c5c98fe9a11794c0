//! Generates exactly tileable streams, validates them, replays the recorded
//! witness packing and writes the dataset directory used by the CLI.
//!
//! ```text
//! cargo run --release -p packman --example generate_dataset -- data/train 50
//! ```

use std::path::Path;

use packman::bench::{run_episode, witness_stream, WitnessPolicy};
use packman::datagen::{generate_episode, validate_stream, EpisodeSpec};
use packman::io::{read_dataset_dir, write_dataset_dir};

pub fn run_example(out: &Path, episodes: u64) -> packman::Result<()> {
    let streams = (0..episodes).map(|seed| generate_episode(&EpisodeSpec::standard(seed))).collect::<packman::Result<Vec<_>>>()?;
    for s in &streams {
        let report = validate_stream(s);
        assert!(report.passed(), "{:?}", report.violations);
        let heights: Vec<usize> = s.boxes.iter().map(|b| b.h).collect();
        let full = heights.iter().filter(|&&h| h == s.spec.bin_dims.height).count();
        let witness = run_episode(&mut WitnessPolicy::new(s), &witness_stream(s), s.spec.opt_bins, 0)?;
        println!(
            "seed {:>3}: {:>3} boxes, {:>3} full-height, witness packs {} bins at fill {:.3}",
            s.spec.seed,
            s.boxes.len(),
            full,
            witness.bins_used,
            witness.fill_first_opt
        );
    }
    let paths = write_dataset_dir(out, &streams)?;
    let back = read_dataset_dir(out)?;
    assert_eq!(back, streams);
    println!("wrote {} files to {}", paths.len(), out.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> packman::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "data/generated".into());
    let episodes = args.next().and_then(|a| a.parse().ok()).unwrap_or(5);
    run_example(Path::new(&out), episodes)
}

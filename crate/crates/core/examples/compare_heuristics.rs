//! Runs the four heuristics on freshly generated 10-bin streams and prints
//! the competitive ratio, fill and timing per algorithm.
//!
//! ```text
//! cargo run --release -p packman --example compare_heuristics -- 20
//! ```

use packman::bench::{aggregate, run_benchmark, Algorithm};
use packman::datagen::{generate_episode, EpisodeSpec};
use packman::heuristics::WallEParams;

pub fn run_example(episodes: usize) -> packman::Result<()> {
    let streams = (0..episodes as u64)
        .map(|seed| generate_episode(&EpisodeSpec::standard(1000 + seed)))
        .collect::<packman::Result<Vec<_>>>()?;
    let results = run_benchmark(&Algorithm::HEURISTICS, &streams, 16, WallEParams::default(), None)?;
    let report = aggregate(&results, 10, serde_json::Value::Null)?;
    println!("{:<10} {:>6} {:>9} {:>10} {:>12}", "algorithm", "c", "fill", "best", "ms/box");
    for (name, s) in &report.per_algorithm {
        println!(
            "{name:<10} {:>6.3} {:>9.4} {:>10.3} {:>12.4}",
            s.c,
            s.mean_fill,
            s.best_share,
            s.mean_time_s * 1e3
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> packman::Result<()> {
    let episodes = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    run_example(episodes)
}

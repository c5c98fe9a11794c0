//! Trains briefly on the 16-bin layout and evaluates the same network on
//! three-bin streams packed into six bins, without retraining.
//!
//! ```text
//! cargo run --release -p packman --example transfer_eval -- 30 10
//! ```

use packman::bench::{aggregate, run_benchmark, Algorithm};
use packman::datagen::{generate_episode, EpisodeSpec};
use packman::deeprl::{model_from_json, model_to_json, run_training, PartitionShape, TrainerConfig};
use packman::heuristics::WallEParams;

pub fn run_example(episodes: usize, instances: u64) -> packman::Result<()> {
    let train = (0..10).map(|s| generate_episode(&EpisodeSpec::standard(s))).collect::<packman::Result<Vec<_>>>()?;
    let cfg = TrainerConfig { episodes, epsilon_decay_episodes: (episodes / 2).max(1), ..TrainerConfig::default() };
    let outcome = run_training(&train, &cfg)?;
    let model = model_from_json(&model_to_json(&outcome.net, PartitionShape::default(), &cfg)?)?;

    let small = (0..instances)
        .map(|s| generate_episode(&EpisodeSpec::transfer(500 + s)))
        .collect::<packman::Result<Vec<_>>>()?;
    let algos = [Algorithm::PackMan, Algorithm::WallE];
    let results = run_benchmark(&algos, &small, 6, WallEParams::default(), Some(&model))?;
    let report = aggregate(&results, 3, serde_json::Value::Null)?;
    for (name, s) in &report.per_algorithm {
        println!("{name:<8} c {:.3}  fill {:.4}  failures {}", s.c, s.mean_fill, s.failures);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> packman::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().ok());
    let episodes = args.next().flatten().unwrap_or(30) as usize;
    let instances = args.next().flatten().unwrap_or(10);
    run_example(episodes, instances)
}

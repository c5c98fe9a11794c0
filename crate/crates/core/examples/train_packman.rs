//! Trains the value network on a small set of generated streams and prints
//! the learning curve in blocks of episodes.
//!
//! ```text
//! cargo run --release -p packman --example train_packman -- 200 10
//! ```

use std::time::Instant;

use packman::datagen::{generate_episode, EpisodeSpec};
use packman::deeprl::{run_training_with, TrainerConfig};

pub fn run_example(episodes: usize, streams: usize) -> packman::Result<()> {
    let data = (0..streams as u64)
        .map(|seed| generate_episode(&EpisodeSpec::standard(seed)))
        .collect::<packman::Result<Vec<_>>>()?;
    let cfg = TrainerConfig {
        episodes,
        epsilon_decay_episodes: (episodes / 2).max(1),
        ..TrainerConfig::default()
    };
    let block = (episodes / 10).max(1);
    let (mut fill, mut bins, mut n) = (0.0, 0.0, 0);
    let start = Instant::now();
    let outcome = run_training_with(&data, &cfg, |p| {
        fill += p.fill_first_opt;
        bins += p.bins_used as f64;
        n += 1;
        if n == block || p.episode + 1 == episodes {
            println!(
                "episodes ..{:>5}  eps {:.2}  fill {:.4}  bins {:>5.2}  loss {:.2e}  {:.2}s/episode",
                p.episode + 1,
                p.epsilon,
                fill / n as f64,
                bins / n as f64,
                p.loss,
                start.elapsed().as_secs_f64() / (p.episode + 1) as f64
            );
            (fill, bins, n) = (0.0, 0.0, 0);
        }
    })?;
    println!("{} training steps, {} target syncs", outcome.train_steps, outcome.target_syncs);
    Ok(())
}

#[allow(dead_code)]
fn main() -> packman::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse().ok());
    let episodes = args.next().flatten().unwrap_or(100);
    let streams = args.next().flatten().unwrap_or(10);
    run_example(episodes, streams)
}

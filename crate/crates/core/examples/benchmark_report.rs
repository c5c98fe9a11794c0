//! Runs a benchmark, writes the JSON report and both CSV tables, and reads
//! the report back.
//!
//! ```text
//! cargo run --release -p packman --example benchmark_report -- reports 10
//! ```

use std::fs;
use std::path::Path;

use packman::bench::{aggregate, run_benchmark, Algorithm, Report};
use packman::datagen::{generate_episode, EpisodeSpec};
use packman::heuristics::WallEParams;

pub fn run_example(out: &Path, instances: u64) -> packman::Result<()> {
    let streams = (0..instances)
        .map(|s| generate_episode(&EpisodeSpec::transfer(900 + s)))
        .collect::<packman::Result<Vec<_>>>()?;
    let results = run_benchmark(&Algorithm::HEURISTICS, &streams, 6, WallEParams::default(), None)?;
    let echo = serde_json::json!({ "instances": instances, "max_bins": 6 });
    let report = aggregate(&results, 3, echo)?;

    fs::create_dir_all(out)?;
    fs::write(out.join("report.json"), report.to_json()?)?;
    fs::write(out.join("summary.csv"), report.summary_csv())?;
    fs::write(out.join("per_instance.csv"), report.per_instance_csv())?;

    let back = Report::from_json(&fs::read_to_string(out.join("report.json"))?)?;
    assert_eq!(back.without_timing(), report.without_timing());
    print!("{}", report.summary_csv());
    Ok(())
}

#[allow(dead_code)]
fn main() -> packman::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "reports".into());
    let instances = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    run_example(Path::new(&out), instances)
}

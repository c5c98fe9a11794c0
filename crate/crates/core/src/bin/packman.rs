use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use packman::bench::{aggregate, run_benchmark, Algorithm, Report};
use packman::datagen::{generate_episode, CutRule, EpisodeSpec};
use packman::deeprl::{load_model, run_training_with, save_model, CurvePoint, PartitionShape, TrainerConfig};
use packman::heuristics::WallEParams;
use packman::io::{read_dataset_dir, write_dataset_dir};
use packman::{BinDims, PackError, Result};

#[derive(Parser)]
#[command(name = "packman", version, about = "Online 3D bin packing: data, heuristics, learned policy, benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate exactly tileable box streams.
    Gen(GenArgs),
    /// Run algorithms over a dataset directory and write a report.
    Run(RunArgs),
    /// Train the value network.
    Train(TrainArgs),
    /// Evaluate a trained model on a dataset without retraining.
    Eval(EvalArgs),
    /// Convert a report to CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 10)]
    opt: usize,
    /// Bin size as LxBxH.
    #[arg(long, default_value = "45x80x45", value_parser = parse_bin)]
    bins: BinDims,
    #[arg(long, default_value_t = 230)]
    count_min: usize,
    #[arg(long, default_value_t = 370)]
    count_max: usize,
    #[arg(long, default_value_t = 100)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Chance in percent of cutting the height while the footprint can still be cut.
    #[arg(long, default_value_t = 20)]
    height_cut_percent: u8,
    /// Height cuts land on multiples of this many units.
    #[arg(long, default_value_t = 15)]
    height_step: usize,
    /// Pick the cut axis uniformly instead.
    #[arg(long)]
    uniform_axis: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WallEArgs {
    /// WallE weights a1,a2,a3,a4,a5.
    #[arg(long, value_delimiter = ',', num_args = 5)]
    alpha: Option<Vec<f64>>,
}

impl WallEArgs {
    fn params(&self) -> Result<WallEParams> {
        match &self.alpha {
            None => Ok(WallEParams::default()),
            Some(a) => WallEParams::new([a[0], a[1], a[2], a[3], a[4]]),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated: firstfit, floor, column, walle, packman.
    #[arg(long, value_delimiter = ',', required = true)]
    algo: Vec<Algorithm>,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    max_bins: usize,
    #[command(flatten)]
    walle: WallEArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 2000)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    max_bins: usize,
    /// Episodes over which exploration decays to zero.
    #[arg(long, default_value_t = 1000)]
    epsilon_decay: usize,
    #[arg(long, default_value_t = 0.001)]
    learning_rate: f64,
    /// Replay minibatches trained after each episode.
    #[arg(long, default_value_t = 1)]
    batches_per_episode: usize,
    /// Regress on r + γQ' instead of (1 − γ)r + γQ'.
    #[arg(long)]
    standard_target: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Bin capacity; defaults to twice the optimal bin count of the data.
    #[arg(long)]
    max_bins: Option<usize>,
    /// Also run these algorithms on the same data for comparison.
    #[arg(long, value_delimiter = ',')]
    compare: Vec<Algorithm>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    per_instance: Option<PathBuf>,
}

fn parse_bin(s: &str) -> std::result::Result<BinDims, String> {
    let parts: Vec<usize> = s
        .split(['x', 'X'])
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [l, b, h] => Ok(BinDims::new(l, b, h)),
        _ => Err(format!("expected LxBxH, got {s:?}")),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn common_opt(streams: &[packman::datagen::BoxStream]) -> Result<usize> {
    let opt = streams.first().map(|s| s.spec.opt_bins).ok_or_else(|| PackError::InvalidArgument("dataset is empty".into()))?;
    if streams.iter().any(|s| s.spec.opt_bins != opt) {
        return Err(PackError::InvalidArgument("dataset mixes optimal bin counts".into()));
    }
    Ok(opt)
}

fn gen(a: GenArgs) -> Result<()> {
    let cut_rule = if a.uniform_axis { CutRule::Uniform } else { CutRule::HeightBiased { percent: a.height_cut_percent } };
    let streams = (0..a.episodes as u64)
        .map(|k| {
            generate_episode(&EpisodeSpec {
                seed: a.seed.wrapping_add(k),
                opt_bins: a.opt,
                bin_dims: a.bins,
                count_range: (a.count_min, a.count_max),
                lookahead: 2,
                cut_rule,
                height_step: a.height_step,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let paths = write_dataset_dir(&a.out, &streams)?;
    eprintln!("wrote {} episodes to {}", paths.len(), a.out.display());
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let streams = read_dataset_dir(&a.data)?;
    let opt = common_opt(&streams)?;
    let model = a.model.as_deref().map(load_model).transpose()?;
    let params = a.walle.params()?;
    let results = run_benchmark(&a.algo, &streams, a.max_bins, params, model.as_ref())?;
    let echo = json!({
        "command": "run",
        "algorithms": a.algo.iter().map(|x| x.id()).collect::<Vec<_>>(),
        "data": a.data,
        "model": a.model,
        "max_bins": a.max_bins,
        "walle_alpha": params.alpha,
        "episodes": streams.len(),
    });
    let report = aggregate(&results, opt, echo)?;
    write(&a.out, &report.to_json()?)
}

fn train(a: TrainArgs) -> Result<()> {
    let streams = read_dataset_dir(&a.data)?;
    let cfg = TrainerConfig {
        episodes: a.episodes,
        seed: a.seed,
        max_bins: a.max_bins,
        epsilon_decay_episodes: a.epsilon_decay,
        standard_target: a.standard_target,
        learning_rate: a.learning_rate,
        batches_per_episode: a.batches_per_episode,
        ..TrainerConfig::default()
    };
    let mut curve = String::from("episode,epsilon,bins_used,fill_first_opt,packing_fraction,zeta,loss,steps,failed\n");
    let outcome = run_training_with(&streams, &cfg, |p: &CurvePoint| {
        curve.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.episode, p.epsilon, p.bins_used, p.fill_first_opt, p.packing_fraction, p.zeta, p.loss, p.steps, p.failed
        ));
        if (p.episode + 1).is_multiple_of(100) {
            eprintln!("episode {:>5}  eps {:.3}  fill {:.4}  bins {}", p.episode + 1, p.epsilon, p.fill_first_opt, p.bins_used);
        }
    })?;
    save_model(&a.out, &outcome.net, PartitionShape::default(), &cfg)?;
    if let Some(path) = &a.curve {
        write(path, &curve)?;
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let streams = read_dataset_dir(&a.data)?;
    let opt = common_opt(&streams)?;
    let max_bins = a.max_bins.unwrap_or(2 * opt);
    let model = load_model(&a.model)?;
    let mut algos = vec![Algorithm::PackMan];
    algos.extend(a.compare.iter().copied().filter(|&x| x != Algorithm::PackMan));
    let results = run_benchmark(&algos, &streams, max_bins, WallEParams::default(), Some(&model))?;
    let echo = json!({
        "command": "eval",
        "model": a.model,
        "data": a.data,
        "max_bins": max_bins,
        "episodes": streams.len(),
        "trained_max_bins": model.config.max_bins,
    });
    let report = aggregate(&results, opt, echo)?;
    write(&a.out, &report.to_json()?)
}

fn report(a: ReportArgs) -> Result<()> {
    let report = Report::from_json(&fs::read_to_string(&a.input)?)?;
    write(&a.csv, &report.summary_csv())?;
    if let Some(path) = &a.per_instance {
        write(path, &report.per_instance_csv())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Report(a) => report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                PackError::CapacityExhausted { .. } | PackError::TrainingDiverged { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

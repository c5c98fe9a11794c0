//! Episode runner, metrics and report emission.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{witness_plan, BoxStream, WitnessStep};
use crate::deeprl::{LoadedModel, PackMan};
use crate::error::{PackError, Result};
use crate::grid::{BoxDims, MultiBinState};
use crate::heuristics::{Baseline, WallE, WallEParams};
use crate::policy::{apply, Decision, Policy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    FirstFit,
    Floor,
    Column,
    WallE,
    PackMan,
}

impl Algorithm {
    pub const HEURISTICS: [Algorithm; 4] = [Algorithm::FirstFit, Algorithm::Floor, Algorithm::Column, Algorithm::WallE];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::FirstFit => "firstfit",
            Algorithm::Floor => "floor",
            Algorithm::Column => "column",
            Algorithm::WallE => "walle",
            Algorithm::PackMan => "packman",
        }
    }

    /// Builds the policy; the learned policy needs a model.
    pub fn policy(self, params: WallEParams, model: Option<&LoadedModel>) -> Result<Box<dyn Policy + Send>> {
        Ok(match self {
            Algorithm::FirstFit => Box::new(Baseline::FirstFit),
            Algorithm::Floor => Box::new(Baseline::Floor),
            Algorithm::Column => Box::new(Baseline::Column),
            Algorithm::WallE => Box::new(WallE { params }),
            Algorithm::PackMan => {
                let model = model.ok_or_else(|| PackError::InvalidArgument("packman needs a model file".into()))?;
                Box::new(PackMan::from_model(model.clone()))
            }
        })
    }
}

impl FromStr for Algorithm {
    type Err = PackError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "firstfit" => Ok(Algorithm::FirstFit),
            "floor" => Ok(Algorithm::Floor),
            "column" => Ok(Algorithm::Column),
            "walle" => Ok(Algorithm::WallE),
            "packman" => Ok(Algorithm::PackMan),
            other => Err(PackError::InvalidArgument(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub algorithm: String,
    pub instance: usize,
    pub seed: u64,
    /// Bins used, or `T + 1` when the stream did not fit in `T` bins.
    pub bins_used: usize,
    pub failed: bool,
    pub fill_first_opt: f64,
    pub decisions: usize,
    pub packed_volume: usize,
    pub time_mean_s: f64,
    pub time_p95_s: f64,
}

fn p95(times: &mut [f64]) -> f64 {
    if times.is_empty() {
        return 0.0;
    }
    times.sort_by(f64::total_cmp);
    let k = ((times.len() as f64 * 0.95).ceil() as usize).clamp(1, times.len()) - 1;
    times[k]
}

/// Feeds the stream to `policy` strictly in order, timing each decision.
pub fn run_episode(policy: &mut dyn Policy, stream: &BoxStream, max_bins: usize, instance: usize) -> Result<EpisodeResult> {
    let mut ms = MultiBinState::new(stream.spec.bin_dims, max_bins)?;
    let mut times = Vec::with_capacity(stream.boxes.len());
    let mut failed = false;
    for (k, &next) in stream.boxes.iter().enumerate() {
        let start = Instant::now();
        let decision = policy.decide(&ms, next, stream.lookahead(k));
        times.push(start.elapsed().as_secs_f64());
        match decision {
            Ok(d) => {
                apply(&mut ms, next, d)?;
            }
            Err(PackError::CapacityExhausted { .. }) => {
                failed = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let decisions = times.len();
    let time_mean_s = if decisions == 0 { 0.0 } else { times.iter().sum::<f64>() / decisions as f64 };
    Ok(EpisodeResult {
        algorithm: policy.name().to_string(),
        instance,
        seed: stream.spec.seed,
        bins_used: if failed { max_bins + 1 } else { ms.open_count() },
        failed,
        fill_first_opt: ms.fill_first(stream.spec.opt_bins),
        decisions,
        packed_volume: ms.total_volume(),
        time_mean_s,
        time_p95_s: p95(&mut times),
    })
}

/// Scripted policy that replays a split-tree witness. Feed it the stream
/// reordered by [`witness_stream`].
#[derive(Debug, Clone)]
pub struct WitnessPolicy {
    plan: Vec<WitnessStep>,
    cursor: usize,
}

impl WitnessPolicy {
    pub fn new(stream: &BoxStream) -> Self {
        Self { plan: witness_plan(stream), cursor: 0 }
    }
}

impl Policy for WitnessPolicy {
    fn name(&self) -> &str {
        "witness"
    }

    fn decide(&mut self, ms: &MultiBinState, _next: BoxDims, _lookahead: &[BoxDims]) -> Result<Decision> {
        let step = self
            .plan
            .get(self.cursor)
            .ok_or_else(|| PackError::PreconditionViolation("witness plan exhausted".into()))?;
        self.cursor += 1;
        let bin = step.placement.bin;
        if bin > ms.open_count() {
            return Err(PackError::PreconditionViolation(format!("witness skips to bin {bin}")));
        }
        Ok(Decision { placement: step.placement, opened_new_bin: bin == ms.open_count() })
    }
}

/// The stream's boxes in the witness replay order.
pub fn witness_stream(stream: &BoxStream) -> BoxStream {
    let mut out = stream.clone();
    out.boxes = witness_plan(stream).iter().map(|s| stream.boxes[s.box_index]).collect();
    out
}

/// Mean bins used over the optimum.
pub fn competitive_ratio(results: &[EpisodeResult], opt: usize) -> Result<f64> {
    if results.is_empty() {
        return Err(PackError::InvalidArgument("no episode results".into()));
    }
    if opt == 0 {
        return Err(PackError::InvalidArgument("optimal bin count must be positive".into()));
    }
    let mean = results.iter().map(|r| r.bins_used as f64).sum::<f64>() / results.len() as f64;
    Ok(mean / opt as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub c: f64,
    pub mean_fill: f64,
    pub best_share: f64,
    pub mean_time_s: f64,
    pub episodes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub algorithm: String,
    pub instance: usize,
    pub seed: u64,
    pub bins_used: usize,
    pub fill_first_opt: f64,
    pub time_per_box_s: f64,
}

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub config_echo: serde_json::Value,
    pub per_algorithm: BTreeMap<String, AlgorithmSummary>,
    pub per_instance: Vec<InstanceRow>,
}

impl Report {
    /// Copy with every timing field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        r.per_algorithm.values_mut().for_each(|s| s.mean_time_s = 0.0);
        r.per_instance.iter_mut().for_each(|row| row.time_per_box_s = 0.0);
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Report> {
        let r: Report = serde_json::from_str(text)?;
        if r.format_version != REPORT_FORMAT_VERSION {
            return Err(PackError::InvalidArgument(format!("unsupported report version {}", r.format_version)));
        }
        Ok(r)
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("algorithm,c,mean_fill,best_share,mean_time_s\n");
        for (name, s) in &self.per_algorithm {
            let _ = writeln!(out, "{name},{},{},{},{}", s.c, s.mean_fill, s.best_share, s.mean_time_s);
        }
        out
    }

    pub fn per_instance_csv(&self) -> String {
        let mut out = String::from("algorithm,instance,seed,bins_used,fill_first_opt,time_per_box_s\n");
        for r in &self.per_instance {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.algorithm, r.instance, r.seed, r.bins_used, r.fill_first_opt, r.time_per_box_s
            );
        }
        out
    }
}

/// Summaries per algorithm. Every algorithm must cover the same instances.
pub fn aggregate(results: &[EpisodeResult], opt: usize, config_echo: serde_json::Value) -> Result<Report> {
    let mut by_algo: BTreeMap<&str, Vec<&EpisodeResult>> = BTreeMap::new();
    for r in results {
        by_algo.entry(&r.algorithm).or_default().push(r);
    }
    let instance_sets: Vec<BTreeSet<usize>> =
        by_algo.values().map(|rs| rs.iter().map(|r| r.instance).collect()).collect();
    if instance_sets.windows(2).any(|w| w[0] != w[1])
        || by_algo.values().zip(&instance_sets).any(|(rs, set)| rs.len() != set.len())
    {
        return Err(PackError::InvalidArgument("algorithms cover different instances".into()));
    }

    let mut shares: BTreeMap<&str, f64> = by_algo.keys().map(|&k| (k, 0.0)).collect();
    let mut per_instance: BTreeMap<usize, Vec<&EpisodeResult>> = BTreeMap::new();
    for r in results {
        per_instance.entry(r.instance).or_default().push(r);
    }
    let instances = per_instance.len();
    for rows in per_instance.values() {
        let best = rows.iter().map(|r| r.fill_first_opt).fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<_> = rows.iter().filter(|r| r.fill_first_opt == best).collect();
        for w in &winners {
            *shares.get_mut(w.algorithm.as_str()).expect("known algorithm") += 1.0 / winners.len() as f64;
        }
    }

    let mut per_algorithm = BTreeMap::new();
    for (name, rs) in &by_algo {
        let owned: Vec<EpisodeResult> = rs.iter().map(|r| (*r).clone()).collect();
        let decisions: usize = rs.iter().map(|r| r.decisions).sum();
        let total_time: f64 = rs.iter().map(|r| r.time_mean_s * r.decisions as f64).sum();
        per_algorithm.insert(
            name.to_string(),
            AlgorithmSummary {
                c: competitive_ratio(&owned, opt)?,
                mean_fill: rs.iter().map(|r| r.fill_first_opt).sum::<f64>() / rs.len() as f64,
                best_share: shares[name] / instances as f64,
                mean_time_s: if decisions == 0 { 0.0 } else { total_time / decisions as f64 },
                episodes: rs.len(),
                failures: rs.iter().filter(|r| r.failed).count(),
            },
        );
    }

    let mut rows: Vec<InstanceRow> = results
        .iter()
        .map(|r| InstanceRow {
            algorithm: r.algorithm.clone(),
            instance: r.instance,
            seed: r.seed,
            bins_used: r.bins_used,
            fill_first_opt: r.fill_first_opt,
            time_per_box_s: r.time_mean_s,
        })
        .collect();
    rows.sort_by(|a, b| (&a.algorithm, a.instance).cmp(&(&b.algorithm, b.instance)));

    Ok(Report { format_version: REPORT_FORMAT_VERSION, config_echo, per_algorithm, per_instance: rows })
}

/// Runs every algorithm on every stream. Episodes run on the rayon pool and
/// results come back in `(algorithm, instance)` order.
pub fn run_benchmark(
    algorithms: &[Algorithm],
    streams: &[BoxStream],
    max_bins: usize,
    params: WallEParams,
    model: Option<&LoadedModel>,
) -> Result<Vec<EpisodeResult>> {
    let jobs: Vec<(Algorithm, usize)> =
        algorithms.iter().flat_map(|&a| (0..streams.len()).map(move |k| (a, k))).collect();
    jobs.par_iter()
        .map(|&(algo, k)| {
            let mut policy = algo.policy(params, model)?;
            run_episode(policy.as_mut(), &streams[k], max_bins, k)
        })
        .collect()
}

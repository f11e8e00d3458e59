//! Replicate fan-out and aggregation.

mod grid;

pub use grid::{
    fmt_sig, monday_grid, random_settings_grid, run_grid, summarize_random, tables_grid, with_days, write_long_csv,
    write_summary_csv, write_wide_csv, GridPoint, GridRow, RandomSummary, FULL_DAYS, FULL_REPLICATES, MONDAY_SCALES,
    TABLE_SCALES,
};

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{make_hospital_scenario, make_ls_tightness_instance, make_prop1_instance, make_random_setting};
use crate::instance::{HospitalConfig, Instance};
use crate::lp::{solve_auto, FractionalRouting};
use crate::policies::{Policy, PolicySpec};
use crate::sim::{estimate_offline, run_prepared, sample_path, seeds, OfflineOracle, ReplicateResult};

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    File(PathBuf),
    Prop1 { epsilon: f64, lambda1: f64 },
    LsTightness { epsilon: f64, m: usize },
    Hospital(HospitalConfig),
    Random { seed: u64 },
}

impl InstanceSource {
    pub fn build(&self) -> Result<Instance> {
        match self {
            InstanceSource::File(p) => Instance::load(p),
            InstanceSource::Prop1 { epsilon, lambda1 } => make_prop1_instance(*epsilon, *lambda1),
            InstanceSource::LsTightness { epsilon, m } => make_ls_tightness_instance(*epsilon, *m),
            InstanceSource::Hospital(cfg) => make_hospital_scenario(cfg),
            InstanceSource::Random { seed } => make_random_setting(*seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub source: InstanceSource,
    pub policies: Vec<PolicySpec>,
    pub replicates: usize,
    pub master_seed: u64,
    pub denominator: OfflineOracle,
    /// Paths for Monte Carlo denominators; ignored for `lp_bound`.
    pub offline_paths: usize,
}

impl ExperimentSpec {
    pub fn new(source: InstanceSource, policies: Vec<PolicySpec>, replicates: usize, master_seed: u64) -> Self {
        ExperimentSpec {
            source,
            policies,
            replicates,
            master_seed,
            denominator: OfflineOracle::LpBound,
            offline_paths: replicates,
        }
    }
}

/// Waiting times of admitted regular patients, in days.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaitStats {
    pub mean_days: f64,
    pub count: usize,
    pub p50: u32,
    pub p90: u32,
    pub max: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyReport {
    pub policy: String,
    pub mean_reward: f64,
    pub reward_stderr: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub mean_accepted: f64,
    pub mean_rejected: f64,
    pub wait: Option<WaitStats>,
    /// Mean fraction of each resource's capacity used.
    pub utilization: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub lp_value: f64,
    pub denominator: &'static str,
    pub denominator_value: f64,
    pub denominator_stderr: f64,
    pub replicates: usize,
    pub master_seed: u64,
    pub policies: Vec<PolicyReport>,
}

impl RunReport {
    pub fn policy(&self, name: &str) -> Option<&PolicyReport> {
        self.policies.iter().find(|p| p.policy == name)
    }
}

pub fn waiting_time_stats(inst: &Instance, results: &[ReplicateResult]) -> Option<WaitStats> {
    inst.schedule()?;
    let mut hist: Vec<usize> = Vec::new();
    let mut total = 0u64;
    for w in results.iter().flat_map(|r| &r.regular_wait_days) {
        let w = *w as usize;
        if hist.len() <= w {
            hist.resize(w + 1, 0);
        }
        hist[w] += 1;
        total += w as u64;
    }
    let count: usize = hist.iter().sum();
    let quantile = |q: f64| -> u32 {
        if count == 0 {
            return 0;
        }
        let target = ((q * count as f64).ceil() as usize).max(1);
        let mut acc = 0;
        for (d, &h) in hist.iter().enumerate() {
            acc += h;
            if acc >= target {
                return d as u32;
            }
        }
        hist.len() as u32 - 1
    };
    Some(WaitStats {
        mean_days: if count == 0 { 0.0 } else { total as f64 / count as f64 },
        count,
        p50: quantile(0.5),
        p90: quantile(0.9),
        max: hist.len().saturating_sub(1) as u32,
    })
}

fn mean_stderr(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs every `(replicate, policy)` cell. Within a replicate every policy
/// sees the same arrival path and a fresh copy of the same policy stream.
/// Returns results indexed `[policy][replicate]`.
pub fn run_cells(
    inst: &Instance,
    routing: &FractionalRouting,
    policies: &[PolicySpec],
    replicates: usize,
    master_seed: u64,
) -> Result<Vec<Vec<ReplicateResult>>> {
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicates must be at least 1".into()));
    }
    let prepared: Vec<Policy> = policies
        .iter()
        .map(|&p| {
            Policy::prepare(inst, routing, p).map_err(|e| Error::Cell {
                policy: p.to_string(),
                replicate: 0,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let per_replicate: Vec<Vec<ReplicateResult>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let path = sample_path(inst, &mut seeds::path_rng(master_seed, r as u64));
            let results = prepared
                .iter()
                .map(|p| {
                    run_prepared(inst, p, &path, &mut seeds::policy_rng(master_seed, r as u64))
                        .map_err(|e| Error::Cell { policy: p.spec().to_string(), replicate: r, source: Box::new(e) })
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = results.first() {
                if results.iter().any(|x| x.path_hash != first.path_hash) {
                    return Err(Error::Numerical(format!("replicate {r}: policies saw different arrival paths")));
                }
            }
            Ok(results)
        })
        .collect::<Result<_>>()?;

    let mut by_policy: Vec<Vec<ReplicateResult>> =
        (0..policies.len()).map(|_| Vec::with_capacity(replicates)).collect();
    for row in per_replicate {
        for (k, res) in row.into_iter().enumerate() {
            by_policy[k].push(res);
        }
    }
    Ok(by_policy)
}

pub fn summarize(inst: &Instance, spec: PolicySpec, results: &[ReplicateResult], denominator: f64) -> PolicyReport {
    let n = results.len() as f64;
    let (mean_reward, reward_stderr) = mean_stderr(results.iter().map(|r| r.total_reward));
    let (ratio, ratio_stderr) =
        if denominator > 0.0 { (mean_reward / denominator, reward_stderr / denominator) } else { (f64::NAN, f64::NAN) };
    let utilization = (0..inst.m())
        .map(|j| results.iter().map(|r| r.per_resource_used[j]).sum::<f64>() / n / inst.capacity(j))
        .collect();
    PolicyReport {
        policy: spec.to_string(),
        mean_reward,
        reward_stderr,
        ratio,
        ratio_stderr,
        mean_accepted: results.iter().map(|r| r.accepted as f64).sum::<f64>() / n,
        mean_rejected: results.iter().map(|r| r.rejected as f64).sum::<f64>() / n,
        wait: waiting_time_stats(inst, results),
        utilization,
    }
}

/// Runs an experiment on an already solved instance.
pub fn run_on(inst: &Instance, routing: &FractionalRouting, spec: &ExperimentSpec) -> Result<RunReport> {
    let (denominator_value, denominator_stderr) = match spec.denominator {
        OfflineOracle::LpBound => (routing.objective(), 0.0),
        oracle => estimate_offline(inst, oracle, spec.offline_paths, spec.master_seed)?,
    };
    let cells = run_cells(inst, routing, &spec.policies, spec.replicates, spec.master_seed)?;
    let policies =
        spec.policies.iter().zip(&cells).map(|(&p, res)| summarize(inst, p, res, denominator_value)).collect();
    Ok(RunReport {
        lp_value: routing.objective(),
        denominator: spec.denominator.name(),
        denominator_value,
        denominator_stderr,
        replicates: spec.replicates,
        master_seed: spec.master_seed,
        policies,
    })
}

/// Caps the global worker pool at `threads` (0 = one per core). Only the
/// first call in a process has an effect.
pub fn init_thread_pool(threads: usize) -> Result<()> {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        Ok(()) => Ok(()),
        Err(_) if rayon::current_num_threads() > 0 => Ok(()),
        Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}"))),
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunReport> {
    let inst = spec.source.build()?;
    let routing = solve_auto(&inst)?;
    run_on(&inst, &routing, spec)
}

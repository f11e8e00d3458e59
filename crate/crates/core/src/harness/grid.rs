//! Experiment grids over synthetic scheduling scenarios, and their CSV output.

use std::io::Write;

use serde::Serialize;

use super::{run_cells, summarize};
use crate::error::Result;
use crate::instance::{make_hospital_scenario, random_setting_config, ArrivalPattern, HospitalConfig};
use crate::lp::solve_auto;
use crate::policies::PolicySpec;

pub const TABLE_SCALES: [f64; 7] = [0.70, 0.80, 0.90, 1.00, 1.10, 1.20, 1.30];
pub const MONDAY_SCALES: [f64; 6] = [0.75, 0.85, 0.95, 1.05, 1.15, 1.25];

/// Horizon and replicate count of the full-size study.
pub const FULL_DAYS: usize = 200;
pub const FULL_REPLICATES: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub grid: String,
    pub config: HospitalConfig,
    pub policies: Vec<PolicySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRow {
    pub grid: String,
    pub point: usize,
    pub session_minutes: f64,
    pub sessions_per_day: usize,
    pub deadline_days: usize,
    pub scale: f64,
    pub policy: String,
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub wait_mean: Option<f64>,
    pub mean_reward: f64,
    pub lp_value: f64,
}

fn baseline_policies() -> Vec<PolicySpec> {
    vec![PolicySpec::Ls, PolicySpec::rls(), PolicySpec::Grd, PolicySpec::Rsrv, PolicySpec::Pd]
}

fn points(grid: &str, base: HospitalConfig, scales: &[f64], policies: Vec<PolicySpec>) -> Vec<GridPoint> {
    scales
        .iter()
        .map(|&scale| GridPoint {
            grid: grid.to_string(),
            config: HospitalConfig { scale, ..base.clone() },
            policies: policies.clone(),
        })
        .collect()
}

/// Weekly arrivals with one-hour sessions and two-hour sessions (where MLS
/// with `d = 2` applies), followed by the Monday-only variant.
pub fn tables_grid() -> Vec<GridPoint> {
    let one_hour = HospitalConfig { sessions_per_day: 8, session_minutes: 60.0, ..Default::default() };
    let two_hour = HospitalConfig { sessions_per_day: 4, session_minutes: 120.0, ..Default::default() };
    let mut with_mls = baseline_policies();
    with_mls.insert(1, PolicySpec::Mls { d: 2 });
    let mut out = points("weekly-60min", one_hour, &TABLE_SCALES, baseline_policies());
    out.extend(points("weekly-120min", two_hour, &TABLE_SCALES, with_mls));
    out.extend(monday_grid());
    out
}

/// Regular patients only on Mondays, urgent patients on the other weekdays.
pub fn monday_grid() -> Vec<GridPoint> {
    let cfg = HospitalConfig {
        sessions_per_day: 8,
        session_minutes: 60.0,
        pattern: ArrivalPattern::MondayRegulars,
        ..Default::default()
    };
    points("monday-60min", cfg, &MONDAY_SCALES, baseline_policies())
}

/// `count` randomized settings with seeds `base_seed, base_seed + 1, ...`.
pub fn random_settings_grid(count: usize, base_seed: u64) -> Vec<GridPoint> {
    (0..count as u64)
        .map(|k| GridPoint {
            grid: format!("random-{}", base_seed + k),
            config: random_setting_config(base_seed + k),
            policies: baseline_policies(),
        })
        .collect()
}

/// Stretches every point to a `days`-day horizon.
pub fn with_days(points: Vec<GridPoint>, days: usize) -> Vec<GridPoint> {
    points.into_iter().map(|p| GridPoint { config: HospitalConfig { days, ..p.config }, ..p }).collect()
}

/// Runs every point with `replicates` replicates. Point `k` uses master seed
/// `master_seed + k`.
pub fn run_grid(points: &[GridPoint], replicates: usize, master_seed: u64) -> Result<Vec<GridRow>> {
    let mut rows = Vec::new();
    for (k, pt) in points.iter().enumerate() {
        let inst = make_hospital_scenario(&pt.config)?;
        let routing = solve_auto(&inst)?;
        let cells = run_cells(&inst, &routing, &pt.policies, replicates, master_seed.wrapping_add(k as u64))?;
        for (&spec, res) in pt.policies.iter().zip(&cells) {
            let rep = summarize(&inst, spec, res, routing.objective());
            rows.push(GridRow {
                grid: pt.grid.clone(),
                point: k,
                session_minutes: pt.config.session_minutes,
                sessions_per_day: pt.config.sessions_per_day,
                deadline_days: pt.config.deadline_days,
                scale: pt.config.scale,
                policy: rep.policy,
                ratio: rep.ratio,
                ratio_stderr: rep.ratio_stderr,
                wait_mean: rep.wait.map(|w| w.mean_days),
                mean_reward: rep.mean_reward,
                lp_value: routing.objective(),
            });
        }
    }
    Ok(rows)
}

/// Worst and mean ratio of one policy across random settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RandomSummary {
    pub policy: String,
    pub worst_ratio: f64,
    pub worst_grid: String,
    pub mean_ratio: f64,
}

pub fn summarize_random(rows: &[GridRow]) -> Vec<RandomSummary> {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.policy.as_str()) {
            names.push(&r.policy);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let mine: Vec<&GridRow> = rows.iter().filter(|r| r.policy == name).collect();
            let worst = mine.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio)).expect("non-empty");
            RandomSummary {
                policy: name.to_string(),
                worst_ratio: worst.ratio,
                worst_grid: worst.grid.clone(),
                mean_ratio: mine.iter().map(|r| r.ratio).sum::<f64>() / mine.len() as f64,
            }
        })
        .collect()
}

/// Six significant digits, '.' decimal point, no locale.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit; 7 digits shown then, which is harmless
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn write_wide_csv<W: Write>(w: W, rows: &[GridRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "grid",
        "point",
        "session_minutes",
        "sessions_per_day",
        "deadline_days",
        "scale",
        "policy",
        "ratio",
        "ratio_stderr",
        "wait_mean",
        "mean_reward",
        "lp_value",
    ])?;
    for r in rows {
        out.write_record([
            r.grid.clone(),
            r.point.to_string(),
            fmt_sig(r.session_minutes),
            r.sessions_per_day.to_string(),
            r.deadline_days.to_string(),
            fmt_sig(r.scale),
            r.policy.clone(),
            fmt_sig(r.ratio),
            fmt_sig(r.ratio_stderr),
            opt(r.wait_mean),
            fmt_sig(r.mean_reward),
            fmt_sig(r.lp_value),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One `(grid, point, scale, policy, metric, value)` row per metric.
pub fn write_long_csv<W: Write>(w: W, rows: &[GridRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["grid", "point", "scale", "policy", "metric", "value"])?;
    for r in rows {
        let metrics = [
            ("ratio", fmt_sig(r.ratio)),
            ("ratio_stderr", fmt_sig(r.ratio_stderr)),
            ("wait_mean", opt(r.wait_mean)),
            ("mean_reward", fmt_sig(r.mean_reward)),
        ];
        for (name, value) in metrics {
            if value.is_empty() {
                continue;
            }
            out.write_record([r.grid.as_str(), &r.point.to_string(), &fmt_sig(r.scale), &r.policy, name, &value])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(w: W, summary: &[RandomSummary]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["policy", "worst_ratio", "worst_grid", "mean_ratio"])?;
    for s in summary {
        out.write_record([s.policy.clone(), fmt_sig(s.worst_ratio), s.worst_grid.to_string(), fmt_sig(s.mean_ratio)])?;
    }
    out.flush()?;
    Ok(())
}

//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs every criterion even when an earlier one fails. Pass criterion
//! numbers as arguments to run a subset, e.g.
//! `cargo test -p reserve-tool --test acceptance -- 4 5`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reserve_core::constants::{self, compound_poisson_tail_bound, mls_ratios, SERIES_TOL};
use reserve_core::harness::{self, run_cells, GridRow};
use reserve_core::instance::{
    make_hospital_scenario, make_ls_tightness_instance, make_prop1_instance, random_setting_config, CustomerType,
    HospitalConfig, Instance, RateFunction, Resource,
};
use reserve_core::lp::{solve_layered_greedy, solve_routing_lp};
use reserve_core::policies::{Policy, PolicySpec, ResourceKind};
use reserve_core::sim::{estimate_offline, OfflineOracle, ReplicateResult};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "constants", limit: Some(Duration::from_secs(1)), run: c1_constants },
    Criterion { id: 2, name: "mls ratios", limit: None, run: c2_mls_ratios },
    Criterion { id: 3, name: "compound poisson bound", limit: Some(Duration::from_secs(30)), run: c3_tail_bound },
    Criterion { id: 4, name: "adversarial instance", limit: Some(Duration::from_secs(60)), run: c4_prop1 },
    Criterion { id: 5, name: "ls guarantee and tightness", limit: Some(Duration::from_secs(300)), run: c5_ls },
    Criterion { id: 6, name: "mls per-resource bound", limit: Some(Duration::from_secs(120)), run: c6_mls },
    Criterion { id: 7, name: "rls guarantee", limit: Some(Duration::from_secs(300)), run: c7_rls },
    Criterion { id: 8, name: "lp correctness", limit: None, run: c8_lp },
    Criterion { id: 9, name: "numerical study shape", limit: Some(Duration::from_secs(600)), run: c9_shape },
    Criterion { id: 10, name: "determinism", limit: None, run: c10_determinism },
];

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for c in CRITERIA.iter().filter(|c| wanted.is_empty() || wanted.contains(&c.id)) {
        let start = Instant::now();
        let mut out = (c.run)();
        let elapsed = start.elapsed();
        if let Some(limit) = c.limit {
            if elapsed > limit {
                out.pass = false;
                out.detail.push_str(&format!("; runtime {:.1}s exceeds {}s", elapsed.as_secs_f64(), limit.as_secs()));
            }
        }
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {} ({}): {verdict} [{:.2}s] {}", c.id, c.name, elapsed.as_secs_f64(), out.detail);
        if !out.pass {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_reserve")
}

fn c1_constants() -> Outcome {
    let out = match Command::new(bin()).arg("constants").output() {
        Ok(o) if o.status.success() => String::from_utf8_lossy(&o.stdout).into_owned(),
        Ok(o) => return Outcome::new(false, format!("exit {:?}: {}", o.status, String::from_utf8_lossy(&o.stderr))),
        Err(e) => return Outcome::new(false, format!("could not run binary: {e}")),
    };
    let field = |key: &str| -> Option<f64> {
        out.lines().find_map(|l| l.strip_prefix(key).and_then(|v| v.strip_prefix('=')).and_then(|v| v.parse().ok()))
    };
    let (Some(r), Some(z), Some(ls)) = (field("r_star"), field("z_star"), field("ls_ratio")) else {
        return Outcome::new(false, "missing r_star, z_star or ls_ratio line");
    };
    let exact_ls = constants::ls_ratio();
    let pass = within(r, 0.321, 0.003)
        && within(z, 0.42, 0.01)
        && within(exact_ls, 0.31606, 1e-5)
        && within(ls, exact_ls, 1e-6);
    Outcome::new(pass, format!("r*={r} z*={z} ls_ratio={exact_ls:.8}"))
}

fn c2_mls_ratios() -> Outcome {
    let r = match mls_ratios(2, 0.8, 0.2, 1.0, 1.0, SERIES_TOL) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let example = within(r.large, 0.54, 0.02) && within(r.all, 0.43, 0.02) && within(r.small, 0.18, 0.02);
    let mut monotone_l = true;
    let mut prev = f64::NEG_INFINITY;
    for k in 0..=100 {
        let ul = k as f64 / 100.0;
        let v = mls_ratios(2, ul, 1.0 - ul, 1.0, 1.0, SERIES_TOL).unwrap().large;
        monotone_l &= v >= prev;
        prev = v;
    }
    let mut monotone_d = true;
    let mut prev = f64::NEG_INFINITY;
    for d in 2..=20 {
        let v = mls_ratios(d, 0.5, 0.5, 1.0, 1.0, SERIES_TOL).unwrap().all;
        monotone_d &= v >= prev;
        prev = v;
    }
    Outcome::new(
        example && monotone_l && monotone_d,
        format!(
            "ratio_L={:.4} ratio_S={:.4} ratio_all={:.4}; ratio_L monotone in U^L: {monotone_l}; ratio_all monotone in d: {monotone_d}",
            r.large, r.small, r.all
        ),
    )
}

fn c3_tail_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let samples = 100_000;
    let mut worst_margin = f64::INFINITY;
    let mut failures = Vec::new();
    for t in 0..20 {
        let l: u32 = rng.random_range(2..=6);
        let beta = rng.random_range(0.01..=1.0 / l as f64);
        let alpha = rng.random_range(0.05..=1.0);
        // X on [0, beta]: alternate between a few shapes
        let (mean_x, kind) = match t % 4 {
            0 => (beta / 2.0, 0),
            1 => (beta, 1),
            2 => (0.3 * beta, 2),
            _ => (0.75 * beta, 3),
        };
        let draw = move |r: &mut ChaCha8Rng| -> f64 {
            match kind {
                0 => r.random_range(0.0..beta),
                1 => beta,
                2 => {
                    if r.random_bool(0.3) {
                        beta
                    } else {
                        0.0
                    }
                }
                _ => beta * (0.5 + 0.5 * r.random::<f64>()),
            }
        };
        let xs: Vec<f64> =
            (0..samples).map(|_| common::capped_compound_poisson(&mut rng, alpha / mean_x, beta, &draw)).collect();
        let (mean, se) = common::mean_stderr(&xs);
        let bound = compound_poisson_tail_bound(alpha, beta, l).unwrap();
        let margin = mean - (bound - 3.0 * se);
        worst_margin = worst_margin.min(margin);
        if margin < 0.0 {
            failures.push(format!("(alpha={alpha:.3}, beta={beta:.3}, l={l}): mc {mean:.5} < bound {bound:.5}"));
        }
    }
    Outcome::new(failures.is_empty(), format!("20 triples, worst margin {worst_margin:.5} {}", failures.join("; ")))
}

fn mean_rewards(results: &[ReplicateResult]) -> (f64, f64) {
    common::mean_stderr(&results.iter().map(|r| r.total_reward).collect::<Vec<_>>())
}

fn c4_prop1() -> Outcome {
    let paths = 100_000;
    let seed = 404;
    let inst = make_prop1_instance(0.02, 100.0).unwrap();
    let lp = solve_routing_lp(&inst).unwrap();
    // LS reserves the resource for the large type: the wait-for-type-2 strategy.
    // GRD takes every small arrival: the accept-type-1 strategy.
    let cells = run_cells(&inst, &lp, &[PolicySpec::Ls, PolicySpec::Grd], paths, seed).unwrap();
    let (wait, _) = mean_rewards(&cells[0]);
    let (accept, _) = mean_rewards(&cells[1]);
    let (offline, _) = estimate_offline(&inst, OfflineOracle::Prop1Exact, paths, seed).unwrap();
    let ratio = wait.max(accept) / offline;
    Outcome::new(
        within(ratio, 0.5, 0.03),
        format!("wait={wait:.5} accept={accept:.5} offline={offline:.5} ratio={ratio:.4}"),
    )
}

fn c5_ls() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let reps = 10_000;
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for k in 0..30 {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=6);
        let inst = common::random_instance(&mut rng, n, m);
        let lp = solve_routing_lp(&inst).unwrap();
        let cells = run_cells(&inst, &lp, &[PolicySpec::Ls], reps, 5000 + k).unwrap();
        let (mean, se) = mean_rewards(&cells[0]);
        let bound = 0.316 * lp.objective();
        if lp.objective() > 0.0 {
            worst = worst.min(mean / lp.objective());
        }
        if mean < bound - 3.0 * se {
            failures.push(format!("instance {k}: {mean:.4} < {bound:.4}"));
        }
    }
    let inst = make_ls_tightness_instance(0.01, 500).unwrap();
    let lp = solve_routing_lp(&inst).unwrap();
    let cells = run_cells(&inst, &lp, &[PolicySpec::Ls], reps, 55).unwrap();
    let (ls, _) = mean_rewards(&cells[0]);
    let (offline, _) = estimate_offline(&inst, OfflineOracle::TightnessExact, reps, 55).unwrap();
    let ratio = ls / offline;
    let tight = within(ratio, 0.317, 0.015);
    Outcome::new(
        failures.is_empty() && tight,
        format!(
            "(a) 30 instances, worst LS/V_LP {worst:.4} {}; (b) LS {ls:.4} / offline {offline:.4} = {ratio:.4}",
            failures.join("; ")
        ),
    )
}

/// One resource (`c = 1`) with large and small types carrying the given loads.
fn mls_single_resource(rng: &mut ChaCha8Rng, d: u32, large: f64, small: f64) -> Instance {
    let df = d as f64;
    let mut types = Vec::new();
    let mut add = |u: f64, load: f64| {
        let id = types.len();
        types.push(CustomerType::new(id, vec![u], RateFunction::constant(load / u, 1.0).unwrap()));
    };
    let n_large = rng.random_range(1..=2);
    for _ in 0..n_large {
        let u = rng.random_range(1.0 / (df + 1.0) + 1e-6..=1.0 / df);
        add(u, large / n_large as f64);
    }
    let n_small = rng.random_range(1..=3);
    for _ in 0..n_small {
        let u = rng.random_range(0.02..=1.0 / (df + 1.0));
        add(u, small / n_small as f64);
    }
    Instance::new(1.0, vec![Resource { id: 0, capacity: 1.0 }], types, None).unwrap()
}

fn c6_mls() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let reps = 20_000;
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for k in 0..20 {
        let d = rng.random_range(2..=6);
        let total = rng.random_range(0.2..=1.0);
        let share = rng.random_range(0.0..=1.0);
        let inst = mls_single_resource(&mut rng, d, total * share, total * (1.0 - share));
        let lp = solve_routing_lp(&inst).unwrap();
        let policy = Policy::prepare(&inst, &lp, PolicySpec::Mls { d }).unwrap();
        let l = policy.classification().unwrap().loads[0];
        let ratios = mls_ratios(d, l.large, l.small, l.total, 1.0, SERIES_TOL).unwrap();
        let cells = run_cells(&inst, &lp, &[PolicySpec::Mls { d }], reps, 6000 + k).unwrap();
        let (mean, se) = mean_rewards(&cells[0]);
        let bound = ratios.max();
        worst = worst.min((mean - bound) / se.max(1e-12));
        if mean < bound - 3.0 * se {
            failures.push(format!("config {k} (d={d}, U={total:.3}): {mean:.4} < {bound:.4}"));
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("20 configurations, smallest (mean - bound)/stderr = {worst:.2} {}", failures.join("; ")),
    )
}

fn per_resource(results: &[ReplicateResult], j: usize) -> (f64, f64) {
    common::mean_stderr(&results.iter().map(|r| r.per_resource_used[j]).collect::<Vec<_>>())
}

fn c7_rls() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let reps = 10_000;
    let rls = PolicySpec::rls();
    let PolicySpec::Rls { r_star, z_star } = rls else { unreachable!() };
    let mut failures = Vec::new();
    let (mut checked_a, mut checked_b) = (0, 0);
    for k in 0..30 {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=6);
        let inst = common::random_instance(&mut rng, n, m);
        let lp = solve_routing_lp(&inst).unwrap();
        let policy = Policy::prepare(&inst, &lp, rls).unwrap();
        let cells = run_cells(&inst, &lp, &[rls], reps, 7000 + k).unwrap();
        let cls = policy.classification().unwrap();
        for j in 0..m {
            let (mean, se) = per_resource(&cells[0], j);
            let loads = cls.loads[j];
            let c = inst.capacity(j);
            if mean < r_star * loads.total - 3.0 * se {
                failures.push(format!("instance {k} resource {j}: {mean:.4} < r* U = {:.4}", r_star * loads.total));
            }
            let kind_bound = match policy.resource_kind(j).unwrap() {
                ResourceKind::TypeA => {
                    checked_a += 1;
                    common::type_a_bound(c, loads.small, loads.tiny, z_star)
                }
                ResourceKind::TypeB => {
                    checked_b += 1;
                    common::type_b_bound(c, loads.large, loads.mu_large, loads.mu_medium, z_star)
                }
            };
            if mean < kind_bound - 3.0 * se {
                failures.push(format!("instance {k} resource {j}: {mean:.4} < type bound {kind_bound:.4}"));
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("30 instances, {checked_a} type-A and {checked_b} type-B resources {}", failures.join("; ")),
    )
}

fn c8_lp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let shapes = [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1), (2, 3), (3, 2), (1, 6), (6, 1)];
    let mut worst_vertex: f64 = 0.0;
    for k in 0..50 {
        let (n, m) = shapes[k % shapes.len()];
        let inst = common::random_instance(&mut rng, n, m);
        let lp = solve_routing_lp(&inst).unwrap().objective();
        let oracle = common::vertex_enumeration_lp(&inst);
        worst_vertex = worst_vertex.max((lp - oracle).abs() / oracle.max(1e-300));
    }
    let mut worst_layered: f64 = 0.0;
    for k in 0..50u64 {
        let cfg = HospitalConfig {
            days: rng.random_range(6..=14),
            sessions_per_day: rng.random_range(1..=3),
            ..random_setting_config(8000 + k)
        };
        let inst = make_hospital_scenario(&cfg).unwrap();
        let greedy = solve_layered_greedy(&inst).unwrap().objective();
        let simplex = solve_routing_lp(&inst).unwrap().objective();
        worst_layered = worst_layered.max((greedy - simplex).abs() / simplex);
    }
    Outcome::new(
        worst_vertex <= 1e-6 && worst_layered <= 1e-7,
        format!("max rel. error vs vertex enumeration {worst_vertex:.2e}, greedy vs simplex {worst_layered:.2e}"),
    )
}

fn c9_shape() -> Outcome {
    let rows = match harness::run_grid(&harness::tables_grid(), 200, 2024) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let mut points: Vec<(String, usize)> = Vec::new();
    for r in &rows {
        if !points.contains(&(r.grid.clone(), r.point)) {
            points.push((r.grid.clone(), r.point));
        }
    }
    let find = |grid: &str, point: usize, name: &str| -> Option<&GridRow> {
        rows.iter().find(|r| r.grid == grid && r.point == point && r.policy == name)
    };
    let (mut a, mut b, mut c, mut d) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut min_rls = f64::INFINITY;
    let mut moderate = 0;
    for (grid, point) in &points {
        let rls = find(grid, *point, "rls").unwrap();
        let ls = find(grid, *point, "ls").unwrap();
        let grd = find(grid, *point, "grd").unwrap();
        let at = format!("{grid}@{}", rls.scale);
        min_rls = min_rls.min(rls.ratio);
        if rls.ratio < ls.ratio {
            a.push(at.clone());
        }
        if rls.ratio < 0.90 {
            b.push(format!("{at} rls={:.4}", rls.ratio));
        }
        let grd_wait = grd.wait_mean.unwrap();
        for other in rows.iter().filter(|r| &r.grid == grid && r.point == *point && r.policy != "grd") {
            let w = other.wait_mean.unwrap();
            if grd_wait > w {
                c.push(format!("{at} grd={grd_wait:.3}>{}={w:.3}", other.policy));
            }
        }
        if grid.starts_with("monday") && (0.9..=1.1).contains(&rls.scale) {
            moderate += 1;
            if grd.ratio >= rls.ratio {
                d.push(format!("{at} grd={:.4} rls={:.4}", grd.ratio, rls.ratio));
            }
        }
    }
    let status =
        |v: &Vec<String>| if v.is_empty() { "ok".to_string() } else { format!("violated at {}", v.join(", ")) };
    let pass = a.is_empty() && b.is_empty() && c.is_empty() && d.is_empty() && moderate > 0;
    Outcome::new(
        pass,
        format!(
            "{} grid points; (a) rls>=ls: {}; (b) rls>=0.90 (min {min_rls:.4}): {}; (c) grd wait minimal: {}; (d) monday grd<rls at {moderate} moderate points: {}",
            points.len(),
            status(&a),
            status(&b),
            status(&c),
            status(&d)
        ),
    )
}

fn run_bench(out: &Path, threads: &str) -> Result<(), String> {
    let status = Command::new(bin())
        .args(["bench", "--grid", "tables", "--replicates", "20", "--seed", "99", "--out"])
        .arg(out)
        .env("RESERVE_BENCH_THREADS", threads)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("bench exited with {status}"))
    }
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (first, second) = (dir.path().join("a"), dir.path().join("b"));
    if let Err(e) = run_bench(&first, "1").and_then(|_| run_bench(&second, "0")) {
        return Outcome::new(false, e);
    }
    let mut same = true;
    let mut bytes = 0;
    for name in ["tables.csv", "tables_long.csv"] {
        let x = std::fs::read(first.join(name)).unwrap_or_default();
        let y = std::fs::read(second.join(name)).unwrap_or_default();
        same &= !x.is_empty() && x == y;
        bytes += x.len();
    }
    Outcome::new(same, format!("two bench runs (1 thread, auto threads), {bytes} bytes compared, identical: {same}"))
}

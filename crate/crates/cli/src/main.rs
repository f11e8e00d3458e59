use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use reserve_core::constants::{self, SERIES_TOL};
use reserve_core::harness::{self, ExperimentSpec, InstanceSource};
use reserve_core::instance::{ArrivalPattern, HospitalConfig, Instance};
use reserve_core::lp::{solve_layered_greedy, solve_routing_lp};
use reserve_core::sim::OfflineOracle;
use reserve_core::{Error, PolicySpec, Result};

const THREADS_ENV: &str = "RESERVE_BENCH_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "reserve",
    version,
    about = "Online advance-reservation policies: constants, LP bounds and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print r*, z*, the LS ratio and a table of MLS ratios.
    Constants {
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Largest d in the MLS table.
        #[arg(long, default_value_t = 5)]
        d_max: u32,
    },
    /// Solve the routing LP of an instance file.
    SolveLp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        lp_dump: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Generate an instance file.
    Gen(GenArgs),
    /// Simulate policies on an instance file.
    Simulate(SimulateArgs),
    /// Run an experiment grid and write CSV files into a directory.
    Bench {
        #[arg(long, value_enum)]
        grid: Grid,
        #[arg(long)]
        out: PathBuf,
        /// Replicates per grid point [default: 200, or 1000 with --full-scale].
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Number of random settings (random-settings grid only).
        #[arg(long, default_value_t = 100)]
        settings: usize,
        /// 200-day horizons and 1000 replicates instead of the desk-scale defaults.
        #[arg(long)]
        full_scale: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Auto,
    Simplex,
    Greedy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Prop1,
    LsTight,
    Hospital,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Grid {
    Tables,
    RandomSettings,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Pattern {
    Weekly,
    Monday,
}

#[derive(clap::Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 1000.0)]
    lambda1: f64,
    /// Resource count of the tightness instance.
    #[arg(long, default_value_t = 500)]
    m: usize,
    #[arg(long, default_value_t = 50)]
    days: usize,
    #[arg(long, default_value_t = 8)]
    sessions: usize,
    #[arg(long, default_value_t = 60.0)]
    session_minutes: f64,
    #[arg(long, default_value_t = 20)]
    deadline: usize,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, value_enum, default_value_t = Pattern::Weekly)]
    pattern: Pattern,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// One or more of ls, mls, rls, grd, rsrv, pd (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    policy: Vec<String>,
    /// MLS parameter d.
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long)]
    r_star: Option<f64>,
    #[arg(long)]
    z_star: Option<f64>,
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// lp_bound, prop1_exact or tightness_exact.
    #[arg(long, default_value = "lp_bound")]
    denominator: String,
    #[arg(long, default_value_t = 100_000)]
    offline_paths: usize,
    #[arg(long)]
    lp_dump: Option<PathBuf>,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Constants { tol, d_max } => constants_cmd(out, tol, d_max),
        Command::SolveLp { instance, lp_dump, method } => {
            let inst = Instance::load(&instance)?;
            let routing = match method {
                Method::Auto => reserve_core::solve_auto(&inst)?,
                Method::Simplex => solve_routing_lp(&inst)?,
                Method::Greedy => solve_layered_greedy(&inst)?,
            };
            writeln!(out, "objective={}", routing.objective())?;
            writeln!(out, "types={} resources={}", inst.n(), inst.m())?;
            if let Some(p) = lp_dump {
                routing.dump(p)?;
            }
            Ok(())
        }
        Command::Gen(args) => gen_cmd(&args),
        Command::Simulate(args) => simulate_cmd(out, &args),
        Command::Bench { grid, out: dir, replicates, seed, settings, full_scale } => {
            init_threads()?;
            bench_cmd(grid, &dir, replicates, seed, settings, full_scale)
        }
    }
}

fn init_threads() -> Result<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
        Err(_) => 0,
    };
    harness::init_thread_pool(threads)
}

fn constants_cmd(out: &mut impl Write, tol: f64, d_max: u32) -> Result<()> {
    let c = constants::solve_rls_constants(tol)?;
    writeln!(out, "r_star={:.6}", c.r_star)?;
    writeln!(out, "z_star={:.6}", c.z_star)?;
    writeln!(out, "h_at_opt={:.6}", c.h_at_opt)?;
    writeln!(out, "ls_ratio={:.6}", constants::ls_ratio())?;
    writeln!(out, "d,small_share,ratio_l,ratio_s,ratio_all,reserve,corollary1")?;
    for d in 2..=d_max.max(2) {
        let bound = constants::corollary1_bound(d)?;
        for k in 0..=10 {
            let small = k as f64 / 10.0;
            let r = constants::mls_ratios(d, 1.0 - small, small, 1.0, 1.0, SERIES_TOL)?;
            let choice = match r.choice() {
                constants::MlsChoice::Large => "L",
                constants::MlsChoice::Small => "S",
                constants::MlsChoice::All => "all",
            };
            writeln!(out, "{d},{small:.1},{:.6},{:.6},{:.6},{choice},{bound:.6}", r.large, r.small, r.all)?;
        }
    }
    Ok(())
}

fn gen_cmd(a: &GenArgs) -> Result<()> {
    let source = match a.family {
        Family::Prop1 => InstanceSource::Prop1 { epsilon: a.epsilon, lambda1: a.lambda1 },
        Family::LsTight => InstanceSource::LsTightness { epsilon: a.epsilon, m: a.m },
        Family::Random => InstanceSource::Random { seed: a.seed },
        Family::Hospital => InstanceSource::Hospital(HospitalConfig {
            days: a.days,
            sessions_per_day: a.sessions,
            session_minutes: a.session_minutes,
            deadline_days: a.deadline,
            scale: a.scale,
            pattern: match a.pattern {
                Pattern::Weekly => ArrivalPattern::Weekly,
                Pattern::Monday => ArrivalPattern::MondayRegulars,
            },
            ..Default::default()
        }),
    };
    source.build()?.save(&a.out)
}

fn policy_specs(a: &SimulateArgs) -> Result<Vec<PolicySpec>> {
    a.policy
        .iter()
        .map(|name| {
            let spec = PolicySpec::parse(name.trim(), Some(a.d))?;
            Ok(match spec {
                PolicySpec::Rls { r_star, z_star } => {
                    PolicySpec::Rls { r_star: a.r_star.unwrap_or(r_star), z_star: a.z_star.unwrap_or(z_star) }
                }
                other => other,
            })
        })
        .collect()
}

fn simulate_cmd(out: &mut impl Write, a: &SimulateArgs) -> Result<()> {
    let spec = ExperimentSpec {
        source: InstanceSource::File(a.instance.clone()),
        policies: policy_specs(a)?,
        replicates: a.replicates,
        master_seed: a.seed,
        denominator: a.denominator.parse::<OfflineOracle>()?,
        offline_paths: a.offline_paths,
    };
    let inst = spec.source.build()?;
    let routing = reserve_core::solve_auto(&inst)?;
    if let Some(p) = &a.lp_dump {
        routing.dump(p)?;
    }
    init_threads()?;
    let report = harness::run_on(&inst, &routing, &spec)?;
    if a.json {
        serde_json::to_writer_pretty(&mut *out, &report)?;
        writeln!(out)?;
        return Ok(());
    }
    writeln!(out, "lp_value={}", report.lp_value)?;
    writeln!(
        out,
        "denominator={} value={} stderr={}",
        report.denominator, report.denominator_value, report.denominator_stderr
    )?;
    for p in &report.policies {
        let wait = p.wait.as_ref().map(|w| w.mean_days.to_string()).unwrap_or_else(|| "na".into());
        writeln!(
            out,
            "policy={} mean_reward={} stderr={} ratio={} ratio_stderr={} wait_mean={}",
            p.policy, p.mean_reward, p.reward_stderr, p.ratio, p.ratio_stderr, wait
        )?;
    }
    Ok(())
}

fn csv_file(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn bench_cmd(
    grid: Grid,
    dir: &Path,
    replicates: Option<usize>,
    seed: u64,
    settings: usize,
    full_scale: bool,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let (stem, mut points) = match grid {
        Grid::Tables => ("tables", harness::tables_grid()),
        Grid::RandomSettings => ("random_settings", harness::random_settings_grid(settings, seed)),
    };
    let replicates = match (replicates, full_scale) {
        (Some(r), _) => r,
        (None, true) => harness::FULL_REPLICATES,
        (None, false) => 200,
    };
    if full_scale {
        points = harness::with_days(points, harness::FULL_DAYS);
    }
    let rows = harness::run_grid(&points, replicates, seed)?;
    let mut f = csv_file(dir, &format!("{stem}.csv"))?;
    harness::write_wide_csv(&mut f, &rows)?;
    f.flush()?;
    let mut f = csv_file(dir, &format!("{stem}_long.csv"))?;
    harness::write_long_csv(&mut f, &rows)?;
    f.flush()?;
    if let Grid::RandomSettings = grid {
        let mut f = csv_file(dir, "random_settings_summary.csv")?;
        harness::write_summary_csv(&mut f, &harness::summarize_random(&rows))?;
        f.flush()?;
    }
    Ok(())
}

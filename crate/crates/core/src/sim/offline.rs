use std::fmt;
use std::str::FromStr;

use super::{sample_path, seeds, ArrivalEvent};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::solve_auto;

const STRUCT_TOL: f64 = 1e-12;

/// Offline benchmark used as the ratio denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OfflineOracle {
    /// Exact offline optimum on the two-type adversarial instance.
    Prop1Exact,
    /// Exact offline optimum on the LS tightness instance.
    TightnessExact,
    /// `V_LP`, an upper bound on the expected offline optimum.
    LpBound,
}

impl OfflineOracle {
    pub fn name(self) -> &'static str {
        match self {
            OfflineOracle::Prop1Exact => "prop1_exact",
            OfflineOracle::TightnessExact => "tightness_exact",
            OfflineOracle::LpBound => "lp_bound",
        }
    }
}

impl FromStr for OfflineOracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prop1_exact" => Ok(OfflineOracle::Prop1Exact),
            "tightness_exact" => Ok(OfflineOracle::TightnessExact),
            "lp_bound" => Ok(OfflineOracle::LpBound),
            _ => Err(Error::InvalidArgument(format!("unknown offline oracle {s:?}"))),
        }
    }
}

impl fmt::Display for OfflineOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= STRUCT_TOL * a.abs().max(b.abs()).max(1.0)
}

fn mismatch(oracle: &'static str, reason: impl Into<String>) -> Error {
    Error::OracleMismatch { oracle, reason: reason.into() }
}

fn counts(path: &[ArrivalEvent]) -> (u64, u64) {
    path.iter().fold((0, 0), |(a, b), e| if e.type_id == 0 { (a + 1, b) } else { (a, b + 1) })
}

fn check_prop1(inst: &Instance) -> Result<()> {
    let bad = |r: &str| Err(mismatch("prop1_exact", r));
    if inst.n() != 2 || inst.m() != 1 {
        return bad("expected two types and one resource");
    }
    if !close(inst.capacity(0), 1.0) || !close(inst.u(1, 0), 1.0) || !(inst.u(0, 0) > 0.0 && inst.u(0, 0) < 1.0) {
        return bad("expected c = 1, u_2 = 1 and 0 < u_1 < 1");
    }
    let types = inst.types();
    let half = inst.horizon() / 2.0;
    let late_small = types[0].rate.segments().iter().any(|s| s.rate > 0.0 && s.t1 > half + STRUCT_TOL);
    let early_large = types[1].rate.segments().iter().any(|s| s.rate > 0.0 && s.t0 < half - STRUCT_TOL);
    if late_small || early_large {
        return bad("small type must precede the large type");
    }
    Ok(())
}

/// Offline optimum of one path on the adversarial instance: a large arrival
/// fills the resource on its own; otherwise take as many small ones as fit.
pub fn prop1_offline_value(inst: &Instance, path: &[ArrivalEvent]) -> Result<f64> {
    check_prop1(inst)?;
    Ok(prop1_value(inst, path))
}

fn prop1_value(inst: &Instance, path: &[ArrivalEvent]) -> f64 {
    let (n1, n2) = counts(path);
    if n2 > 0 {
        return 1.0;
    }
    let u1 = inst.u(0, 0);
    let fit = (1.0 / u1 + 1e-9).floor() as u64;
    n1.min(fit) as f64 * u1
}

struct Tightness {
    eps: f64,
    m: usize,
    s1: f64,
    s2: f64,
}

fn check_tightness(inst: &Instance) -> Result<Tightness> {
    let bad = |r: &str| Err(mismatch("tightness_exact", r));
    let m = inst.m();
    if inst.n() != 2 || m < 2 {
        return bad("expected two types and at least two resources");
    }
    if (0..m).any(|j| !close(inst.capacity(j), 1.0)) {
        return bad("expected unit capacities");
    }
    let s1 = inst.u(0, 0);
    let s2 = inst.u(1, 0);
    let eps = 1.0 - inst.u(0, 1) / s1;
    if !close(s1, 0.1) || !close(s2, 0.5 + eps) || !(eps > 0.0 && eps < 0.1) {
        return bad("utilizations do not match the tightness construction");
    }
    for j in 1..m {
        if !close(inst.u(0, j), s1 * (1.0 - eps)) || !close(inst.u(1, j), s2 * (1.0 - eps)) {
            return bad("non-premium resources must pay (1 - eps) u");
        }
    }
    Ok(Tightness { eps, m, s1, s2 })
}

fn fit(room: f64, size: f64) -> u64 {
    ((room / size) + 1e-9).floor().max(0.0) as u64
}

/// Offline optimum of one path on the tightness instance.
///
/// Every non-premium resource holds one large plus several small customers,
/// so unless a path is extraordinarily long everything is accepted and the
/// only choice is what to put on the premium resource 0. For paths that do
/// not fit this returns a feasible greedy packing (a lower bound).
pub fn tightness_offline_value(inst: &Instance, path: &[ArrivalEvent]) -> Result<f64> {
    let t = check_tightness(inst)?;
    Ok(tightness_value(&t, path))
}

fn tightness_value(t: &Tightness, path: &[ArrivalEvent]) -> f64 {
    let (n1, n2) = counts(path);
    let (s1, s2, eps) = (t.s1, t.s2, t.eps);
    let (q1, q2) = (s1 * (1.0 - eps), s2 * (1.0 - eps));
    let others = (t.m - 1) as u64;
    let mut best = f64::NEG_INFINITY;
    for a in 0..=n2.min(1) {
        let k = n1.min(fit(1.0 - a as f64 * s2, s1));
        let premium = a as f64 * s2 + k as f64 * s1;
        let (r1, r2) = (n1 - k, n2 - a);
        let placed2 = r2.min(others);
        let room1 = placed2 * fit(1.0 - q2, q1) + (others - placed2) * fit(1.0, q1);
        let placed1 = r1.min(room1);
        let value = premium + placed2 as f64 * q2 + placed1 as f64 * q1;
        best = best.max(value);
    }
    best
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

type PathValue<'a> = dyn Fn(&[ArrivalEvent]) -> f64 + Sync + 'a;

/// Monte Carlo estimate `(mean, stderr)` of the expected offline optimum.
/// Path `p` uses the path stream of replicate `p` under `rng_seed`, so the
/// estimate shares paths with a harness run under the same master seed.
pub fn estimate_offline(inst: &Instance, oracle: OfflineOracle, n_paths: usize, rng_seed: u64) -> Result<(f64, f64)> {
    let value: Box<PathValue> = match oracle {
        OfflineOracle::LpBound => return Ok((solve_auto(inst)?.objective(), 0.0)),
        OfflineOracle::Prop1Exact => {
            check_prop1(inst)?;
            Box::new(|p| prop1_value(inst, p))
        }
        OfflineOracle::TightnessExact => {
            let t = check_tightness(inst)?;
            Box::new(move |p| tightness_value(&t, p))
        }
    };
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be positive".into()));
    }
    let values: Vec<f64> =
        (0..n_paths as u64).map(|p| value(&sample_path(inst, &mut seeds::path_rng(rng_seed, p)))).collect();
    Ok(mean_stderr(&values))
}

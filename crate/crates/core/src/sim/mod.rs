//! Sample paths and single-replicate simulation.

mod offline;
pub mod seeds;

pub use offline::{estimate_offline, prop1_offline_value, tightness_offline_value, OfflineOracle};

use std::hash::{DefaultHasher, Hasher};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::FractionalRouting;
use crate::policies::{fits, Decision, Policy, PolicySpec, CAPACITY_EPS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArrivalEvent {
    pub time: f64,
    pub type_id: usize,
}

/// Draws one sample path: per type and rate segment a Poisson count with
/// uniform times inside the segment, merged into a single time-sorted stream.
pub fn sample_path<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Vec<ArrivalEvent> {
    let mut events = Vec::new();
    for (i, t) in inst.types().iter().enumerate() {
        for seg in t.rate.segments() {
            let mean = seg.mass();
            if mean <= 0.0 {
                continue;
            }
            let count = Poisson::new(mean).expect("positive finite mean").sample(rng) as usize;
            let len = seg.len();
            events.extend((0..count).map(|_| ArrivalEvent { time: seg.t0 + len * rng.random::<f64>(), type_id: i }));
        }
    }
    // continuous times: equal keys have probability zero, the type id only makes the order total
    events.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.type_id.cmp(&b.type_id)));
    events
}

/// [`sample_path`] with the path stream of replicate 0 under `seed`.
pub fn sample_path_seeded(inst: &Instance, seed: u64) -> Vec<ArrivalEvent> {
    sample_path(inst, &mut seeds::path_rng(seed, 0))
}

pub fn path_hash(path: &[ArrivalEvent]) -> u64 {
    let mut h = DefaultHasher::new();
    for e in path {
        h.write_u64(e.time.to_bits());
        h.write_usize(e.type_id);
    }
    h.finish()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicateResult {
    pub total_reward: f64,
    pub per_resource_used: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    /// Days waited by each admitted regular patient; empty without a schedule.
    pub regular_wait_days: Vec<u32>,
    /// Hash of the events fed to the policy.
    pub path_hash: u64,
}

/// Runs a prepared policy over one path. Every decision is checked for
/// feasibility before capacity is debited.
pub fn run_prepared<R: Rng + ?Sized>(
    inst: &Instance,
    policy: &Policy,
    path: &[ArrivalEvent],
    rng: &mut R,
) -> Result<ReplicateResult> {
    let mut state = policy.new_state(inst);
    let mut used = vec![0.0; inst.m()];
    let (mut accepted, mut rejected) = (0, 0);
    let mut waits = Vec::new();
    let sched = inst.schedule();
    for e in path {
        let i = e.type_id;
        if i >= inst.n() {
            return Err(Error::Dimension(format!("event type {i} out of range for {} types", inst.n())));
        }
        match policy.decide(inst, &mut state, i, rng) {
            Decision::Reject => rejected += 1,
            Decision::Accept(j) => {
                let u = inst.u(i, j);
                if j >= inst.m() || u <= 0.0 || !fits(state.remaining[j], u, inst.capacity(j)) {
                    return Err(Error::InvalidDecision(format!(
                        "{} assigned type {i} to resource {j} (u = {u}, remaining = {})",
                        policy.spec(),
                        state.remaining.get(j).copied().unwrap_or(f64::NAN)
                    )));
                }
                state.remaining[j] = (state.remaining[j] - u).max(0.0);
                used[j] += u;
                accepted += 1;
                if let Some(s) = sched {
                    let class = &s.patients[i];
                    if !class.category.is_urgent() {
                        waits.push((s.resource_day[j] - class.arrival_day) as u32);
                    }
                }
            }
        }
    }
    for (j, &u) in used.iter().enumerate() {
        let c = inst.capacity(j);
        debug_assert!(u <= c * (1.0 + 2.0 * CAPACITY_EPS) + 1e-12, "resource {j} oversubscribed");
    }
    Ok(ReplicateResult {
        total_reward: used.iter().sum(),
        per_resource_used: used,
        accepted,
        rejected,
        regular_wait_days: waits,
        path_hash: path_hash(path),
    })
}

/// Prepares `spec` on `(inst, routing)` and runs it over `path` with the
/// policy stream seeded by `rng_seed`.
pub fn run_policy(
    inst: &Instance,
    routing: &FractionalRouting,
    spec: PolicySpec,
    path: &[ArrivalEvent],
    rng_seed: u64,
) -> Result<ReplicateResult> {
    let policy = Policy::prepare(inst, routing, spec)?;
    run_prepared(inst, &policy, path, &mut seeds::policy_rng(rng_seed, 0))
}

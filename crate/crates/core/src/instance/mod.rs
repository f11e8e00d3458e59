//! Problem data: resources with capacities, customer types with utilization
//! vectors and piecewise-constant arrival-rate functions over `[0, T]`.
//!
//! Besides hand-built instances this module holds the two adversarial
//! constructions (the 0.5 upper-bound instance and the LS tightness instance);
//! the appointment-scheduling generators live in [`hospital`].

mod hospital;
mod schema;

pub use hospital::{
    make_hospital_scenario, make_random_setting, random_setting_config, ArrivalPattern, Category, HospitalConfig,
    PatientClass, Schedule, CATEGORY_PERCENTAGES, DEFAULT_CATEGORY_MIX, DEFAULT_WEEKDAY_WEIGHTS,
};
pub use schema::{InstanceDoc, ResourceDoc, TypeDoc};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when checking that segments tile the horizon.
const COVER_TOL: f64 = 1e-9;

/// One constant-rate piece of an arrival-rate function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSegment {
    pub t0: f64,
    pub t1: f64,
    pub rate: f64,
}

impl RateSegment {
    pub fn len(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn mass(&self) -> f64 {
        self.rate * self.len()
    }
}

/// Piecewise-constant arrival rate. Segments partition `[0, horizon]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFunction {
    segments: Vec<RateSegment>,
}

impl RateFunction {
    pub fn new(segments: Vec<RateSegment>, horizon: f64) -> Result<Self> {
        validate_segments(&segments, horizon).map_err(|msg| Error::InvalidInstance(format!("rate function: {msg}")))?;
        Ok(RateFunction { segments })
    }

    pub fn constant(rate: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![RateSegment { t0: 0.0, t1: horizon, rate }], horizon)
    }

    /// Rate `rate` on `[start, end]`, zero elsewhere in `[0, horizon]`.
    pub fn pulse(start: f64, end: f64, rate: f64, horizon: f64) -> Result<Self> {
        let mut segments = Vec::with_capacity(3);
        if start > 0.0 {
            segments.push(RateSegment { t0: 0.0, t1: start, rate: 0.0 });
        }
        segments.push(RateSegment { t0: start, t1: end, rate });
        if end < horizon {
            segments.push(RateSegment { t0: end, t1: horizon, rate: 0.0 });
        }
        Self::new(segments, horizon)
    }

    pub fn segments(&self) -> &[RateSegment] {
        &self.segments
    }

    /// Closed-form integral of the rate over the horizon.
    pub fn total(&self) -> f64 {
        self.segments.iter().map(RateSegment::mass).sum()
    }

    pub fn horizon(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.t1)
    }

    pub fn rate_at(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| t >= s.t0 && t < s.t1)
            .or_else(|| self.segments.last().filter(|s| t == s.t1))
            .map_or(0.0, |s| s.rate)
    }
}

fn validate_segments(segments: &[RateSegment], horizon: f64) -> std::result::Result<(), String> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(format!("horizon must be positive and finite, got {horizon}"));
    }
    let tol = COVER_TOL * horizon;
    let Some(first) = segments.first() else {
        return Err("no segments".into());
    };
    if first.t0.abs() > tol {
        return Err(format!("segment 0 starts at {} instead of 0", first.t0));
    }
    let mut prev_end = 0.0;
    for (k, s) in segments.iter().enumerate() {
        if !(s.t0.is_finite() && s.t1.is_finite() && s.rate.is_finite()) {
            return Err(format!("segment {k} has a non-finite field"));
        }
        if s.rate < 0.0 {
            return Err(format!("segment {k} has negative rate {}", s.rate));
        }
        if s.t1 <= s.t0 {
            return Err(format!("segment {k} is empty or reversed ({}, {})", s.t0, s.t1));
        }
        if k > 0 && (s.t0 - prev_end).abs() > tol {
            return Err(format!("segment {k} starts at {} but segment {} ends at {prev_end}", s.t0, k - 1));
        }
        prev_end = s.t1;
    }
    if (prev_end - horizon).abs() > tol {
        return Err(format!("segments end at {prev_end}, horizon is {horizon}"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Resource {
    pub id: usize,
    pub capacity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CustomerType {
    pub id: usize,
    /// Per-resource consumption; zero marks the resource as infeasible.
    pub utilization: Vec<f64>,
    pub rate: RateFunction,
    lambda: f64,
}

impl CustomerType {
    pub fn new(id: usize, utilization: Vec<f64>, rate: RateFunction) -> Self {
        let lambda = rate.total();
        CustomerType { id, utilization, rate, lambda }
    }

    /// Expected number of arrivals over the horizon.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Immutable problem datum `(m, n, c, u, lambda, T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    horizon: f64,
    resources: Vec<Resource>,
    types: Vec<CustomerType>,
    schedule: Option<Schedule>,
}

impl Instance {
    pub fn new(
        horizon: f64,
        resources: Vec<Resource>,
        types: Vec<CustomerType>,
        schedule: Option<Schedule>,
    ) -> Result<Self> {
        let inst = Instance { horizon, resources, types, schedule };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        let m = self.resources.len();
        for (j, r) in self.resources.iter().enumerate() {
            if r.id != j {
                return bad(format!("resources[{j}] has id {}", r.id));
            }
            if !(r.capacity.is_finite() && r.capacity > 0.0) {
                return bad(format!("resources[{j}] capacity {} is not positive", r.capacity));
            }
        }
        for (i, t) in self.types.iter().enumerate() {
            if t.id != i {
                return bad(format!("types[{i}] has id {}", t.id));
            }
            if t.utilization.len() != m {
                return bad(format!("types[{i}] utilization has length {}, expected {m}", t.utilization.len()));
            }
            for (j, &u) in t.utilization.iter().enumerate() {
                let c = self.resources[j].capacity;
                if !u.is_finite() || u < 0.0 || u > c * (1.0 + 1e-12) {
                    return bad(format!("types[{i}].utilization[{j}] = {u} outside [0, {c}]"));
                }
            }
            if let Err(msg) = validate_segments(t.rate.segments(), self.horizon) {
                return bad(format!("types[{i}].rate: {msg}"));
            }
        }
        if let Some(s) = &self.schedule {
            s.validate(m, self.types.len()).or_else(|msg| bad(format!("schedule: {msg}")))?;
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn types(&self) -> &[CustomerType] {
        &self.types
    }

    /// Number of resources.
    pub fn m(&self) -> usize {
        self.resources.len()
    }

    /// Number of customer types.
    pub fn n(&self) -> usize {
        self.types.len()
    }

    #[inline]
    pub fn u(&self, i: usize, j: usize) -> f64 {
        self.types[i].utilization[j]
    }

    #[inline]
    pub fn capacity(&self, j: usize) -> f64 {
        self.resources[j].capacity
    }

    #[inline]
    pub fn lambda(&self, i: usize) -> f64 {
        self.types[i].lambda
    }

    pub fn capacities(&self) -> Vec<f64> {
        self.resources.iter().map(|r| r.capacity).collect()
    }

    /// Resources with positive utilization for type `i`, in index order.
    pub fn feasible_resources(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.types[i].utilization.iter().enumerate().filter(|(_, &u)| u > 0.0).map(|(j, _)| j)
    }

    /// Layered scheduling metadata, present for appointment-scheduling instances.
    pub fn schedule(&self) -> Option<&Schedule> {
        self.schedule.as_ref()
    }

    /// Expected demand mass `sum_i Lambda_i * mean feasible u_i`.
    pub fn expected_demand(&self) -> f64 {
        self.types
            .iter()
            .map(|t| {
                let (sum, cnt) =
                    t.utilization.iter().filter(|&&u| u > 0.0).fold((0.0, 0usize), |(s, c), &u| (s + u, c + 1));
                if cnt == 0 {
                    0.0
                } else {
                    t.lambda * sum / cnt as f64
                }
            })
            .sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.resources.iter().map(|r| r.capacity).sum()
    }
}

/// Two types, one resource: a flood of tiny type-1 requests on `[0, 0.5]`
/// followed by a rare type-2 request for the whole resource on `(0.5, 1]`.
pub fn make_prop1_instance(epsilon: f64, lambda1_total: f64) -> Result<Instance> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(lambda1_total.is_finite() && lambda1_total > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda1_total must be positive, got {lambda1_total}")));
    }
    let horizon = 1.0;
    let type1 = CustomerType::new(
        0,
        vec![epsilon / lambda1_total],
        RateFunction::pulse(0.0, 0.5, 2.0 * lambda1_total, horizon)?,
    );
    let type2 = CustomerType::new(1, vec![1.0], RateFunction::pulse(0.5, 1.0, 2.0 * epsilon, horizon)?);
    Instance::new(horizon, vec![Resource { id: 0, capacity: 1.0 }], vec![type1, type2], None)
}

/// The instance on which LS attains exactly `(1 - 1/e)/2` as `epsilon -> 0`.
///
/// Resource 0 pays full utilization, every other resource pays a factor
/// `1 - epsilon` less, so the LP piles everything onto resource 0.
pub fn make_ls_tightness_instance(epsilon: f64, m: usize) -> Result<Instance> {
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 0.1), got {epsilon}")));
    }
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 resources, got {m}")));
    }
    let horizon = 1.0;
    let row = |base: f64| -> Vec<f64> { (0..m).map(|j| if j == 0 { base } else { base * (1.0 - epsilon) }).collect() };
    let big = 0.5 + epsilon;
    let types = vec![
        CustomerType::new(0, row(0.1), RateFunction::constant(5.0, horizon)?),
        CustomerType::new(1, row(big), RateFunction::constant(0.5 / big, horizon)?),
    ];
    let resources = (0..m).map(|id| Resource { id, capacity: 1.0 }).collect();
    Instance::new(horizon, resources, types, None)
}

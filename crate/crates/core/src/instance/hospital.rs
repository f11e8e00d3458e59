//! Appointment-scheduling instances.
//!
//! Every `(day, session)` pair is a resource whose capacity is the session
//! length in minutes. A patient type is an `(arrival day, category)` pair.
//! Urgent categories can only be booked on their arrival day; regular ones
//! on any day up to `deadline_days` later. All arrivals of a day fall inside
//! that day's unit interval, so the horizon is `days` time units.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::{CustomerType, Instance, RateFunction, Resource};
use crate::error::{Error, Result};

/// Percentages of urgent 15/30/45 and regular 15/30/45 minute patients as
/// usually quoted. They are rounded and add up to 96.
pub const CATEGORY_PERCENTAGES: [f64; 6] = [27.0, 1.0, 0.0, 45.0, 14.0, 9.0];

/// [`CATEGORY_PERCENTAGES`] normalized to a probability vector.
pub const DEFAULT_CATEGORY_MIX: [f64; 6] = {
    let p = CATEGORY_PERCENTAGES;
    let total = p[0] + p[1] + p[2] + p[3] + p[4] + p[5];
    [p[0] / total, p[1] / total, p[2] / total, p[3] / total, p[4] / total, p[5] / total]
};

/// Relative arrival volume Monday..Friday.
pub const DEFAULT_WEEKDAY_WEIGHTS: [f64; 5] = [1.00, 0.95, 0.80, 1.28, 0.97];

const RANDOM_SETTING_DAYS: usize = 50;
const RANDOM_SETTING_SESSIONS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Urgent15,
    Urgent30,
    Urgent45,
    Regular15,
    Regular30,
    Regular45,
}

impl Category {
    /// In priority order: urgent before regular, shorter before longer.
    pub const ALL: [Category; 6] = [
        Category::Urgent15,
        Category::Urgent30,
        Category::Urgent45,
        Category::Regular15,
        Category::Regular30,
        Category::Regular45,
    ];

    pub fn minutes(self) -> f64 {
        match self {
            Category::Urgent15 | Category::Regular15 => 15.0,
            Category::Urgent30 | Category::Regular30 => 30.0,
            Category::Urgent45 | Category::Regular45 => 45.0,
        }
    }

    pub fn is_urgent(self) -> bool {
        matches!(self, Category::Urgent15 | Category::Urgent30 | Category::Urgent45)
    }

    /// Position in [`Category::ALL`]; 0 is the highest priority.
    pub fn priority(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatientClass {
    pub arrival_day: usize,
    pub category: Category,
}

/// Layered structure of a scheduling instance: which day each session
/// belongs to and which `(day, category)` each type encodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub days: usize,
    pub deadline_days: usize,
    pub resource_day: Vec<usize>,
    pub patients: Vec<PatientClass>,
}

impl Schedule {
    pub(super) fn validate(&self, m: usize, n: usize) -> std::result::Result<(), String> {
        if self.resource_day.len() != m {
            return Err(format!("resource_day has {} entries, expected {m}", self.resource_day.len()));
        }
        if self.patients.len() != n {
            return Err(format!("patients has {} entries, expected {n}", self.patients.len()));
        }
        if let Some(j) = self.resource_day.iter().position(|&d| d >= self.days) {
            return Err(format!("resource_day[{j}] beyond {} days", self.days));
        }
        if let Some(i) = self.patients.iter().position(|p| p.arrival_day >= self.days) {
            return Err(format!("patients[{i}].arrival_day beyond {} days", self.days));
        }
        Ok(())
    }

    /// Last day on which a patient of this class may be booked.
    pub fn last_day(&self, class: &PatientClass) -> usize {
        if class.category.is_urgent() {
            class.arrival_day
        } else {
            (class.arrival_day + self.deadline_days).min(self.days - 1)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalPattern {
    /// Every category arrives every weekday, weighted by the weekday weights.
    Weekly,
    /// Regular patients arrive only on Mondays, urgent ones only Tuesday..Friday.
    MondayRegulars,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HospitalConfig {
    pub days: usize,
    pub sessions_per_day: usize,
    pub session_minutes: f64,
    pub deadline_days: usize,
    /// Total capacity divided by total expected demand minutes.
    pub scale: f64,
    pub category_mix: [f64; 6],
    pub weekday_weights: [f64; 5],
    pub pattern: ArrivalPattern,
}

impl Default for HospitalConfig {
    fn default() -> Self {
        HospitalConfig {
            days: 50,
            sessions_per_day: 8,
            session_minutes: 60.0,
            deadline_days: 20,
            scale: 1.0,
            category_mix: DEFAULT_CATEGORY_MIX,
            weekday_weights: DEFAULT_WEEKDAY_WEIGHTS,
            pattern: ArrivalPattern::Weekly,
        }
    }
}

impl HospitalConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.days == 0 || self.sessions_per_day == 0 {
            return bad("days and sessions_per_day must be positive".into());
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return bad(format!("scale must be positive, got {}", self.scale));
        }
        if let Some(k) = self.category_mix.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return bad(format!("category_mix[{k}] = {} is negative", self.category_mix[k]));
        }
        let total: f64 = self.category_mix.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(format!("category_mix sums to {total}, expected 1"));
        }
        if let Some(k) = self.weekday_weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return bad(format!("weekday_weights[{k}] is negative"));
        }
        for (k, cat) in Category::ALL.iter().enumerate() {
            if self.category_mix[k] > 0.0 && cat.minutes() > self.session_minutes {
                return bad(format!(
                    "{:?} appointments ({} min) do not fit a {} min session",
                    cat,
                    cat.minutes(),
                    self.session_minutes
                ));
            }
        }
        Ok(())
    }

    fn arrives_on(&self, day: usize, cat: Category) -> bool {
        match self.pattern {
            ArrivalPattern::Weekly => true,
            ArrivalPattern::MondayRegulars => day.is_multiple_of(5) != cat.is_urgent(),
        }
    }
}

/// Builds a scheduling instance whose expected demand minutes equal
/// `total capacity / scale`.
pub fn make_hospital_scenario(cfg: &HospitalConfig) -> Result<Instance> {
    cfg.validate()?;
    let days = cfg.days;
    let per_day = cfg.sessions_per_day;
    let m = days * per_day;
    let resources: Vec<Resource> = (0..m).map(|id| Resource { id, capacity: cfg.session_minutes }).collect();
    let resource_day: Vec<usize> = (0..m).map(|j| j / per_day).collect();

    let total_capacity = m as f64 * cfg.session_minutes;
    let mean_minutes: f64 = Category::ALL.iter().zip(cfg.category_mix).map(|(c, p)| c.minutes() * p).sum();
    let total_patients = total_capacity / cfg.scale / mean_minutes;
    let weight = |d: usize| cfg.weekday_weights[d % 5];

    let mut types = Vec::new();
    let mut patients = Vec::new();
    for (k, &cat) in Category::ALL.iter().enumerate() {
        let share = cfg.category_mix[k];
        if share == 0.0 {
            continue;
        }
        let norm: f64 = (0..days).filter(|&d| cfg.arrives_on(d, cat)).map(weight).sum();
        if norm <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "{cat:?} has positive share but no arrival days in a {days}-day horizon"
            )));
        }
        for day in 0..days {
            if !cfg.arrives_on(day, cat) {
                continue;
            }
            let lambda = total_patients * share * weight(day) / norm;
            if lambda <= 0.0 {
                continue;
            }
            patients.push(PatientClass { arrival_day: day, category: cat });
            types.push((day, cat, lambda));
        }
    }
    // Order types by arrival day, then priority, so type ids read chronologically.
    let mut order: Vec<usize> = (0..types.len()).collect();
    order.sort_by_key(|&t| (types[t].0, types[t].1));

    let schedule_stub = Schedule { days, deadline_days: cfg.deadline_days, resource_day, patients: vec![] };
    let mut out_types = Vec::with_capacity(types.len());
    let mut out_patients = Vec::with_capacity(types.len());
    for (id, &t) in order.iter().enumerate() {
        let (day, cat, lambda) = types[t];
        let class = PatientClass { arrival_day: day, category: cat };
        let last = schedule_stub.last_day(&class);
        let mut utilization = vec![0.0; m];
        for d in day..=last {
            for s in 0..per_day {
                utilization[d * per_day + s] = cat.minutes();
            }
        }
        let rate = RateFunction::pulse(day as f64, (day + 1) as f64, lambda, days as f64)?;
        out_types.push(CustomerType::new(id, utilization, rate));
        out_patients.push(class);
    }
    let schedule = Schedule { patients: out_patients, ..schedule_stub };
    Instance::new(days as f64, resources, out_types, Some(schedule))
}

/// Parameters of one randomized setting: a uniform point on the category
/// simplex, a deadline in 5..=30 days, session length in [45, 150] minutes
/// and scale in [0.7, 1.3].
pub fn random_setting_config(seed: u64) -> HospitalConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mix = [0.0; 6];
    for p in mix.iter_mut() {
        *p = Exp1.sample(&mut rng);
    }
    let total: f64 = mix.iter().sum();
    mix.iter_mut().for_each(|p| *p /= total);
    // re-normalize so the sum is 1 to the last bit the validator cares about
    let drift = 1.0 - mix.iter().sum::<f64>();
    mix[0] += drift;
    HospitalConfig {
        days: RANDOM_SETTING_DAYS,
        sessions_per_day: RANDOM_SETTING_SESSIONS,
        session_minutes: rng.random_range(45.0..=150.0),
        deadline_days: rng.random_range(5..=30),
        scale: rng.random_range(0.7..=1.3),
        category_mix: mix,
        weekday_weights: DEFAULT_WEEKDAY_WEIGHTS,
        pattern: ArrivalPattern::Weekly,
    }
}

pub fn make_random_setting(seed: u64) -> Result<Instance> {
    make_hospital_scenario(&random_setting_config(seed))
}

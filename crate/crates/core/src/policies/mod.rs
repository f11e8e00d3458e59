//! Online policies.
//!
//! A [`Policy`] is prepared once per `(instance, routing)` pair and is then
//! shared read-only by every replicate; each replicate owns a
//! [`PolicyState`]. [`Policy::decide`] sees one arrival and returns an
//! irrevocable [`Decision`]. Remaining capacity is debited by the simulation
//! loop, policy-specific bookkeeping (dual prices, reservation tranches) by
//! the policy itself.
//!
//! | name   | rule |
//! |--------|------|
//! | `ls`   | route by `x*/Lambda`, admit only the reserved set (large or small) |
//! | `mls`  | as `ls`, reserved set chosen by the largest MLS ratio, may pool all types |
//! | `rls`  | route by `x*/Lambda`, admissibility by resource type A/B, then share |
//! | `grd`  | earliest feasible session with room |
//! | `rsrv` | nested per-category capacity tranches sized from LP loads |
//! | `pd`   | primal-dual with exponential bid prices |

mod classify;

pub use classify::{classify_types, ResourceLoads, SizeClass, TypeClassification, Variant};

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;

use crate::constants::{self, MlsChoice, RlsConstants, SERIES_TOL};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::FractionalRouting;

/// Absolute slack on capacity comparisons, relative to the resource's capacity.
pub const CAPACITY_EPS: f64 = 1e-9;

#[inline]
pub fn fits(remaining: f64, u: f64, capacity: f64) -> bool {
    remaining + CAPACITY_EPS * capacity >= u
}

fn default_rls() -> RlsConstants {
    static CONSTANTS: OnceLock<RlsConstants> = OnceLock::new();
    *CONSTANTS.get_or_init(constants::default_rls_constants)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolicySpec {
    Ls,
    Mls { d: u32 },
    Rls { r_star: f64, z_star: f64 },
    Grd,
    Rsrv,
    Pd,
}

impl PolicySpec {
    pub fn rls() -> Self {
        let c = default_rls();
        PolicySpec::Rls { r_star: c.r_star, z_star: c.z_star }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::Ls => "ls",
            PolicySpec::Mls { .. } => "mls",
            PolicySpec::Rls { .. } => "rls",
            PolicySpec::Grd => "grd",
            PolicySpec::Rsrv => "rsrv",
            PolicySpec::Pd => "pd",
        }
    }

    /// Parses a policy name; `d` parameterizes `mls` (default 2).
    pub fn parse(name: &str, d: Option<u32>) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "ls" => PolicySpec::Ls,
            "mls" => PolicySpec::Mls { d: d.unwrap_or(2) },
            "rls" => PolicySpec::rls(),
            "grd" => PolicySpec::Grd,
            "rsrv" => PolicySpec::Rsrv,
            "pd" => PolicySpec::Pd,
            _ => return Err(Error::UnknownPolicy(name.to_string())),
        })
    }
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicySpec::parse(s, None)
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Mls { d } => write!(f, "mls(d={d})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Accept(usize),
    Reject,
}

/// Samples a candidate resource for type `i` with probability `x*_ij / Lambda_i`.
/// Residual mass `1 - sum_j x*_ij / Lambda_i` means no candidate.
#[derive(Clone, Debug)]
pub struct Router {
    /// Per type: `(resource, cumulative probability)`.
    cumulative: Vec<Vec<(usize, f64)>>,
}

impl Router {
    pub fn new(inst: &Instance, routing: &FractionalRouting) -> Self {
        let cumulative = (0..inst.n())
            .map(|i| {
                let lambda = inst.lambda(i);
                let mut acc = 0.0;
                let mut cum = Vec::new();
                if lambda > 0.0 {
                    for (j, &x) in routing.row(i).iter().enumerate() {
                        if x > 0.0 {
                            acc += x / lambda;
                            cum.push((j, acc.min(1.0)));
                        }
                    }
                }
                cum
            })
            .collect();
        Router { cumulative }
    }

    pub fn probability(&self, i: usize, j: usize) -> f64 {
        let cum = &self.cumulative[i];
        match cum.iter().position(|&(r, _)| r == j) {
            Some(0) => cum[0].1,
            Some(k) => cum[k].1 - cum[k - 1].1,
            None => 0.0,
        }
    }

    pub fn route<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Option<usize> {
        let cum = &self.cumulative[i];
        if cum.is_empty() {
            return None;
        }
        let draw: f64 = rng.random();
        let k = cum.partition_point(|&(_, c)| c <= draw);
        cum.get(k).map(|&(j, _)| j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reservation {
    Large,
    Small,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResourceKind {
    /// Admits every feasible type.
    TypeA,
    /// Admits only large and medium types.
    TypeB,
}

#[derive(Clone, Debug)]
enum Kind {
    /// LS and MLS: admission matrix fixed at setup.
    Reserve {
        router: Router,
        reservation: Vec<Reservation>,
        admit: Vec<bool>,
    },
    Rls {
        router: Router,
        kinds: Vec<ResourceKind>,
        admit: Vec<bool>,
        admissible: Vec<Vec<usize>>,
    },
    Grd,
    Rsrv {
        category: Vec<usize>,
        categories: usize,
        tranches: Vec<f64>,
    },
    Pd {
        growth: f64,
    },
}

/// A policy prepared for one instance and LP solution.
#[derive(Clone, Debug)]
pub struct Policy {
    spec: PolicySpec,
    m: usize,
    /// Feasible resources of each type, earliest session first.
    order: Vec<Vec<usize>>,
    kind: Kind,
    classification: Option<TypeClassification>,
}

/// Per-replicate mutable state.
#[derive(Clone, Debug)]
pub struct PolicyState {
    pub remaining: Vec<f64>,
    scratch: Scratch,
}

#[derive(Clone, Debug)]
enum Scratch {
    None,
    Duals(Vec<f64>),
    /// `m x categories`, row-major.
    Tranches(Vec<f64>),
}

impl PolicyState {
    pub fn duals(&self) -> Option<&[f64]> {
        match &self.scratch {
            Scratch::Duals(d) => Some(d),
            _ => None,
        }
    }

    pub fn duals_mut(&mut self) -> Option<&mut [f64]> {
        match &mut self.scratch {
            Scratch::Duals(d) => Some(d),
            _ => None,
        }
    }
}

/// Resource visiting order: by session day when known, else by index.
fn session_order(inst: &Instance) -> Vec<Vec<usize>> {
    (0..inst.n())
        .map(|i| {
            let mut js: Vec<usize> = inst.feasible_resources(i).collect();
            if let Some(s) = inst.schedule() {
                js.sort_by_key(|&j| (s.resource_day[j], j));
            }
            js
        })
        .collect()
}

impl Policy {
    pub fn prepare(inst: &Instance, routing: &FractionalRouting, spec: PolicySpec) -> Result<Policy> {
        routing.check_dimensions(inst)?;
        let (n, m) = (inst.n(), inst.m());
        let order = session_order(inst);
        let mut classification = None;
        let kind = match spec {
            PolicySpec::Ls | PolicySpec::Mls { .. } => {
                let variant = match spec {
                    PolicySpec::Mls { d } => Variant::Mls { d },
                    _ => Variant::Ls,
                };
                let cls = classify_types(inst, routing, variant)?;
                let reservation: Vec<Reservation> =
                    (0..m).map(|j| reservation_for(&cls, j, inst.capacity(j))).collect::<Result<_>>()?;
                let mut admit = vec![false; n * m];
                for i in 0..n {
                    for j in 0..m {
                        admit[i * m + j] = match (reservation[j], cls.class(i, j)) {
                            (_, SizeClass::Infeasible) => false,
                            (Reservation::All, _) => true,
                            (Reservation::Large, c) => c.is_large(),
                            (Reservation::Small, c) => c.is_small(),
                        };
                    }
                }
                classification = Some(cls);
                Kind::Reserve { router: Router::new(inst, routing), reservation, admit }
            }
            PolicySpec::Rls { r_star, z_star } => {
                let cls = classify_types(inst, routing, Variant::Rls { z_star })?;
                let kinds: Vec<ResourceKind> = (0..m)
                    .map(|j| resource_kind(&cls.loads[j], inst.capacity(j), r_star, z_star))
                    .collect::<Result<_>>()?;
                let mut admit = vec![false; n * m];
                for i in 0..n {
                    for j in 0..m {
                        let c = cls.class(i, j);
                        admit[i * m + j] = c != SizeClass::Infeasible
                            && (kinds[j] == ResourceKind::TypeA || c.is_large() || c.is_medium());
                    }
                }
                let admissible = order
                    .iter()
                    .enumerate()
                    .map(|(i, js)| js.iter().copied().filter(|&j| admit[i * m + j]).collect())
                    .collect();
                classification = Some(cls);
                Kind::Rls { router: Router::new(inst, routing), kinds, admit, admissible }
            }
            PolicySpec::Grd => Kind::Grd,
            PolicySpec::Rsrv => {
                let (category, categories): (Vec<usize>, usize) = match inst.schedule() {
                    Some(s) => (s.patients.iter().map(|p| p.category.priority()).collect(), 6),
                    None => ((0..n).collect(), n.max(1)),
                };
                let mut tranches = vec![0.0; m * categories];
                for i in 0..n {
                    for j in 0..m {
                        tranches[j * categories + category[i]] += routing.x(i, j) * inst.u(i, j);
                    }
                }
                for j in 0..m {
                    let row = &mut tranches[j * categories..(j + 1) * categories];
                    let total: f64 = row.iter().sum();
                    let c = inst.capacity(j);
                    if total > 0.0 {
                        row.iter_mut().for_each(|t| *t *= c / total);
                    } else {
                        // unused by the LP: open to everyone through the lowest tranche
                        row[categories - 1] = c;
                    }
                }
                Kind::Rsrv { category, categories, tranches }
            }
            PolicySpec::Pd => {
                let mut r_max: f64 = 0.0;
                for i in 0..n {
                    for j in 0..m {
                        r_max = r_max.max(inst.u(i, j) / inst.capacity(j));
                    }
                }
                let growth = if r_max > 0.0 { (1.0 + r_max).powf(1.0 / r_max) } else { std::f64::consts::E };
                Kind::Pd { growth }
            }
        };
        Ok(Policy { spec, m, order, kind, classification })
    }

    pub fn spec(&self) -> PolicySpec {
        self.spec
    }

    pub fn classification(&self) -> Option<&TypeClassification> {
        self.classification.as_ref()
    }

    pub fn router(&self) -> Option<&Router> {
        match &self.kind {
            Kind::Reserve { router, .. } | Kind::Rls { router, .. } => Some(router),
            _ => None,
        }
    }

    /// LS/MLS reserved set of resource `j`.
    pub fn reservation(&self, j: usize) -> Option<Reservation> {
        match &self.kind {
            Kind::Reserve { reservation, .. } => Some(reservation[j]),
            _ => None,
        }
    }

    /// RLS type of resource `j`.
    pub fn resource_kind(&self, j: usize) -> Option<ResourceKind> {
        match &self.kind {
            Kind::Rls { kinds, .. } => Some(kinds[j]),
            _ => None,
        }
    }

    /// Whether a type-`i` customer may use resource `j` under this policy's
    /// static admission rule (LS/MLS reservation, RLS admissibility).
    pub fn admits(&self, i: usize, j: usize) -> Option<bool> {
        match &self.kind {
            Kind::Reserve { admit, .. } | Kind::Rls { admit, .. } => Some(admit[i * self.m + j]),
            _ => None,
        }
    }

    pub fn new_state(&self, inst: &Instance) -> PolicyState {
        let scratch = match &self.kind {
            Kind::Pd { .. } => Scratch::Duals(vec![0.0; self.m]),
            Kind::Rsrv { tranches, .. } => Scratch::Tranches(tranches.clone()),
            _ => Scratch::None,
        };
        PolicyState { remaining: inst.capacities(), scratch }
    }

    /// Decides on one type-`i` arrival. Does not debit `state.remaining`.
    pub fn decide<R: Rng + ?Sized>(&self, inst: &Instance, state: &mut PolicyState, i: usize, rng: &mut R) -> Decision {
        let m = self.m;
        let room = |state: &PolicyState, j: usize| fits(state.remaining[j], inst.u(i, j), inst.capacity(j));
        match &self.kind {
            Kind::Reserve { router, admit, .. } => match router.route(i, rng) {
                Some(j) if admit[i * m + j] && room(state, j) => Decision::Accept(j),
                _ => Decision::Reject,
            },
            Kind::Rls { router, admit, admissible, .. } => {
                let Some(j) = router.route(i, rng) else {
                    return Decision::Reject;
                };
                if admit[i * m + j] && room(state, j) {
                    return Decision::Accept(j);
                }
                // share: admissible resource with the most room left, lowest index on ties
                let mut best: Option<usize> = None;
                for &k in &admissible[i] {
                    if k != j && room(state, k) && best.is_none_or(|b| state.remaining[k] > state.remaining[b]) {
                        best = Some(k);
                    }
                }
                best.map_or(Decision::Reject, Decision::Accept)
            }
            Kind::Grd => {
                self.order[i].iter().copied().find(|&j| room(state, j)).map_or(Decision::Reject, Decision::Accept)
            }
            Kind::Rsrv { category, categories, .. } => {
                let k = category[i];
                let kc = *categories;
                let Scratch::Tranches(tr) = &mut state.scratch else { unreachable!("rsrv state carries tranches") };
                for &j in &self.order[i] {
                    let u = inst.u(i, j);
                    let c = inst.capacity(j);
                    let row = &mut tr[j * kc..(j + 1) * kc];
                    let avail: f64 = row[k..].iter().sum();
                    if !fits(avail, u, c) || !fits(state.remaining[j], u, c) {
                        continue;
                    }
                    let mut need = u;
                    for t in row[k..].iter_mut() {
                        let take = t.min(need);
                        *t -= take;
                        need -= take;
                        if need <= 0.0 {
                            break;
                        }
                    }
                    return Decision::Accept(j);
                }
                Decision::Reject
            }
            Kind::Pd { growth } => {
                let Scratch::Duals(duals) = &mut state.scratch else { unreachable!("pd state carries duals") };
                let mut best: Option<(usize, f64)> = None;
                for &j in &self.order[i] {
                    let u = inst.u(i, j);
                    let gain = u * (1.0 - duals[j]);
                    if gain > 0.0 && fits(state.remaining[j], u, inst.capacity(j)) && best.is_none_or(|(_, g)| gain > g)
                    {
                        best = Some((j, gain));
                    }
                }
                match best {
                    Some((j, _)) => {
                        let u = inst.u(i, j);
                        let c = inst.capacity(j);
                        duals[j] = duals[j] * (1.0 + u / c) + u / ((growth - 1.0) * c);
                        Decision::Accept(j)
                    }
                    None => Decision::Reject,
                }
            }
        }
    }
}

fn reservation_for(cls: &TypeClassification, j: usize, capacity: f64) -> Result<Reservation> {
    let l = &cls.loads[j];
    Ok(match cls.variant {
        Variant::Mls { d } => match constants::mls_ratios(d, l.large, l.small, l.total, capacity, SERIES_TOL)?.choice()
        {
            MlsChoice::Large => Reservation::Large,
            MlsChoice::Small => Reservation::Small,
            MlsChoice::All => Reservation::All,
        },
        _ => {
            if l.large >= l.small {
                Reservation::Large
            } else {
                Reservation::Small
            }
        }
    })
}

/// Type-A test: `U^S >= -c/2 ln(1 - 2 r* U/c)` or
/// `U^T >= -(1-z*) c ln(1 - r* U / (c (1-z*)))`.
pub fn resource_kind(loads: &ResourceLoads, capacity: f64, r_star: f64, z_star: f64) -> Result<ResourceKind> {
    let rho = (loads.total / capacity).min(1.0);
    let arg_small = 1.0 - 2.0 * r_star * rho;
    let arg_tiny = 1.0 - r_star * rho / (1.0 - z_star);
    if !(arg_small > 0.0 && arg_tiny > 0.0) {
        return Err(Error::Domain(format!(
            "type-A thresholds undefined for r* = {r_star}, z* = {z_star}, U/c = {rho}"
        )));
    }
    let small_cut = -0.5 * capacity * arg_small.ln();
    let tiny_cut = -(1.0 - z_star) * capacity * arg_tiny.ln();
    Ok(if loads.small >= small_cut || loads.tiny >= tiny_cut { ResourceKind::TypeA } else { ResourceKind::TypeB })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{make_ls_tightness_instance, CustomerType, RateFunction, Resource};
    use crate::lp::solve_routing_lp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inst_from(us: &[&[f64]], lambdas: &[f64], caps: &[f64]) -> (Instance, FractionalRouting) {
        let resources = caps.iter().enumerate().map(|(id, &capacity)| Resource { id, capacity }).collect();
        let types = us
            .iter()
            .zip(lambdas)
            .enumerate()
            .map(|(i, (u, &l))| CustomerType::new(i, u.to_vec(), RateFunction::constant(l, 1.0).unwrap()))
            .collect();
        let inst = Instance::new(1.0, resources, types, None).unwrap();
        let r = solve_routing_lp(&inst).unwrap();
        (inst, r)
    }

    #[test]
    fn parse_names() {
        assert_eq!("LS".parse::<PolicySpec>().unwrap(), PolicySpec::Ls);
        assert_eq!(PolicySpec::parse("mls", Some(3)).unwrap(), PolicySpec::Mls { d: 3 });
        assert!(matches!(PolicySpec::parse("rls", None).unwrap(), PolicySpec::Rls { .. }));
        assert!(matches!("nope".parse::<PolicySpec>(), Err(Error::UnknownPolicy(_))));
    }

    #[test]
    fn ls_tie_reserves_large() {
        // tightness instance: U^L = U^S = 0.5 on resource 0
        let inst = make_ls_tightness_instance(0.01, 10).unwrap();
        let r = solve_routing_lp(&inst).unwrap();
        let p = Policy::prepare(&inst, &r, PolicySpec::Ls).unwrap();
        let l = p.classification().unwrap().loads[0];
        assert!((l.large - l.small).abs() < 1e-9);
        assert_eq!(p.reservation(0), Some(Reservation::Large));
        assert_eq!(p.admits(1, 0), Some(true));
        assert_eq!(p.admits(0, 0), Some(false));
    }

    #[test]
    fn ls_rejects_without_capacity() {
        let (inst, r) = inst_from(&[&[0.6]], &[0.5], &[1.0]);
        let p = Policy::prepare(&inst, &r, PolicySpec::Ls).unwrap();
        let mut st = p.new_state(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(p.decide(&inst, &mut st, 0, &mut rng), Decision::Accept(0));
        st.remaining[0] = 0.3;
        assert_eq!(p.decide(&inst, &mut st, 0, &mut rng), Decision::Reject);
    }

    #[test]
    fn mls_reservation_choices() {
        // one resource, c = 1, d = 2: large types 0.4 (> 1/3), small 0.2
        let (inst, r) = inst_from(&[&[0.4], &[0.2]], &[2.0, 1.0], &[1.0]);
        let p = Policy::prepare(&inst, &r, PolicySpec::Mls { d: 2 }).unwrap();
        let l = p.classification().unwrap().loads[0];
        assert!((l.large - 0.8).abs() < 1e-9 && (l.small - 0.2).abs() < 1e-9);
        assert_eq!(p.reservation(0), Some(Reservation::Large));

        let (inst, r) = inst_from(&[&[0.4], &[0.2]], &[1.25, 2.5], &[1.0]);
        let p = Policy::prepare(&inst, &r, PolicySpec::Mls { d: 2 }).unwrap();
        assert_eq!(p.reservation(0), Some(Reservation::All));

        let (inst, r) = inst_from(&[&[0.6]], &[1.0], &[1.0]);
        assert!(matches!(Policy::prepare(&inst, &r, PolicySpec::Mls { d: 2 }), Err(Error::MlsPrecondition { .. })));
    }

    #[test]
    fn rls_type_b_rejects_tiny_but_takes_medium() {
        // resource dominated by large demand -> type B
        let (inst, r) = inst_from(&[&[0.9], &[0.1], &[0.45]], &[1.0, 0.05, 0.05], &[1.0]);
        let p = Policy::prepare(&inst, &r, PolicySpec::Rls { r_star: 0.3208, z_star: 0.42 }).unwrap();
        assert_eq!(p.resource_kind(0), Some(ResourceKind::TypeB));
        let mut st = p.new_state(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // type 1 (u = 0.1 < z* c) is inadmissible even though capacity is free
        for _ in 0..50 {
            assert_eq!(p.decide(&inst, &mut st, 1, &mut rng), Decision::Reject);
        }
        assert_eq!(p.admits(2, 0), Some(true));
    }

    #[test]
    fn rls_type_a_threshold() {
        let loads = ResourceLoads { total: 1.0, small: 0.5, tiny: 0.5, ..Default::default() };
        let (r, z): (f64, f64) = (0.3208, 0.4209);
        let cut = -0.5 * (1.0 - 2.0 * r).ln();
        assert!(cut < 0.55);
        assert_eq!(resource_kind(&loads, 1.0, r, z).unwrap(), ResourceKind::TypeA);
        let loads = ResourceLoads { total: 1.0, large: 0.9, small: 0.1, tiny: 0.1, ..Default::default() };
        assert_eq!(resource_kind(&loads, 1.0, r, z).unwrap(), ResourceKind::TypeB);
        assert!(resource_kind(&loads, 1.0, 0.6, z).is_err());
    }

    #[test]
    fn rls_shares_to_roomiest_admissible_resource() {
        // two resources, both type A (only small types), routed to 0
        let (inst, r) = inst_from(&[&[0.3, 0.3]], &[2.0], &[1.0, 1.0]);
        let p = Policy::prepare(&inst, &r, PolicySpec::Rls { r_star: 0.3208, z_star: 0.4209 }).unwrap();
        let mut st = p.new_state(&inst);
        st.remaining = vec![0.1, 0.1];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(p.decide(&inst, &mut st, 0, &mut rng), Decision::Reject);
        st.remaining = vec![0.1, 0.5];
        // whichever resource it is routed to, it lands on resource 1
        for _ in 0..20 {
            let d = p.decide(&inst, &mut st, 0, &mut rng);
            assert!(d == Decision::Accept(1) || d == Decision::Reject, "{d:?}");
        }
    }

    #[test]
    fn grd_prefers_earliest_and_rejects_when_full() {
        let (inst, r) = inst_from(&[&[0.5, 0.5]], &[1.0], &[1.0, 1.0]);
        let p = Policy::prepare(&inst, &r, PolicySpec::Grd).unwrap();
        let mut st = p.new_state(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(p.decide(&inst, &mut st, 0, &mut rng), Decision::Accept(0));
        st.remaining = vec![0.2, 1.0];
        assert_eq!(p.decide(&inst, &mut st, 0, &mut rng), Decision::Accept(1));
        st.remaining = vec![0.2, 0.2];
        assert_eq!(p.decide(&inst, &mut st, 0, &mut rng), Decision::Reject);
    }

    #[test]
    fn pd_updates_duals_and_stops_at_unit_price() {
        let (inst, r) = inst_from(&[&[0.25]], &[1.0], &[1.0]);
        let p = Policy::prepare(&inst, &r, PolicySpec::Pd).unwrap();
        let mut st = p.new_state(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(p.decide(&inst, &mut st, 0, &mut rng), Decision::Accept(0));
        let growth = 1.25f64.powf(4.0);
        let expected = 0.25 / (growth - 1.0);
        assert!((st.duals().unwrap()[0] - expected).abs() < 1e-12);
        st.duals_mut().unwrap()[0] = 1.0;
        assert_eq!(p.decide(&inst, &mut st, 0, &mut rng), Decision::Reject);
    }

    #[test]
    fn router_matches_lp_fractions() {
        let (inst, r) = inst_from(&[&[0.5, 0.5]], &[3.0], &[1.0, 0.5]);
        let router = Router::new(&inst, &r);
        // x = (2, 1) out of Lambda = 3
        assert!((router.probability(0, 0) - 2.0 / 3.0).abs() < 1e-9);
        assert!((router.probability(0, 1) - 1.0 / 3.0).abs() < 1e-9);
    }
}

//! Analytic constants and closed-form bounds behind the three online
//! algorithms.
//!
//! * [`ls_ratio`]: the `(1 - 1/e)/2` guarantee of the large-or-small policy.
//! * [`mls_ratios`]: per-resource guarantees of the three reservation options
//!   when every utilization is at most `c/d`.
//! * [`h`] and [`solve_rls_constants`]: the fixed point `r*` and split
//!   threshold `z*` of the refined policy.
//! * [`compound_poisson_tail_bound`]: lower bound on `E[min(S, 1 - beta)]`
//!   for a compound Poisson sum `S` of `[0, beta]`-valued jumps.

use std::f64::consts::E;

use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};

/// Poisson series are cut once the remaining tail mass falls below this.
pub const SERIES_TOL: f64 = 1e-12;

const BISECTION_CAP: usize = 200;
const GOLDEN_CAP: usize = 200;
const SCAN_POINTS: usize = 256;

/// `(1 - 1/e) / 2`.
pub fn ls_ratio() -> f64 {
    0.5 * (1.0 - 1.0 / E)
}

/// `h(z, r) = z - [z - (1 - e^{-2}/(1-2r))/2] (1-2r) ((1-z)/(1-z-r))^{2(1-z)}`.
pub fn h(z: f64, r: f64) -> Result<f64> {
    if !z.is_finite() || !r.is_finite() || r >= 0.5 || z + r >= 1.0 {
        return Err(Error::Domain(format!("h(z, r) needs r < 0.5 and z + r < 1, got z = {z}, r = {r}")));
    }
    Ok(h_unchecked(z, r))
}

#[inline]
fn h_unchecked(z: f64, r: f64) -> f64 {
    let one_m_2r = 1.0 - 2.0 * r;
    let bracket = z - 0.5 * (1.0 - 1.0 / (one_m_2r * E * E));
    let base = (1.0 - z) / (1.0 - z - r);
    z - bracket * one_m_2r * base.powf(2.0 * (1.0 - z))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RlsConstants {
    /// Competitive ratio of the refined policy.
    pub r_star: f64,
    /// Threshold splitting small types into medium (`u >= z* c`) and tiny.
    pub z_star: f64,
    pub h_at_opt: f64,
}

/// `(argmax, max)` of `h(., r)` over `(0, 0.5)`: a coarse scan picks the
/// bracket, golden-section refines it.
pub fn maximize_h(r: f64, tolerance: f64) -> Result<(f64, f64)> {
    let lo = 1e-9;
    let hi = 0.5 - 1e-9;
    h(lo, r)?;
    let step = (hi - lo) / SCAN_POINTS as f64;
    let (best_k, _) = (0..=SCAN_POINTS)
        .map(|k| (k, h_unchecked(lo + step * k as f64, r)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let mut a = (lo + step * (best_k as f64 - 1.0)).max(lo);
    let mut b = (lo + step * (best_k as f64 + 1.0)).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (h_unchecked(c, r), h_unchecked(d, r));
    let mut iter = 0;
    while b - a > tolerance.min(1e-10) {
        if iter >= GOLDEN_CAP {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = h_unchecked(c, r);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = h_unchecked(d, r);
        }
        iter += 1;
    }
    let z = 0.5 * (a + b);
    let value = h_unchecked(z, r);
    if !value.is_finite() {
        return Err(Error::Numerical(format!("maximizer search at r = {r} left the domain")));
    }
    // an interior maximum must beat both ends of the bracket it came from
    if best_k > 0 && best_k < SCAN_POINTS && value + 1e-12 < h_unchecked(lo + step * best_k as f64, r) {
        return Err(Error::Numerical(format!("golden-section search at r = {r} failed to bracket")));
    }
    Ok((z, value))
}

/// Largest `r` in `(0, 0.5)` with `max_z h(z, r) >= r`, by bisection.
pub fn solve_rls_constants(tolerance: f64) -> Result<RlsConstants> {
    if !(1e-10..=1e-3).contains(&tolerance) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in [1e-10, 1e-3], got {tolerance}")));
    }
    let feasible = |r: f64| -> Result<bool> { Ok(maximize_h(r, tolerance)?.1 >= r) };
    let mut lo = 1e-9;
    let mut hi = 0.5 - 1e-9;
    if !feasible(lo)? || feasible(hi)? {
        return Err(Error::Numerical("feasibility of r is not bracketed on (0, 0.5)".into()));
    }
    for _ in 0..BISECTION_CAP {
        if hi - lo <= tolerance {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (z_star, h_at_opt) = maximize_h(lo, tolerance)?;
    Ok(RlsConstants { r_star: lo, z_star, h_at_opt })
}

/// Tolerance used when callers want "the" constants.
pub fn default_rls_constants() -> RlsConstants {
    solve_rls_constants(1e-10).expect("r* fixed point is well posed")
}

/// Poisson probability mass at `k`, computed in log space.
pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mean.ln() - mean - ln_factorial(k)).exp()
}

/// `P(N > k)` for `N ~ Poisson(mean)`, summing the upper tail until the
/// analytic remainder bound `pmf(K) * mean / (K + 1 - mean)` drops below `tol`.
fn poisson_tail_above(k: u64, mean: f64, tol: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut i = k + 1;
    let mut term = poisson_pmf(i, mean);
    loop {
        sum += term;
        let next = term * mean / (i + 1) as f64;
        let rest_bound = if (i + 2) as f64 > mean { next / (1.0 - mean / (i + 2) as f64) } else { f64::INFINITY };
        if rest_bound < tol || (term == 0.0 && i as f64 > mean) {
            break;
        }
        term = next;
        i += 1;
    }
    sum
}

/// `(1/(d+1)) [ sum_{k=1..d} e^{-mu} mu^k/(k-1)! + d P(Y >= d+1) ]`, `mu = (d+1) load / c`.
fn reservation_ratio(d: u32, load: f64, capacity: f64, tol: f64) -> f64 {
    let mu = (d as f64 + 1.0) * load / capacity;
    if mu == 0.0 {
        return 0.0;
    }
    let head: f64 = (1..=d as u64).map(|k| k as f64 * poisson_pmf(k, mu)).sum();
    (head + d as f64 * poisson_tail_above(d as u64, mu, tol)) / (d as f64 + 1.0)
}

/// `1 - e^{-d} sum_{i>=d} (i-d+1) d^{i-1}/i!`.
fn pooled_factor(d: u32, tol: f64) -> f64 {
    let dd = d as f64;
    let mut sum = 0.0;
    let mut i = d as u64;
    loop {
        // (i-d+1) d^{i-1} e^{-d} / i! = (i-d+1) pmf(i; d) / d
        let term = (i as f64 - dd + 1.0) * poisson_pmf(i, dd) / dd;
        sum += term;
        // terms past i shrink geometrically at rate at most q = t_{i+2}/t_{i+1}
        let fi = i as f64;
        let q = (fi - dd + 3.0) / (fi - dd + 2.0) * dd / (fi + 2.0);
        if q < 1.0 {
            let next = (fi - dd + 2.0) * poisson_pmf(i + 1, dd) / dd;
            if next / (1.0 - q) < tol {
                break;
            }
        }
        i += 1;
    }
    1.0 - sum
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MlsRatios {
    pub large: f64,
    pub small: f64,
    pub all: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MlsChoice {
    Large,
    Small,
    All,
}

impl MlsRatios {
    pub fn max(&self) -> f64 {
        self.large.max(self.small).max(self.all)
    }

    /// `Large` or `Small` only when strictly the largest; otherwise pool.
    pub fn choice(&self) -> MlsChoice {
        if self.large > self.small && self.large > self.all {
            MlsChoice::Large
        } else if self.small > self.large && self.small > self.all {
            MlsChoice::Small
        } else {
            MlsChoice::All
        }
    }
}

/// The three MLS reservation ratios for one resource.
pub fn mls_ratios(
    d: u32,
    load_large: f64,
    load_small: f64,
    load_total: f64,
    capacity: f64,
    series_tol: f64,
) -> Result<MlsRatios> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    if capacity.is_nan() || capacity <= 0.0 || load_large < 0.0 || load_small < 0.0 || load_total < 0.0 {
        return Err(Error::InvalidArgument("loads must be nonnegative and capacity positive".into()));
    }
    if series_tol.is_nan() || series_tol <= 0.0 {
        return Err(Error::InvalidArgument("series tolerance must be positive".into()));
    }
    Ok(MlsRatios {
        large: reservation_ratio(d, load_large, capacity, series_tol),
        small: reservation_ratio(d, load_small, capacity, series_tol),
        all: load_total / capacity * pooled_factor(d, series_tol),
    })
}

/// `1 - e^{-d} d^d / d! - 1/d`, a lower bound on the pooled ratio at full load.
pub fn corollary1_bound(d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    let dd = d as f64;
    Ok(1.0 - (dd * dd.ln() - dd - ln_factorial(d as u64)).exp() - 1.0 / dd)
}

/// `((1-beta)/(l-1)) E[min(N', l-1)]` with `N' ~ Poisson(alpha (l-1)/(1-beta))`.
pub fn compound_poisson_tail_bound(alpha: f64, beta: f64, l: u32) -> Result<f64> {
    if l < 2 {
        return Err(Error::Domain(format!("l must be at least 2, got {l}")));
    }
    let lf = l as f64;
    if !(0.0..=1.0 / lf).contains(&beta) {
        return Err(Error::Domain(format!("beta = {beta} outside [0, 1/{l}]")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1]")));
    }
    let mean = alpha * (lf - 1.0) / (1.0 - beta);
    // E[min(N, K)] = sum_{k<K} P(N > k)
    let k_cap = l as u64 - 1;
    let mut cdf = 0.0;
    let mut expect = 0.0;
    for k in 0..k_cap {
        cdf += poisson_pmf(k, mean);
        expect += (1.0 - cdf).max(0.0);
    }
    Ok((1.0 - beta) / (lf - 1.0) * expect)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_at_zero_r_collapses() {
        let target = 0.5 * (1.0 - (-2.0f64).exp());
        for &z in &[0.01, 0.2, 0.42, 0.49] {
            assert!((h(z, 0.0).unwrap() - target).abs() < 1e-14);
        }
        assert!((target - 0.4323).abs() < 1e-4);
    }

    #[test]
    fn h_domain() {
        assert!(h(0.3, 0.5).is_err());
        assert!(h(0.6, 0.45).is_err());
        assert!(h(0.42, 0.321).is_ok());
    }

    #[test]
    fn h_near_published_optimum() {
        assert!((h(0.42, 0.321).unwrap() - 0.321).abs() < 0.003);
    }

    #[test]
    fn rls_constants() {
        let c = solve_rls_constants(1e-8).unwrap();
        assert!((c.r_star - 0.321).abs() < 0.002, "{c:?}");
        assert!((c.z_star - 0.42).abs() < 0.01, "{c:?}");
        assert!(c.h_at_opt >= c.r_star - 1e-6);
        assert!(c.z_star > c.r_star);
        // stationarity: central differences at the optimum
        let dz = 1e-5;
        let grad = (h(c.z_star + dz, c.r_star).unwrap() - h(c.z_star - dz, c.r_star).unwrap()) / (2.0 * dz);
        assert!(grad.abs() < 1e-4, "{grad}");
        assert!(solve_rls_constants(1e-12).is_err());
    }

    #[test]
    fn ls_ratio_identity() {
        assert!((ls_ratio() - 0.31606).abs() < 1e-5);
        assert!((2.0 * ls_ratio() + 1.0 / E - 1.0).abs() < 1e-15);
        assert!(ls_ratio() < default_rls_constants().r_star);
    }

    #[test]
    fn mls_example_values() {
        let r = mls_ratios(2, 0.8, 0.2, 1.0, 1.0, SERIES_TOL).unwrap();
        assert!((r.large - 0.54).abs() < 0.02, "{r:?}");
        assert!((r.small - 0.18).abs() < 0.02, "{r:?}");
        assert!((r.all - 0.43).abs() < 0.02, "{r:?}");
        assert_eq!(r.choice(), MlsChoice::Large);
        let r = mls_ratios(2, 0.5, 0.5, 1.0, 1.0, SERIES_TOL).unwrap();
        assert_eq!(r.choice(), MlsChoice::All);
        assert_eq!(mls_ratios(3, 0.0, 0.4, 0.4, 1.0, SERIES_TOL).unwrap().large, 0.0);
        assert!(mls_ratios(1, 0.5, 0.5, 1.0, 1.0, SERIES_TOL).is_err());
    }

    #[test]
    fn corollary_bound_values() {
        let v = corollary1_bound(2).unwrap();
        assert!((v - (0.5 - 2.0 * (-2.0f64).exp())).abs() < 1e-14);
        let d = 10_000.0;
        let v = corollary1_bound(10_000).unwrap();
        assert!((v - (1.0 - 1.0 / (2.0 * std::f64::consts::PI * d).sqrt())).abs() < 2e-4);
    }

    #[test]
    fn tail_bound_values() {
        let v = compound_poisson_tail_bound(0.5, 0.5, 2).unwrap();
        assert!((v - 0.5 * (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert_eq!(compound_poisson_tail_bound(0.0, 0.2, 4).unwrap(), 0.0);
        assert!(compound_poisson_tail_bound(0.5, 0.6, 2).is_err());
        assert!(compound_poisson_tail_bound(0.5, 0.1, 1).is_err());
    }
}

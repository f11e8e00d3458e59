use super::FractionalRouting;
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Greedy optimum of the routing LP for layered scheduling instances.
///
/// Urgent demand is packed into its same-day sessions first. Then, day by
/// day, the regular demand arriving that day is packed into the earliest
/// sessions with room left. Because every booking earns exactly the minutes
/// it consumes and all regular windows have the same length, this is an
/// earliest-deadline-first fill of a fluid interval-scheduling problem.
pub fn solve_layered_greedy(inst: &Instance) -> Result<FractionalRouting> {
    let sched = inst.schedule().ok_or(Error::NotLayered)?;
    let (n, m) = (inst.n(), inst.m());

    for (i, class) in sched.patients.iter().enumerate() {
        let first = class.arrival_day;
        let last = sched.last_day(class);
        for j in 0..m {
            let day = sched.resource_day[j];
            let inside = (first..=last).contains(&day);
            if (inst.u(i, j) > 0.0) != inside {
                return Err(Error::NotLayered);
            }
        }
    }

    // Resources in (day, index) order.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&j| (sched.resource_day[j], j));

    let mut remaining = inst.capacities();
    let mut x = vec![0.0; n * m];
    let mut pack = |i: usize, remaining: &mut [f64]| {
        let mut mass: f64 = 0.0;
        let mut unit = 0.0;
        for &j in &order {
            let u = inst.u(i, j);
            if u == 0.0 {
                continue;
            }
            if unit == 0.0 {
                unit = u;
                mass = inst.lambda(i) * u;
            }
            if mass <= 0.0 {
                break;
            }
            let take = remaining[j].min(mass);
            if take > 0.0 {
                x[i * m + j] += take / u;
                remaining[j] -= take;
                mass -= take;
            }
        }
    };

    let mut urgent: Vec<usize> = (0..n).filter(|&i| sched.patients[i].category.is_urgent()).collect();
    urgent.sort_by_key(|&i| (sched.patients[i].arrival_day, sched.patients[i].category, i));
    for i in urgent {
        pack(i, &mut remaining);
    }
    let mut regular: Vec<usize> = (0..n).filter(|&i| !sched.patients[i].category.is_urgent()).collect();
    regular.sort_by_key(|&i| (sched.patients[i].arrival_day, sched.patients[i].category, i));
    for i in regular {
        pack(i, &mut remaining);
    }

    let routing = FractionalRouting::from_dense(inst, x);
    routing.check_invariants(inst)?;
    Ok(routing)
}

//! Recursive speed optimization for a fixed visit sequence.
//!
//! Service-start times are first fixed as if every segment could be driven
//! at one constant reference speed; the customer with the largest window
//! violation is pinned to its nearest bound and both halves are solved again.
//! Implied speeds below the fuel-optimal speed are then raised, with the
//! slack absorbed as waiting.

use crate::energy::{self, optimal_speed_fuel, optimal_speed_fuel_driver};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::routeval::TIME_EPS;
use crate::speed::SpeedMatrix;

/// Relative slack tolerated when a required speed exceeds the upper bound.
const SPEED_REL_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedSchedule {
    pub speeds: Vec<f64>,
    /// Planned service starts from the recursion.
    pub service_starts: Vec<f64>,
    /// Arrival times obtained by driving `speeds` with early-arrival waiting.
    pub arrivals: Vec<f64>,
    pub cost: f64,
}

/// Speed limits used by the optimizer for an instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedLimits {
    /// `max(v*_F, v_min)`.
    pub floor: f64,
    /// `v*_FD` clamped into `[floor, v_max]`.
    pub target: f64,
    pub max: f64,
}

impl SpeedLimits {
    pub fn for_instance(inst: &Instance) -> Result<Self> {
        let floor = optimal_speed_fuel(&inst.params)?.max(inst.speed_min).min(inst.speed_max);
        let target = optimal_speed_fuel_driver(&inst.params)?.clamp(floor, inst.speed_max);
        Ok(SpeedLimits {
            floor,
            target,
            max: inst.speed_max,
        })
    }
}

struct Recursion<'a> {
    inst: &'a Instance,
    visits: &'a [usize],
    limits: SpeedLimits,
    starts: Vec<f64>,
}

impl Recursion<'_> {
    fn dist(&self, k: usize) -> f64 {
        self.inst.dist(self.visits[k - 1], self.visits[k])
    }

    fn service(&self, k: usize) -> f64 {
        self.inst.node(self.visits[k]).service_time
    }

    fn window(&self, k: usize) -> (f64, f64) {
        let c = self.inst.node(self.visits[k]);
        (c.tw_start, c.tw_end)
    }

    fn infeasible(&self, s: usize, e: usize, why: &str) -> Error {
        Error::SpeedInfeasible(format!(
            "segment {}..{} of route {:?}: {why}",
            s, e, self.visits
        ))
    }

    fn solve(&mut self, s: usize, e: usize) -> Result<()> {
        let last = self.visits.len() - 1;
        let dist: f64 = (s + 1..=e).map(|k| self.dist(k)).sum();
        let service: f64 = (s..e).map(|k| self.service(k)).sum();
        if e == last {
            let (a, b) = self.window(e);
            self.starts[e] = (self.starts[s] + dist / self.limits.target + service).max(a).min(b);
        }
        let available = self.starts[e] - self.starts[s] - service;
        if dist > 0.0 {
            if available <= 0.0 {
                return Err(self.infeasible(s, e, "no time left for travel"));
            }
            let v_ref = dist / available;
            if v_ref > self.limits.max * (1.0 + SPEED_REL_EPS) {
                return Err(self.infeasible(s, e, &format!("reference speed {v_ref} above the maximum")));
            }
            for k in s + 1..=e {
                self.starts[k] = self.starts[k - 1] + self.service(k - 1) + self.dist(k) / v_ref;
            }
        } else {
            if available < -TIME_EPS {
                return Err(self.infeasible(s, e, "service times overrun the segment"));
            }
            for k in s + 1..e {
                self.starts[k] = self.starts[k - 1] + self.service(k - 1);
            }
        }

        let mut max_violation = TIME_EPS;
        let mut pivot = None;
        for k in s + 1..=e {
            let (a, b) = self.window(k);
            let t = self.starts[k];
            let violation = (t - b).max(a - t).max(0.0);
            if violation > max_violation {
                max_violation = violation;
                pivot = Some(k);
            }
        }
        if let Some(p) = pivot {
            if p == e {
                return Err(self.infeasible(s, e, "pinned endpoint violates its window"));
            }
            let (a, b) = self.window(p);
            self.starts[p] = self.starts[p].max(a).min(b);
            self.solve(s, p)?;
            self.solve(p, e)?;
        }
        Ok(())
    }
}

/// Optimal speeds for the depot-bounded `visits`, using the instance's
/// objective parameters. Fails if some segment needs more than `v_max`,
/// which happens when the route carries time warp even at full speed.
pub fn optimize_speeds(visits: &[usize], inst: &Instance) -> Result<SpeedSchedule> {
    if visits.len() < 2 || visits[0] != 0 || visits[visits.len() - 1] != 0 {
        return Err(Error::InfeasibleRoute(format!("{visits:?} is not depot-bounded")));
    }
    let limits = SpeedLimits::for_instance(inst)?;
    let n = visits.len();
    let mut rec = Recursion {
        inst,
        visits,
        limits,
        starts: vec![0.0; n],
    };
    rec.starts[0] = inst.node(0).tw_start;
    rec.solve(0, n - 1)?;

    let mut speeds = Vec::with_capacity(n - 1);
    let mut arrivals = vec![0.0f64; n];
    for k in 1..n {
        let d = rec.dist(k);
        let gap = rec.starts[k] - rec.starts[k - 1] - rec.service(k - 1);
        let v = if d == 0.0 {
            limits.floor
        } else if gap <= 0.0 {
            return Err(rec.infeasible(k - 1, k, "zero time for a positive distance"));
        } else {
            let v = (d / gap).max(limits.floor);
            if v > limits.max * (1.0 + SPEED_REL_EPS) {
                return Err(rec.infeasible(k - 1, k, &format!("implied speed {v} above the maximum")));
            }
            v.min(limits.max)
        };
        speeds.push(v);
        let (a_prev, _) = rec.window(k - 1);
        let travel = if d > 0.0 { d / v } else { 0.0 };
        arrivals[k] = arrivals[k - 1].max(a_prev) + rec.service(k - 1) + travel;
        let (_, b) = rec.window(k);
        if arrivals[k] > b + TIME_EPS {
            return Err(rec.infeasible(k - 1, k, "late arrival after speed revision"));
        }
    }
    let cost = energy::route_cost(visits, &speeds, inst).total;
    Ok(SpeedSchedule {
        speeds,
        service_starts: rec.starts,
        arrivals,
        cost,
    })
}

/// Writes the schedule's speeds onto the route's arcs.
pub fn update_speed_matrix(matrix: &mut SpeedMatrix, schedule: &SpeedSchedule, visits: &[usize]) {
    matrix.set_route(visits, &schedule.speeds);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::ObjectiveParams;
    use crate::instance::{Node, ProblemKind};

    fn instance(windows: &[(f64, f64)], xs: &[f64]) -> Instance {
        let mut nodes = vec![Node::open(0.0, 0.0, 0.0, 0.0)];
        for (&(a, b), &x) in windows.iter().zip(xs) {
            let mut c = Node::open(x, 0.0, 10.0, 0.0);
            c.tw_start = a;
            c.tw_end = b;
            nodes.push(c);
        }
        Instance::new(
            "soa",
            ProblemKind::Prp,
            nodes,
            1,
            1000.0,
            (5.5, 25.0),
            ObjectiveParams::prp_uk_2012(),
        )
        .unwrap()
    }

    #[test]
    fn open_windows_give_fuel_driver_speed_everywhere() {
        let inf = f64::INFINITY;
        let inst = instance(&[(0.0, inf), (0.0, inf), (0.0, inf)], &[5000.0, 12000.0, 20000.0]);
        let s = optimize_speeds(&[0, 1, 2, 3, 0], &inst).unwrap();
        let target = SpeedLimits::for_instance(&inst).unwrap().target;
        for v in &s.speeds {
            assert!((v - target).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn tight_window_forces_faster_leg() {
        // 10 km within 450 s needs 22.2 m/s, above the fuel-driver speed.
        let inst = instance(&[(0.0, 450.0)], &[10000.0]);
        let s = optimize_speeds(&[0, 1, 0], &inst).unwrap();
        assert!((s.speeds[0] - 10000.0 / 450.0).abs() < 1e-9);
        assert!(s.arrivals[1] <= 450.0 + 1e-9);
    }

    #[test]
    fn late_window_start_becomes_waiting_at_fuel_speed() {
        let inst = instance(&[(5000.0, 6000.0)], &[10000.0]);
        let s = optimize_speeds(&[0, 1, 0], &inst).unwrap();
        let floor = SpeedLimits::for_instance(&inst).unwrap().floor;
        assert!((s.speeds[0] - floor).abs() < 1e-9);
        assert!(s.arrivals[1] < 5000.0);
    }

    #[test]
    fn unreachable_window_is_an_error() {
        let inst = instance(&[(0.0, 300.0)], &[10000.0]);
        assert!(matches!(
            optimize_speeds(&[0, 1, 0], &inst),
            Err(Error::SpeedInfeasible(_))
        ));
    }

    #[test]
    fn matrix_update_overwrites_route_arcs() {
        let inst = instance(&[(0.0, f64::INFINITY)], &[1000.0]);
        let s = optimize_speeds(&[0, 1, 0], &inst).unwrap();
        let mut m = SpeedMatrix::new(2, 25.0);
        update_speed_matrix(&mut m, &s, &[0, 1, 0]);
        assert_eq!(m.get(0, 1), s.speeds[0]);
        m.fill(25.0);
        assert_eq!(m.get(0, 1), 25.0);
    }
}

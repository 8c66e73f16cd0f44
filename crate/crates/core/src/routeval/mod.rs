//! Subsequence aggregates with constant-time concatenation, and the
//! penalized route cost built on them.

mod moves;
mod route;

pub use moves::{Move, NeighborhoodId, Piece, Plan};
pub use route::RouteCache;

use crate::instance::{Instance, ProblemKind};
use crate::speed::SpeedMatrix;

/// Absolute tolerance (s) below which waiting or time warp counts as zero.
pub const TIME_EPS: f64 = 1e-6;

/// Aggregates of a visit subsequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubseqData {
    /// Minimum duration, including waiting and service.
    pub duration: f64,
    /// Minimum time warp.
    pub time_warp: f64,
    /// Earliest start at the first vertex achieving the two minima.
    pub earliest: f64,
    /// Latest such start.
    pub latest: f64,
    pub load: f64,
    pub distance: f64,
    pub travel_time: f64,
    /// Sum over arcs of carried load times length.
    pub load_distance: f64,
    /// Sum over arcs of squared speed times length.
    pub sq_speed_distance: f64,
    pub first: usize,
    pub last: usize,
}

impl SubseqData {
    /// A lone customer, or the depot at the end of a route.
    pub fn node(inst: &Instance, i: usize) -> Self {
        let c = inst.node(i);
        SubseqData {
            duration: c.service_time,
            time_warp: 0.0,
            earliest: c.tw_start,
            latest: c.tw_end,
            load: c.demand,
            distance: 0.0,
            travel_time: 0.0,
            load_distance: 0.0,
            sq_speed_distance: 0.0,
            first: i,
            last: i,
        }
    }

    /// The depot opening a route: departure is pinned at time 0.
    pub fn depot_start(inst: &Instance) -> Self {
        SubseqData {
            earliest: 0.0,
            latest: 0.0,
            ..Self::node(inst, 0)
        }
    }

    /// Data of the vertex at `pos` of a depot-bounded route.
    pub fn at_position(inst: &Instance, node: usize, pos: usize) -> Self {
        if pos == 0 {
            debug_assert_eq!(node, 0);
            Self::depot_start(inst)
        } else {
            Self::node(inst, node)
        }
    }

    /// `self` followed by `next`, joined by an arc of length `d` driven at `v`.
    #[inline]
    pub fn concat(&self, next: &Self, d: f64, v: f64) -> Self {
        let delta = if d > 0.0 { d / v } else { 0.0 };
        let shift = self.duration - self.time_warp + delta;
        let added_wait = (next.earliest - shift - self.latest).max(0.0);
        let added_warp = (self.earliest + shift - next.latest).max(0.0);
        SubseqData {
            duration: self.duration + next.duration + delta + added_wait,
            time_warp: self.time_warp + next.time_warp + added_warp,
            earliest: (next.earliest - shift).max(self.earliest) - added_wait,
            latest: (next.latest - shift).min(self.latest) + added_warp,
            load: self.load + next.load,
            distance: self.distance + next.distance + d,
            travel_time: self.travel_time + next.travel_time + delta,
            load_distance: self.load_distance + next.load_distance + next.load * (self.distance + d),
            sq_speed_distance: self.sq_speed_distance + next.sq_speed_distance + v * v * d,
            first: self.first,
            last: next.last,
        }
    }

    /// Left fold over a depot-bounded route with explicit per-arc speeds.
    pub fn fold(visits: &[usize], speeds: &[f64], inst: &Instance) -> Self {
        let mut acc = Self::at_position(inst, visits[0], 0);
        for (k, w) in visits.windows(2).enumerate() {
            acc = acc.concat(&Self::node(inst, w[1]), inst.dist(w[0], w[1]), speeds[k]);
        }
        acc
    }
}

/// Penalized route cost for one problem variant.
#[derive(Clone, Debug)]
pub struct Objective {
    kind: ProblemKind,
    w: [f64; 4],
    fuel_cost: f64,
    driver_wage: f64,
    tw_penalty: f64,
    rho_empty: f64,
    rho_slope: f64,
    fixed_cost: f64,
    empty_weight: f64,
    capacity: f64,
    max_duration: Option<f64>,
}

impl Objective {
    pub fn new(inst: &Instance) -> Self {
        let p = &inst.params;
        Objective {
            kind: inst.kind,
            w: [p.w1, p.w2, p.w3, p.w4],
            fuel_cost: p.fuel_cost,
            driver_wage: p.driver_wage,
            tw_penalty: p.tw_penalty,
            rho_empty: p.rho_empty,
            rho_slope: (p.rho_full - p.rho_empty) / inst.capacity,
            fixed_cost: p.fixed_cost,
            empty_weight: p.empty_weight,
            capacity: inst.capacity,
            max_duration: inst.max_route_duration,
        }
    }

    pub fn with_tw_penalty(mut self, penalty: f64) -> Self {
        self.tw_penalty = penalty;
        self
    }

    pub fn tw_penalty(&self) -> f64 {
        self.tw_penalty
    }

    /// Time beyond the route-duration limit.
    #[inline]
    pub fn duration_excess(&self, s: &SubseqData) -> f64 {
        match self.max_duration {
            Some(limit) => (s.duration - s.time_warp - limit).max(0.0),
            None => 0.0,
        }
    }

    /// Cost of a depot-to-depot route. `nonempty` controls the fixed cost.
    #[inline]
    pub fn cost(&self, s: &SubseqData, nonempty: bool) -> f64 {
        let penalty = self.tw_penalty * (s.time_warp + self.duration_excess(s));
        let base = match self.kind {
            ProblemKind::Prp => {
                let [w1, w2, w3, w4] = self.w;
                self.fuel_cost
                    * (w1 * s.travel_time
                        + w2 * s.distance
                        + w3 * s.load_distance
                        + w4 * s.sq_speed_distance)
                    + self.driver_wage * s.duration
            }
            ProblemKind::Fcvrp => {
                let fixed = if nonempty { self.fixed_cost } else { 0.0 };
                fixed
                    + self.fuel_cost * (self.rho_empty * s.distance + self.rho_slope * s.load_distance)
            }
            ProblemKind::Emvrp => self.empty_weight * s.distance + s.load_distance,
        };
        base + penalty
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Capacity, windows (within [`TIME_EPS`]) and duration limit hold.
    pub fn is_feasible(&self, s: &SubseqData) -> bool {
        s.load <= self.capacity + 1e-9
            && s.time_warp <= TIME_EPS
            && self.duration_excess(s) <= TIME_EPS
    }
}

/// Route evaluation against a speed matrix.
#[derive(Clone)]
pub struct Evaluator<'a> {
    pub inst: &'a Instance,
    pub speeds: &'a SpeedMatrix,
    pub obj: Objective,
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a Instance, speeds: &'a SpeedMatrix) -> Self {
        Evaluator {
            inst,
            speeds,
            obj: Objective::new(inst),
        }
    }

    #[inline]
    pub fn join(&self, a: &SubseqData, b: &SubseqData) -> SubseqData {
        a.concat(b, self.inst.dist(a.last, b.first), self.speeds.get(a.last, b.first))
    }

    /// From-scratch fold of a depot-bounded route under matrix speeds.
    pub fn fold(&self, visits: &[usize]) -> SubseqData {
        let mut acc = SubseqData::depot_start(self.inst);
        for &v in &visits[1..] {
            acc = self.join(&acc, &SubseqData::node(self.inst, v));
        }
        acc
    }

    pub fn route_cost(&self, visits: &[usize]) -> f64 {
        self.obj.cost(&self.fold(visits), visits.len() > 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{self, ObjectiveParams};
    use crate::instance::Node;

    fn line_instance() -> Instance {
        let mut nodes = vec![Node::open(0.0, 0.0, 0.0, 0.0)];
        nodes.push(Node::open(1000.0, 0.0, 100.0, 30.0));
        nodes.push(Node::open(2000.0, 0.0, 200.0, 60.0));
        Instance::new(
            "line",
            ProblemKind::Prp,
            nodes,
            2,
            1000.0,
            (5.5, 25.0),
            ObjectiveParams::prp_uk_2012(),
        )
        .unwrap()
    }

    #[test]
    fn open_window_concat() {
        let inst = line_instance();
        let depot = SubseqData::depot_start(&inst);
        let c = SubseqData::node(&inst, 1);
        let s = depot.concat(&c, 1000.0, 10.0);
        assert_eq!(s.duration, 30.0 + 100.0);
        assert_eq!(s.time_warp, 0.0);
    }

    #[test]
    fn forced_lateness_becomes_warp() {
        let mut inst = line_instance();
        inst.nodes[2].tw_end = 100.0;
        // depot -> 1 arrives at 100, service 30, -> 2 arrives at 230.
        let s = SubseqData::fold(&[0, 1, 2], &[10.0, 10.0], &inst);
        assert!((s.time_warp - 130.0).abs() < 1e-12);
    }

    #[test]
    fn open_route_matches_direct_cost() {
        let inst = line_instance();
        let m = SpeedMatrix::new(3, 18.0);
        let ev = Evaluator::new(&inst, &m);
        let visits = [0, 1, 2, 0];
        let direct = energy::route_cost(&visits, &[18.0; 3], &inst).total;
        assert!((ev.route_cost(&visits) - direct).abs() < 1e-12);
        assert_eq!(ev.route_cost(&[0, 0]), 0.0);
    }

    #[test]
    fn one_second_of_warp_costs_the_penalty() {
        let mut inst = line_instance();
        let m = SpeedMatrix::new(3, 10.0);
        let ev = Evaluator::new(&inst, &m);
        let open = ev.route_cost(&[0, 1, 0]);
        inst.nodes[1].tw_end = 99.0;
        let ev = Evaluator::new(&inst, &m);
        let late = ev.route_cost(&[0, 1, 0]);
        assert!((late - open - 1e8).abs() < 1e-6, "{}", late - open);
    }
}

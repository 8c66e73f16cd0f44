use crate::energy;
use crate::instance::Instance;
use crate::routeval::{Objective, SubseqData};
use crate::speed::SpeedMatrix;

/// A depot-bounded route with one speed per arc.
#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    pub visits: Vec<usize>,
    pub speeds: Vec<f64>,
    /// True objective when feasible, penalized cost otherwise.
    pub cost: f64,
    pub feasible: bool,
}

impl Route {
    /// Evaluates `visits` under fixed `speeds`.
    pub fn evaluate(visits: Vec<usize>, speeds: Vec<f64>, inst: &Instance) -> Self {
        debug_assert_eq!(speeds.len() + 1, visits.len());
        let seg = SubseqData::fold(&visits, &speeds, inst);
        let obj = Objective::new(inst);
        let feasible = obj.is_feasible(&seg);
        let cost = if feasible {
            energy::objective_route_cost(&visits, &speeds, inst)
        } else {
            obj.cost(&seg, visits.len() > 2)
        };
        Route {
            visits,
            speeds,
            cost,
            feasible,
        }
    }

    /// Evaluates `visits` with speeds read from the matrix.
    pub fn with_matrix(visits: Vec<usize>, matrix: &SpeedMatrix, inst: &Instance) -> Self {
        let speeds = matrix.route_speeds(&visits);
        Self::evaluate(visits, speeds, inst)
    }

    pub fn customers(&self) -> &[usize] {
        &self.visits[1..self.visits.len() - 1]
    }

    pub fn is_empty(&self) -> bool {
        self.visits.len() <= 2
    }

    pub fn load(&self, inst: &Instance) -> f64 {
        self.customers().iter().map(|&c| inst.node(c).demand).sum()
    }

    pub fn distance(&self, inst: &Instance) -> f64 {
        self.visits.windows(2).map(|w| inst.dist(w[0], w[1])).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Solution {
    pub routes: Vec<Route>,
}

impl Solution {
    pub fn new(routes: Vec<Route>) -> Self {
        Solution {
            routes: routes.into_iter().filter(|r| !r.is_empty()).collect(),
        }
    }

    pub fn cost(&self) -> f64 {
        self.routes.iter().map(|r| r.cost).sum()
    }

    pub fn is_feasible(&self, inst: &Instance) -> bool {
        self.routes.iter().all(|r| r.feasible) && self.route_count() <= inst.fleet_size
    }

    pub fn route_count(&self) -> usize {
        self.routes.iter().filter(|r| !r.is_empty()).count()
    }

    pub fn distance(&self, inst: &Instance) -> f64 {
        self.routes.iter().map(|r| r.distance(inst)).sum()
    }

    /// Every customer visited exactly once.
    pub fn covers_exactly(&self, inst: &Instance) -> bool {
        let mut seen = vec![false; inst.nodes.len()];
        for r in &self.routes {
            if r.visits.first() != Some(&0) || r.visits.last() != Some(&0) {
                return false;
            }
            for &c in r.customers() {
                if c == 0 || c >= seen.len() || seen[c] {
                    return false;
                }
                seen[c] = true;
            }
        }
        seen.iter().skip(1).all(|&s| s)
    }

    /// Total time warp of the routes under their own speeds.
    pub fn time_warp(&self, inst: &Instance) -> f64 {
        self.routes
            .iter()
            .map(|r| SubseqData::fold(&r.visits, &r.speeds, inst).time_warp)
            .sum()
    }

    pub fn visit_lists(&self) -> Vec<Vec<usize>> {
        self.routes.iter().map(|r| r.visits.clone()).collect()
    }
}

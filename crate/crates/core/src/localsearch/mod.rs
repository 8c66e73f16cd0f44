//! Randomized variable neighborhood descent over ten neighborhoods, the
//! perturbations of the iterated search, and the initial construction.

mod construct;
mod neighborhoods;
mod perturb;

pub use construct::build_initial;
pub use perturb::{
    change_speeds, perturb, perturb_with, PerturbWeights, PerturbationId, MAX_PERTURB_ATTEMPTS,
};

use std::collections::HashMap;

use rand::Rng;

use crate::routeval::{Evaluator, Move, NeighborhoodId, RouteCache};

/// Outcome of one descent.
#[derive(Clone, Debug)]
pub struct Descent {
    pub routes: Vec<Vec<usize>>,
    /// Penalized cost under the evaluator's speeds.
    pub cost: f64,
    pub moves_applied: usize,
}

/// Upper bound on applied moves, far above anything a descent reaches.
const MOVE_CAP: usize = 1_000_000;

/// Best move of one neighborhood restricted to one route pair, cached by the
/// stamps of the two routes.
type Memo = HashMap<(usize, u64, u64), Option<(Move, f64)>>;

struct State<'e, 'a> {
    ev: &'e Evaluator<'a>,
    routes: Vec<RouteCache>,
    fleet: usize,
    stamp: u64,
    memo: Memo,
}

impl<'e, 'a> State<'e, 'a> {
    fn new(ev: &'e Evaluator<'a>, routes: Vec<Vec<usize>>, fleet: usize) -> Self {
        let mut s = State {
            ev,
            routes: Vec::new(),
            fleet,
            stamp: 0,
            memo: HashMap::new(),
        };
        for visits in routes {
            if visits.len() > 2 {
                s.stamp += 1;
                s.routes.push(RouteCache::new(visits, ev, s.stamp));
            }
        }
        s.normalize_empties();
        s
    }

    /// Keeps exactly one empty route while the fleet has room, none otherwise.
    fn normalize_empties(&mut self) {
        self.routes.retain(|r| !r.is_empty());
        if self.routes.len() < self.fleet {
            self.stamp += 1;
            self.routes.push(RouteCache::new(vec![0, 0], self.ev, self.stamp));
        }
    }

    fn total(&self) -> f64 {
        self.routes.iter().map(|r| r.cost).sum()
    }

    fn pair_best(&mut self, nb: NeighborhoodId, a: usize, b: usize) -> Option<(Move, f64)> {
        let key = (nb.index(), self.routes[a].stamp, self.routes[b].stamp);
        if let Some(hit) = self.memo.get(&key) {
            return hit.map(|(mv, d)| (neighborhoods::retarget(mv, a, b), d));
        }
        let found = neighborhoods::scan(self.ev, &self.routes, nb, a, b);
        self.memo.insert(key, found);
        found
    }

    fn best_move(&mut self, nb: NeighborhoodId) -> Option<(Move, f64)> {
        let count = self.routes.len();
        let mut best: Option<(Move, f64)> = None;
        let mut consider = |cand: Option<(Move, f64)>| {
            if let Some((mv, d)) = cand {
                if best.is_none_or(|(_, b)| d < b) {
                    best = Some((mv, d));
                }
            }
        };
        if nb.is_inter_route() {
            let ordered = matches!(nb, NeighborhoodId::Shift10 | NeighborhoodId::Shift20);
            for a in 0..count {
                for b in 0..count {
                    if a == b || (!ordered && b < a) {
                        continue;
                    }
                    if self.routes[a].is_empty() && self.routes[b].is_empty() {
                        continue;
                    }
                    consider(self.pair_best(nb, a, b));
                }
            }
        } else {
            for a in 0..count {
                if self.routes[a].customer_count() >= 2 {
                    consider(self.pair_best(nb, a, a));
                }
            }
        }
        best
    }

    fn apply(&mut self, mv: &Move, predicted: f64) {
        let before: f64 = self.total();
        self.ev.apply_move(&mut self.routes, mv, &mut self.stamp);
        if cfg!(debug_assertions) {
            let fresh: f64 = self.routes.iter().map(|r| self.ev.route_cost(&r.visits)).sum();
            let actual = fresh - before;
            let scale = 1.0 + before.abs() + self.ev.inst.params.tw_penalty;
            debug_assert!(
                (actual - predicted).abs() <= 1e-9 * scale,
                "{mv:?}: predicted {predicted}, recomputed {actual}"
            );
        }
        self.normalize_empties();
        if self.memo.len() > 200_000 {
            self.memo.clear();
        }
    }
}

/// Descends to a local optimum of all ten neighborhoods. Neighborhoods are
/// drawn uniformly from the untried set; the best move of the drawn one is
/// applied if it improves, which restores the full set.
pub fn rvnd_descend(
    ev: &Evaluator<'_>,
    routes: Vec<Vec<usize>>,
    fleet: usize,
    rng: &mut impl Rng,
) -> Descent {
    let mut state = State::new(ev, routes, fleet);
    let mut untried: Vec<NeighborhoodId> = NeighborhoodId::ALL.to_vec();
    let mut applied = 0;
    while !untried.is_empty() && applied < MOVE_CAP {
        let k = rng.random_range(0..untried.len());
        let threshold = 1e-9 * (1.0 + state.total().abs());
        match state.best_move(untried[k]) {
            Some((mv, delta)) if delta < -threshold => {
                state.apply(&mv, delta);
                applied += 1;
                untried = NeighborhoodId::ALL.to_vec();
            }
            _ => {
                untried.swap_remove(k);
            }
        }
    }
    let cost = state.total();
    Descent {
        routes: state
            .routes
            .into_iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.visits)
            .collect(),
        cost,
        moves_applied: applied,
    }
}

/// Penalized cost of a set of routes, evaluated from scratch.
pub fn penalized_cost(ev: &Evaluator<'_>, routes: &[Vec<usize>]) -> f64 {
    routes.iter().map(|r| ev.route_cost(r)).sum()
}

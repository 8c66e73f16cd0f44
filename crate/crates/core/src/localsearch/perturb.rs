use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::soa::SpeedLimits;
use crate::speed::SpeedMatrix;

/// Redraws allowed before a perturbation request gives up.
pub const MAX_PERTURB_ATTEMPTS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PerturbationId {
    ShiftToEnd,
    MergeRoutes,
    ChangeSpeeds,
}

/// Selection probabilities of the routing perturbations. Speed changes are
/// triggered by the stall counter instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbWeights {
    pub shift_to_end: f64,
    pub merge_routes: f64,
}

impl Default for PerturbWeights {
    fn default() -> Self {
        PerturbWeights {
            shift_to_end: 0.9,
            merge_routes: 0.1,
        }
    }
}

fn load(route: &[usize], inst: &Instance) -> f64 {
    route.iter().map(|&c| inst.node(c).demand).sum()
}

/// One attempt of `kind`; `None` when it would break capacity or has no
/// admissible target.
fn attempt(
    routes: &[Vec<usize>],
    kind: PerturbationId,
    inst: &Instance,
    rng: &mut impl Rng,
) -> Option<Vec<Vec<usize>>> {
    let mut routes: Vec<Vec<usize>> = routes.iter().filter(|r| r.len() > 2).cloned().collect();
    match kind {
        PerturbationId::ShiftToEnd => {
            let total: usize = routes.iter().map(|r| r.len() - 2).sum();
            let with_empty = routes.len() < inst.fleet_size;
            let targets = routes.len() - 1 + usize::from(with_empty);
            if total == 0 || targets == 0 {
                return None;
            }
            let mut pick = rng.random_range(0..total);
            let mut src = 0;
            while pick >= routes[src].len() - 2 {
                pick -= routes[src].len() - 2;
                src += 1;
            }
            let pos = pick + 1;
            let customer = routes[src][pos];
            let mut dst = rng.random_range(0..targets);
            if dst >= src {
                dst += 1;
            }
            if dst == routes.len() {
                routes.push(vec![0, 0]);
            }
            if load(&routes[dst], inst) + inst.node(customer).demand > inst.capacity + 1e-9 {
                return None;
            }
            routes[src].remove(pos);
            let end = routes[dst].len() - 1;
            routes[dst].insert(end, customer);
        }
        PerturbationId::MergeRoutes => {
            if routes.len() < 2 {
                return None;
            }
            let mut order: Vec<usize> = (0..routes.len()).collect();
            let loads: Vec<f64> = routes.iter().map(|r| load(r, inst)).collect();
            order.sort_by(|&x, &y| loads[x].total_cmp(&loads[y]).then(x.cmp(&y)));
            let (a, b) = (order[0], order[1]);
            if loads[a] + loads[b] > inst.capacity + 1e-9 {
                return None;
            }
            let mut merged = routes[a][..routes[a].len() - 1].to_vec();
            merged.extend_from_slice(&routes[b][1..]);
            routes[a] = merged;
            routes.remove(b);
        }
        PerturbationId::ChangeSpeeds => return None,
    }
    routes.retain(|r| r.len() > 2);
    Some(routes)
}

/// Applies a randomly selected routing perturbation, redrawing (kind
/// included) whenever the drawn move is inadmissible.
pub fn perturb(
    routes: &[Vec<usize>],
    weights: PerturbWeights,
    inst: &Instance,
    rng: &mut impl Rng,
) -> Result<(Vec<Vec<usize>>, PerturbationId)> {
    let total = weights.shift_to_end + weights.merge_routes;
    for _ in 0..MAX_PERTURB_ATTEMPTS {
        let kind = if rng.random::<f64>() * total < weights.shift_to_end {
            PerturbationId::ShiftToEnd
        } else {
            PerturbationId::MergeRoutes
        };
        if let Some(out) = attempt(routes, kind, inst, rng) {
            return Ok((out, kind));
        }
    }
    Err(Error::PerturbationExhausted(MAX_PERTURB_ATTEMPTS))
}

/// Applies one specific routing perturbation, redrawing its random choices
/// on failure.
pub fn perturb_with(
    routes: &[Vec<usize>],
    kind: PerturbationId,
    inst: &Instance,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<usize>>> {
    for _ in 0..MAX_PERTURB_ATTEMPTS {
        if let Some(out) = attempt(routes, kind, inst, rng) {
            return Ok(out);
        }
    }
    Err(Error::PerturbationExhausted(MAX_PERTURB_ATTEMPTS))
}

/// Sets every arc of one random route to one speed drawn from the fuel
/// optimum, the fuel-driver optimum and the maximum. Returns the route index
/// and the speed written.
pub fn change_speeds(
    matrix: &mut SpeedMatrix,
    routes: &[Vec<usize>],
    limits: SpeedLimits,
    rng: &mut impl Rng,
) -> Option<(usize, f64)> {
    if routes.is_empty() {
        return None;
    }
    let r = rng.random_range(0..routes.len());
    let v = [limits.floor, limits.target, limits.max][rng.random_range(0..3)];
    for w in routes[r].windows(2) {
        matrix.set(w[0], w[1], v);
    }
    Some((r, v))
}

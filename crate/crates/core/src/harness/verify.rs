//! Randomised comparisons of the fast code paths against the oracles.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::{brute_force_speed_oracle, exhaustive_partition, simulate_schedule, Simulated};
use crate::energy::{optimal_speed_fuel, ObjectiveParams};
use crate::instance::{random_prp_base, Instance, Node, ProblemKind};
use crate::routeval::{Evaluator, Move, NeighborhoodId, RouteCache, SubseqData};
use crate::setpart::{pool_add, solve_partition, PoolOrigin, RoutePool};
use crate::soa::optimize_speeds;
use crate::solution::{Route, Solution};
use crate::speed::SpeedMatrix;

/// Result of one randomised check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest observed error, in the check's own measure.
    pub worst: f64,
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome {
            name,
            cases: 0,
            failures: 0,
            worst: 0.0,
            first_failure: None,
        }
    }

    fn observe(&mut self, err: f64, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if err.is_nan() || err > self.worst {
            self.worst = err;
        }
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

/// Customers in a 50 km square with random windows, service times and
/// demands; `capacity` is left generous so every move can be evaluated.
pub fn random_window_instance(n: usize, rng: &mut impl Rng) -> Instance {
    let mut nodes = vec![Node {
        tw_end: rng.random_range(20_000.0..200_000.0),
        ..Node::open(25_000.0, 25_000.0, 0.0, 0.0)
    }];
    for _ in 0..n {
        let a = rng.random_range(0.0..40_000.0f64);
        nodes.push(Node {
            tw_start: a,
            tw_end: a + rng.random_range(0.0..20_000.0f64),
            ..Node::open(
                rng.random_range(0.0..50_000.0),
                rng.random_range(0.0..50_000.0),
                rng.random_range(1.0..500.0f64).round(),
                rng.random_range(0.0..900.0f64).round(),
            )
        });
    }
    Instance::new(
        "random-windows",
        ProblemKind::Prp,
        nodes,
        n.max(1),
        1e9,
        (5.5, 25.0),
        ObjectiveParams::prp_uk_2012(),
    )
    .expect("generated instance is valid")
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn aggregate_error(f: &SubseqData, s: &Simulated) -> f64 {
    [
        rel_err(f.duration, s.duration),
        rel_err(f.time_warp, s.time_warp),
        rel_err(f.earliest, s.earliest),
        rel_err(f.latest, s.latest),
        rel_err(f.load, s.load),
        rel_err(f.distance, s.distance),
        rel_err(f.travel_time, s.travel_time),
        rel_err(f.load_distance, s.load_distance),
        rel_err(f.sq_speed_distance, s.sq_speed_distance),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Folded aggregates of random (sub)routes against the schedule simulator.
/// Errors are relative, floored at an absolute scale of 1.
pub fn check_aggregates(cases: usize, seed: u64, tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("aggregates vs simulator");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = random_window_instance(30, &mut rng);
    for case in 0..cases {
        if case % 100 == 0 {
            inst = random_window_instance(30, &mut rng);
        }
        let k = rng.random_range(0..=30usize);
        let mut customers: Vec<usize> = (1..=30).collect();
        customers.shuffle(&mut rng);
        let mut visits = vec![0];
        visits.extend_from_slice(&customers[..k]);
        visits.push(0);
        let speeds: Vec<f64> = (1..visits.len()).map(|_| rng.random_range(5.5..25.0)).collect();
        // Whole route half the time, otherwise a random slice of it.
        let (i, j) = if rng.random_bool(0.5) {
            (0, visits.len() - 1)
        } else {
            let i = rng.random_range(0..visits.len());
            (i, rng.random_range(i..visits.len()))
        };
        let slice = &visits[i..=j];
        let sp = &speeds[i..j];
        let mut acc = SubseqData::at_position(&inst, slice[0], i);
        for (t, w) in slice.windows(2).enumerate() {
            acc = acc.concat(&SubseqData::node(&inst, w[1]), inst.dist(w[0], w[1]), sp[t]);
        }
        let sim = simulate_schedule(&inst, slice, sp, i == 0);
        let err = aggregate_error(&acc, &sim);
        out.observe(err, err <= tol, || format!("{slice:?}: fold {acc:?} vs simulated {sim:?}"));
    }
    out
}

/// Visit lists after `mv`, built by plain list surgery.
pub fn apply_by_hand(routes: &[Vec<usize>], mv: &Move) -> Vec<Vec<usize>> {
    let mut out = routes.to_vec();
    match *mv {
        Move::Shift { from, pos, len, to, at } => {
            let block: Vec<usize> = routes[from][pos..pos + len].to_vec();
            out[from].drain(pos..pos + len);
            out[to].splice(at..at, block);
        }
        Move::Swap { r1, p1, len1, r2, p2, len2 } => {
            let b1: Vec<usize> = routes[r1][p1..p1 + len1].to_vec();
            let b2: Vec<usize> = routes[r2][p2..p2 + len2].to_vec();
            out[r1].splice(p1..p1 + len1, b2);
            out[r2].splice(p2..p2 + len2, b1);
        }
        Move::TwoOptStar { r1, i, r2, j } => {
            out[r1] = routes[r1][..=i].iter().chain(&routes[r2][j + 1..]).copied().collect();
            out[r2] = routes[r2][..=j].iter().chain(&routes[r1][i + 1..]).copied().collect();
        }
        Move::Relocate { route, pos, len, at } => {
            let block: Vec<usize> = out[route].drain(pos..pos + len).collect();
            let at = if at <= pos { at } else { at - len };
            out[route].splice(at..at, block);
        }
        Move::Exchange { route, i, j } => out[route].swap(i, j),
        Move::TwoOpt { route, i, j } => out[route][i..=j].reverse(),
    }
    out
}

/// A random move of neighborhood `nb`, or `None` if the routes are too
/// short for it.
pub fn random_move(nb: NeighborhoodId, routes: &[Vec<usize>], rng: &mut impl Rng) -> Option<Move> {
    let nr = routes.len();
    let customers = |r: usize| routes[r].len() - 2;
    let pick_pair = |rng: &mut dyn FnMut() -> usize| -> Option<(usize, usize)> {
        if nr < 2 {
            return None;
        }
        let a = rng();
        let mut b = rng() % (nr - 1);
        if b >= a {
            b += 1;
        }
        Some((a, b))
    };
    let mut draw = || rng.random_range(0..nr);
    match nb {
        NeighborhoodId::Shift10 | NeighborhoodId::Shift20 => {
            let len = if nb == NeighborhoodId::Shift10 { 1 } else { 2 };
            let (from, to) = pick_pair(&mut draw)?;
            if customers(from) < len {
                return None;
            }
            let pos = rng.random_range(1..=customers(from) + 1 - len);
            let at = rng.random_range(1..routes[to].len());
            Some(Move::Shift { from, pos, len, to, at })
        }
        NeighborhoodId::Swap11 | NeighborhoodId::Swap22 => {
            let len = if nb == NeighborhoodId::Swap11 { 1 } else { 2 };
            let (r1, r2) = pick_pair(&mut draw)?;
            if customers(r1) < len || customers(r2) < len {
                return None;
            }
            let p1 = rng.random_range(1..=customers(r1) + 1 - len);
            let p2 = rng.random_range(1..=customers(r2) + 1 - len);
            Some(Move::Swap { r1, p1, len1: len, r2, p2, len2: len })
        }
        NeighborhoodId::TwoOptStar => {
            let (r1, r2) = pick_pair(&mut draw)?;
            let i = rng.random_range(0..routes[r1].len() - 1);
            let j = rng.random_range(0..routes[r2].len() - 1);
            Some(Move::TwoOptStar { r1, i, r2, j })
        }
        NeighborhoodId::Reinsertion | NeighborhoodId::OrOpt2 | NeighborhoodId::OrOpt3 => {
            let len = match nb {
                NeighborhoodId::Reinsertion => 1,
                NeighborhoodId::OrOpt2 => 2,
                _ => 3,
            };
            let route = draw();
            if customers(route) < len + 1 {
                return None;
            }
            let pos = rng.random_range(1..=customers(route) + 1 - len);
            let outside: Vec<usize> = (1..routes[route].len())
                .filter(|&a| a <= pos || a >= pos + len)
                .collect();
            let at = outside[rng.random_range(0..outside.len())];
            Some(Move::Relocate { route, pos, len, at })
        }
        NeighborhoodId::Exchange | NeighborhoodId::TwoOpt => {
            let route = draw();
            if customers(route) < 2 {
                return None;
            }
            let i = rng.random_range(1..customers(route));
            let j = rng.random_range(i + 1..=customers(route));
            Some(if nb == NeighborhoodId::Exchange {
                Move::Exchange { route, i, j }
            } else {
                Move::TwoOpt { route, i, j }
            })
        }
    }
}

/// Constant-time move deltas against from-scratch evaluation of the routes
/// rebuilt by hand. Uses a unit time-warp penalty so warp terms stay on the
/// scale of the other costs; errors are absolute.
pub fn check_move_deltas(cases: usize, seed: u64, tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("move deltas vs re-evaluation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < cases {
        let n = rng.random_range(4..=20usize);
        let mut inst = random_window_instance(n, &mut rng);
        inst.params.tw_penalty = 1.0;
        let mut matrix = SpeedMatrix::new(n + 1, 25.0);
        for i in 0..=n {
            for j in 0..=n {
                matrix.set(i, j, rng.random_range(5.5..25.0));
            }
        }
        let ev = Evaluator::new(&inst, &matrix);
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(&mut rng);
        let nr = rng.random_range(1..=4usize.min(n));
        let mut lists: Vec<Vec<usize>> = vec![vec![0]; nr];
        for (k, &c) in order.iter().enumerate() {
            let r = if k < nr { k } else { rng.random_range(0..nr) };
            lists[r].push(c);
        }
        for l in &mut lists {
            l.push(0);
        }
        if rng.random_bool(0.3) {
            lists.push(vec![0, 0]);
        }
        let caches: Vec<RouteCache> = lists
            .iter()
            .enumerate()
            .map(|(k, v)| RouteCache::new(v.clone(), &ev, k as u64))
            .collect();
        let before: f64 = lists.iter().map(|v| ev.route_cost(v)).sum();
        for _ in 0..50 {
            if done >= cases {
                break;
            }
            let nb = NeighborhoodId::ALL[rng.random_range(0..10)];
            let Some(mv) = random_move(nb, &lists, &mut rng) else {
                continue;
            };
            let Some(predicted) = ev.evaluate_move(&caches, &mv) else {
                continue;
            };
            let after: f64 = apply_by_hand(&lists, &mv).iter().map(|v| ev.route_cost(v)).sum();
            let err = (after - before - predicted).abs();
            out.observe(err, err <= tol, || format!("{mv:?} on {lists:?}: {predicted} vs {}", after - before));
            done += 1;
        }
    }
    out
}

/// A random route of `1..=max_customers` customers with tight windows built
/// around a schedule driven at random feasible speeds, so the route is
/// feasible by construction.
pub fn random_tight_route(max_customers: usize, rng: &mut impl Rng) -> (Instance, Vec<usize>) {
    let k = rng.random_range(1..=max_customers);
    let seed = rng.random::<u64>();
    let mut inst = random_prp_base(k, seed).expect("base instance");
    // Shrink the square so routes fit a working day.
    for node in &mut inst.nodes {
        node.x = 100_000.0 + (node.x - 100_000.0) * 0.25;
        node.y = 100_000.0 + (node.y - 100_000.0) * 0.25;
    }
    inst = Instance::new(
        inst.name.clone(),
        inst.kind,
        inst.nodes.clone(),
        inst.fleet_size,
        1e9,
        (inst.speed_min, inst.speed_max),
        inst.params.clone(),
    )
    .expect("rescaled instance");
    let mut visits: Vec<usize> = (1..=k).collect();
    visits.shuffle(rng);
    visits.insert(0, 0);
    visits.push(0);
    let lo = optimal_speed_fuel(&inst.params).expect("positive coefficients").max(inst.speed_min);
    let mut t = 0.0;
    for w in visits.windows(2) {
        let v = rng.random_range(lo..inst.speed_max);
        t += inst.node(w[0]).service_time + inst.dist(w[0], w[1]) / v;
        if w[1] != 0 {
            let node = &mut inst.nodes[w[1]];
            let width = rng.random_range(0.0..2000.0f64).round();
            let before = rng.random_range(0.0..=width).round();
            node.tw_start = (t - before).max(0.0).floor();
            node.tw_end = (node.tw_start + width).max(t.ceil());
            t = t.max(node.tw_start);
        }
    }
    inst.nodes[0].tw_end = (t + rng.random_range(0.0..7200.0)).ceil();
    (inst, visits)
}

/// Speed optimizer cost against the grid dynamic program; the error is the
/// relative excess of the optimizer over the oracle.
pub fn check_soa(cases: usize, seed: u64, max_customers: usize, levels: usize, tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("speed optimizer vs grid oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let (inst, visits) = random_tight_route(max_customers, &mut rng);
        let soa = optimize_speeds(&visits, &inst);
        let oracle = brute_force_speed_oracle(&visits, &inst, levels);
        match (soa, oracle) {
            (Ok(s), Ok(o)) => {
                let excess = (s.cost - o) / o;
                out.observe(excess.max(0.0), excess <= tol, || {
                    format!("{visits:?} on {}: optimizer {} vs oracle {o}", inst.name, s.cost)
                });
            }
            (s, o) => out.observe(f64::INFINITY, false, || {
                format!("{visits:?} on {}: optimizer {s:?}, oracle {o:?}", inst.name)
            }),
        }
    }
    out
}

/// Exact set partitioning against subset enumeration on random pools.
pub fn check_partition(cases: usize, seed: u64, max_routes: usize, max_customers: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("set partitioning vs enumeration");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let n = rng.random_range(1..=max_customers);
        let nodes: Vec<Node> = (0..=n)
            .map(|i| {
                Node::open(
                    rng.random_range(0.0..100.0),
                    rng.random_range(0.0..100.0),
                    if i == 0 { 0.0 } else { 1.0 },
                    0.0,
                )
            })
            .collect();
        let fleet = rng.random_range(1..=n);
        let inst = Instance::new("pool", ProblemKind::Fcvrp, nodes, n, 1e9, (1.0, 1.0), ObjectiveParams::fcvrp_default())
            .expect("pool instance");
        // A feasible incumbent partition, then random extra columns.
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(&mut rng);
        let parts = rng.random_range(1..=fleet.min(max_routes));
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); parts];
        for (k, &c) in order.iter().enumerate() {
            let r = if k < parts { k } else { rng.random_range(0..parts) };
            lists[r].push(c);
        }
        let route = |cs: &[usize]| {
            let mut v = vec![0];
            v.extend_from_slice(cs);
            v.push(0);
            Route::with_matrix(v, &SpeedMatrix::new(n + 1, 1.0), &inst)
        };
        let incumbent = Solution::new(lists.iter().map(|l| route(l)).collect());
        let mut pool = RoutePool::new(PoolOrigin::Temporary);
        for r in &incumbent.routes {
            pool_add(&mut pool, r, &inst).expect("feasible route");
        }
        let extra = rng.random_range(0..=max_routes - parts);
        for _ in 0..extra {
            let size = rng.random_range(1..=n);
            let mut cs: Vec<usize> = (1..=n).collect();
            cs.shuffle(&mut rng);
            cs.truncate(size);
            let mut r = route(&cs);
            // Perturb costs so cheaper recombinations exist.
            r.cost *= rng.random_range(0.5..1.0);
            pool_add(&mut pool, &r, &inst).expect("feasible route");
        }
        let columns: Vec<(Vec<usize>, f64)> = pool
            .routes()
            .iter()
            .map(|r| (r.customers.ones().collect(), r.cost))
            .collect();
        let exact = exhaustive_partition(&columns, n, fleet);
        let inst = inst.with_fleet_size(fleet).expect("fleet");
        let got = solve_partition(&[&pool], &inst, &incumbent, None, |_| None);
        let want = exact.map(|e| e.min(incumbent.cost())).unwrap_or(incumbent.cost());
        let err = (got.solution.cost() - want).abs() / want.max(1.0);
        let ok = got.proven && err <= 1e-9 && got.solution.covers_exactly(&inst);
        out.observe(err, ok, || {
            format!("{} columns, fleet {fleet}: solver {} vs enumeration {want}", columns.len(), got.solution.cost())
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_checks_pass() {
        assert!(check_aggregates(300, 1, 1e-9).passed());
        assert!(check_move_deltas(300, 2, 1e-6).passed());
        assert!(check_partition(30, 3, 15, 12).passed());
    }

    #[test]
    fn hand_application_matches_known_cases() {
        let routes = vec![vec![0, 1, 2, 3, 4, 0], vec![0, 5, 6, 7, 8, 0]];
        let mv = Move::Relocate { route: 0, pos: 1, len: 2, at: 4 };
        assert_eq!(apply_by_hand(&routes, &mv)[0], vec![0, 3, 1, 2, 4, 0]);
        let mv = Move::TwoOptStar { r1: 0, i: 2, r2: 1, j: 0 };
        assert_eq!(apply_by_hand(&routes, &mv), vec![vec![0, 1, 2, 5, 6, 7, 8, 0], vec![0, 3, 4, 0]]);
    }

    #[test]
    fn tight_routes_are_feasible_at_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (inst, visits) = random_tight_route(8, &mut rng);
            assert!(optimize_speeds(&visits, &inst).is_ok(), "{visits:?}");
        }
    }
}

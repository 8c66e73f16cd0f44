//! Slow reference implementations used to check the fast code paths.

use std::collections::HashMap;

use crate::energy::{arc_fuel, optimal_speed_fuel};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::routeval::TIME_EPS;

/// Aggregates of a visit sequence computed by explicit simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Simulated {
    pub duration: f64,
    pub time_warp: f64,
    pub earliest: f64,
    pub latest: f64,
    pub load: f64,
    pub distance: f64,
    pub travel_time: f64,
    pub load_distance: f64,
    pub sq_speed_distance: f64,
}

/// Window of the vertex at `pos`; a leading depot may only start at time 0.
fn window(inst: &Instance, visits: &[usize], pos: usize, depot_start: bool) -> (f64, f64) {
    if pos == 0 && depot_start {
        (0.0, 0.0)
    } else {
        let n = inst.node(visits[pos]);
        (n.tw_start, n.tw_end)
    }
}

/// Time warp and duration when service at the first vertex starts at `t`.
/// Late arrivals are pulled back to the window end and counted as warp.
fn run_from(inst: &Instance, visits: &[usize], speeds: &[f64], t: f64, depot_start: bool) -> (f64, f64) {
    let mut clock = t;
    let mut warp = 0.0;
    for k in 1..visits.len() {
        let d = inst.dist(visits[k - 1], visits[k]);
        clock += inst.node(visits[k - 1]).service_time + if d > 0.0 { d / speeds[k - 1] } else { 0.0 };
        let (a, b) = window(inst, visits, k, depot_start);
        if clock < a {
            clock = a;
        }
        if clock > b {
            warp += clock - b;
            clock = b;
        }
    }
    let end = clock + inst.node(visits[visits.len() - 1]).service_time;
    (warp, end - t + warp)
}

/// Largest `t` in `[lo, hi]` with `ok(t)`, given `ok(lo)` and monotone `ok`.
fn last_true(lo: f64, hi: f64, ok: impl Fn(f64) -> bool) -> f64 {
    if ok(hi) {
        return hi;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1e-12 * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Smallest `t` in `[lo, hi]` with `ok(t)`, given `ok(hi)` and monotone `ok`.
fn first_true(lo: f64, hi: f64, ok: impl Fn(f64) -> bool) -> f64 {
    if ok(lo) {
        return lo;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1e-12 * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Simulates `visits` driven at `speeds`. Starting later never lowers the
/// warp and never raises the duration, so the minimum warp is met from the
/// window start and the two bisections locate the start interval attaining
/// both minima. `depot_start` pins a leading depot to time 0.
pub fn simulate_schedule(inst: &Instance, visits: &[usize], speeds: &[f64], depot_start: bool) -> Simulated {
    let (a, b) = window(inst, visits, 0, depot_start);
    let (min_warp, _) = run_from(inst, visits, speeds, a, depot_start);
    let scale = 1.0 + min_warp.abs() + b.abs();
    let tol = 1e-12 * scale;
    let latest = last_true(a, b, |t| run_from(inst, visits, speeds, t, depot_start).0 <= min_warp + tol);
    let (_, min_duration) = run_from(inst, visits, speeds, latest, depot_start);
    let earliest = first_true(a, latest, |t| {
        run_from(inst, visits, speeds, t, depot_start).1 <= min_duration + tol
    });

    let mut out = Simulated {
        duration: min_duration,
        time_warp: min_warp,
        earliest,
        latest,
        load: visits.iter().map(|&i| inst.node(i).demand).sum(),
        distance: 0.0,
        travel_time: 0.0,
        load_distance: 0.0,
        sq_speed_distance: 0.0,
    };
    for k in 1..visits.len() {
        let d = inst.dist(visits[k - 1], visits[k]);
        let v = speeds[k - 1];
        let downstream: f64 = visits[k..].iter().map(|&i| inst.node(i).demand).sum();
        out.distance += d;
        out.travel_time += if d > 0.0 { d / v } else { 0.0 };
        out.load_distance += downstream * d;
        out.sq_speed_distance += v * v * d;
    }
    out
}

/// `levels` speeds from `v_max` down to `max(v*_F, v_min)` in equal steps.
pub fn speed_grid(inst: &Instance, levels: usize) -> Result<Vec<f64>> {
    if levels == 0 {
        return Err(Error::Param("at least one speed level is needed".into()));
    }
    let hi = inst.speed_max;
    let lo = optimal_speed_fuel(&inst.params)?.max(inst.speed_min).min(hi);
    if levels == 1 {
        return Ok(vec![hi]);
    }
    let step = (hi - lo) / (levels - 1) as f64;
    Ok((0..levels).map(|k| hi - step * k as f64).collect())
}

/// Minimum PRP cost of a fixed depot-bounded route over per-arc speeds drawn
/// from `levels` grid values. Labels are (service start, fuel cost) pairs,
/// one per 1 s bucket of the service start, pruned to a Pareto front.
pub fn brute_force_speed_oracle(visits: &[usize], inst: &Instance, levels: usize) -> Result<f64> {
    let customers = visits.len().saturating_sub(2);
    if customers > 10 {
        return Err(Error::Param(format!("{customers} customers exceed the oracle limit of 10")));
    }
    if visits.len() < 2 || visits[0] != 0 || visits[visits.len() - 1] != 0 {
        return Err(Error::InfeasibleRoute(format!("{visits:?} is not depot-bounded")));
    }
    let grid = speed_grid(inst, levels)?;
    let p = &inst.params;
    let mut remaining: f64 = visits.iter().map(|&i| inst.node(i).demand).sum();
    // Labels: (service start at the current vertex, fuel cost so far).
    let mut labels: Vec<(f64, f64)> = vec![(inst.node(0).tw_start.max(0.0), 0.0)];
    for k in 1..visits.len() {
        let (i, j) = (visits[k - 1], visits[k]);
        remaining -= inst.node(i).demand;
        let d = inst.dist(i, j);
        let from = inst.node(i);
        let to = inst.node(j);
        let arc: Vec<(f64, f64)> = if d > 0.0 {
            grid.iter()
                .map(|&v| Ok((d / v, p.fuel_cost * arc_fuel(d, remaining.max(0.0), v, p)?)))
                .collect::<Result<_>>()?
        } else {
            vec![(0.0, 0.0)]
        };
        let mut buckets: HashMap<i64, (f64, f64)> = HashMap::new();
        for &(t, c) in &labels {
            for &(travel, fuel) in &arc {
                let arrive = t + from.service_time + travel;
                if arrive > to.tw_end + TIME_EPS {
                    continue;
                }
                let start = arrive.max(to.tw_start);
                let cost = c + fuel;
                let e = buckets.entry(start.floor() as i64).or_insert((start, cost));
                if cost < e.1 || (cost == e.1 && start < e.0) {
                    *e = (start, cost);
                }
            }
        }
        let mut next: Vec<(f64, f64)> = buckets.into_values().collect();
        next.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        labels.clear();
        for lab in next {
            if labels.last().is_none_or(|l| lab.1 < l.1) {
                labels.push(lab);
            }
        }
        if labels.is_empty() {
            return Err(Error::InfeasibleRoute(format!(
                "{visits:?} cannot reach position {k} in time at any grid speed"
            )));
        }
    }
    // At the closing depot the start time is the completion time.
    let best = labels
        .iter()
        .map(|&(t, c)| c + p.driver_wage * t)
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// Cheapest selection of at most `fleet` pairwise disjoint columns covering
/// customers `1..=n`, by enumerating every subset. Columns are customer
/// lists with costs.
pub fn exhaustive_partition(columns: &[(Vec<usize>, f64)], n: usize, fleet: usize) -> Option<f64> {
    if columns.len() > 24 {
        return None;
    }
    let masks: Vec<u64> = columns
        .iter()
        .map(|(cs, _)| cs.iter().fold(0u64, |m, &c| m | (1u64 << c)))
        .collect();
    let full: u64 = (1..=n).fold(0u64, |m, c| m | (1u64 << c));
    let mut best: Option<f64> = None;
    for subset in 0u32..(1u32 << columns.len()) {
        if subset.count_ones() as usize > fleet {
            continue;
        }
        let mut covered = 0u64;
        let mut cost = 0.0;
        let mut ok = true;
        for (k, &m) in masks.iter().enumerate() {
            if subset & (1 << k) != 0 {
                if covered & m != 0 {
                    ok = false;
                    break;
                }
                covered |= m;
                cost += columns[k].1;
            }
        }
        if ok && covered == full && best.is_none_or(|b| cost < b) {
            best = Some(cost);
        }
    }
    best
}

/// Optimal PRP cost of a small instance: every elementary route that fits
/// the capacity and is on time at `v_max` gets its best grid-speed cost
/// (orders of one customer set are tried by increasing lower bound), then a
/// subset dynamic program picks at most `fleet` disjoint routes.
pub fn exhaustive_prp_optimum(inst: &Instance, levels: usize) -> Result<Option<(f64, Vec<Vec<usize>>)>> {
    let n = inst.n();
    if n > 12 {
        return Err(Error::Param(format!("{n} customers exceed the enumerator limit of 12")));
    }
    let p = &inst.params;
    let grid = speed_grid(inst, levels)?;
    // Wage-inclusive per-metre cost minimised over the grid, ignoring load.
    let per_metre = grid
        .iter()
        .map(|&v| Ok(p.fuel_cost * arc_fuel(1.0, 0.0, v, p)? + p.driver_wage / v))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let mut orders: HashMap<u32, Vec<(f64, Vec<usize>)>> = HashMap::new();
    let mut stack: Vec<(Vec<usize>, u32, f64, f64)> = vec![(vec![0], 0, 0.0, 0.0)];
    while let Some((path, mask, time, load)) = stack.pop() {
        let last = *path.last().expect("path starts at the depot");
        for c in 1..=n {
            if mask & (1 << c) != 0 || load + inst.node(c).demand > inst.capacity + 1e-9 {
                continue;
            }
            let node = inst.node(c);
            let prev = inst.node(last);
            let arrive = time.max(prev.tw_start) + prev.service_time + inst.dist(last, c) / inst.speed_max;
            if arrive > node.tw_end + TIME_EPS {
                continue;
            }
            let mut next = path.clone();
            next.push(c);
            let back = arrive.max(node.tw_start) + node.service_time + inst.dist(c, 0) / inst.speed_max;
            if back <= inst.node(0).tw_end + TIME_EPS {
                let mut closed = next.clone();
                closed.push(0);
                let bound = route_lower_bound(&closed, inst, per_metre);
                orders.entry(mask | (1 << c)).or_default().push((bound, closed));
            }
            stack.push((next, mask | (1 << c), arrive, load + node.demand));
        }
    }

    let mut route_cost: HashMap<u32, (f64, Vec<usize>)> = HashMap::new();
    for (mask, mut list) in orders {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best: Option<(f64, Vec<usize>)> = None;
        for (bound, visits) in list {
            if best.as_ref().is_some_and(|b| bound >= b.0) {
                break;
            }
            if let Ok(c) = brute_force_speed_oracle(&visits, inst, levels) {
                if best.as_ref().is_none_or(|b| c < b.0) {
                    best = Some((c, visits));
                }
            }
        }
        if let Some(b) = best {
            route_cost.insert(mask, b);
        }
    }

    // Layer k holds the cheapest cover of each mask by k routes, each new
    // route containing the lowest uncovered customer.
    let full: u32 = (1..=n).fold(0u32, |m, c| m | (1 << c));
    let size = 1usize << (n + 1);
    let mut by_low: HashMap<usize, Vec<(u32, f64)>> = HashMap::new();
    for (&m, (c, _)) in &route_cost {
        by_low.entry(m.trailing_zeros() as usize).or_default().push((m, *c));
    }
    for list in by_low.values_mut() {
        list.sort_by_key(|x| x.0);
    }
    let mut layers: Vec<Vec<f64>> = vec![vec![f64::INFINITY; size]];
    let mut choices: Vec<Vec<u32>> = vec![vec![0; size]];
    layers[0][0] = 0.0;
    let mut best: Option<(f64, usize)> = None;
    for k in 1..=inst.fleet_size.min(n) {
        let prev = &layers[k - 1];
        let mut cur = vec![f64::INFINITY; size];
        let mut pick = vec![0u32; size];
        for mask in 0..size {
            if !prev[mask].is_finite() || mask as u32 == full {
                continue;
            }
            let low = (1..=n).find(|&c| mask & (1 << c) == 0).expect("mask is not full");
            for &(r, c) in by_low.get(&low).map(Vec::as_slice).unwrap_or(&[]) {
                if r as usize & mask != 0 {
                    continue;
                }
                let to = mask | r as usize;
                if prev[mask] + c < cur[to] {
                    cur[to] = prev[mask] + c;
                    pick[to] = r;
                }
            }
        }
        if cur[full as usize].is_finite() && best.is_none_or(|b| cur[full as usize] < b.0) {
            best = Some((cur[full as usize], k));
        }
        layers.push(cur);
        choices.push(pick);
    }
    let Some((cost, k)) = best else {
        return Ok(None);
    };
    let mut routes = Vec::new();
    let mut mask = full;
    for layer in (1..=k).rev() {
        let r = choices[layer][mask as usize];
        routes.push(route_cost[&r].1.clone());
        mask &= !r;
    }
    Ok(Some((cost, routes)))
}

/// Lower bound on a route's PRP cost: every metre at its cheapest
/// wage-inclusive rate, plus load fuel, plus the wage on service time.
fn route_lower_bound(visits: &[usize], inst: &Instance, per_metre: f64) -> f64 {
    let p = &inst.params;
    let mut remaining: f64 = visits.iter().map(|&i| inst.node(i).demand).sum();
    let mut bound = 0.0;
    for w in visits.windows(2) {
        remaining -= inst.node(w[0]).demand;
        let d = inst.dist(w[0], w[1]);
        bound += d * per_metre + p.fuel_cost * p.w3 * d * remaining.max(0.0);
        bound += p.driver_wage * inst.node(w[0]).service_time;
    }
    bound
}

/// Minimiser of a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (1.0 + a.abs() + b.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{optimal_speed_fuel_driver, route_cost, ObjectiveParams};
    use crate::instance::{random_prp_base, Node, ProblemKind};
    use crate::routeval::SubseqData;

    #[test]
    fn simulator_matches_hand_schedule() {
        // Depot, then a customer 1000 m away opening at 100 s, 25 m/s.
        let mut c = Node::open(1000.0, 0.0, 1.0, 10.0);
        c.tw_start = 100.0;
        c.tw_end = 200.0;
        let inst = Instance::new(
            "sim",
            ProblemKind::Prp,
            vec![Node::open(0.0, 0.0, 0.0, 0.0), c],
            1,
            10.0,
            (5.5, 25.0),
            ObjectiveParams::prp_uk_2012(),
        )
        .unwrap();
        let s = simulate_schedule(&inst, &[0, 1, 0], &[25.0, 25.0], true);
        // Leave at 0, arrive at 40, wait to 100, serve 10 s, 40 s back.
        assert_eq!(s.duration, 150.0);
        assert_eq!(s.time_warp, 0.0);
        assert_eq!((s.earliest, s.latest), (0.0, 0.0));
        assert_eq!(s.load_distance, 1000.0);
        // From the customer alone: start anywhere in [100, 200].
        let tail = simulate_schedule(&inst, &[1, 0], &[25.0], false);
        assert_eq!((tail.earliest, tail.latest), (100.0, 200.0));
        assert_eq!(tail.duration, 50.0);
    }

    #[test]
    fn simulator_agrees_with_fold_on_generated_routes() {
        let inst = random_prp_base(8, 3).unwrap();
        let visits = [0, 3, 1, 7, 5, 0];
        let speeds = [25.0, 12.0, 20.0, 7.5, 18.0];
        let f = SubseqData::fold(&visits, &speeds, &inst);
        let s = simulate_schedule(&inst, &visits, &speeds, true);
        assert!((f.duration - s.duration).abs() < 1e-9);
        assert!((f.load_distance - s.load_distance).abs() < 1e-6);
        assert!((f.sq_speed_distance - s.sq_speed_distance).abs() < 1e-3);
    }

    #[test]
    fn one_level_is_full_speed() {
        let inst = random_prp_base(4, 1).unwrap();
        let visits = [0, 2, 4, 1, 0];
        let oracle = brute_force_speed_oracle(&visits, &inst, 1).unwrap();
        let direct = route_cost(&visits, &[25.0; 4], &inst).total;
        assert!((oracle - direct).abs() <= 1e-9 * direct);
    }

    #[test]
    fn open_windows_reach_the_fuel_driver_speed() {
        let inst = random_prp_base(3, 2).unwrap();
        let visits = [0, 1, 2, 3, 0];
        let best = optimal_speed_fuel_driver(&inst.params).unwrap();
        let ideal = route_cost(&visits, &[best; 4], &inst).total;
        let oracle = brute_force_speed_oracle(&visits, &inst, 500).unwrap();
        assert!(oracle >= ideal - 1e-9 * ideal);
        assert!(oracle <= ideal * (1.0 + 1e-5), "{oracle} vs {ideal}");
    }

    #[test]
    fn partition_enumeration() {
        let cols = vec![(vec![1, 2], 5.0), (vec![3], 2.0), (vec![1], 1.0), (vec![2, 3], 4.0)];
        assert_eq!(exhaustive_partition(&cols, 3, 3), Some(5.0));
        assert_eq!(exhaustive_partition(&cols, 3, 1), None);
    }

    #[test]
    fn golden_section_finds_a_parabola_minimum() {
        let x = golden_section(|x| (x - 3.25).powi(2), 0.0, 10.0, 1e-12);
        assert!((x - 3.25).abs() < 1e-6);
    }

    #[test]
    fn exhaustive_optimum_of_two_customers() {
        let inst = random_prp_base(2, 5).unwrap();
        let (cost, routes) = exhaustive_prp_optimum(&inst, 50).unwrap().unwrap();
        let together = [vec![0, 1, 2, 0], vec![0, 2, 1, 0]]
            .iter()
            .map(|r| brute_force_speed_oracle(r, &inst, 50).unwrap())
            .fold(f64::INFINITY, f64::min);
        let apart = brute_force_speed_oracle(&[0, 1, 0], &inst, 50).unwrap()
            + brute_force_speed_oracle(&[0, 2, 0], &inst, 50).unwrap();
        assert!((cost - together.min(apart)).abs() < 1e-9);
        let covered: usize = routes.iter().map(|r| r.len() - 2).sum();
        assert_eq!(covered, 2);
    }
}

//! Route pools and an exact set-partitioning solver over them.
//!
//! The solver is a depth-first branch and bound: it branches on the
//! uncovered customer with the fewest compatible columns, tries columns in
//! increasing cost per customer, and bounds with the sum over uncovered
//! customers of the cheapest compatible per-customer share.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::routeval::{Objective, SubseqData};
use crate::solution::{Route, Solution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoolOrigin {
    Temporary,
    Permanent,
}

#[derive(Clone, Debug)]
pub struct PooledRoute {
    pub customers: FixedBitSet,
    pub visits: Vec<usize>,
    pub speeds: Vec<f64>,
    pub cost: f64,
    pub origin: PoolOrigin,
}

impl PooledRoute {
    pub fn to_route(&self) -> Route {
        Route {
            visits: self.visits.clone(),
            speeds: self.speeds.clone(),
            cost: self.cost,
            feasible: true,
        }
    }
}

/// Feasible routes keyed by visit order.
#[derive(Clone, Debug)]
pub struct RoutePool {
    origin: PoolOrigin,
    routes: Vec<PooledRoute>,
    index: HashMap<Vec<usize>, usize>,
}

impl RoutePool {
    pub fn new(origin: PoolOrigin) -> Self {
        RoutePool {
            origin,
            routes: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn routes(&self) -> &[PooledRoute] {
        &self.routes
    }

    pub fn clear(&mut self) {
        self.routes.clear();
        self.index.clear();
    }
}

/// Inserts a feasible route. Returns `false` if the same visit order is
/// already pooled at no higher cost; a cheaper copy replaces the old one.
pub fn pool_add(pool: &mut RoutePool, route: &Route, inst: &Instance) -> Result<bool> {
    if route.visits.len() <= 2 {
        return Ok(false);
    }
    let seg = SubseqData::fold(&route.visits, &route.speeds, inst);
    if !Objective::new(inst).is_feasible(&seg) {
        return Err(Error::InfeasibleRoute(format!(
            "{:?} has time warp {} / load {}",
            route.visits, seg.time_warp, seg.load
        )));
    }
    if let Some(&k) = pool.index.get(&route.visits) {
        if pool.routes[k].cost <= route.cost {
            return Ok(false);
        }
        pool.routes[k].speeds = route.speeds.clone();
        pool.routes[k].cost = route.cost;
        return Ok(true);
    }
    let mut customers = FixedBitSet::with_capacity(inst.nodes.len());
    for &c in route.customers() {
        customers.insert(c);
    }
    pool.index.insert(route.visits.clone(), pool.routes.len());
    pool.routes.push(PooledRoute {
        customers,
        visits: route.visits.clone(),
        speeds: route.speeds.clone(),
        cost: route.cost,
        origin: pool.origin,
    });
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct PartitionOutcome {
    pub solution: Solution,
    /// The search finished: no cheaper partition of the pool exists.
    pub proven: bool,
    /// The returned solution is cheaper than the incumbent passed in.
    pub improved: bool,
    pub nodes: u64,
}

struct Column {
    set: FixedBitSet,
    size: usize,
    cost: f64,
    route: Route,
}

struct Search<'c, F> {
    columns: Vec<Column>,
    /// Per customer, the columns containing it by increasing cost per customer.
    by_customer: Vec<Vec<usize>>,
    n: usize,
    fleet: usize,
    best_cost: f64,
    best: Option<Solution>,
    chosen: Vec<usize>,
    deadline: Option<Instant>,
    timed_out: bool,
    nodes: u64,
    on_incumbent: &'c mut F,
}

impl<F: FnMut(&Solution) -> Option<Solution>> Search<'_, F> {
    fn density(&self, k: usize) -> f64 {
        self.columns[k].cost / self.columns[k].size as f64
    }

    fn compatible(&self, k: usize, covered: &FixedBitSet) -> bool {
        self.columns[k].set.is_disjoint(covered)
    }

    fn dfs(&mut self, covered: &mut FixedBitSet, cost: f64, covered_count: usize) {
        self.nodes += 1;
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        if covered_count == self.n {
            if cost < self.best_cost {
                self.record(cost);
            }
            return;
        }
        if self.chosen.len() >= self.fleet {
            return;
        }
        let mut bound = cost;
        let mut branch: Option<(usize, usize)> = None;
        for c in 1..=self.n {
            if covered.contains(c) {
                continue;
            }
            let mut cheapest = None;
            let mut options = 0;
            for &k in &self.by_customer[c] {
                if self.compatible(k, covered) {
                    if cheapest.is_none() {
                        cheapest = Some(self.density(k));
                    }
                    options += 1;
                    if branch.is_some_and(|(_, best)| options >= best) {
                        break;
                    }
                }
            }
            let Some(share) = cheapest else {
                return;
            };
            bound += share;
            if branch.is_none_or(|(_, best)| options < best) {
                branch = Some((c, options));
            }
        }
        if bound >= self.best_cost - 1e-9 * (1.0 + self.best_cost.abs()) {
            return;
        }
        let (c, _) = branch.expect("some customer is uncovered");
        let candidates: Vec<usize> = self.by_customer[c]
            .iter()
            .copied()
            .filter(|&k| self.compatible(k, covered))
            .collect();
        for k in candidates {
            let add = self.columns[k].cost;
            if cost + add >= self.best_cost {
                continue;
            }
            covered.union_with(&self.columns[k].set);
            self.chosen.push(k);
            self.dfs(covered, cost + add, covered_count + self.columns[k].size);
            self.chosen.pop();
            covered.difference_with(&self.columns[k].set);
            if self.timed_out {
                return;
            }
        }
    }

    fn record(&mut self, cost: f64) {
        let routes = self.chosen.iter().map(|&k| self.columns[k].route.clone()).collect();
        let found = Solution::new(routes);
        self.best_cost = cost;
        self.best = Some(found.clone());
        if let Some(better) = (self.on_incumbent)(&found) {
            let c = better.cost();
            if c < self.best_cost {
                self.best_cost = c;
                self.best = Some(better);
            }
        }
    }
}

/// Cheapest partition of the customers into at most `fleet_size` pooled
/// routes, searched below the incumbent's cost. `on_incumbent` sees each new
/// best partition and may return an improved solution, which then becomes
/// the bound. Stops at `time_limit` with `proven = false`.
pub fn solve_partition<F>(
    pools: &[&RoutePool],
    inst: &Instance,
    incumbent: &Solution,
    time_limit: Option<Duration>,
    mut on_incumbent: F,
) -> PartitionOutcome
where
    F: FnMut(&Solution) -> Option<Solution>,
{
    let n = inst.n();
    // One column per customer set, the cheapest.
    let mut by_set: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut columns: Vec<Column> = Vec::new();
    for pr in pools.iter().flat_map(|p| p.routes()) {
        let key: Vec<usize> = pr.customers.ones().collect();
        if key.is_empty() {
            continue;
        }
        match by_set.get(&key) {
            Some(&k) if columns[k].cost <= pr.cost => {}
            Some(&k) => {
                columns[k].cost = pr.cost;
                columns[k].route = pr.to_route();
            }
            None => {
                by_set.insert(key.clone(), columns.len());
                columns.push(Column {
                    set: pr.customers.clone(),
                    size: key.len(),
                    cost: pr.cost,
                    route: pr.to_route(),
                });
            }
        }
    }
    let mut by_customer = vec![Vec::new(); n + 1];
    for (k, col) in columns.iter().enumerate() {
        for c in col.set.ones() {
            if c <= n {
                by_customer[c].push(k);
            }
        }
    }
    for list in &mut by_customer {
        list.sort_by(|&a, &b| {
            let da = columns[a].cost / columns[a].size as f64;
            let db = columns[b].cost / columns[b].size as f64;
            da.total_cmp(&db).then(a.cmp(&b))
        });
    }
    let incumbent_cost = if incumbent.routes.is_empty() && n > 0 {
        f64::INFINITY
    } else {
        incumbent.cost()
    };
    let mut search = Search {
        columns,
        by_customer,
        n,
        fleet: inst.fleet_size,
        best_cost: incumbent_cost,
        best: None,
        chosen: Vec::new(),
        deadline: time_limit.map(|t| Instant::now() + t),
        timed_out: false,
        nodes: 0,
        on_incumbent: &mut on_incumbent,
    };
    let mut covered = FixedBitSet::with_capacity(inst.nodes.len());
    search.dfs(&mut covered, 0.0, 0);
    let proven = !search.timed_out;
    let nodes = search.nodes;
    match search.best {
        Some(solution) => PartitionOutcome {
            solution,
            proven,
            improved: true,
            nodes,
        },
        None => PartitionOutcome {
            solution: incumbent.clone(),
            proven,
            improved: false,
            nodes,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::ObjectiveParams;
    use crate::instance::{Node, ProblemKind};

    fn inst(n: usize, fleet: usize) -> Instance {
        let nodes = (0..=n)
            .map(|i| Node::open(i as f64, 0.0, if i > 0 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Instance::new("sp", ProblemKind::Fcvrp, nodes, fleet, 100.0, (1.0, 1.0), ObjectiveParams::fcvrp_default())
            .unwrap()
    }

    fn route(visits: &[usize], cost: f64) -> Route {
        Route {
            visits: visits.to_vec(),
            speeds: vec![1.0; visits.len() - 1],
            cost,
            feasible: true,
        }
    }

    #[test]
    fn dedup_keeps_cheaper() {
        let inst = inst(2, 2);
        let mut pool = RoutePool::new(PoolOrigin::Temporary);
        assert!(pool_add(&mut pool, &route(&[0, 1, 2, 0], 10.0), &inst).unwrap());
        assert!(!pool_add(&mut pool, &route(&[0, 1, 2, 0], 10.0), &inst).unwrap());
        assert!(pool_add(&mut pool, &route(&[0, 1, 2, 0], 9.0), &inst).unwrap());
        assert_eq!(pool.len(), 1);
        assert_eq!(pool.routes()[0].cost, 9.0);
    }

    #[test]
    fn warped_route_is_rejected() {
        let mut inst = inst(1, 1);
        inst.nodes[1].tw_end = 0.5;
        let mut pool = RoutePool::new(PoolOrigin::Temporary);
        let err = pool_add(&mut pool, &route(&[0, 1, 0], 2.0), &inst).unwrap_err();
        assert!(matches!(err, Error::InfeasibleRoute(_)));
    }

    #[test]
    fn incumbent_routes_alone_are_proven_optimal() {
        let inst = inst(3, 2);
        let inc = Solution::new(vec![route(&[0, 1, 2, 0], 5.0), route(&[0, 3, 0], 6.0)]);
        let mut pool = RoutePool::new(PoolOrigin::Permanent);
        for r in &inc.routes {
            pool_add(&mut pool, r, &inst).unwrap();
        }
        let out = solve_partition(&[&pool], &inst, &inc, None, |_| None);
        assert!(out.proven);
        assert!(!out.improved);
        assert_eq!(out.solution, inc);
    }

    #[test]
    fn cheaper_disjoint_cover_wins() {
        let inst = inst(4, 2);
        let inc = Solution::new(vec![route(&[0, 1, 2, 0], 5.0), route(&[0, 3, 4, 0], 5.0)]);
        let mut pool = RoutePool::new(PoolOrigin::Temporary);
        for r in &inc.routes {
            pool_add(&mut pool, r, &inst).unwrap();
        }
        pool_add(&mut pool, &route(&[0, 1, 3, 0], 4.0), &inst).unwrap();
        pool_add(&mut pool, &route(&[0, 2, 4, 0], 4.5), &inst).unwrap();
        pool_add(&mut pool, &route(&[0, 1, 4, 0], 1.0), &inst).unwrap();
        let mut calls = 0;
        let out = solve_partition(&[&pool], &inst, &inc, None, |_| {
            calls += 1;
            None
        });
        assert!(out.improved && out.proven);
        assert!((out.solution.cost() - 8.5).abs() < 1e-12);
        assert!(calls >= 1);
    }

    #[test]
    fn fleet_limit_is_respected() {
        let inst = inst(3, 1);
        let inc = Solution::new(vec![route(&[0, 1, 2, 3, 0], 10.0)]);
        let mut pool = RoutePool::new(PoolOrigin::Temporary);
        pool_add(&mut pool, &inc.routes[0], &inst).unwrap();
        for c in 1..=3 {
            pool_add(&mut pool, &route(&[0, c, 0], 1.0), &inst).unwrap();
        }
        let out = solve_partition(&[&pool], &inst, &inc, None, |_| None);
        assert!(!out.improved);
    }

    #[test]
    fn callback_improvement_becomes_the_result() {
        let inst = inst(2, 2);
        let inc = Solution::new(vec![route(&[0, 1, 0], 5.0), route(&[0, 2, 0], 5.0)]);
        let mut pool = RoutePool::new(PoolOrigin::Temporary);
        for r in &inc.routes {
            pool_add(&mut pool, r, &inst).unwrap();
        }
        pool_add(&mut pool, &route(&[0, 1, 2, 0], 9.0), &inst).unwrap();
        let out = solve_partition(&[&pool], &inst, &inc, None, |_| {
            Some(Solution::new(vec![route(&[0, 2, 1, 0], 7.0)]))
        });
        assert!((out.solution.cost() - 7.0).abs() < 1e-12);
    }
}

use rand::seq::SliceRandom;
use rand::Rng;

use crate::routeval::{Evaluator, RouteCache, SubseqData};

/// Random-order orderings tried before falling back to largest demand first.
const ORDER_RETRIES: usize = 20;

/// Cheapest insertion: customers in random order, each placed at the
/// position of least penalized-cost increase over `m` initially empty
/// routes. Time warp is allowed; capacity is not. If some order strands a
/// customer, other orders are tried, and as a last resort extra routes are
/// opened beyond the fleet.
pub fn build_initial(ev: &Evaluator<'_>, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let inst = ev.inst;
    let mut order: Vec<usize> = inst.customers().collect();
    for _ in 0..ORDER_RETRIES {
        order.shuffle(rng);
        if let Some(routes) = insert_all(ev, &order, false) {
            return routes;
        }
    }
    order.sort_by(|&a, &b| inst.node(b).demand.total_cmp(&inst.node(a).demand).then(a.cmp(&b)));
    if let Some(routes) = insert_all(ev, &order, false) {
        return routes;
    }
    insert_all(ev, &order, true).expect("unbounded fleet always fits")
}

fn insert_all(ev: &Evaluator<'_>, order: &[usize], overflow: bool) -> Option<Vec<Vec<usize>>> {
    let inst = ev.inst;
    let cap = ev.obj.capacity();
    let mut stamp = 0;
    let mut routes: Vec<RouteCache> = (0..inst.fleet_size)
        .map(|_| {
            stamp += 1;
            RouteCache::new(vec![0, 0], ev, stamp)
        })
        .collect();
    for &c in order {
        let node = SubseqData::node(inst, c);
        let mut best: Option<(f64, usize, usize)> = None;
        for (r, route) in routes.iter().enumerate() {
            if route.load() + node.load > cap + 1e-9 {
                continue;
            }
            let len = route.len();
            for at in 1..len {
                let head = ev.join(route.seg(0, at - 1), &node);
                let full = ev.join(&head, route.seg(at, len - 1));
                let delta = ev.obj.cost(&full, true) - route.cost;
                if best.is_none_or(|(b, _, _)| delta < b) {
                    best = Some((delta, r, at));
                }
            }
        }
        let (r, at) = match best {
            Some((_, r, at)) => (r, at),
            None if overflow => {
                stamp += 1;
                routes.push(RouteCache::new(vec![0, 0], ev, stamp));
                (routes.len() - 1, 1)
            }
            None => return None,
        };
        let mut visits = routes[r].visits.clone();
        visits.insert(at, c);
        stamp += 1;
        routes[r] = RouteCache::new(visits, ev, stamp);
    }
    Some(
        routes
            .into_iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.visits)
            .collect(),
    )
}

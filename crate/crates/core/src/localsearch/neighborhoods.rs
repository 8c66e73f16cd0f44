use crate::routeval::{Evaluator, Move, NeighborhoodId, RouteCache};

const LOAD_EPS: f64 = 1e-9;

/// Rewrites the route indices of a cached move to the pair's current slots.
pub(super) fn retarget(mv: Move, a: usize, b: usize) -> Move {
    match mv {
        Move::Shift { pos, len, at, .. } => Move::Shift { from: a, pos, len, to: b, at },
        Move::Swap { p1, len1, p2, len2, .. } => Move::Swap { r1: a, p1, len1, r2: b, p2, len2 },
        Move::TwoOptStar { i, j, .. } => Move::TwoOptStar { r1: a, i, r2: b, j },
        Move::Relocate { pos, len, at, .. } => Move::Relocate { route: a, pos, len, at },
        Move::Exchange { i, j, .. } => Move::Exchange { route: a, i, j },
        Move::TwoOpt { i, j, .. } => Move::TwoOpt { route: a, i, j },
    }
}

struct Best(Option<(Move, f64)>);

impl Best {
    fn offer(&mut self, ev: &Evaluator<'_>, routes: &[RouteCache], mv: Move) {
        if let Some(d) = ev.evaluate_move(routes, &mv) {
            if self.0.is_none_or(|(_, b)| d < b) {
                self.0 = Some((mv, d));
            }
        }
    }
}

/// Best move of `nb` between routes `a` and `b` (the same route for
/// intra-route neighborhoods), improving or not.
pub(super) fn scan(
    ev: &Evaluator<'_>,
    routes: &[RouteCache],
    nb: NeighborhoodId,
    a: usize,
    b: usize,
) -> Option<(Move, f64)> {
    let mut best = Best(None);
    match nb {
        NeighborhoodId::Shift10 => shift(ev, routes, a, b, 1, &mut best),
        NeighborhoodId::Shift20 => shift(ev, routes, a, b, 2, &mut best),
        NeighborhoodId::Swap11 => swap(ev, routes, a, b, 1, &mut best),
        NeighborhoodId::Swap22 => swap(ev, routes, a, b, 2, &mut best),
        NeighborhoodId::TwoOptStar => two_opt_star(ev, routes, a, b, &mut best),
        NeighborhoodId::Reinsertion => relocate(ev, routes, a, 1, &mut best),
        NeighborhoodId::OrOpt2 => relocate(ev, routes, a, 2, &mut best),
        NeighborhoodId::OrOpt3 => relocate(ev, routes, a, 3, &mut best),
        NeighborhoodId::Exchange => exchange(ev, routes, a, &mut best),
        NeighborhoodId::TwoOpt => two_opt(ev, routes, a, &mut best),
    }
    best.0
}

fn shift(ev: &Evaluator<'_>, routes: &[RouteCache], from: usize, to: usize, len: usize, best: &mut Best) {
    let (rf, rt) = (&routes[from], &routes[to]);
    if rf.len() < len + 2 {
        return;
    }
    let cap = ev.obj.capacity();
    for pos in 1..=rf.len() - 1 - len {
        let block = rf.seg(pos, pos + len - 1).load;
        if rt.load() + block > cap + LOAD_EPS {
            continue;
        }
        for at in 1..rt.len() {
            best.offer(ev, routes, Move::Shift { from, pos, len, to, at });
        }
    }
}

fn swap(ev: &Evaluator<'_>, routes: &[RouteCache], r1: usize, r2: usize, len: usize, best: &mut Best) {
    let (ra, rb) = (&routes[r1], &routes[r2]);
    if ra.len() < len + 2 || rb.len() < len + 2 {
        return;
    }
    let cap = ev.obj.capacity();
    for p1 in 1..=ra.len() - 1 - len {
        let qa = ra.seg(p1, p1 + len - 1).load;
        for p2 in 1..=rb.len() - 1 - len {
            let qb = rb.seg(p2, p2 + len - 1).load;
            if ra.load() - qa + qb > cap + LOAD_EPS || rb.load() - qb + qa > cap + LOAD_EPS {
                continue;
            }
            best.offer(ev, routes, Move::Swap { r1, p1, len1: len, r2, p2, len2: len });
        }
    }
}

fn two_opt_star(ev: &Evaluator<'_>, routes: &[RouteCache], r1: usize, r2: usize, best: &mut Best) {
    let (ra, rb) = (&routes[r1], &routes[r2]);
    let (la, lb) = (ra.len(), rb.len());
    let cap = ev.obj.capacity();
    for i in 0..la - 1 {
        let head_a = ra.seg(0, i).load;
        let tail_a = ra.load() - head_a;
        for j in 0..lb - 1 {
            // Exchanging everything or nothing only relabels the routes.
            if (i == 0 && j == 0) || (i == la - 2 && j == lb - 2) {
                continue;
            }
            let head_b = rb.seg(0, j).load;
            let tail_b = rb.load() - head_b;
            if head_a + tail_b > cap + LOAD_EPS || head_b + tail_a > cap + LOAD_EPS {
                continue;
            }
            best.offer(ev, routes, Move::TwoOptStar { r1, i, r2, j });
        }
    }
}

fn relocate(ev: &Evaluator<'_>, routes: &[RouteCache], route: usize, len: usize, best: &mut Best) {
    let r = &routes[route];
    // A block move needs at least one other customer to move around.
    if r.customer_count() < len + 1 {
        return;
    }
    for pos in 1..=r.len() - 1 - len {
        for at in 1..r.len() {
            if at >= pos && at <= pos + len {
                continue;
            }
            best.offer(ev, routes, Move::Relocate { route, pos, len, at });
        }
    }
}

fn exchange(ev: &Evaluator<'_>, routes: &[RouteCache], route: usize, best: &mut Best) {
    let last = routes[route].len() - 2;
    for i in 1..last {
        for j in i + 1..=last {
            best.offer(ev, routes, Move::Exchange { route, i, j });
        }
    }
}

fn two_opt(ev: &Evaluator<'_>, routes: &[RouteCache], route: usize, best: &mut Best) {
    let last = routes[route].len() - 2;
    for i in 1..last {
        for j in i + 1..=last {
            best.offer(ev, routes, Move::TwoOpt { route, i, j });
        }
    }
}

use super::{Evaluator, RouteCache, SubseqData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NeighborhoodId {
    Shift10,
    Shift20,
    Swap11,
    Swap22,
    TwoOptStar,
    Reinsertion,
    OrOpt2,
    OrOpt3,
    Exchange,
    TwoOpt,
}

impl NeighborhoodId {
    pub const ALL: [NeighborhoodId; 10] = [
        NeighborhoodId::Shift10,
        NeighborhoodId::Shift20,
        NeighborhoodId::Swap11,
        NeighborhoodId::Swap22,
        NeighborhoodId::TwoOptStar,
        NeighborhoodId::Reinsertion,
        NeighborhoodId::OrOpt2,
        NeighborhoodId::OrOpt3,
        NeighborhoodId::Exchange,
        NeighborhoodId::TwoOpt,
    ];

    pub fn is_inter_route(self) -> bool {
        matches!(
            self,
            NeighborhoodId::Shift10
                | NeighborhoodId::Shift20
                | NeighborhoodId::Swap11
                | NeighborhoodId::Swap22
                | NeighborhoodId::TwoOptStar
        )
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A routing move. Positions index `visits`, so 0 and `len - 1` are the
/// depot copies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Move {
    /// Moves `visits[pos..pos+len]` of route `from` into route `to`, before
    /// position `at`.
    Shift {
        from: usize,
        pos: usize,
        len: usize,
        to: usize,
        at: usize,
    },
    /// Exchanges block `[p1, p1+len1)` of `r1` with `[p2, p2+len2)` of `r2`.
    Swap {
        r1: usize,
        p1: usize,
        len1: usize,
        r2: usize,
        p2: usize,
        len2: usize,
    },
    /// Cuts `r1` after `i` and `r2` after `j` and exchanges the tails.
    TwoOptStar { r1: usize, i: usize, r2: usize, j: usize },
    /// Moves `visits[pos..pos+len]` before position `at` of the same route.
    Relocate {
        route: usize,
        pos: usize,
        len: usize,
        at: usize,
    },
    /// Swaps the customers at `i < j`.
    Exchange { route: usize, i: usize, j: usize },
    /// Reverses `visits[i..=j]`.
    TwoOpt { route: usize, i: usize, j: usize },
}

/// A contiguous slice `start..=end` of an existing route, possibly reversed.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Piece {
    pub route: usize,
    pub start: usize,
    pub end: usize,
    pub reversed: bool,
}

/// The rebuilt routes of a move, each spelled as a concatenation of pieces.
#[derive(Clone, Copy, Debug, Default)]
pub struct Plan {
    pub targets: [usize; 2],
    pub pieces: [[Piece; 5]; 2],
    pub counts: [usize; 2],
    pub routes: usize,
}

impl Plan {
    fn route(&mut self, target: usize) -> &mut Self {
        self.targets[self.routes] = target;
        self.routes += 1;
        self
    }

    fn take(&mut self, route: usize, start: usize, end: usize) -> &mut Self {
        self.push(route, start, end, false)
    }

    fn push(&mut self, route: usize, start: usize, end: usize, reversed: bool) -> &mut Self {
        if start <= end {
            let k = self.routes - 1;
            self.pieces[k][self.counts[k]] = Piece {
                route,
                start,
                end,
                reversed,
            };
            self.counts[k] += 1;
        }
        self
    }

    pub fn route_pieces(&self, k: usize) -> &[Piece] {
        &self.pieces[k][..self.counts[k]]
    }
}

impl Move {
    /// Routes whose visit sequence the move rewrites.
    pub fn touched(&self) -> ([usize; 2], usize) {
        match *self {
            Move::Shift { from, to, .. } => ([from, to], 2),
            Move::Swap { r1, r2, .. } | Move::TwoOptStar { r1, r2, .. } => ([r1, r2], 2),
            Move::Relocate { route, .. } | Move::Exchange { route, .. } | Move::TwoOpt { route, .. } => {
                ([route, route], 1)
            }
        }
    }

    /// Spells the new routes. `lens[r]` is the visit count of route `r`.
    pub fn plan(&self, lens: impl Fn(usize) -> usize) -> Plan {
        let mut p = Plan::default();
        match *self {
            Move::Shift { from, pos, len, to, at } => {
                let lf = lens(from);
                let lt = lens(to);
                p.route(from).take(from, 0, pos - 1).take(from, pos + len, lf - 1);
                p.route(to)
                    .take(to, 0, at - 1)
                    .take(from, pos, pos + len - 1)
                    .take(to, at, lt - 1);
            }
            Move::Swap { r1, p1, len1, r2, p2, len2 } => {
                let l1 = lens(r1);
                let l2 = lens(r2);
                p.route(r1)
                    .take(r1, 0, p1 - 1)
                    .take(r2, p2, p2 + len2 - 1)
                    .take(r1, p1 + len1, l1 - 1);
                p.route(r2)
                    .take(r2, 0, p2 - 1)
                    .take(r1, p1, p1 + len1 - 1)
                    .take(r2, p2 + len2, l2 - 1);
            }
            Move::TwoOptStar { r1, i, r2, j } => {
                let l1 = lens(r1);
                let l2 = lens(r2);
                p.route(r1).take(r1, 0, i).take(r2, j + 1, l2 - 1);
                p.route(r2).take(r2, 0, j).take(r1, i + 1, l1 - 1);
            }
            Move::Relocate { route, pos, len, at } => {
                let l = lens(route);
                let end = pos + len - 1;
                if at <= pos {
                    p.route(route)
                        .take(route, 0, at - 1)
                        .take(route, pos, end)
                        .take(route, at, pos - 1)
                        .take(route, end + 1, l - 1);
                } else {
                    p.route(route)
                        .take(route, 0, pos - 1)
                        .take(route, end + 1, at - 1)
                        .take(route, pos, end)
                        .take(route, at, l - 1);
                }
            }
            Move::Exchange { route, i, j } => {
                let l = lens(route);
                p.route(route)
                    .take(route, 0, i - 1)
                    .take(route, j, j)
                    .take(route, i + 1, j - 1)
                    .take(route, i, i)
                    .take(route, j + 1, l - 1);
            }
            Move::TwoOpt { route, i, j } => {
                let l = lens(route);
                p.route(route)
                    .take(route, 0, i - 1)
                    .push(route, i, j, true)
                    .take(route, j + 1, l - 1);
            }
        }
        p
    }
}

impl Evaluator<'_> {
    fn piece_data<'r>(&self, routes: &'r [RouteCache], piece: &Piece) -> &'r SubseqData {
        let r = &routes[piece.route];
        if piece.reversed {
            r.rev_seg(piece.start, piece.end)
        } else {
            r.seg(piece.start, piece.end)
        }
    }

    /// Aggregates and visit count of a route spelled by `pieces`.
    pub fn fold_pieces(&self, routes: &[RouteCache], pieces: &[Piece]) -> (SubseqData, usize) {
        let mut acc = *self.piece_data(routes, &pieces[0]);
        let mut count = pieces[0].end - pieces[0].start + 1;
        for piece in &pieces[1..] {
            acc = self.join(&acc, self.piece_data(routes, piece));
            count += piece.end - piece.start + 1;
        }
        (acc, count)
    }

    /// Cost change of `mv`, or `None` when it would push a route over
    /// capacity.
    pub fn evaluate_move(&self, routes: &[RouteCache], mv: &Move) -> Option<f64> {
        let plan = mv.plan(|r| routes[r].len());
        let cap = self.obj.capacity();
        let mut delta = 0.0;
        for k in 0..plan.routes {
            let old = &routes[plan.targets[k]];
            let (data, count) = self.fold_pieces(routes, plan.route_pieces(k));
            if data.load > cap + 1e-9 && data.load > old.load() {
                return None;
            }
            delta += self.obj.cost(&data, count > 2) - old.cost;
        }
        Some(delta)
    }

    /// Rewrites the touched routes. Returns the indices of the rebuilt routes.
    pub fn apply_move(&self, routes: &mut [RouteCache], mv: &Move, stamp: &mut u64) -> ([usize; 2], usize) {
        let plan = mv.plan(|r| routes[r].len());
        let mut rebuilt: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (k, visits) in rebuilt.iter_mut().enumerate().take(plan.routes) {
            for piece in plan.route_pieces(k) {
                let src = &routes[piece.route].visits[piece.start..=piece.end];
                if piece.reversed {
                    visits.extend(src.iter().rev());
                } else {
                    visits.extend_from_slice(src);
                }
            }
        }
        for (k, visits) in rebuilt.into_iter().enumerate().take(plan.routes) {
            *stamp += 1;
            routes[plan.targets[k]] = RouteCache::new(visits, self, *stamp);
        }
        (plan.targets, plan.routes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::ObjectiveParams;
    use crate::instance::{Instance, Node, ProblemKind};
    use crate::speed::SpeedMatrix;

    fn inst() -> Instance {
        let nodes = (0..9)
            .map(|i| Node::open((i * 37 % 11) as f64 * 900.0, (i * 53 % 7) as f64 * 800.0, if i > 0 { 50.0 } else { 0.0 }, 0.0))
            .collect();
        Instance::new("m", ProblemKind::Prp, nodes, 3, 500.0, (5.5, 25.0), ObjectiveParams::prp_uk_2012())
            .unwrap()
    }

    #[test]
    fn null_relocation_has_zero_delta() {
        let inst = inst();
        let m = SpeedMatrix::new(9, 25.0);
        let ev = Evaluator::new(&inst, &m);
        let routes = vec![RouteCache::new(vec![0, 1, 2, 3, 4, 0], &ev, 1)];
        let mv = Move::Relocate { route: 0, pos: 2, len: 1, at: 2 };
        assert!(ev.evaluate_move(&routes, &mv).unwrap().abs() < 1e-12);
    }

    #[test]
    fn applied_sequences() {
        let inst = inst();
        let m = SpeedMatrix::new(9, 25.0);
        let ev = Evaluator::new(&inst, &m);
        let base = || {
            vec![
                RouteCache::new(vec![0, 1, 2, 3, 4, 0], &ev, 1),
                RouteCache::new(vec![0, 5, 6, 7, 8, 0], &ev, 2),
            ]
        };
        let cases = [
            (Move::Shift { from: 0, pos: 2, len: 2, to: 1, at: 1 }, vec![vec![0, 1, 4, 0], vec![0, 2, 3, 5, 6, 7, 8, 0]]),
            (Move::Swap { r1: 0, p1: 1, len1: 1, r2: 1, p2: 3, len2: 2 }, vec![vec![0, 7, 8, 2, 3, 4, 0], vec![0, 5, 6, 1, 0]]),
            (Move::TwoOptStar { r1: 0, i: 2, r2: 1, j: 0 }, vec![vec![0, 1, 2, 5, 6, 7, 8, 0], vec![0, 3, 4, 0]]),
            (Move::Relocate { route: 0, pos: 1, len: 2, at: 4 }, vec![vec![0, 3, 1, 2, 4, 0], vec![0, 5, 6, 7, 8, 0]]),
            (Move::Relocate { route: 0, pos: 3, len: 2, at: 1 }, vec![vec![0, 3, 4, 1, 2, 0], vec![0, 5, 6, 7, 8, 0]]),
            (Move::Exchange { route: 1, i: 1, j: 2 }, vec![vec![0, 1, 2, 3, 4, 0], vec![0, 6, 5, 7, 8, 0]]),
            (Move::TwoOpt { route: 1, i: 1, j: 3 }, vec![vec![0, 1, 2, 3, 4, 0], vec![0, 7, 6, 5, 8, 0]]),
        ];
        for (mv, want) in cases {
            let mut routes = base();
            let predicted = ev.evaluate_move(&routes, &mv).unwrap();
            let before: f64 = routes.iter().map(|r| r.cost).sum();
            let mut stamp = 10;
            ev.apply_move(&mut routes, &mv, &mut stamp);
            let got: Vec<_> = routes.iter().map(|r| r.visits.clone()).collect();
            assert_eq!(got, want, "{mv:?}");
            let after: f64 = routes.iter().map(|r| ev.route_cost(&r.visits)).sum();
            assert!((after - before - predicted).abs() < 1e-9, "{mv:?}");
        }
    }

    #[test]
    fn capacity_violation_is_rejected() {
        let inst = inst();
        let m = SpeedMatrix::new(9, 25.0);
        let ev = Evaluator::new(&inst, &m);
        let routes = vec![
            RouteCache::new(vec![0, 1, 2, 3, 4, 0], &ev, 1),
            RouteCache::new(vec![0, 5, 6, 7, 8, 0], &ev, 2),
        ];
        let mv = Move::TwoOptStar { r1: 0, i: 4, r2: 1, j: 0 };
        assert!(ev.evaluate_move(&routes, &mv).is_some());
        let mut tight = inst.clone();
        tight.capacity = 300.0;
        let ev = Evaluator::new(&tight, &m);
        assert!(ev.evaluate_move(&routes, &mv).is_none());
    }
}

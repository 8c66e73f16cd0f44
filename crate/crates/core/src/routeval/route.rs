use super::{Evaluator, SubseqData};

/// A route with aggregates for every contiguous subsequence, forward and
/// reversed, so any move touching it is priced from O(1) cached pieces.
#[derive(Clone, Debug)]
pub struct RouteCache {
    pub visits: Vec<usize>,
    forward: Vec<SubseqData>,
    reversed: Vec<SubseqData>,
    /// Penalized cost under the evaluator's speeds.
    pub cost: f64,
    /// Changes whenever the route is rebuilt.
    pub stamp: u64,
}

impl RouteCache {
    pub fn new(visits: Vec<usize>, ev: &Evaluator<'_>, stamp: u64) -> Self {
        debug_assert!(visits.len() >= 2 && visits[0] == 0 && *visits.last().unwrap() == 0);
        let len = visits.len();
        let inst = ev.inst;
        let mut forward = Vec::with_capacity(len * len);
        let mut reversed = Vec::with_capacity(len * len);
        // Row i holds visits[i..=j] for j >= i; entries with j < i are unused.
        for i in 0..len {
            let single = SubseqData::at_position(inst, visits[i], i);
            for _ in 0..i {
                forward.push(single);
                reversed.push(single);
            }
            let mut fwd = single;
            let mut rev = SubseqData::node(inst, visits[i]);
            forward.push(fwd);
            reversed.push(rev);
            for &next in &visits[i + 1..] {
                let node = SubseqData::node(inst, next);
                fwd = ev.join(&fwd, &node);
                rev = ev.join(&node, &rev);
                forward.push(fwd);
                reversed.push(rev);
            }
        }
        let cost = ev.obj.cost(&forward[len - 1], len > 2);
        RouteCache {
            visits,
            forward,
            reversed,
            cost,
            stamp,
        }
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.len() <= 2
    }

    /// Number of customers.
    pub fn customer_count(&self) -> usize {
        self.visits.len() - 2
    }

    /// Aggregates of `visits[i..=j]`.
    #[inline]
    pub fn seg(&self, i: usize, j: usize) -> &SubseqData {
        debug_assert!(i <= j && j < self.len());
        &self.forward[i * self.len() + j]
    }

    /// Aggregates of `visits[i..=j]` traversed from `j` back to `i`. Only
    /// meaningful for customer ranges.
    #[inline]
    pub fn rev_seg(&self, i: usize, j: usize) -> &SubseqData {
        debug_assert!(i <= j && j < self.len());
        &self.reversed[i * self.len() + j]
    }

    pub fn total(&self) -> &SubseqData {
        self.seg(0, self.len() - 1)
    }

    pub fn load(&self) -> f64 {
        self.total().load
    }
}

//! Multi-start iterated local search with speed optimization on local
//! optima, a dynamic speed matrix, route pools and set-partitioning phases.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, ProblemKind};
use crate::localsearch::{build_initial, change_speeds, perturb, rvnd_descend, PerturbWeights};
use crate::routeval::Evaluator;
use crate::setpart::{pool_add, solve_partition, PoolOrigin, RoutePool};
use crate::soa::{optimize_speeds, SpeedLimits};
use crate::solution::{Route, Solution};
use crate::speed::SpeedMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Speed matrix follows the optimized speeds of every local optimum.
    Dynamic,
    /// Speed matrix stays at `v_max`; no speed-change perturbation.
    Static,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dynamic" => Ok(Mode::Dynamic),
            "static" => Ok(Mode::Static),
            _ => Err(Error::Param(format!("unknown mode {s:?}"))),
        }
    }
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Dynamic => "dynamic",
            Mode::Static => "static",
        }
    }
}

/// What the matrix reinitialization keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reinit {
    /// Reset to `v_max`, then restore the arcs of the restart's best solution.
    RestoreBest,
    /// Reset every arc to `v_max`.
    FullReset,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchParams {
    pub n_r: usize,
    pub n_ils: usize,
    pub n_sp: usize,
    pub n_pool: usize,
    /// Time cap of one set-partitioning run, seconds.
    pub t_mip: f64,
    pub tw_penalty: f64,
    pub rng_seed: u64,
    pub perturb: PerturbWeights,
    pub reinit: Reinit,
    /// Wall-clock budget of the whole solve, seconds.
    pub time_limit: Option<f64>,
    /// Streams trace records to stderr as JSON lines.
    pub verbose: bool,
}

impl SearchParams {
    pub fn prp_default(inst: &Instance) -> Self {
        SearchParams {
            n_r: 20,
            n_ils: inst.n() + 5 * inst.fleet_size,
            n_sp: 150,
            n_pool: 2,
            t_mip: 360.0,
            tw_penalty: 1e8,
            rng_seed: 0,
            perturb: PerturbWeights::default(),
            reinit: Reinit::RestoreBest,
            time_limit: None,
            verbose: false,
        }
    }

    pub fn fcvrp_default(inst: &Instance) -> Self {
        SearchParams {
            n_r: 4,
            n_ils: inst.n() / 5 + 5 * inst.fleet_size,
            t_mip: 60.0,
            ..Self::prp_default(inst)
        }
    }

    pub fn emvrp_default(inst: &Instance) -> Self {
        SearchParams {
            t_mip: 60.0,
            ..Self::prp_default(inst)
        }
    }

    pub fn for_instance(inst: &Instance) -> Self {
        match inst.kind {
            ProblemKind::Prp => Self::prp_default(inst),
            ProblemKind::Fcvrp => Self::fcvrp_default(inst),
            ProblemKind::Emvrp => Self::emvrp_default(inst),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 || self.n_ils == 0 || self.n_sp == 0 || self.n_pool == 0 {
            return Err(Error::Param("iteration counts must be positive".into()));
        }
        if !(self.t_mip > 0.0) || !(self.tw_penalty > 0.0) {
            return Err(Error::Param("t_mip and tw_penalty must be positive".into()));
        }
        if self.time_limit.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::Param("time limit must be positive".into()));
        }
        let w = self.perturb;
        if w.shift_to_end < 0.0 || w.merge_routes < 0.0 || w.shift_to_end + w.merge_routes <= 0.0 {
            return Err(Error::Param("perturbation weights must be nonnegative, not both zero".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Initial,
    Ils,
    SetPartitioning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub restart: usize,
    pub iteration: usize,
    pub phase: Phase,
    pub cost: f64,
    /// Best cost seen so far in the whole solve.
    pub best: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpCall {
    pub restart: usize,
    pub columns: usize,
    pub incumbent: f64,
    pub result: f64,
    pub proven: bool,
    pub nodes: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchTrace {
    pub records: Vec<TraceRecord>,
    /// `(seconds, cost)` at each improvement of the best-so-far.
    pub best_curve: Vec<(f64, f64)>,
    pub sp_calls: Vec<SpCall>,
    /// Speed-matrix writes after each restart's initialization, per restart.
    pub matrix_writes: Vec<u64>,
    pub percent_dist: Option<f64>,
    pub feasible: bool,
    pub seconds: f64,
}

impl SearchTrace {
    /// The trace without wall-clock fields, for replay comparisons.
    pub fn untimed(&self) -> SearchTrace {
        let mut t = self.clone();
        for r in &mut t.records {
            r.seconds = 0.0;
        }
        for p in &mut t.best_curve {
            p.0 = 0.0;
        }
        for c in &mut t.sp_calls {
            c.seconds = 0.0;
        }
        t.seconds = 0.0;
        t
    }
}

/// Resets every arc to `v_max`, then writes back the speeds of the feasible
/// routes of `best`.
pub fn reinitialize_speed_matrix(matrix: &mut SpeedMatrix, v_max: f64, best: &Solution) {
    matrix.fill(v_max);
    for r in best.routes.iter().filter(|r| r.feasible) {
        matrix.set_route(&r.visits, &r.speeds);
    }
}

/// Share of the distance, in percent, driven at neither the fuel-optimal nor
/// the fuel-and-driver-optimal speed. `None` for kinds without speeds.
pub fn percent_dist_other_speeds(solution: &Solution, inst: &Instance) -> Option<f64> {
    if !inst.kind.has_speeds() {
        return None;
    }
    let limits = SpeedLimits::for_instance(inst).ok()?;
    let (mut total, mut other) = (0.0, 0.0);
    for r in &solution.routes {
        for (w, &v) in r.visits.windows(2).zip(&r.speeds) {
            let d = inst.dist(w[0], w[1]);
            total += d;
            if (v - limits.floor).abs() > 1e-6 && (v - limits.target).abs() > 1e-6 {
                other += d;
            }
        }
    }
    Some(if total > 0.0 { 100.0 * other / total } else { 0.0 })
}

/// Turns local-search routes into a solution: each route gets optimized
/// speeds when the optimizer finds a feasible schedule and keeps the matrix
/// speeds (with their penalized cost) otherwise.
pub fn evaluate_routes(routes: &[Vec<usize>], matrix: &SpeedMatrix, inst: &Instance) -> Solution {
    let routes = routes
        .iter()
        .filter(|v| v.len() > 2)
        .map(|visits| {
            if inst.kind.has_speeds() {
                if let Ok(s) = optimize_speeds(visits, inst) {
                    let r = Route::evaluate(visits.clone(), s.speeds, inst);
                    if r.feasible {
                        return r;
                    }
                }
            }
            Route::with_matrix(visits.clone(), matrix, inst)
        })
        .collect();
    Solution::new(routes)
}

fn improves(new: f64, old: f64) -> bool {
    new < old - 1e-9 * (1.0 + old.abs())
}

struct Run<'a> {
    inst: &'a Instance,
    params: &'a SearchParams,
    mode: Mode,
    limits: Option<SpeedLimits>,
    rng: ChaCha8Rng,
    start: Instant,
    deadline: Option<Instant>,
    trace: SearchTrace,
    best_seen: f64,
    iteration: usize,
}

impl Run<'_> {
    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn dynamic(&self) -> bool {
        self.mode == Mode::Dynamic && self.inst.kind.has_speeds()
    }

    fn record(&mut self, restart: usize, phase: Phase, cost: f64) {
        let seconds = self.elapsed();
        if cost < self.best_seen {
            self.best_seen = cost;
            self.trace.best_curve.push((seconds, cost));
        }
        let rec = TraceRecord {
            restart,
            iteration: self.iteration,
            phase,
            cost,
            best: self.best_seen,
            seconds,
        };
        if self.params.verbose {
            if let Ok(line) = serde_json::to_string(&rec) {
                eprintln!("{line}");
            }
        }
        self.trace.records.push(rec);
        self.iteration += 1;
    }

    /// Local search under `matrix`, then speed optimization.
    fn descend(&mut self, routes: Vec<Vec<usize>>, matrix: &SpeedMatrix) -> Solution {
        let ev = Evaluator::new(self.inst, matrix);
        let out = rvnd_descend(&ev, routes, self.inst.fleet_size, &mut self.rng);
        evaluate_routes(&out.routes, matrix, self.inst)
    }

    fn feed(&self, pool: &mut RoutePool, s: &Solution) {
        for r in s.routes.iter().filter(|r| r.feasible) {
            pool_add(pool, r, self.inst).expect("feasible routes are accepted");
        }
    }

    fn partition_phase(
        &mut self,
        restart: usize,
        best: Solution,
        temp: &mut RoutePool,
        perm: &RoutePool,
        matrix: &SpeedMatrix,
    ) -> Solution {
        let mut best = best;
        loop {
            if self.out_of_time() {
                break;
            }
            let t0 = Instant::now();
            let mut found: Vec<Solution> = Vec::new();
            let mut limit = Duration::from_secs_f64(self.params.t_mip);
            if let Some(d) = self.deadline {
                limit = limit.min(d.saturating_duration_since(t0));
            }
            let incumbent_cost = best.cost();
            let columns = temp.len() + perm.len();
            let out = {
                let inst = self.inst;
                let fleet = inst.fleet_size;
                let rng = &mut self.rng;
                solve_partition(&[&*temp, perm], inst, &best, Some(limit), |sol| {
                    let mut local = matrix.clone();
                    for r in &sol.routes {
                        local.set_route(&r.visits, &r.speeds);
                    }
                    let ev = Evaluator::new(inst, &local);
                    let d = rvnd_descend(&ev, sol.visit_lists(), fleet, rng);
                    let improved = evaluate_routes(&d.routes, &local, inst);
                    found.push(improved.clone());
                    (improved.is_feasible(inst) && improved.cost() < sol.cost()).then_some(improved)
                })
            };
            for s in &found {
                self.feed(temp, s);
            }
            let result = out.solution.cost();
            self.trace.sp_calls.push(SpCall {
                restart,
                columns,
                incumbent: incumbent_cost,
                result,
                proven: out.proven,
                nodes: out.nodes,
                seconds: t0.elapsed().as_secs_f64(),
            });
            self.record(restart, Phase::SetPartitioning, result);
            if out.improved && improves(result, incumbent_cost) {
                best = out.solution;
            } else {
                break;
            }
        }
        best
    }
}

/// Runs the full search. The result is the best solution over all restarts;
/// `trace.feasible` is false if no feasible solution was ever found.
pub fn solve(inst: &Instance, params: &SearchParams, mode: Mode) -> Result<(Solution, SearchTrace)> {
    params.validate()?;
    inst.validate()?;
    let mut work = inst.clone();
    work.params.tw_penalty = params.tw_penalty;
    let inst = &work;
    let start = Instant::now();
    let limits = if inst.kind.has_speeds() {
        Some(SpeedLimits::for_instance(inst)?)
    } else {
        None
    };
    let mut run = Run {
        inst,
        params,
        mode,
        limits,
        rng: ChaCha8Rng::seed_from_u64(params.rng_seed),
        start,
        deadline: params.time_limit.map(|t| start + Duration::from_secs_f64(t)),
        trace: SearchTrace::default(),
        best_seen: f64::INFINITY,
        iteration: 0,
    };
    let size = inst.nodes.len();
    let v_max = inst.speed_max;
    let n = inst.n();

    let mut best_all: Option<Solution> = None;
    let mut perm = RoutePool::new(PoolOrigin::Permanent);
    let mut temp = RoutePool::new(PoolOrigin::Temporary);
    let mut since_clear = 0;

    for restart in 1..=params.n_r {
        if run.out_of_time() && best_all.is_some() {
            break;
        }
        let mut matrix = SpeedMatrix::new(size, v_max);
        let init = {
            let ev = Evaluator::new(inst, &matrix);
            build_initial(&ev, &mut run.rng)
        };
        let s = run.descend(init, &matrix);
        if run.dynamic() {
            for r in s.routes.iter().filter(|r| r.feasible) {
                matrix.set_route(&r.visits, &r.speeds);
            }
        }
        run.record(restart, Phase::Initial, s.cost());
        let mut best = s;
        let mut i_ils = 0;
        let mut reinit_armed = true;
        while i_ils < params.n_ils && !run.out_of_time() {
            i_ils += 1;
            if run.dynamic() && i_ils == n {
                let limits = run.limits.expect("speed kinds have limits");
                change_speeds(&mut matrix, &best.visit_lists(), limits, &mut run.rng);
            }
            let shaken = match perturb(&best.visit_lists(), params.perturb, inst, &mut run.rng) {
                Ok((routes, _)) => routes,
                Err(_) => best.visit_lists(),
            };
            let s = run.descend(shaken, &matrix);
            if run.dynamic() {
                for r in s.routes.iter().filter(|r| r.feasible) {
                    matrix.set_route(&r.visits, &r.speeds);
                }
            }
            run.feed(&mut temp, &s);
            run.record(restart, Phase::Ils, s.cost());
            if improves(s.cost(), best.cost()) {
                best = s;
                i_ils = 0;
                reinit_armed = true;
            }
            if i_ils * 2 >= params.n_ils && reinit_armed && run.dynamic() {
                match params.reinit {
                    Reinit::RestoreBest => reinitialize_speed_matrix(&mut matrix, v_max, &best),
                    Reinit::FullReset => matrix.fill(v_max),
                }
                reinit_armed = false;
            }
        }
        let sp_now = (n <= params.n_sp && restart == params.n_r) || n > params.n_sp;
        if sp_now {
            best = run.partition_phase(restart, best, &mut temp, &perm, &matrix);
        }
        run.trace.matrix_writes.push(matrix.write_count());
        if best_all.as_ref().is_none_or(|b| improves(best.cost(), b.cost())) {
            best_all = Some(best.clone());
        }
        run.feed(&mut perm, &best);
        since_clear += 1;
        if since_clear >= params.n_pool {
            temp.clear();
            since_clear = 0;
        }
    }

    let best = best_all.unwrap_or_default();
    run.trace.feasible = best.is_feasible(inst) && best.covers_exactly(inst);
    run.trace.percent_dist = percent_dist_other_speeds(&best, inst);
    run.trace.seconds = run.elapsed();
    Ok((best, run.trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy;
    use crate::instance::{random_prp_base, Node};

    fn quick(inst: &Instance, seed: u64) -> SearchParams {
        SearchParams {
            n_r: 3,
            ..SearchParams::for_instance(inst).with_seed(seed)
        }
    }

    #[test]
    fn single_customer_is_trivial() {
        let inst = random_prp_base(1, 3).unwrap();
        let (sol, trace) = solve(&inst, &quick(&inst, 0), Mode::Dynamic).unwrap();
        assert!(trace.feasible);
        assert_eq!(sol.visit_lists(), vec![vec![0, 1, 0]]);
        let limits = SpeedLimits::for_instance(&inst).unwrap();
        let closed = energy::route_cost(&[0, 1, 0], &[limits.target, limits.target], &inst).total;
        assert!((sol.cost() - closed).abs() <= 1e-9 * closed);
        assert_eq!(trace.percent_dist, Some(0.0));
    }

    #[test]
    fn replay_is_deterministic() {
        let inst = random_prp_base(8, 1).unwrap();
        let p = quick(&inst, 11);
        let (a, ta) = solve(&inst, &p, Mode::Dynamic).unwrap();
        let (b, tb) = solve(&inst, &p, Mode::Dynamic).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta.untimed(), tb.untimed());
    }

    #[test]
    fn best_curve_is_monotone_and_final_is_feasible() {
        let inst = random_prp_base(12, 5).unwrap();
        let (sol, trace) = solve(&inst, &quick(&inst, 2), Mode::Dynamic).unwrap();
        assert!(trace.feasible);
        assert_eq!(sol.time_warp(&inst), 0.0);
        assert!(sol.route_count() <= inst.fleet_size);
        for w in trace.best_curve.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
        for w in trace.records.windows(2) {
            assert!(w[1].best <= w[0].best);
        }
        assert!((trace.best_curve.last().unwrap().1 - sol.cost()).abs() <= 1e-9 * sol.cost());
    }

    #[test]
    fn static_mode_never_writes_the_matrix() {
        let inst = random_prp_base(10, 2).unwrap();
        let (_, trace) = solve(&inst, &quick(&inst, 4), Mode::Static).unwrap();
        assert_eq!(trace.matrix_writes, vec![0; 3]);
        let (_, dynamic) = solve(&inst, &quick(&inst, 4), Mode::Dynamic).unwrap();
        assert!(dynamic.matrix_writes.iter().all(|&w| w > 0));
    }

    #[test]
    fn partition_phase_runs_after_last_restart() {
        let inst = random_prp_base(6, 0).unwrap();
        let (_, trace) = solve(&inst, &quick(&inst, 0), Mode::Dynamic).unwrap();
        assert!(!trace.sp_calls.is_empty());
        assert!(trace.sp_calls.iter().all(|c| c.restart == 3));
        for c in &trace.sp_calls {
            assert!(c.result <= c.incumbent);
        }
    }

    #[test]
    fn reinit_restores_best_arcs_only() {
        let inst = random_prp_base(4, 0).unwrap();
        let mut m = SpeedMatrix::new(5, 25.0);
        reinitialize_speed_matrix(&mut m, 25.0, &Solution::default());
        assert!((0..5).all(|i| (0..5).all(|j| m.get(i, j) == 25.0)));
        let best = evaluate_routes(&[vec![0, 1, 2, 0], vec![0, 3, 4, 0]], &m, &inst);
        m.fill(7.0);
        reinitialize_speed_matrix(&mut m, 25.0, &best);
        assert_eq!(m.get(1, 3), 25.0);
        for r in &best.routes {
            assert_eq!(m.route_speeds(&r.visits), r.speeds);
            let again = Route::with_matrix(r.visits.clone(), &m, &inst);
            assert!((again.cost - r.cost).abs() <= 1e-9 * r.cost);
        }
    }

    #[test]
    fn percent_dist_counts_other_speeds() {
        let nodes = vec![
            Node::open(0.0, 0.0, 0.0, 0.0),
            Node::open(1000.0, 0.0, 1.0, 0.0),
            Node::open(3000.0, 0.0, 1.0, 0.0),
        ];
        let inst = Instance::new(
            "pd",
            ProblemKind::Prp,
            nodes,
            1,
            10.0,
            (5.5, 25.0),
            energy::ObjectiveParams::prp_uk_2012(),
        )
        .unwrap();
        let l = SpeedLimits::for_instance(&inst).unwrap();
        let at = |s: Vec<f64>| {
            let r = Route::evaluate(vec![0, 1, 2, 0], s, &inst);
            percent_dist_other_speeds(&Solution::new(vec![r]), &inst).unwrap()
        };
        assert_eq!(at(vec![l.target; 3]), 0.0);
        assert_eq!(at(vec![25.0; 3]), 100.0);
        // 1000 m at v*_F, 2000 m at 25, 3000 m at v*_FD.
        assert!((at(vec![l.floor, 25.0, l.target]) - 100.0 * 2000.0 / 6000.0).abs() < 1e-12);
    }
}

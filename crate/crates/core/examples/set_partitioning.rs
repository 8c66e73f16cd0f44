//! Recombines pooled routes with the exact set-partitioning solver: routes
//! from several independent local-search runs go into one pool, and the
//! solver picks the cheapest exact cover.
//!
//! cargo run --release --example set_partitioning -- [vrpnc-file]

use green_router::instance::{parse_instance, InstanceFormat, ProblemKind};
use green_router::orchestrator::{solve, Mode, SearchParams};
use green_router::setpart::{pool_add, solve_partition, PoolOrigin, RoutePool};
use green_router::solution::Solution;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/christofides/vrpnc1.txt").into());
    let inst = parse_instance(&path, InstanceFormat::CvrpClassic)?.with_kind(ProblemKind::Fcvrp)?;

    let mut pool = RoutePool::new(PoolOrigin::Permanent);
    let mut incumbent: Option<Solution> = None;
    for seed in 0..4 {
        let mut params = SearchParams::for_instance(&inst).with_seed(seed);
        params.n_r = 1;
        let (sol, _) = solve(&inst, &params, Mode::Dynamic)?;
        println!("seed {seed}: cost {:.2}", sol.cost());
        for r in &sol.routes {
            pool_add(&mut pool, r, &inst)?;
        }
        if incumbent.as_ref().is_none_or(|b| sol.cost() < b.cost()) {
            incumbent = Some(sol);
        }
    }
    let incumbent = incumbent.expect("at least one run");
    let out = solve_partition(&[&pool], &inst, &incumbent, None, |_| None);
    println!(
        "pool of {} routes: best single run {:.2}, recombined {:.2} ({} nodes, proven optimal over the pool: {})",
        pool.len(),
        incumbent.cost(),
        out.solution.cost(),
        out.nodes,
        out.proven
    );
    Ok(())
}

//! Solves a Christofides instance as an FCVRP or EMVRP over several seeds.
//!
//! cargo run --release --example christofides_fcvrp -- [vrpnc-file] [runs] [fcvrp|emvrp]

use std::time::Instant;

use green_router::instance::{parse_instance, InstanceFormat, ProblemKind};
use green_router::orchestrator::{solve, Mode, SearchParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args
        .first()
        .cloned()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/christofides/vrpnc1.txt").into());
    let runs: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let kind: ProblemKind = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(ProblemKind::Fcvrp);

    let inst = parse_instance(&path, InstanceFormat::CvrpClassic)?.with_kind(kind)?;
    println!(
        "{}: {} customers, {} vehicles of capacity {}",
        inst.name,
        inst.n(),
        inst.fleet_size,
        inst.capacity
    );
    let mut best = f64::INFINITY;
    for seed in 0..runs {
        let params = SearchParams::for_instance(&inst).with_seed(seed);
        let t = Instant::now();
        let (sol, trace) = solve(&inst, &params, Mode::Dynamic)?;
        best = best.min(sol.cost());
        println!(
            "seed {seed}: cost {:.2}, {} routes, distance {:.2}, {:.1} s, {} set-partitioning runs",
            sol.cost(),
            sol.route_count(),
            sol.distance(&inst),
            t.elapsed().as_secs_f64(),
            trace.sp_calls.len()
        );
    }
    println!("best {best:.2}");
    Ok(())
}

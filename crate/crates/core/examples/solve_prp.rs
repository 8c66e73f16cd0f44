//! Solves a generated PRP instance with speed optimization in both matrix
//! modes and prints the routes with their optimized speeds.
//!
//! cargo run --release --example solve_prp -- [customers] [seed]

use green_router::instance::{generate_tight_instance, random_prp_base, GeneratorConfig};
use green_router::orchestrator::{solve, Mode, SearchParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seed: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let inst = generate_tight_instance(&GeneratorConfig::set_c(random_prp_base(n, seed)?, seed))?;
    let params = SearchParams::for_instance(&inst).with_seed(seed);

    for mode in [Mode::Static, Mode::Dynamic] {
        let (sol, trace) = solve(&inst, &params, mode)?;
        println!(
            "{} mode: cost {:.4}, {} routes, {:.2} s, {} set-partitioning runs, {:.1}% of distance off the cruise speeds",
            mode.as_str(),
            sol.cost(),
            sol.route_count(),
            trace.seconds,
            trace.sp_calls.len(),
            trace.percent_dist.unwrap_or(0.0)
        );
        if mode == Mode::Dynamic {
            for r in sol.routes.iter().filter(|r| r.visits.len() > 2) {
                let speeds: Vec<String> = r.speeds.iter().map(|v| format!("{v:.1}")).collect();
                println!("  {:?} cost {:.4} speeds [{}]", r.visits, r.cost, speeds.join(" "));
            }
        }
    }
    Ok(())
}

//! Optimizes the arc speeds of a fixed route under time windows and compares
//! the result with driving at full speed and with the 500-level grid oracle.
//!
//! cargo run --release --example speed_optimization -- [seed]

use green_router::energy::{objective_route_cost, route_cost};
use green_router::harness::oracle::brute_force_speed_oracle;
use green_router::harness::verify::random_tight_route;
use green_router::soa::{optimize_speeds, SpeedLimits};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(5);
    let (inst, visits) = random_tight_route(6, &mut ChaCha8Rng::seed_from_u64(seed));
    let limits = SpeedLimits::for_instance(&inst)?;
    println!(
        "route {visits:?}; speeds limited to [{:.2}, {:.2}] m/s, unconstrained optimum {:.2} m/s",
        limits.floor, limits.max, limits.target
    );

    let full = vec![inst.speed_max; visits.len() - 1];
    let late = route_cost(&visits, &full, &inst).lateness;
    println!("full speed: cost {:.4}, lateness {late:.0} s", objective_route_cost(&visits, &full, &inst));

    let s = optimize_speeds(&visits, &inst)?;
    println!("optimized: cost {:.4}", s.cost);
    for (k, w) in visits.windows(2).enumerate() {
        let node = inst.node(w[1]);
        println!(
            "  {:>2} -> {:>2}  {:6.2} m/s  arrive {:7.0}  start {:7.0}  window [{:.0}, {:.0}]",
            w[0], w[1], s.speeds[k], s.arrivals[k + 1], s.service_starts[k + 1], node.tw_start, node.tw_end
        );
    }
    let oracle = brute_force_speed_oracle(&visits, &inst, 500)?;
    println!("grid oracle (500 levels): {oracle:.4}");
    Ok(())
}

//! Evaluates one route three ways: the step-by-step cost breakdown, the
//! folded subsequence data used by the local search, and a constant-time
//! estimate of a relocation move checked against re-evaluation.
//!
//! cargo run --example route_evaluation

use green_router::energy::route_cost;
use green_router::instance::{generate_tight_instance, random_prp_base, GeneratorConfig};
use green_router::routeval::{Evaluator, Move, RouteCache, SubseqData};
use green_router::speed::SpeedMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut inst = generate_tight_instance(&GeneratorConfig::set_c(random_prp_base(8, 4)?, 4))?;
    // Price each second of time warp at one currency unit.
    inst.params.tw_penalty = 1.0;
    let visits = vec![0, 3, 1, 6, 0];
    let speeds = vec![inst.speed_max; visits.len() - 1];

    let bd = route_cost(&visits, &speeds, &inst);
    println!("route {visits:?} at {} m/s", inst.speed_max);
    println!(
        "  fuel {:.3} l, completion {:.0} s, distance {:.1} km, lateness {:.0} s, cost {:.4}",
        bd.fuel_liters,
        bd.driver_seconds,
        bd.distance / 1000.0,
        bd.lateness,
        bd.total
    );

    let data = SubseqData::fold(&visits, &speeds, &inst);
    println!(
        "  folded: duration {:.0} s, time warp {:.0} s, load {:.0} kg, load*distance {:.3e}",
        data.duration, data.time_warp, data.load, data.load_distance
    );

    let matrix = SpeedMatrix::new(inst.nodes.len(), inst.speed_max);
    let ev = Evaluator::new(&inst, &matrix);
    let mut routes = vec![RouteCache::new(visits.clone(), &ev, 0), RouteCache::new(vec![0, 2, 5, 0], &ev, 1)];
    let before: f64 = routes.iter().map(|r| ev.route_cost(&r.visits)).sum();
    let mv = Move::Relocate { route: 0, pos: 1, len: 1, at: 4 };
    let predicted = ev.evaluate_move(&routes, &mv).expect("within capacity");
    let mut stamp = 2;
    ev.apply_move(&mut routes, &mv, &mut stamp);
    let after: f64 = routes.iter().map(|r| ev.route_cost(&r.visits)).sum();
    println!(
        "move {mv:?}: predicted delta {predicted:.6}, recomputed {:.6}, new route {:?}",
        after - before,
        routes[0].visits
    );
    Ok(())
}

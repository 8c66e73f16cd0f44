//! Runs a small benchmark over Christofides instances and prints the CSV and
//! the aggregated table with gaps to the best-known solutions.
//!
//! cargo run --release --example benchmark_report -- [seeds] [instances, e.g. 1 2 3]

use std::io;

use green_router::harness::bks::BksRegistry;
use green_router::harness::cli::{run_once, ModelArgs};
use green_router::harness::report::emit_results;
use green_router::instance::{parse_instance, InstanceFormat, ProblemKind};
use green_router::orchestrator::Mode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seeds: u64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let ids: Vec<usize> = if args.len() > 1 {
        args[1..].iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    } else {
        vec![1, 2, 3]
    };
    let model = ModelArgs {
        problem: Some(ProblemKind::Fcvrp),
        mode: Mode::Dynamic,
        preset: None,
        params: None,
        format: Some(InstanceFormat::CvrpClassic),
        bks: None,
        time_limit: None,
    };
    let bks = BksRegistry::bundled();
    let mut records = Vec::new();
    for k in ids {
        let path = format!("{}/data/christofides/vrpnc{k}.txt", env!("CARGO_MANIFEST_DIR"));
        let mut inst = parse_instance(&path, InstanceFormat::CvrpClassic)?.with_kind(ProblemKind::Fcvrp)?;
        inst.name = format!("C{k}");
        for seed in 0..seeds {
            records.push(run_once(&inst, seed, &model, &bks, false)?.0);
        }
    }
    emit_results(&records, io::stdout(), io::stdout())?;
    Ok(())
}

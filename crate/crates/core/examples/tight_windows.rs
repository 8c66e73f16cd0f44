//! Generates Set B and Set C style tight-window instances from one random
//! base and writes them in the canonical text format.
//!
//! cargo run --example tight_windows -- [customers] [seed] [out-dir]

use std::path::PathBuf;

use green_router::instance::{generate_tight_instance, parse_instance, random_prp_base, write_instance, GeneratorConfig, InstanceFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map(|s| s.parse()).transpose()?.unwrap_or(15);
    let seed: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let dir = args.get(2).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);

    let base = random_prp_base(n, seed)?;
    for (label, cfg) in [
        ("B", GeneratorConfig::set_b(base.clone(), seed)),
        ("C", GeneratorConfig::set_c(base.clone(), seed)),
    ] {
        let mut inst = generate_tight_instance(&cfg)?;
        inst.name = format!("{}-{label}", base.name);
        let widths: Vec<f64> = inst.nodes[1..].iter().map(|c| c.tw_end - c.tw_start).collect();
        let mean = widths.iter().sum::<f64>() / widths.len() as f64;
        let path = dir.join(format!("{}.txt", inst.name));
        write_instance(&inst, &path)?;
        let back = parse_instance(&path, InstanceFormat::CanonicalPrp)?;
        assert_eq!(back.nodes, inst.nodes);
        println!("{}: mean window width {mean:.0} s, written to {}", inst.name, path.display());
    }
    Ok(())
}

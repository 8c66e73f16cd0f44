//! Command-line front end: `solve`, `generate`, `bench` and `oracle`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use super::bks::BksRegistry;
use super::report::{emit_results, group_of, summarize, write_csv, RunRecord};
use super::verify;
use crate::energy::ObjectiveParams;
use crate::error::{Error, Result};
use crate::instance::{
    generate_tight_instance, parse_instance, random_prp_base, render_canonical, write_instance, GeneratorConfig,
    Instance, InstanceFormat, ProblemKind,
};
use crate::orchestrator::{solve, Mode, SearchParams};
use crate::solution::Solution;

/// Environment variable capping the `bench` worker pool.
pub const THREADS_ENV: &str = "GREEN_ROUTER_THREADS";

#[derive(Parser, Debug)]
#[command(name = "green-router", version, about = "Green vehicle routing solver and benchmark driver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one instance for one or more seeds.
    Solve(SolveArgs),
    /// Write a tight-window instance (Set B or C widths).
    Generate(GenerateArgs),
    /// Solve every instance of a directory or file list over several seeds.
    Bench(BenchArgs),
    /// Run the randomised oracle comparisons.
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Problem variant; defaults to the one stored in the instance.
    #[arg(long, value_parser = parse_kind)]
    pub problem: Option<ProblemKind>,
    #[arg(long, default_value = "dynamic", value_parser = parse_mode)]
    pub mode: Mode,
    /// Named coefficient preset (prp-uk-2012, fcvrp-default, emvrp-default).
    #[arg(long)]
    pub preset: Option<String>,
    /// Key-value coefficient file applied after the preset.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Instance file format; detected from the first token when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<InstanceFormat>,
    /// Best-known-solution registry replacing the bundled one.
    #[arg(long)]
    pub bks: Option<PathBuf>,
    /// Wall-clock limit per run, in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// First seed; run `k` uses `seed + k`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Print the search trace as JSON lines on stderr.
    #[arg(long)]
    pub verbose: bool,
    /// Also write the run records as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Print the routes of the best run.
    #[arg(long)]
    pub routes: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WindowSet {
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "B")]
    pub set: WindowSet,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Customers of the random base instance.
    #[arg(long, default_value_t = 10)]
    pub customers: usize,
    /// Redraw the windows of this instance instead of a random base.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Instance files or directories of instance files.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    /// CSV destination; written to standard output before the table when
    /// omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tenth of the full case counts.
    #[arg(long)]
    pub quick: bool,
}

fn parse_kind(s: &str) -> std::result::Result<ProblemKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<InstanceFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses and runs `argv`, returning the process exit code.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    match execute(cli.command, &mut stdout.lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Runs one subcommand. `Ok(false)` means it ran but reported a failure.
pub fn execute(command: Command, out: &mut impl Write) -> Result<bool> {
    match command {
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
    }
}

fn detect_format(path: &Path) -> Result<InstanceFormat> {
    let text = fs::read_to_string(path)?;
    let first = text.split_whitespace().next().unwrap_or("");
    Ok(if first.starts_with(|c: char| c.is_ascii_alphabetic()) {
        InstanceFormat::CanonicalPrp
    } else {
        InstanceFormat::CvrpClassic
    })
}

/// Loads an instance and applies the problem, preset and parameter-file
/// options, in that order.
pub fn load_instance(path: &Path, model: &ModelArgs) -> Result<Instance> {
    let format = match model.format {
        Some(f) => f,
        None => detect_format(path)?,
    };
    let mut inst = parse_instance(path, format)?;
    if let Some(kind) = model.problem {
        if kind != inst.kind {
            inst = inst.with_kind(kind)?;
        }
    }
    let mut params = match &model.preset {
        Some(name) => ObjectiveParams::preset(name, inst.capacity)
            .ok_or_else(|| Error::Param(format!("unknown preset `{name}`")))?,
        None => inst.params.clone(),
    };
    if let Some(file) = &model.params {
        params.apply_overrides(&fs::read_to_string(file)?, &file.display().to_string())?;
    }
    inst.with_params(params)
}

fn registry(model: &ModelArgs) -> Result<BksRegistry> {
    match &model.bks {
        Some(p) => BksRegistry::load(p),
        None => Ok(BksRegistry::bundled()),
    }
}

/// Solves `inst` once with `seed` and condenses the outcome.
pub fn run_once(
    inst: &Instance,
    seed: u64,
    model: &ModelArgs,
    bks: &BksRegistry,
    verbose: bool,
) -> Result<(RunRecord, Solution)> {
    let mut params = SearchParams::for_instance(inst).with_seed(seed);
    params.time_limit = model.time_limit;
    params.verbose = verbose;
    let (sol, trace) = solve(inst, &params, model.mode)?;
    let cost = sol.cost();
    let rec = RunRecord {
        instance: inst.name.clone(),
        group: group_of(&inst.name),
        kind: inst.kind,
        seed,
        mode: model.mode,
        cost,
        distance: sol.distance(inst),
        routes: sol.route_count(),
        cpu_seconds: trace.seconds,
        gap: bks.gap(&inst.name, inst.kind, cost),
        percent_dist: trace.percent_dist,
        feasible: sol.is_feasible(inst),
    };
    Ok((rec, sol))
}

fn cmd_solve(a: &SolveArgs, out: &mut impl Write) -> Result<bool> {
    if a.runs == 0 {
        return Err(Error::Param("--runs must be positive".into()));
    }
    let inst = load_instance(&a.instance, &a.model)?;
    let bks = registry(&a.model)?;
    let mut records = Vec::with_capacity(a.runs);
    let mut best: Option<(f64, Solution)> = None;
    for k in 0..a.runs {
        let seed = a.seed + k as u64;
        let (rec, sol) = run_once(&inst, seed, &a.model, &bks, a.verbose)?;
        writeln!(
            out,
            "run seed={seed} cost={:.2} routes={} distance={:.2} cpu={:.2}s gap={} feasible={}",
            rec.cost,
            rec.routes,
            rec.distance,
            rec.cpu_seconds,
            rec.gap.map(|g| format!("{g:.2}%")).unwrap_or_else(|| "–".into()),
            rec.feasible
        )?;
        if best.as_ref().is_none_or(|(c, _)| rec.cost < *c) {
            best = Some((rec.cost, sol));
        }
        records.push(rec);
    }
    let s = &summarize(&records)[0];
    let best_rec = records
        .iter()
        .min_by(|x, y| x.cost.total_cmp(&y.cost))
        .expect("at least one run");
    writeln!(
        out,
        "avg cost={:.2} routes={:.2} cpu={:.2}s gap={}",
        s.avg_cost,
        s.avg_routes,
        s.avg_cpu,
        s.avg_gap.map(|g| format!("{g:.2}%")).unwrap_or_else(|| "–".into())
    )?;
    writeln!(
        out,
        "best cost={:.2} routes={} seed={} gap={}",
        best_rec.cost,
        best_rec.routes,
        best_rec.seed,
        best_rec.gap.map(|g| format!("{g:.2}%")).unwrap_or_else(|| "–".into())
    )?;
    if a.routes {
        if let Some((_, sol)) = &best {
            for (k, r) in sol.routes.iter().filter(|r| r.visits.len() > 2).enumerate() {
                let stops: Vec<String> = r.visits.iter().map(|v| v.to_string()).collect();
                writeln!(out, "route {}: {} cost={:.4}", k + 1, stops.join(" "), r.cost)?;
            }
        }
    }
    if let Some(path) = &a.csv {
        write_csv(&records, fs::File::create(path)?)?;
    }
    Ok(records.iter().all(|r| r.feasible))
}

fn cmd_generate(a: &GenerateArgs, out: &mut impl Write) -> Result<bool> {
    let base = match &a.base {
        Some(p) => parse_instance(p, detect_format(p)?)?,
        None => random_prp_base(a.customers, a.seed)?,
    };
    let cfg = match a.set {
        WindowSet::B => GeneratorConfig::set_b(base, a.seed),
        WindowSet::C => GeneratorConfig::set_c(base, a.seed),
    };
    let mut inst = generate_tight_instance(&cfg)?;
    let set = match a.set {
        WindowSet::B => "B",
        WindowSet::C => "C",
    };
    inst.name = format!("{}-{set}", inst.name);
    match &a.out {
        Some(path) => {
            write_instance(&inst, path)?;
            writeln!(out, "wrote {} ({} customers) to {}", inst.name, inst.n(), path.display())?;
        }
        None => render_canonical(&inst, out)?,
    }
    Ok(true)
}

/// Instance files named by `paths`, directories expanded one level and
/// sorted by name.
pub fn collect_instances(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inner: Vec<PathBuf> = fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file())
                .collect();
            inner.sort();
            files.extend(inner);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(Error::Param("no instance files found".into()));
    }
    Ok(files)
}

/// Worker count for `bench`: the value of [`THREADS_ENV`] when set.
pub fn bench_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Error::Param(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

/// Solves every instance for every seed on a worker pool.
pub fn bench_records(a: &BenchArgs) -> Result<Vec<RunRecord>> {
    let files = collect_instances(&a.paths)?;
    let instances: Vec<Instance> = files
        .iter()
        .map(|f| load_instance(f, &a.model))
        .collect::<Result<_>>()?;
    let bks = registry(&a.model)?;
    let jobs: Vec<(usize, u64)> = (0..instances.len())
        .flat_map(|i| (0..a.seeds).map(move |s| (i, a.first_seed + s)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = bench_threads()? {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Param(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(i, seed)| run_once(&instances[i], seed, &a.model, &bks, false).map(|(r, _)| r))
            .collect()
    })
}

fn cmd_bench(a: &BenchArgs, out: &mut impl Write) -> Result<bool> {
    if a.seeds == 0 {
        return Err(Error::Param("--seeds must be positive".into()));
    }
    let records = bench_records(a)?;
    match &a.csv {
        Some(path) => {
            emit_results(&records, fs::File::create(path)?, &mut *out)?;
        }
        None => {
            let mut csv = Vec::new();
            emit_results(&records, &mut csv, io::sink())?;
            out.write_all(&csv)?;
            writeln!(out)?;
            super::report::write_table(&records, &mut *out)?;
        }
    }
    Ok(records.iter().all(|r| r.feasible))
}

/// The oracle comparisons at full size, or a tenth of it with `quick`.
pub fn oracle_checks(seed: u64, quick: bool) -> Vec<verify::CheckOutcome> {
    let k = if quick { 10 } else { 1 };
    vec![
        verify::check_aggregates(10_000 / k, seed, 1e-9),
        verify::check_move_deltas(10_000 / k, seed + 1, 1e-6),
        verify::check_soa(1_000 / k, seed + 2, 8, 500, 1e-3),
        verify::check_partition(200 / k, seed + 3, 15, 12),
    ]
}

fn cmd_oracle(a: &OracleArgs, out: &mut impl Write) -> Result<bool> {
    let mut ok = true;
    for c in oracle_checks(a.seed, a.quick) {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{status} {}: {} cases, {} failures, worst error {:.3e}",
            c.name, c.cases, c.failures, c.worst
        )?;
        if let Some(f) = &c.first_failure {
            writeln!(out, "  first failure: {f}")?;
        }
        ok &= c.passed();
    }
    Ok(ok)
}

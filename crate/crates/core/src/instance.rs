//! Instance data model, readers for the canonical and Christofides layouts,
//! and the tightened time-window generator.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::ObjectiveParams;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Prp,
    Fcvrp,
    Emvrp,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Prp => "prp",
            ProblemKind::Fcvrp => "fcvrp",
            ProblemKind::Emvrp => "emvrp",
        }
    }

    /// Whether speeds are decision variables.
    pub fn has_speeds(self) -> bool {
        self == ProblemKind::Prp
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prp" => Ok(ProblemKind::Prp),
            "fcvrp" => Ok(ProblemKind::Fcvrp),
            "emvrp" => Ok(ProblemKind::Emvrp),
            other => Err(Error::Param(format!("unknown problem kind `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceFormat {
    /// The self-describing keyword format written by [`write_instance`].
    CanonicalPrp,
    /// Christofides `vrpnc` layout: `n Q [max_duration service_time]`, the
    /// depot `x y`, then one `x y q` line per customer.
    CvrpClassic,
}

impl FromStr for InstanceFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical-prp" | "canonical" => Ok(InstanceFormat::CanonicalPrp),
            "cvrp-classic" | "vrpnc" => Ok(InstanceFormat::CvrpClassic),
            other => Err(Error::Param(format!("unknown instance format `{other}`"))),
        }
    }
}

/// A depot or customer. Index 0 of [`Instance::nodes`] is the depot.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub service_time: f64,
    pub tw_start: f64,
    pub tw_end: f64,
}

impl Node {
    pub fn open(x: f64, y: f64, demand: f64, service_time: f64) -> Self {
        Node {
            x,
            y,
            demand,
            service_time,
            tw_start: 0.0,
            tw_end: f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: String,
    pub kind: ProblemKind,
    pub nodes: Vec<Node>,
    pub fleet_size: usize,
    pub capacity: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub params: ObjectiveParams,
    pub max_route_duration: Option<f64>,
    dist: Vec<f64>,
    explicit_distances: bool,
}

fn euclidean_matrix(nodes: &[Node]) -> Vec<f64> {
    let n = nodes.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dist[i * n + j] = (nodes[i].x - nodes[j].x).hypot(nodes[i].y - nodes[j].y);
            }
        }
    }
    dist
}

impl Instance {
    /// Builds and validates an instance with Euclidean distances.
    pub fn new(
        name: impl Into<String>,
        kind: ProblemKind,
        nodes: Vec<Node>,
        fleet_size: usize,
        capacity: f64,
        speed_bounds: (f64, f64),
        params: ObjectiveParams,
    ) -> Result<Self> {
        let dist = euclidean_matrix(&nodes);
        let inst = Instance {
            name: name.into(),
            kind,
            nodes,
            fleet_size,
            capacity,
            speed_min: speed_bounds.0,
            speed_max: speed_bounds.1,
            params,
            max_route_duration: None,
            dist,
            explicit_distances: false,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Replaces the coordinate distances by an explicit row-major matrix.
    pub fn with_distance_matrix(mut self, matrix: Vec<f64>) -> Result<Self> {
        let n = self.nodes.len();
        if matrix.len() != n * n {
            return Err(Error::Validation(format!(
                "distance matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        self.dist = matrix;
        self.explicit_distances = true;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_route_duration(mut self, limit: Option<f64>) -> Result<Self> {
        self.max_route_duration = limit;
        self.validate()?;
        Ok(self)
    }

    /// Switches the problem variant and loads that variant's default
    /// objective. FCVRP and EMVRP run at unit speed.
    pub fn with_kind(mut self, kind: ProblemKind) -> Result<Self> {
        self.kind = kind;
        self.params = ObjectiveParams::default_for(kind, self.capacity);
        if !kind.has_speeds() {
            self.speed_min = 1.0;
            self.speed_max = 1.0;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn with_params(mut self, params: ObjectiveParams) -> Result<Self> {
        self.params = params;
        self.validate()?;
        Ok(self)
    }

    pub fn with_fleet_size(mut self, m: usize) -> Result<Self> {
        self.fleet_size = m;
        self.validate()?;
        Ok(self)
    }

    /// Number of customers.
    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn customers(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n()
    }

    #[inline]
    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.nodes.len() + j]
    }

    pub fn has_explicit_distances(&self) -> bool {
        self.explicit_distances
    }

    pub fn total_demand(&self) -> f64 {
        self.nodes.iter().map(|c| c.demand).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        if self.nodes.len() < 2 {
            return bad("instance needs a depot and at least one customer".into());
        }
        let depot = &self.nodes[0];
        if depot.demand != 0.0 || depot.service_time != 0.0 {
            return bad("depot must have zero demand and service time".into());
        }
        if self.fleet_size < 1 {
            return bad("fleet size must be at least 1".into());
        }
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return bad(format!("capacity must be positive, got {}", self.capacity));
        }
        let (lo, hi) = (self.speed_min, self.speed_max);
        let ordered = if self.kind.has_speeds() { lo < hi } else { lo <= hi };
        if !(lo > 0.0 && hi.is_finite() && ordered) {
            return bad(format!("speed bounds [{lo}, {hi}] are not an interval of positive speeds"));
        }
        for (i, c) in self.nodes.iter().enumerate() {
            let fields = [c.x, c.y, c.demand, c.service_time, c.tw_start];
            if fields.iter().any(|v| !v.is_finite()) || c.tw_end.is_nan() {
                return bad(format!("node {i} has a non-finite field"));
            }
            if c.tw_start > c.tw_end {
                return bad(format!("node {i}: tw_start {} > tw_end {}", c.tw_start, c.tw_end));
            }
            if c.demand < 0.0 {
                return bad(format!("node {i}: negative demand {}", c.demand));
            }
            if c.service_time < 0.0 {
                return bad(format!("node {i}: negative service time {}", c.service_time));
            }
            if c.demand > self.capacity {
                return bad(format!("node {i}: demand {} exceeds capacity {}", c.demand, self.capacity));
            }
        }
        let n = self.nodes.len();
        for i in 0..n {
            if self.dist(i, i) != 0.0 {
                return bad(format!("distance matrix diagonal at {i} is nonzero"));
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if !(d >= 0.0 && d.is_finite()) {
                    return bad(format!("distance ({i}, {j}) = {d} is not a nonnegative number"));
                }
            }
        }
        if let Some(limit) = self.max_route_duration {
            if !(limit > 0.0) {
                return bad(format!("max route duration must be positive, got {limit}"));
            }
        }
        self.params.validate()
    }
}

pub fn parse_instance(path: impl AsRef<Path>, format: InstanceFormat) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match format {
        InstanceFormat::CanonicalPrp => parse_canonical(&text, path),
        InstanceFormat::CvrpClassic => parse_vrpnc(&text, path, name),
    }
}

struct Lines<'a> {
    path: &'a Path,
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, path: &'a Path) -> Self {
        let it: Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
                .map(|(i, l)| (i, l.split_whitespace().collect::<Vec<_>>()))
                .filter(|(_, t)| !t.is_empty()),
        );
        Lines { path, inner: it.peekable() }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.inner.next() {
            Some(l) => Ok(l),
            None => Err(self.err(0, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn num(&self, line: usize, tok: &str) -> Result<f64> {
        tok.parse::<f64>()
            .ok()
            .filter(|v| !v.is_nan())
            .ok_or_else(|| self.err(line, format!("`{tok}` is not a number")))
    }

    fn nums(&self, line: usize, toks: &[&str], want: usize) -> Result<Vec<f64>> {
        if toks.len() != want {
            return Err(self.err(line, format!("expected {want} values, found {}", toks.len())));
        }
        toks.iter().map(|t| self.num(line, t)).collect()
    }

    fn count(&self, line: usize, tok: &str) -> Result<usize> {
        tok.parse::<usize>()
            .map_err(|_| self.err(line, format!("`{tok}` is not a nonnegative integer")))
    }
}

fn parse_canonical(text: &str, path: &Path) -> Result<Instance> {
    let mut lines = Lines::new(text, path);
    let mut name = String::new();
    let mut kind = ProblemKind::Prp;
    let mut n = None;
    let mut fleet = None;
    let mut capacity = None;
    let mut speeds = None;
    let mut max_duration = None;
    let mut overrides: Vec<(usize, String, f64)> = Vec::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut matrix: Option<Vec<f64>> = None;

    while let Some((ln, toks)) = lines.inner.next() {
        let arity = |k: usize| -> Result<()> {
            if toks.len() != k + 1 {
                Err(lines.err(ln, format!("{} takes {k} value(s)", toks[0])))
            } else {
                Ok(())
            }
        };
        match toks[0] {
            "NAME" => {
                name = toks[1..].join(" ");
            }
            "KIND" => {
                arity(1)?;
                kind = toks[1].parse().map_err(|e: Error| lines.err(ln, e.to_string()))?;
            }
            "CUSTOMERS" => {
                arity(1)?;
                n = Some(lines.count(ln, toks[1])?);
            }
            "FLEET" => {
                arity(1)?;
                fleet = Some(lines.count(ln, toks[1])?);
            }
            "CAPACITY" => {
                arity(1)?;
                capacity = Some(lines.num(ln, toks[1])?);
            }
            "SPEED" => {
                let v = lines.nums(ln, &toks[1..], 2)?;
                speeds = Some((v[0], v[1]));
            }
            "MAX_DURATION" => {
                arity(1)?;
                max_duration = Some(lines.num(ln, toks[1])?);
            }
            "PARAM" => {
                arity(2)?;
                overrides.push((ln, toks[1].to_string(), lines.num(ln, toks[2])?));
            }
            "NODES" => {
                let n = n.ok_or_else(|| lines.err(ln, "NODES before CUSTOMERS"))?;
                for expect in 0..=n {
                    let (ln, toks) = lines.next_line("a node line")?;
                    if toks.len() != 7 {
                        return Err(lines.err(ln, format!("node line needs 7 fields, found {}", toks.len())));
                    }
                    if lines.count(ln, toks[0])? != expect {
                        return Err(lines.err(ln, format!("expected node id {expect}")));
                    }
                    let v = lines.nums(ln, &toks[1..], 6)?;
                    nodes.push(Node {
                        x: v[0],
                        y: v[1],
                        demand: v[2],
                        service_time: v[3],
                        tw_start: v[4],
                        tw_end: v[5],
                    });
                }
            }
            "MATRIX" => {
                let size = nodes.len();
                if size == 0 {
                    return Err(lines.err(ln, "MATRIX before NODES"));
                }
                let mut m = Vec::with_capacity(size * size);
                for _ in 0..size {
                    let (ln, toks) = lines.next_line("a matrix row")?;
                    m.extend(lines.nums(ln, &toks, size)?);
                }
                matrix = Some(m);
            }
            "EOF" => break,
            other => return Err(lines.err(ln, format!("unknown keyword `{other}`"))),
        }
    }

    let missing = |what: &str| lines.err(0, format!("missing {what}"));
    let n = n.ok_or_else(|| missing("CUSTOMERS"))?;
    if nodes.len() != n + 1 {
        return Err(missing("NODES block"));
    }
    let capacity = capacity.ok_or_else(|| missing("CAPACITY"))?;
    let fleet = fleet.ok_or_else(|| missing("FLEET"))?;
    let speeds = speeds.ok_or_else(|| missing("SPEED"))?;
    let mut params = ObjectiveParams::default_for(kind, capacity);
    for (ln, key, value) in overrides {
        if !params.set(&key, value) {
            return Err(lines.err(ln, format!("unknown parameter `{key}`")));
        }
    }
    let mut inst = Instance::new(name, kind, nodes, fleet, capacity, speeds, params)?;
    if let Some(m) = matrix {
        inst = inst.with_distance_matrix(m)?;
    }
    inst.with_max_route_duration(max_duration)
}

/// Durations at or above this are the layout's "no limit" sentinel.
const VRPNC_NO_LIMIT: f64 = 999_999.0;

fn parse_vrpnc(text: &str, path: &Path, name: String) -> Result<Instance> {
    let mut lines = Lines::new(text, path);
    let (ln, head) = lines.next_line("the header line")?;
    if head.len() != 2 && head.len() != 4 {
        return Err(lines.err(ln, "header must be `n Q` or `n Q max_duration service_time`"));
    }
    let n = lines.count(ln, head[0])?;
    let capacity = lines.num(ln, head[1])?;
    let (max_duration, service) = if head.len() == 4 {
        let limit = lines.num(ln, head[2])?;
        let service = lines.num(ln, head[3])?;
        ((limit > 0.0 && limit < VRPNC_NO_LIMIT).then_some(limit), service)
    } else {
        (None, 0.0)
    };
    let (ln, depot) = lines.next_line("the depot line")?;
    let d = lines.nums(ln, &depot, 2)?;
    let mut nodes = vec![Node::open(d[0], d[1], 0.0, 0.0)];
    for _ in 0..n {
        let (ln, toks) = lines.next_line("a customer line")?;
        let c = lines.nums(ln, &toks, 3)?;
        nodes.push(Node::open(c[0], c[1], c[2], service));
    }
    if let Some((ln, _)) = lines.inner.next() {
        return Err(lines.err(ln, "trailing data after the last customer"));
    }
    let demand: f64 = nodes.iter().map(|c| c.demand).sum();
    let fleet = match max_duration {
        None => ((demand / capacity).ceil() as usize).max(1),
        Some(_) => n,
    };
    let params = ObjectiveParams::fcvrp_default();
    Instance::new(name, ProblemKind::Fcvrp, nodes, fleet, capacity, (1.0, 1.0), params)?
        .with_max_route_duration(max_duration)
}

/// Writes the canonical text format. Floats use the shortest representation
/// that parses back to the same bits.
pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let mut out = Vec::new();
    render_canonical(inst, &mut out)?;
    fs::write(path, out)?;
    Ok(())
}

pub fn render_canonical(inst: &Instance, out: &mut impl std::io::Write) -> Result<()> {
    writeln!(out, "NAME {}", inst.name)?;
    writeln!(out, "KIND {}", inst.kind)?;
    writeln!(out, "CUSTOMERS {}", inst.n())?;
    writeln!(out, "FLEET {}", inst.fleet_size)?;
    writeln!(out, "CAPACITY {:?}", inst.capacity)?;
    writeln!(out, "SPEED {:?} {:?}", inst.speed_min, inst.speed_max)?;
    if let Some(limit) = inst.max_route_duration {
        writeln!(out, "MAX_DURATION {limit:?}")?;
    }
    for key in ObjectiveParams::KEYS {
        writeln!(out, "PARAM {key} {:?}", inst.params.get(key).unwrap_or_default())?;
    }
    writeln!(out, "NODES")?;
    writeln!(out, "# id x y demand service tw_start tw_end")?;
    for (i, c) in inst.nodes.iter().enumerate() {
        writeln!(
            out,
            "{i} {:?} {:?} {:?} {:?} {:?} {:?}",
            c.x, c.y, c.demand, c.service_time, c.tw_start, c.tw_end
        )?;
    }
    if inst.explicit_distances {
        writeln!(out, "MATRIX")?;
        let n = inst.nodes.len();
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{:?}", inst.dist(i, j))).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
    }
    writeln!(out, "EOF")?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub base: Instance,
    pub horizon: f64,
    pub width_range: (f64, f64),
    pub rng_seed: u64,
}

impl GeneratorConfig {
    /// Widths in [2000, 5000] s.
    pub fn set_b(base: Instance, seed: u64) -> Self {
        GeneratorConfig {
            base,
            horizon: 32400.0,
            width_range: (2000.0, 5000.0),
            rng_seed: seed,
        }
    }

    /// Widths in [2000, 15000] s.
    pub fn set_c(base: Instance, seed: u64) -> Self {
        GeneratorConfig {
            width_range: (2000.0, 15000.0),
            ..Self::set_b(base, seed)
        }
    }
}

/// Redraws every customer window: an integer width `W` uniform in the width
/// range, then an integer start uniform in
/// `[a0 + floor(d0i/vmax), b0 - ceil(di0/vmax) - tau_i - W]`.
pub fn generate_tight_instance(cfg: &GeneratorConfig) -> Result<Instance> {
    let (w_lo, w_hi) = cfg.width_range;
    if !(w_lo <= w_hi && w_lo >= 0.0 && w_hi < cfg.horizon) {
        return Err(Error::Param(format!(
            "width range [{w_lo}, {w_hi}] must satisfy 0 <= lo <= hi < horizon {}",
            cfg.horizon
        )));
    }
    let mut inst = cfg.base.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let (a0, b0) = (0.0, cfg.horizon);
    inst.nodes[0].tw_start = a0;
    inst.nodes[0].tw_end = b0;
    let vmax = inst.speed_max;
    for i in 1..inst.nodes.len() {
        let width = rng.random_range(w_lo.ceil() as i64..=w_hi.floor() as i64) as f64;
        let lo = a0 + (inst.dist(0, i) / vmax).floor();
        let hi = b0 - (inst.dist(i, 0) / vmax).ceil() - inst.nodes[i].service_time - width;
        let (lo_i, hi_i) = (lo.ceil(), hi.floor());
        if lo_i > hi_i {
            return Err(Error::InfeasibleInterval { customer: i, lo, hi });
        }
        let start = rng.random_range(lo_i as i64..=hi_i as i64) as f64;
        inst.nodes[i].tw_start = start;
        inst.nodes[i].tw_end = start + width;
    }
    inst.validate()?;
    Ok(inst)
}

/// Random PRP base instance in the shape of the UK benchmark: customers in a
/// 200 km square around a central depot, demands in [100, 2000] kg, service
/// times in [300, 900] s, capacity 3650 kg, one vehicle per customer and an
/// open 9-hour horizon.
pub fn random_prp_base(n: usize, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = 32400.0;
    let mut nodes = vec![Node {
        tw_end: horizon,
        ..Node::open(100_000.0, 100_000.0, 0.0, 0.0)
    }];
    for _ in 0..n {
        let mut c = Node::open(
            rng.random_range(0.0..200_000.0f64).round(),
            rng.random_range(0.0..200_000.0f64).round(),
            rng.random_range(100..=2000) as f64,
            rng.random_range(300..=900) as f64,
        );
        c.tw_end = horizon;
        nodes.push(c);
    }
    Instance::new(
        format!("PRP{n}_{seed}"),
        ProblemKind::Prp,
        nodes,
        n.max(1),
        3650.0,
        (5.5, 25.0),
        ObjectiveParams::prp_uk_2012(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn tmp(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn canonical_round_trip_of_generated_instance() {
        let base = random_prp_base(10, 3).unwrap();
        let inst = generate_tight_instance(&GeneratorConfig::set_c(base, 11)).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_instance(&inst, f.path()).unwrap();
        let back = parse_instance(f.path(), InstanceFormat::CanonicalPrp).unwrap();
        assert_eq!(back.n(), 10);
        assert_eq!(back, inst);
    }

    #[test]
    fn round_trip_keeps_matrix_and_duration() {
        let base = random_prp_base(3, 1).unwrap();
        let n = base.nodes.len();
        let m: Vec<f64> = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { 1000.0 + k as f64 / 3.0 })
            .collect();
        let inst = base
            .with_distance_matrix(m)
            .unwrap()
            .with_max_route_duration(Some(20000.5))
            .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_instance(&inst, f.path()).unwrap();
        let text = fs::read_to_string(f.path()).unwrap();
        assert!(text.contains("MAX_DURATION 20000.5"));
        assert!(text.contains("MATRIX"));
        assert_eq!(parse_instance(f.path(), InstanceFormat::CanonicalPrp).unwrap(), inst);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let inst = random_prp_base(2, 0).unwrap();
        let err = write_instance(&inst, "/nonexistent-dir/x/inst.txt").unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn reversed_window_is_rejected() {
        let f = tmp("CUSTOMERS 1\nFLEET 1\nCAPACITY 10\nSPEED 5.5 25\nNODES\n\
                     0 0 0 0 0 0 100\n1 3 4 1 0 50 40\nEOF\n");
        let err = parse_instance(f.path(), InstanceFormat::CanonicalPrp).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("tw_start")), "{err}");
    }

    #[test]
    fn parse_error_reports_line() {
        let f = tmp("CUSTOMERS 1\nFLEET 1\nCAPACITY ten\n");
        match parse_instance(f.path(), InstanceFormat::CanonicalPrp).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn vrpnc_with_duration_and_service() {
        let f = tmp("2 100 200 10\n0 0\n3 4 10\n6 8 20\n");
        let inst = parse_instance(f.path(), InstanceFormat::CvrpClassic).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.max_route_duration, Some(200.0));
        assert_eq!(inst.node(1).service_time, 10.0);
        assert_eq!(inst.dist(0, 2), 10.0);
        assert_eq!(inst.fleet_size, 2);

        let f = tmp("2 100 999999 0\n0 0\n3 4 10\n6 8 20\n");
        let inst = parse_instance(f.path(), InstanceFormat::CvrpClassic).unwrap();
        assert_eq!(inst.max_route_duration, None);
        assert_eq!(inst.fleet_size, 1);
    }

    #[test]
    fn generator_zero_distance_customer() {
        let mut nodes = vec![Node::open(0.0, 0.0, 0.0, 0.0), Node::open(0.0, 0.0, 5.0, 0.0)];
        nodes[0].tw_end = 32400.0;
        let base = Instance::new(
            "z",
            ProblemKind::Prp,
            nodes,
            1,
            10.0,
            (5.5, 25.0),
            ObjectiveParams::prp_uk_2012(),
        )
        .unwrap();
        let cfg = GeneratorConfig {
            width_range: (2000.0, 2000.0),
            ..GeneratorConfig::set_b(base, 5)
        };
        let inst = generate_tight_instance(&cfg).unwrap();
        let c = inst.node(1);
        assert_eq!(c.tw_end - c.tw_start, 2000.0);
        assert!(c.tw_start >= 0.0 && c.tw_start <= 32400.0 - 2000.0);
    }

    #[test]
    fn generator_reports_empty_interval() {
        let mut base = random_prp_base(2, 0).unwrap();
        base.nodes[1].service_time = 32000.0;
        let err = generate_tight_instance(&GeneratorConfig::set_b(base, 1)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleInterval { customer: 1, .. }));
    }
}

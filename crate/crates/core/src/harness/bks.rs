//! Best-known solution registry.
//!
//! One entry per line: `instance problem cost routes origin`, with `-` for
//! an unknown route count and `#` starting a comment.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::ProblemKind;

const BUNDLED: &str = include_str!("../../data/bks.txt");

#[derive(Clone, Debug, PartialEq)]
pub struct BksEntry {
    pub cost: f64,
    pub routes: Option<usize>,
    /// Table the value was transcribed from.
    pub origin: String,
}

#[derive(Clone, Debug, Default)]
pub struct BksRegistry {
    entries: HashMap<(String, ProblemKind), BksEntry>,
}

/// Registry key of an instance name: Christofides files `vrpncK` are
/// registered as `CK`.
pub fn canonical_name(name: &str) -> String {
    let stem = Path::new(name)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(name);
    match stem.strip_prefix("vrpnc") {
        Some(k) if !k.is_empty() && k.chars().all(|c| c.is_ascii_digit()) => format!("C{k}"),
        _ => stem.to_string(),
    }
}

impl BksRegistry {
    /// The registry shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED, "bundled bks.txt").expect("bundled registry parses")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&fs::read_to_string(path)?, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut reg = BksRegistry::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: source.into(),
                line: k + 1,
                msg,
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(err(format!("expected 5 fields, found {}", f.len())));
            }
            let kind: ProblemKind = f[1].parse().map_err(|_| err(format!("unknown problem {:?}", f[1])))?;
            let cost: f64 = f[2].parse().map_err(|_| err(format!("bad cost {:?}", f[2])))?;
            if !(cost > 0.0) {
                return Err(err(format!("cost must be positive, got {cost}")));
            }
            let routes = match f[3] {
                "-" => None,
                r => Some(r.parse().map_err(|_| err(format!("bad route count {r:?}")))?),
            };
            reg.insert(
                f[0],
                kind,
                BksEntry {
                    cost,
                    routes,
                    origin: f[4].to_string(),
                },
            );
        }
        Ok(reg)
    }

    pub fn insert(&mut self, name: &str, kind: ProblemKind, entry: BksEntry) {
        self.entries.insert((canonical_name(name), kind), entry);
    }

    pub fn get(&self, name: &str, kind: ProblemKind) -> Option<&BksEntry> {
        self.entries.get(&(canonical_name(name), kind))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `100 (z - z_bks) / z_bks`, when a best-known value is registered.
    pub fn gap(&self, name: &str, kind: ProblemKind, cost: f64) -> Option<f64> {
        self.get(name, kind).map(|e| 100.0 * (cost - e.cost) / e.cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_registry_has_the_three_problems() {
        let reg = BksRegistry::bundled();
        assert_eq!(reg.get("vrpnc1", ProblemKind::Fcvrp).unwrap().cost, 751.11);
        assert_eq!(reg.get("C1", ProblemKind::Emvrp).unwrap().routes, Some(5));
        assert_eq!(reg.get("UK10_01", ProblemKind::Prp).unwrap().cost, 170.64);
        assert_eq!(reg.get("C11", ProblemKind::Fcvrp).unwrap().routes, None);
        assert!(reg.get("UK10_01", ProblemKind::Fcvrp).is_none());
    }

    #[test]
    fn gap_is_relative_percent() {
        let reg = BksRegistry::parse("X prp 200 2 t\n", "t").unwrap();
        assert!((reg.gap("X", ProblemKind::Prp, 201.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(reg.gap("Y", ProblemKind::Prp, 1.0).is_none());
    }

    #[test]
    fn malformed_lines_report_their_position() {
        let err = BksRegistry::parse("# c\nX prp -3 2 t\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}

//! Flat key = value run configuration.
//!
//! One key per line, `#` starts a comment line, blank lines are skipped.
//! The grid axes (`n0`, `m`, `p`, `attack`, `eta`) take comma lists; the
//! remaining keys (`seed`, `replicas`, `out`, `export`) are scalars. A key
//! given twice keeps the later value, and command-line flags override the
//! file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gdnet_core::{AttackKind, Error, ExportFlags, Result};

/// Values as they appear in a config file or on the command line: every
/// field optional, axes still unvalidated lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub n0: Option<Vec<usize>>,
    pub m: Option<Vec<usize>>,
    pub p: Option<Vec<f64>>,
    pub attack: Option<Vec<AttackKind>>,
    pub eta: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub out: Option<PathBuf>,
    pub export: Option<ExportFlags>,
}

/// Fully resolved run settings; `replicas` stays open because its default
/// differs between `generate` (1) and `sweep` (20).
#[derive(Debug, Clone)]
pub struct Settings {
    pub n0s: Vec<usize>,
    pub ms: Vec<usize>,
    pub ps: Vec<f64>,
    pub attacks: Vec<AttackKind>,
    pub etas: Vec<f64>,
    pub seed: u64,
    pub replicas: Option<usize>,
    pub out: Option<PathBuf>,
    pub export: ExportFlags,
}

pub fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<T>()
                .map_err(|_| Error::Parameter(format!("bad {key} value {tok:?}")))
        })
        .collect()
}

pub fn parse_attacks(raw: &str) -> Result<Vec<AttackKind>> {
    raw.split(',').map(|tok| tok.trim().parse()).collect()
}

fn parse_scalar<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse::<T>()
        .map_err(|_| Error::Parameter(format!("bad {key} value {raw:?}")))
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = FileConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parameter(format!(
                    "config line {}: expected key = value, got {line:?}",
                    idx + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n0" => cfg.n0 = Some(parse_list("n0", value)?),
                "m" => cfg.m = Some(parse_list("m", value)?),
                "p" => cfg.p = Some(parse_list("p", value)?),
                "attack" => cfg.attack = Some(parse_attacks(value)?),
                "eta" => cfg.eta = Some(parse_list("eta", value)?),
                "seed" => cfg.seed = Some(parse_scalar("seed", value)?),
                "replicas" => cfg.replicas = Some(parse_scalar("replicas", value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "export" => cfg.export = Some(ExportFlags::parse(value)?),
                other => {
                    return Err(Error::Parameter(format!(
                        "config line {}: unknown key {other:?}",
                        idx + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Field-wise precedence: `self` wins, `fallback` fills the gaps.
    pub fn or(self, fallback: FileConfig) -> FileConfig {
        FileConfig {
            n0: self.n0.or(fallback.n0),
            m: self.m.or(fallback.m),
            p: self.p.or(fallback.p),
            attack: self.attack.or(fallback.attack),
            eta: self.eta.or(fallback.eta),
            seed: self.seed.or(fallback.seed),
            replicas: self.replicas.or(fallback.replicas),
            out: self.out.or(fallback.out),
            export: self.export.or(fallback.export),
        }
    }

    pub fn settings(self) -> Settings {
        Settings {
            n0s: self.n0.unwrap_or_else(|| vec![30_000]),
            ms: self.m.unwrap_or_else(|| vec![3]),
            ps: self.p.unwrap_or_else(|| vec![0.5]),
            attacks: self.attack.unwrap_or_else(|| vec![AttackKind::None]),
            etas: self.eta.unwrap_or_else(|| vec![0.0]),
            seed: self.seed.unwrap_or(0),
            replicas: self.replicas,
            out: self.out,
            export: self.export.unwrap_or_default(),
        }
    }
}

/// Unwraps a one-element axis; `generate` has no grid semantics.
pub fn single<T: Copy>(key: &str, values: &[T]) -> Result<T> {
    match values {
        [v] => Ok(*v),
        _ => Err(Error::Parameter(format!(
            "generate takes a single {key} value, got a list of {}",
            values.len()
        ))),
    }
}

//! Ensembles and parameter sweeps.
//!
//! A [`RunConfig`] runs one parameter point for a number of replicas; a
//! [`SweepGrid`] runs the cartesian product of parameter axes. Every
//! replica's RNG seed derives from the master seed, the cell index and the
//! replica index ([`crate::rng::replica_seed`]), so results do not depend on
//! scheduling: jobs run on a rayon pool and are reassembled in order.
//!
//! Results land in `results.csv` (one row per replica, append-on-rerun),
//! `aggregate.csv` (per-cell means and standard deviations, recomputed from
//! the whole results file) and `failures.csv` (one row per failed replica).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::attack::{apply_attack, AttackKind, AttackSpec};
use crate::error::{Error, Result};
use crate::generate::{grow, GenerationParams};
use crate::metrics::{
    compute_metrics, write_cluster_sizes_csv, write_degree_histogram_csv, MetricsConfig,
    PowerLawFit,
};
use crate::rng::{replica_seed, rng_from_seed, splitmix64};
use crate::stats::{mean, sample_std, welch_t_test};

pub const RESULTS_FORMAT_VERSION: u32 = 1;
pub const RESULTS_HEADER: &str = "n0,m,p,attack,eta,n,gamma,gamma_err,gamma_kmin,gamma_kmax,\
    avg_k,tau,tau_err,tau_smin,tau_smax,avg_c,giant_frac,cluster_count";

/// Significance level for the direction test.
pub const DIRECTION_ALPHA: f64 = 0.05;
/// Minimum relative difference of the cell means for a direction to count;
/// smaller shifts are reported as flat even when statistically significant.
pub const DIRECTION_EFFECT_FLOOR: f64 = 0.05;
/// Effect floor for the degree exponent. Fitted gamma drifts a few percent
/// with the fit window's lower edge (which follows m), so its floor sits
/// above that drift.
pub const DIRECTION_GAMMA_EFFECT_FLOOR: f64 = 0.055;
/// Replicas with usable values needed on each side of a comparison.
pub const DIRECTION_MIN_SAMPLES: usize = 3;
/// An exponent value only supports a direction claim while the fit behind
/// it is tight: stderr/|exponent| at or below this.
pub const DIRECTION_REL_ERR_MAX: f64 = 0.15;
/// A degree-distribution fit must cover at least this ratio between its
/// largest and smallest degree to count as a power-law measurement. Heavily
/// truncated distributions (a crushed network after a strong central attack)
/// produce steep, spuriously clean fits over a handful of degrees; this is
/// what rules them out. Cluster-size fits are exempt: their windows are
/// intrinsically narrow at moderate scales.
pub const DIRECTION_GAMMA_SPAN_MIN: f64 = 8.0;

/// Which per-replica artifacts to write next to the results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExportFlags {
    pub edges: bool,
    pub nodes: bool,
    pub hist: bool,
    pub clusters: bool,
}

impl ExportFlags {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        ExportFlags {
            edges: true,
            nodes: true,
            hist: true,
            clusters: true,
        }
    }

    pub fn any(&self) -> bool {
        self.edges || self.nodes || self.hist || self.clusters
    }

    /// Parses a comma list of `edges`, `nodes`, `hist`, `clusters`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut flags = ExportFlags::none();
        for tok in s.split(',') {
            match tok.trim() {
                "edges" => flags.edges = true,
                "nodes" => flags.nodes = true,
                "hist" => flags.hist = true,
                "clusters" => flags.clusters = true,
                other => {
                    return Err(Error::Parameter(format!(
                        "unknown export {other:?} (expected edges, nodes, hist, clusters)"
                    )))
                }
            }
        }
        Ok(flags)
    }
}

/// One parameter point plus run bookkeeping.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: GenerationParams,
    pub attack: AttackSpec,
    pub seed: u64,
    pub replicas: usize,
    pub out_dir: Option<PathBuf>,
    pub exports: ExportFlags,
}

impl RunConfig {
    pub fn new(params: GenerationParams, attack: AttackSpec, seed: u64) -> Self {
        RunConfig {
            params,
            attack,
            seed,
            replicas: 1,
            out_dir: None,
            exports: ExportFlags::none(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(Error::Parameter("replicas must be at least 1".into()));
        }
        Ok(())
    }
}

/// One measured replica.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub n0: usize,
    pub m: usize,
    pub p: f64,
    pub attack: AttackKind,
    /// Realized removal fraction `N_a / N0`.
    pub eta: f64,
    /// Survivor count.
    pub n: usize,
    pub gamma: PowerLawFit,
    pub avg_k: f64,
    pub tau: PowerLawFit,
    pub avg_c: f64,
    pub giant_frac: f64,
    pub cluster_count: usize,
}

fn fit_fields(f: &PowerLawFit) -> (String, String, String, String) {
    if f.valid {
        (
            format!("{:.6e}", f.exponent),
            format!("{:.6e}", f.stderr),
            f.fit_range.0.to_string(),
            f.fit_range.1.to_string(),
        )
    } else {
        Default::default()
    }
}

fn fit_from_fields(exponent: &str, stderr: &str, lo: &str, hi: &str) -> Result<PowerLawFit> {
    if exponent.is_empty() {
        return Ok(PowerLawFit::invalid());
    }
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| Error::Parameter(format!("bad float {s:?} in results file")))
    };
    let bound = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::Parameter(format!("bad fit bound {s:?} in results file")))
    };
    Ok(PowerLawFit {
        exponent: parse(exponent)?,
        stderr: parse(stderr)?,
        r_squared: f64::NAN,
        fit_range: (bound(lo)?, bound(hi)?),
        n_points: 0,
        valid: true,
    })
}

impl ResultRow {
    pub fn to_csv_line(&self) -> String {
        let (g, ge, gl, gh) = fit_fields(&self.gamma);
        let (t, te, tl, th) = fit_fields(&self.tau);
        format!(
            "{},{},{},{},{},{},{g},{ge},{gl},{gh},{:.6e},{t},{te},{tl},{th},{:.6e},{:.6e},{}",
            self.n0,
            self.m,
            self.p,
            self.attack,
            self.eta,
            self.n,
            self.avg_k,
            self.avg_c,
            self.giant_frac,
            self.cluster_count,
        )
    }

    pub fn from_csv_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 18 {
            return Err(Error::Parameter(format!(
                "results row has {} fields, expected 18: {line:?}",
                fields.len()
            )));
        }
        let err = |what: &str| Error::Parameter(format!("bad {what} in results row {line:?}"));
        Ok(ResultRow {
            n0: fields[0].parse().map_err(|_| err("n0"))?,
            m: fields[1].parse().map_err(|_| err("m"))?,
            p: fields[2].parse().map_err(|_| err("p"))?,
            attack: fields[3].parse()?,
            eta: fields[4].parse().map_err(|_| err("eta"))?,
            n: fields[5].parse().map_err(|_| err("n"))?,
            gamma: fit_from_fields(fields[6], fields[7], fields[8], fields[9])?,
            avg_k: fields[10].parse().map_err(|_| err("avg_k"))?,
            tau: fit_from_fields(fields[11], fields[12], fields[13], fields[14])?,
            avg_c: fields[15].parse().map_err(|_| err("avg_c"))?,
            giant_frac: fields[16].parse().map_err(|_| err("giant_frac"))?,
            cluster_count: fields[17].parse().map_err(|_| err("cluster_count"))?,
        })
    }
}

/// Runs one replica end to end: grow, attack, measure.
fn run_replica(
    params: &GenerationParams,
    attack: &AttackSpec,
    master_seed: u64,
    cell: u64,
    replica: usize,
    out_dir: Option<&Path>,
    exports: ExportFlags,
) -> Result<ResultRow> {
    let seed = replica_seed(master_seed, cell, replica as u64);
    let mut rng = rng_from_seed(seed);
    let g = grow(params, &mut rng)?;
    let n0 = g.node_count();
    let n_a = attack.removal_count(n0);
    let g = apply_attack(g, attack, &mut rng)?;
    let report = compute_metrics(&g, &MetricsConfig::for_m(params.m()))?;

    if let (Some(dir), true) = (out_dir, exports.any()) {
        let stem = |kind: &str, ext: &str| dir.join(format!("{kind}_c{cell}_r{replica}.{ext}"));
        if exports.edges {
            g.write_edge_list(fs::File::create(stem("edges", "txt"))?)?;
        }
        if exports.nodes {
            g.write_node_table(fs::File::create(stem("nodes", "txt"))?)?;
        }
        if exports.hist {
            write_degree_histogram_csv(&report.degree_histogram, fs::File::create(stem("hist", "csv"))?)?;
        }
        if exports.clusters {
            write_cluster_sizes_csv(&report.cluster_sizes, fs::File::create(stem("clusters", "csv"))?)?;
        }
    }

    Ok(ResultRow {
        n0: params.n0(),
        m: params.m(),
        p: params.p(),
        attack: attack.kind(),
        eta: n_a as f64 / n0 as f64,
        n: report.n,
        gamma: report.gamma,
        avg_k: report.avg_degree,
        tau: report.tau,
        avg_c: report.avg_clustering,
        giant_frac: report.giant_fraction,
        cluster_count: report.cluster_count,
    })
}

fn append_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let fresh = !path.exists();
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "# results format v{RESULTS_FORMAT_VERSION}")?;
        writeln!(f, "{RESULTS_HEADER}")?;
    }
    for row in rows {
        writeln!(f, "{}", row.to_csv_line())?;
    }
    Ok(())
}

/// Loads rows written by [`run_single`] or [`run_sweep`]. Comment lines
/// start with `#`; the header must match [`RESULTS_HEADER`]. Rows loaded
/// from disk carry only exponent and stderr of each fit.
pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut text = String::new();
    fs::File::open(path)?.read_to_string(&mut text)?;
    let mut rows = Vec::new();
    let mut saw_header = false;
    for line in text.lines() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != RESULTS_HEADER {
                return Err(Error::Parameter(format!(
                    "unexpected results header {line:?}"
                )));
            }
            saw_header = true;
            continue;
        }
        rows.push(ResultRow::from_csv_line(line)?);
    }
    if !saw_header {
        return Err(Error::Parameter("results file has no header".into()));
    }
    Ok(rows)
}

/// Runs all replicas of one parameter point, appends to `results.csv` when
/// an output directory is set, and returns the rows in replica order.
pub fn run_single(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir)?;
    }
    let rows: Vec<ResultRow> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            run_replica(
                &cfg.params,
                &cfg.attack,
                cfg.seed,
                0,
                r,
                cfg.out_dir.as_deref(),
                cfg.exports,
            )
        })
        .collect::<Result<_>>()?;
    if let Some(dir) = &cfg.out_dir {
        append_results(&dir.join("results.csv"), &rows)?;
    }
    Ok(rows)
}

/// Cartesian sweep: every combination of the axes becomes a cell, run for
/// `replicas` replicas each. Cell order is nested loops with `n0` outermost,
/// then `m`, `p`, `attack`, `eta`; the cell index in that order feeds the
/// seed derivation.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub n0s: Vec<usize>,
    pub ms: Vec<usize>,
    pub ps: Vec<f64>,
    pub attacks: Vec<AttackKind>,
    pub etas: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub exports: ExportFlags,
}

/// One cell of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellParams {
    pub cell: usize,
    pub n0: usize,
    pub m: usize,
    pub p: f64,
    pub attack: AttackKind,
    pub eta: f64,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        for (name, empty) in [
            ("n0", self.n0s.is_empty()),
            ("m", self.ms.is_empty()),
            ("p", self.ps.is_empty()),
            ("attack", self.attacks.is_empty()),
            ("eta", self.etas.is_empty()),
        ] {
            if empty {
                return Err(Error::Parameter(format!("sweep axis {name} is empty")));
            }
        }
        if self.replicas < 1 {
            return Err(Error::Parameter("replicas must be at least 1".into()));
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<CellParams> {
        let mut cells = Vec::new();
        for &n0 in &self.n0s {
            for &m in &self.ms {
                for &p in &self.ps {
                    for &attack in &self.attacks {
                        for &eta in &self.etas {
                            cells.push(CellParams {
                                cell: cells.len(),
                                n0,
                                m,
                                p,
                                attack,
                                eta,
                            });
                        }
                    }
                }
            }
        }
        cells
    }
}

/// A replica that could not run; the sweep carries on without it.
#[derive(Debug, Clone)]
pub struct CellFailure {
    pub cell: usize,
    pub n0: usize,
    pub m: usize,
    pub p: f64,
    pub attack: AttackKind,
    pub eta: f64,
    pub replica: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Successful rows, ordered by cell then replica.
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CellFailure>,
}

impl SweepOutcome {
    pub fn complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs a sweep on the rayon pool. Replica failures (including cells whose
/// parameters do not validate) are recorded, not fatal. Output files:
/// `results.csv` (appended), `aggregate.csv` (recomputed over the whole
/// results file), `failures.csv` (appended when failures occurred).
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepOutcome> {
    grid.validate()?;
    if let Some(dir) = &grid.out_dir {
        fs::create_dir_all(dir)?;
    }
    let cells = grid.cells();
    let jobs: Vec<(CellParams, usize)> = cells
        .iter()
        .flat_map(|&c| (0..grid.replicas).map(move |r| (c, r)))
        .collect();

    let outcomes: Vec<std::result::Result<ResultRow, CellFailure>> = jobs
        .par_iter()
        .map(|&(c, replica)| {
            let run = || -> Result<ResultRow> {
                let params = GenerationParams::new(c.n0, c.m, c.p)?;
                let attack = AttackSpec::new(c.attack, c.eta)?;
                run_replica(
                    &params,
                    &attack,
                    grid.seed,
                    c.cell as u64,
                    replica,
                    grid.out_dir.as_deref(),
                    grid.exports,
                )
            };
            run().map_err(|e| CellFailure {
                cell: c.cell,
                n0: c.n0,
                m: c.m,
                p: c.p,
                attack: c.attack,
                eta: c.eta,
                replica,
                message: e.to_string(),
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(f) => failures.push(f),
        }
    }

    if let Some(dir) = &grid.out_dir {
        append_results(&dir.join("results.csv"), &rows)?;
        let all_rows = read_results_csv(&dir.join("results.csv"))?;
        write_aggregate_csv(&dir.join("aggregate.csv"), &all_rows)?;
        if !failures.is_empty() {
            append_failures(&dir.join("failures.csv"), &failures)?;
        }
    }
    Ok(SweepOutcome { rows, failures })
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn append_failures(path: &Path, failures: &[CellFailure]) -> Result<()> {
    let fresh = !path.exists();
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "# failures format v{RESULTS_FORMAT_VERSION}")?;
        writeln!(f, "cell,n0,m,p,attack,eta,replica,error")?;
    }
    for x in failures {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{}",
            x.cell,
            x.n0,
            x.m,
            x.p,
            x.attack,
            x.eta,
            x.replica,
            csv_quote(&x.message)
        )?;
    }
    Ok(())
}

type CellKey = (usize, usize, u64, &'static str, u64);

fn cell_key(row: &ResultRow) -> CellKey {
    (
        row.n0,
        row.m,
        row.p.to_bits(),
        row.attack.as_str(),
        row.eta.to_bits(),
    )
}

fn group_by_cell(rows: &[ResultRow]) -> BTreeMap<CellKey, Vec<&ResultRow>> {
    let mut map: BTreeMap<CellKey, Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        map.entry(cell_key(row)).or_default().push(row);
    }
    map
}

pub const AGGREGATE_HEADER: &str = "n0,m,p,attack,eta,replicas,gamma_mean,gamma_std,gamma_n,\
avg_k_mean,avg_k_std,tau_mean,tau_std,tau_n,avg_c_mean,avg_c_std,giant_frac_mean,giant_frac_std,\
cluster_count_mean,cluster_count_std";

/// Per-cell means and sample standard deviations. Exponent columns average
/// only the valid fits; their count gets its own column, and cells without
/// any valid fit leave the fields empty.
pub fn write_aggregate_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "# aggregate format v{RESULTS_FORMAT_VERSION}")?;
    writeln!(f, "{AGGREGATE_HEADER}")?;
    for (key, cell_rows) in group_by_cell(rows) {
        let (n0, m, p_bits, attack, eta_bits) = key;
        let stat = |xs: &[f64]| (mean(xs), sample_std(xs));
        let gammas: Vec<f64> = cell_rows
            .iter()
            .filter(|r| r.gamma.valid)
            .map(|r| r.gamma.exponent)
            .collect();
        let taus: Vec<f64> = cell_rows
            .iter()
            .filter(|r| r.tau.valid)
            .map(|r| r.tau.exponent)
            .collect();
        let avg_k: Vec<f64> = cell_rows.iter().map(|r| r.avg_k).collect();
        let avg_c: Vec<f64> = cell_rows.iter().map(|r| r.avg_c).collect();
        let giant: Vec<f64> = cell_rows.iter().map(|r| r.giant_frac).collect();
        let clusters: Vec<f64> = cell_rows.iter().map(|r| r.cluster_count as f64).collect();
        let opt = |xs: &[f64]| {
            if xs.is_empty() {
                (String::new(), String::new())
            } else {
                let (m, s) = stat(xs);
                (format!("{m:.6e}"), format!("{s:.6e}"))
            }
        };
        let (gm, gs) = opt(&gammas);
        let (tm, ts) = opt(&taus);
        let (km, ks) = stat(&avg_k);
        let (cm, cs) = stat(&avg_c);
        let (fm, fs_) = stat(&giant);
        let (nm, ns) = stat(&clusters);
        writeln!(
            f,
            "{},{},{},{},{},{},{gm},{gs},{},{km:.6e},{ks:.6e},{tm},{ts},{},{cm:.6e},{cs:.6e},{fm:.6e},{fs_:.6e},{nm:.6e},{ns:.6e}",
            n0,
            m,
            f64::from_bits(p_bits),
            attack,
            f64::from_bits(eta_bits),
            cell_rows.len(),
            gammas.len(),
            taus.len(),
        )?;
    }
    Ok(())
}

/// The observables a sweep reports on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputMetric {
    Gamma,
    AvgDegree,
    Tau,
    AvgClustering,
    GiantFraction,
}

impl OutputMetric {
    pub const ALL: [OutputMetric; 5] = [
        OutputMetric::Gamma,
        OutputMetric::AvgDegree,
        OutputMetric::Tau,
        OutputMetric::AvgClustering,
        OutputMetric::GiantFraction,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OutputMetric::Gamma => "gamma",
            OutputMetric::AvgDegree => "avg_k",
            OutputMetric::Tau => "tau",
            OutputMetric::AvgClustering => "avg_c",
            OutputMetric::GiantFraction => "giant_frac",
        }
    }

    fn value(&self, row: &ResultRow) -> Option<f64> {
        match self {
            OutputMetric::Gamma => row.gamma.valid.then_some(row.gamma.exponent),
            OutputMetric::AvgDegree => Some(row.avg_k),
            OutputMetric::Tau => row.tau.valid.then_some(row.tau.exponent),
            OutputMetric::AvgClustering => Some(row.avg_c),
            OutputMetric::GiantFraction => Some(row.giant_frac),
        }
    }

    /// Like [`Self::value`], but exponent metrics additionally pass the fit
    /// quality gates ([`DIRECTION_REL_ERR_MAX`], [`DIRECTION_GAMMA_SPAN_MIN`]).
    fn direction_value(&self, row: &ResultRow) -> Option<f64> {
        let fit = match self {
            OutputMetric::Gamma => &row.gamma,
            OutputMetric::Tau => &row.tau,
            _ => return self.value(row),
        };
        if !fit.valid || (fit.stderr / fit.exponent).abs() > DIRECTION_REL_ERR_MAX {
            return None;
        }
        if *self == OutputMetric::Gamma
            && (fit.fit_range.1 as f64) < DIRECTION_GAMMA_SPAN_MIN * fit.fit_range.0.max(1) as f64
        {
            return None;
        }
        Some(fit.exponent)
    }

    fn effect_floor(&self) -> f64 {
        match self {
            OutputMetric::Gamma => DIRECTION_GAMMA_EFFECT_FLOOR,
            _ => DIRECTION_EFFECT_FLOOR,
        }
    }
}

/// The control parameters a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputAxis {
    P,
    M,
    Eta,
}

impl InputAxis {
    pub const ALL: [InputAxis; 3] = [InputAxis::P, InputAxis::M, InputAxis::Eta];

    pub fn name(&self) -> &'static str {
        match self {
            InputAxis::P => "p",
            InputAxis::M => "m",
            InputAxis::Eta => "eta",
        }
    }

    fn value(&self, row: &ResultRow) -> f64 {
        match self {
            InputAxis::P => row.p,
            InputAxis::M => row.m as f64,
            InputAxis::Eta => row.eta,
        }
    }

    /// Everything held fixed while this axis varies.
    fn slice_key(&self, row: &ResultRow) -> (usize, u64, u64, &'static str, u64) {
        let p = row.p.to_bits();
        let m = (row.m as f64).to_bits();
        let eta = row.eta.to_bits();
        let kind = row.attack.as_str();
        match self {
            InputAxis::P => (row.n0, m, 0, kind, eta),
            InputAxis::M => (row.n0, p, 0, kind, eta),
            InputAxis::Eta => (row.n0, p, m, kind, 0),
        }
    }
}

/// How an output responds when an input grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
    Flat,
    /// Different slices (for eta: different attack kinds) pull in opposite
    /// directions.
    Mixed,
    /// Not enough usable data to say anything.
    Na,
}

impl Direction {
    pub fn token(&self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Flat => "flat",
            Direction::Mixed => "mixed",
            Direction::Na => "na",
        }
    }

    pub fn arrow(&self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Flat => "flat",
            Direction::Mixed => "mixed",
            Direction::Na => "n/a",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Direction of every output against every input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionReport {
    table: [[Direction; 3]; 5],
}

impl DirectionReport {
    pub fn direction(&self, output: OutputMetric, input: InputAxis) -> Direction {
        let o = OutputMetric::ALL.iter().position(|&x| x == output).unwrap();
        let i = InputAxis::ALL.iter().position(|&x| x == input).unwrap();
        self.table[o][i]
    }

    pub fn render(&self) -> String {
        let mut s = String::from("output        p       m       eta\n");
        for (o, metric) in OutputMetric::ALL.iter().enumerate() {
            s.push_str(&format!(
                "{:<12}  {:<6}  {:<6}  {:<6}\n",
                metric.name(),
                self.table[o][0].token(),
                self.table[o][1].token(),
                self.table[o][2].token(),
            ));
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "output,p,m,eta")?;
        for (o, metric) in OutputMetric::ALL.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                metric.name(),
                self.table[o][0].token(),
                self.table[o][1].token(),
                self.table[o][2].token(),
            )?;
        }
        Ok(())
    }
}

fn side_values(metric: OutputMetric, rows: &[&ResultRow]) -> Option<Vec<f64>> {
    let vals: Vec<f64> = rows.iter().filter_map(|r| metric.direction_value(r)).collect();
    if vals.len() < DIRECTION_MIN_SAMPLES {
        return None;
    }
    Some(vals)
}

/// Direction within one slice: compare the extremes of the axis.
fn slice_direction(metric: OutputMetric, lo: &[&ResultRow], hi: &[&ResultRow]) -> Direction {
    let (lo_vals, hi_vals) = match (side_values(metric, lo), side_values(metric, hi)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Direction::Na,
    };
    let (ml, mh) = (mean(&lo_vals), mean(&hi_vals));
    let scale = ml.abs().max(mh.abs());
    let effect = if scale > 0.0 {
        (mh - ml).abs() / scale
    } else {
        0.0
    };
    let significant = welch_t_test(&hi_vals, &lo_vals)
        .map(|w| w.p_two_sided < DIRECTION_ALPHA)
        .unwrap_or(false);
    if !significant || effect < metric.effect_floor() {
        Direction::Flat
    } else if mh > ml {
        Direction::Up
    } else {
        Direction::Down
    }
}

fn combine(directions: &[Direction]) -> Direction {
    let usable: Vec<Direction> = directions
        .iter()
        .copied()
        .filter(|&d| d != Direction::Na)
        .collect();
    if usable.is_empty() {
        return Direction::Na;
    }
    let up = usable.contains(&Direction::Up);
    let down = usable.contains(&Direction::Down);
    match (up, down) {
        (true, true) => Direction::Mixed,
        (true, false) => Direction::Up,
        (false, true) => Direction::Down,
        (false, false) => Direction::Flat,
    }
}

/// Tests, for every output metric and input axis, whether the metric moves
/// up or down when the input grows.
///
/// Rows are grouped into slices holding everything but the axis fixed; a
/// slice contributes when it spans at least two axis values, comparing its
/// extremes with Welch's test at [`DIRECTION_ALPHA`], demanding a relative
/// mean shift of at least the metric's effect floor
/// ([`DIRECTION_EFFECT_FLOOR`], [`DIRECTION_GAMMA_EFFECT_FLOOR`]). Slice
/// verdicts are combined by union: any disagreement in sign is reported as
/// mixed (for the eta axis that captures attack kinds pulling opposite
/// ways). Exponent values contribute only where their fits are tight
/// ([`DIRECTION_REL_ERR_MAX`]) and, for gamma, wide enough
/// ([`DIRECTION_GAMMA_SPAN_MIN`]); slices without usable data drop out, and
/// an axis with no usable slice at all is n/a.
pub fn direction_report(rows: &[ResultRow]) -> DirectionReport {
    let mut table = [[Direction::Na; 3]; 5];
    for (oi, &metric) in OutputMetric::ALL.iter().enumerate() {
        for (ai, &axis) in InputAxis::ALL.iter().enumerate() {
            let mut slices: BTreeMap<(usize, u64, u64, &'static str, u64), Vec<&ResultRow>> =
                BTreeMap::new();
            for row in rows {
                slices.entry(axis.slice_key(row)).or_default().push(row);
            }
            let mut verdicts = Vec::new();
            for rows_in_slice in slices.values() {
                let mut axis_vals: Vec<f64> =
                    rows_in_slice.iter().map(|r| axis.value(r)).collect();
                axis_vals.sort_by(f64::total_cmp);
                axis_vals.dedup();
                if axis_vals.len() < 2 {
                    continue;
                }
                let (lo, hi) = (axis_vals[0], *axis_vals.last().unwrap());
                let lo_rows: Vec<&ResultRow> = rows_in_slice
                    .iter()
                    .filter(|r| axis.value(r) == lo)
                    .copied()
                    .collect();
                let hi_rows: Vec<&ResultRow> = rows_in_slice
                    .iter()
                    .filter(|r| axis.value(r) == hi)
                    .copied()
                    .collect();
                verdicts.push(slice_direction(metric, &lo_rows, &hi_rows));
            }
            table[oi][ai] = combine(&verdicts);
        }
    }
    DirectionReport { table }
}

/// Nominal band of an output metric (open interval).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeBand {
    pub lo: f64,
    pub hi: f64,
}

pub fn nominal_band(metric: OutputMetric) -> RangeBand {
    match metric {
        OutputMetric::Gamma => RangeBand { lo: 2.4, hi: 2.9 },
        OutputMetric::AvgDegree => RangeBand { lo: 0.1, hi: 9.0 },
        OutputMetric::Tau => RangeBand { lo: 2.5, hi: 7.0 },
        OutputMetric::AvgClustering => RangeBand { lo: 0.0, hi: 0.1 },
        OutputMetric::GiantFraction => RangeBand { lo: 0.0, hi: 1.0 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeEntry {
    pub metric: OutputMetric,
    pub band: RangeBand,
    pub observed_min: f64,
    pub observed_max: f64,
    /// Rows that contributed a value.
    pub n: usize,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeReport {
    pub entries: Vec<RangeEntry>,
}

impl RangeReport {
    pub fn all_within(&self) -> bool {
        self.entries.iter().all(|e| e.within || e.n == 0)
    }

    pub fn render(&self) -> String {
        let mut s = String::from("metric        observed              nominal           verdict\n");
        for e in &self.entries {
            let obs = if e.n == 0 {
                "no data".to_string()
            } else {
                format!("[{:.4}, {:.4}]", e.observed_min, e.observed_max)
            };
            s.push_str(&format!(
                "{:<12}  {:<20}  ({}, {})  {}\n",
                e.metric.name(),
                obs,
                e.band.lo,
                e.band.hi,
                if e.n == 0 {
                    "-"
                } else if e.within {
                    "within"
                } else {
                    "outside"
                }
            ));
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "metric,observed_min,observed_max,nominal_lo,nominal_hi,n,within")?;
        for e in &self.entries {
            let (lo, hi) = if e.n == 0 {
                (String::new(), String::new())
            } else {
                (
                    format!("{:.6e}", e.observed_min),
                    format!("{:.6e}", e.observed_max),
                )
            };
            writeln!(
                w,
                "{},{lo},{hi},{},{},{},{}",
                e.metric.name(),
                e.band.lo,
                e.band.hi,
                e.n,
                e.within
            )?;
        }
        Ok(())
    }
}

/// Compares observed per-replica values against the nominal bands. Purely
/// informational: the bands describe where the model usually lives, not a
/// hard contract.
pub fn range_check(rows: &[ResultRow]) -> RangeReport {
    let entries = OutputMetric::ALL
        .iter()
        .map(|&metric| {
            let vals: Vec<f64> = rows.iter().filter_map(|r| metric.value(r)).collect();
            let band = nominal_band(metric);
            if vals.is_empty() {
                return RangeEntry {
                    metric,
                    band,
                    observed_min: f64::NAN,
                    observed_max: f64::NAN,
                    n: 0,
                    within: true,
                };
            }
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            RangeEntry {
                metric,
                band,
                observed_min: lo,
                observed_max: hi,
                n: vals.len(),
                within: lo > band.lo && hi < band.hi,
            }
        })
        .collect();
    RangeReport { entries }
}

/// The stock sweep behind the direction table: four sub-grids, each varying
/// one input. Every sub-grid derives its own master seed from `seed`, so
/// cells of different sub-grids never share replica seeds.
pub fn direction_grids(
    n0: usize,
    replicas: usize,
    seed: u64,
    out_dir: Option<PathBuf>,
) -> Vec<SweepGrid> {
    let sub_seed = |i: u64| splitmix64(seed ^ splitmix64(i + 1));
    vec![
        // p axis. Unattacked cells carry the exponent and clustering
        // evidence; a strong uniform attack adds enough fragmentation for
        // cluster-size fits while leaving avg_k and the giant fraction
        // independent of p.
        SweepGrid {
            n0s: vec![n0],
            ms: vec![3],
            ps: vec![0.0, 1.0],
            attacks: vec![AttackKind::None, AttackKind::General],
            etas: vec![0.6],
            replicas,
            seed: sub_seed(0),
            out_dir: out_dir.clone(),
            exports: ExportFlags::none(),
        },
        // m axis, in two parts: the giant fraction's m dependence only
        // shows once the attack bites, and only the degree-driven attack
        // fragments both m extremes enough to compare cluster exponents.
        // 0.35 keeps the sparser network near its breakdown while the
        // denser one still fragments measurably.
        SweepGrid {
            n0s: vec![n0],
            ms: vec![2, 5],
            ps: vec![0.5],
            attacks: vec![AttackKind::None, AttackKind::General],
            etas: vec![0.55],
            replicas,
            seed: sub_seed(1),
            out_dir: out_dir.clone(),
            exports: ExportFlags::none(),
        },
        SweepGrid {
            n0s: vec![n0],
            ms: vec![2, 5],
            ps: vec![0.5],
            attacks: vec![AttackKind::Central],
            etas: vec![0.35],
            replicas,
            seed: sub_seed(2),
            out_dir: out_dir.clone(),
            exports: ExportFlags::none(),
        },
        // eta axis: one slice per attack kind; the low end stays at 0.25 so
        // the central slice keeps enough clusters for size fits on both
        // sides.
        SweepGrid {
            n0s: vec![n0],
            ms: vec![3],
            ps: vec![0.5],
            attacks: vec![
                AttackKind::Central,
                AttackKind::Peripheral,
                AttackKind::General,
            ],
            etas: vec![0.25, 0.5],
            replicas,
            seed: sub_seed(3),
            out_dir,
            exports: ExportFlags::none(),
        },
    ]
}

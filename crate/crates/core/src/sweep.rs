//! Parameter sweeps producing the CSV tables behind the gap/QFI figures.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{check_truncation, squeezing_parameter, top_population, FockSpace, Sector};
use crate::models::{build, solve, Family, ModelSpec, Solution};
use crate::qfi::{normalized_metrics, qfi_analytic_squeezed, qfi_spectral_sum, qfi_state_fd_default};
use crate::settings::Settings;
use crate::spectral::{eigendecompose_with, expectation, variance};
use crate::spin::{chain_collective_spin, collective_spin_ops, ChainBasis, CollectiveSpin, DickeBasis};

/// Half-width of the window around `x = 1` dropped from effective grids.
pub const CRITICAL_EXCLUSION: f64 = 1e-3;

/// Sweep grid: an explicit list or `count` linearly spaced points.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grid {
    Linear { start: f64, stop: f64, count: usize },
    List { values: Vec<f64> },
}

impl Grid {
    pub fn linear(start: f64, stop: f64, count: usize) -> Result<Self> {
        let g = Grid::Linear { start, stop, count };
        g.validate()?;
        Ok(g)
    }

    pub fn list(values: Vec<f64>) -> Result<Self> {
        let g = Grid::List { values };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Grid::Linear { start, stop, count } => {
                if !start.is_finite() || !stop.is_finite() {
                    return Err(Error::InvalidInput("grid endpoints must be finite".into()));
                }
                if *count < 2 {
                    return Err(Error::InvalidInput(format!("grid count must be >= 2, got {count}")));
                }
                if start == stop {
                    return Err(Error::InvalidInput("grid start and stop must differ".into()));
                }
                let v = self.values();
                if v.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidInput("grid spacing below float resolution".into()));
                }
            }
            Grid::List { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidInput("grid list is empty".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("grid values must be finite".into()));
                }
                let up = values.windows(2).all(|w| w[0] < w[1]);
                let down = values.windows(2).all(|w| w[0] > w[1]);
                if !(up || down) {
                    return Err(Error::InvalidInput("grid list must be strictly monotone".into()));
                }
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Linear { start, stop, count } => {
                let n = *count;
                (0..n)
                    .map(|i| {
                        if i + 1 == n {
                            *stop
                        } else {
                            start + (stop - start) * (i as f64 / (n - 1) as f64)
                        }
                    })
                    .collect()
            }
            Grid::List { values } => values.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Linear { count, .. } => *count,
            Grid::List { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `start:stop:count` or a comma-separated list.
impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad grid number '{}'", t.trim())))
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::InvalidInput(format!("grid '{s}' is not start:stop:count")));
            }
            let count = parts[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad grid count '{}'", parts[2].trim())))?;
            Grid::linear(num(parts[0])?, num(parts[1])?, count)
        } else {
            Grid::list(s.split(',').map(num).collect::<Result<Vec<_>>>()?)
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Linear { start, stop, count } => write!(f, "{start:?}:{stop:?}:{count}"),
            Grid::List { values } => {
                let parts: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// What to sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    /// Both effective sectors on the signed axis `x_signed`.
    Effective,
    Lmg,
    Tfim,
    TfimTransverse,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Effective => "effective",
            SweepKind::Lmg => "lmg",
            SweepKind::Tfim => "tfim",
            SweepKind::TfimTransverse => "tfim_transverse",
        }
    }

    pub fn default_grid(self) -> Grid {
        match self {
            SweepKind::Effective => Grid::Linear { start: -16.0, stop: 0.95, count: 200 },
            SweepKind::Lmg => Grid::Linear { start: 0.0, stop: 0.98, count: 100 },
            SweepKind::Tfim | SweepKind::TfimTransverse => {
                Grid::Linear { start: -3.0, stop: 3.0, count: 121 }
            }
        }
    }

    pub fn default_size(self) -> Option<usize> {
        match self {
            SweepKind::Effective => None,
            SweepKind::Lmg => Some(200),
            SweepKind::Tfim | SweepKind::TfimTransverse => Some(10),
        }
    }

    /// Finite-difference column on by default (off for chains, where it
    /// costs four extra diagonalizations of a 2^N matrix per point).
    pub fn default_fd(self) -> bool {
        !matches!(self, SweepKind::Tfim | SweepKind::TfimTransverse)
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "effective" | "effective_low" | "effective_high" => Ok(SweepKind::Effective),
            "lmg" => Ok(SweepKind::Lmg),
            "tfim" => Ok(SweepKind::Tfim),
            "tfim_transverse" => Ok(SweepKind::TfimTransverse),
            _ => Err(Error::InvalidInput(format!("no sweep for family '{s}'"))),
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub omega: f64,
    /// Spin count, or a fixed Fock cutoff (`None`: automatic per point).
    pub size: Option<usize>,
    /// Effective sweeps: signed `x`. Spin sweeps: signed `g/g_c`.
    pub grid: Grid,
    pub fd: bool,
    /// Worker threads, 0 for all available.
    pub jobs: usize,
    /// Output columns, empty for all.
    pub columns: Vec<String>,
    pub out: Option<PathBuf>,
    pub settings: Settings,
}

impl SweepConfig {
    pub fn new(kind: SweepKind) -> Self {
        SweepConfig {
            kind,
            omega: 1.0,
            size: kind.default_size(),
            grid: kind.default_grid(),
            fd: kind.default_fd(),
            jobs: 0,
            columns: Vec::new(),
            out: None,
            settings: Settings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidInput(format!("omega must be > 0, got {}", self.omega)));
        }
        for c in &self.columns {
            if !COLUMNS.contains(&c.as_str()) {
                return Err(Error::InvalidInput(format!("unknown column '{c}'")));
            }
        }
        Ok(())
    }

    /// Grid points actually evaluated: effective grids lose the window around
    /// `x = 1` and are sorted by `x_signed`.
    pub fn points(&self) -> Vec<f64> {
        let mut v = self.grid.values();
        if self.kind == SweepKind::Effective {
            v.retain(|x| (x - 1.0).abs() > CRITICAL_EXCLUSION);
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        v
    }
}

pub const COLUMNS: [&str; 19] = [
    "x_signed",
    "g_over_gc",
    "x",
    "gap01",
    "gap02",
    "qfi_spectral",
    "qfi_analytic",
    "qfi_fd",
    "qfi_times_gap",
    "qfi_times_gap_sq",
    "mean_n",
    "var_n",
    "mean_sz",
    "mean_sz_plus_half_N",
    "var_sx",
    "var_sy",
    "var_sz",
    "xi",
    "status",
];

/// One grid point. `None` cells are written empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepRow {
    pub x_signed: Option<f64>,
    pub g_over_gc: Option<f64>,
    pub x: Option<f64>,
    pub gap01: Option<f64>,
    pub gap02: Option<f64>,
    pub qfi_spectral: Option<f64>,
    pub qfi_analytic: Option<f64>,
    pub qfi_fd: Option<f64>,
    pub qfi_times_gap: Option<f64>,
    pub qfi_times_gap_sq: Option<f64>,
    pub mean_n: Option<f64>,
    pub var_n: Option<f64>,
    pub mean_sz: Option<f64>,
    pub mean_sz_plus_half_n: Option<f64>,
    pub var_sx: Option<f64>,
    pub var_sy: Option<f64>,
    pub var_sz: Option<f64>,
    pub xi: Option<f64>,
    /// Fock cutoff used (bosonic rows).
    pub n_max: Option<usize>,
    /// Guard kinds raised while filling the row.
    pub errors: Vec<String>,
}

impl SweepRow {
    pub fn status(&self) -> String {
        if self.errors.is_empty() {
            "ok".into()
        } else {
            self.errors.join(";")
        }
    }

    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn cell(&self, column: &str) -> Option<f64> {
        match column {
            "x_signed" => self.x_signed,
            "g_over_gc" => self.g_over_gc,
            "x" => self.x,
            "gap01" => self.gap01,
            "gap02" => self.gap02,
            "qfi_spectral" => self.qfi_spectral,
            "qfi_analytic" => self.qfi_analytic,
            "qfi_fd" => self.qfi_fd,
            "qfi_times_gap" => self.qfi_times_gap,
            "qfi_times_gap_sq" => self.qfi_times_gap_sq,
            "mean_n" => self.mean_n,
            "var_n" => self.var_n,
            "mean_sz" => self.mean_sz,
            "mean_sz_plus_half_N" => self.mean_sz_plus_half_n,
            "var_sx" => self.var_sx,
            "var_sy" => self.var_sy,
            "var_sz" => self.var_sz,
            "xi" => self.xi,
            _ => None,
        }
    }

    fn note(&mut self, e: &Error) {
        let k = e.kind().to_string();
        if !self.errors.contains(&k) {
            self.errors.push(k);
        }
    }

    /// Records the error and returns `None`.
    fn keep<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.note(&e);
                None
            }
        }
    }

    /// Empties non-finite cells and flags them.
    fn scrub(&mut self) {
        let mut bad = false;
        for c in [
            &mut self.x_signed,
            &mut self.g_over_gc,
            &mut self.x,
            &mut self.gap01,
            &mut self.gap02,
            &mut self.qfi_spectral,
            &mut self.qfi_analytic,
            &mut self.qfi_fd,
            &mut self.qfi_times_gap,
            &mut self.qfi_times_gap_sq,
            &mut self.mean_n,
            &mut self.var_n,
            &mut self.mean_sz,
            &mut self.mean_sz_plus_half_n,
            &mut self.var_sx,
            &mut self.var_sy,
            &mut self.var_sz,
            &mut self.xi,
        ] {
            if matches!(c, Some(v) if !v.is_finite()) {
                *c = None;
                bad = true;
            }
        }
        if bad {
            self.errors.push("NonFinite".into());
        }
    }
}

fn gaps(sol: &Solution) -> (f64, Option<f64>) {
    let e = &sol.spectrum.eigenvalues;
    (e[1] - e[0], e.get(2).map(|e2| e2 - e[0]))
}

fn effective_row(x_signed: f64, cfg: &SweepConfig) -> SweepRow {
    let mut row = SweepRow {
        x_signed: Some(x_signed),
        ..Default::default()
    };
    let sector = if x_signed >= 0.0 { Sector::Low } else { Sector::High };
    let x = x_signed.abs();
    row.x = Some(x);
    row.g_over_gc = Some(x.sqrt());
    let s = &cfg.settings;
    row.xi = row.keep(squeezing_parameter(sector, x).map(|p| p.xi));
    row.qfi_analytic = row.keep(qfi_analytic_squeezed(sector, cfg.omega, x).map(|r| r.value));
    let Some(mut spec) = row.keep(ModelSpec::effective(sector, cfg.omega, x, s)) else {
        return row;
    };
    spec.size = cfg.size;
    let Some(sol) = row.keep(solve(&spec, s)) else {
        return row;
    };
    row.n_max = sol.n_max();
    let (g1, g2) = gaps(&sol);
    row.gap01 = Some(g1);
    row.gap02 = g2;
    let ground = sol.spectrum.ground_state();
    row.mean_n = row.keep(expectation(&sol.model.d_omega, ground));
    row.var_n = row.keep(variance(&sol.model.d_omega, ground));
    row.qfi_spectral = row.keep(qfi_spectral_sum(&sol, s).map(|r| r.value));
    if let (Some(q), Some(g2)) = (row.qfi_spectral, g2) {
        if let Some((a, b)) = row.keep(normalized_metrics(q, g2)) {
            row.qfi_times_gap = Some(a);
            row.qfi_times_gap_sq = Some(b);
        }
    }
    if cfg.fd {
        let fixed = sol.model.spec;
        row.qfi_fd = row.keep(qfi_state_fd_default(&fixed, s).map(|r| r.value));
    }
    row
}

fn spin_row(coupling: f64, cfg: &SweepConfig, ops: &CollectiveSpin) -> SweepRow {
    let family = match cfg.kind {
        SweepKind::Lmg => Family::Lmg,
        SweepKind::Tfim => Family::Tfim,
        SweepKind::TfimTransverse => Family::TfimTransverse,
        SweepKind::Effective => unreachable!("effective rows are built by effective_row"),
    };
    let mut row = SweepRow {
        g_over_gc: Some(coupling),
        x: Some(coupling * coupling),
        ..Default::default()
    };
    let s = &cfg.settings;
    let Some(spec) = row.keep(ModelSpec::from_coupling(family, cfg.omega, None, coupling, cfg.size, s)) else {
        return row;
    };
    let Some(sol) = row.keep(solve(&spec, s)) else {
        return row;
    };
    let n = spec.size.unwrap_or(0);
    let (g1, _) = gaps(&sol);
    row.gap01 = Some(g1);
    let ground = sol.spectrum.ground_state();
    row.mean_sz = row.keep(expectation(&ops.sz, ground));
    row.mean_sz_plus_half_n = row.mean_sz.map(|m| m + n as f64 / 2.0);
    row.var_sx = row.keep(variance(&ops.sx, ground));
    row.var_sy = row.keep(variance(&ops.sy, ground));
    row.var_sz = row.keep(variance(&ops.sz, ground));
    row.qfi_spectral = row.keep(qfi_spectral_sum(&sol, s).map(|r| r.value));
    if let Some(q) = row.qfi_spectral {
        if let Some((a, b)) = row.keep(normalized_metrics(q, g1)) {
            row.qfi_times_gap = Some(a);
            row.qfi_times_gap_sq = Some(b);
        }
    }
    if cfg.fd {
        row.qfi_fd = row.keep(qfi_state_fd_default(&spec, s).map(|r| r.value));
    }
    row
}

/// Evaluates `f` on every point, in parallel when `jobs != 1`, keeping the
/// input order.
fn run_points(cfg: &SweepConfig, f: impl Fn(f64) -> SweepRow + Sync + Send) -> Result<Vec<SweepRow>> {
    let points = cfg.points();
    let finish = |mut r: SweepRow| {
        r.scrub();
        r
    };
    if cfg.jobs == 1 {
        return Ok(points.into_iter().map(|p| finish(f(p))).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(|| points.par_iter().map(|&p| finish(f(p))).collect()))
}

/// Both effective sectors on the signed axis (`x_signed < 0` is the high
/// sector at `x = -x_signed`).
pub fn sweep_effective(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.kind != SweepKind::Effective {
        return Err(Error::InvalidInput(format!("{} config passed to sweep_effective", cfg.kind)));
    }
    cfg.validate()?;
    run_points(cfg, |x| effective_row(x, cfg))
}

/// Collective spin operators shared by every point of a spin sweep.
fn sweep_spin_ops(cfg: &SweepConfig) -> Result<CollectiveSpin> {
    let n = cfg
        .size
        .ok_or_else(|| Error::InvalidInput(format!("{} sweep needs N", cfg.kind)))?;
    Ok(match cfg.kind {
        SweepKind::Lmg => collective_spin_ops(DickeBasis::new(n)?),
        _ => chain_collective_spin(ChainBasis::new(n)?),
    })
}

pub fn sweep_lmg(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.kind != SweepKind::Lmg {
        return Err(Error::InvalidInput(format!("{} config passed to sweep_lmg", cfg.kind)));
    }
    cfg.validate()?;
    let ops = sweep_spin_ops(cfg)?;
    run_points(cfg, |c| spin_row(c, cfg, &ops))
}

pub fn sweep_chain(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if !matches!(cfg.kind, SweepKind::Tfim | SweepKind::TfimTransverse) {
        return Err(Error::InvalidInput(format!("{} config passed to sweep_chain", cfg.kind)));
    }
    cfg.validate()?;
    let ops = sweep_spin_ops(cfg)?;
    run_points(cfg, |c| spin_row(c, cfg, &ops))
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    match cfg.kind {
        SweepKind::Effective => sweep_effective(cfg),
        SweepKind::Lmg => sweep_lmg(cfg),
        SweepKind::Tfim | SweepKind::TfimTransverse => sweep_chain(cfg),
    }
}

/// Shortest round-trip decimal.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

pub fn to_csv(rows: &[SweepRow], columns: &[String]) -> String {
    let cols: Vec<&str> = if columns.is_empty() {
        COLUMNS.to_vec()
    } else {
        COLUMNS.iter().copied().filter(|c| columns.iter().any(|s| s == c)).collect()
    };
    let mut out = cols.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = cols
            .iter()
            .map(|&c| match c {
                "status" => r.status(),
                _ => r.cell(c).map(format_float).unwrap_or_default(),
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

#[derive(Serialize)]
struct Sidecar<'a> {
    version: &'static str,
    config: &'a SweepConfig,
    points: usize,
    failed_points: usize,
    truncation_levels: Vec<Option<usize>>,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn sidecar_json(cfg: &SweepConfig, rows: &[SweepRow]) -> String {
    let meta = Sidecar {
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        points: rows.len(),
        failed_points: rows.iter().filter(|r| !r.is_ok()).count(),
        truncation_levels: rows.iter().map(|r| r.n_max).collect(),
    };
    let mut s = serde_json::to_string_pretty(&meta).expect("sidecar serializes");
    s.push('\n');
    s
}

/// Writes the CSV and its `.meta.json` sidecar.
pub fn write_outputs(cfg: &SweepConfig, rows: &[SweepRow], out: &Path) -> Result<()> {
    std::fs::write(out, to_csv(rows, &cfg.columns))?;
    std::fs::write(sidecar_path(out), sidecar_json(cfg, rows))?;
    Ok(())
}

/// One truncation level of a convergence report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceEntry {
    pub n_max: usize,
    pub ground_energy: f64,
    pub gap: f64,
    pub mean_n: f64,
    pub top_population: f64,
    /// Within `tolerance` (relative) of the previous level in energy, gap
    /// and `<n>`; `None` for the first level.
    pub matches_previous: Option<bool>,
    pub truncation_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub spec: ModelSpec,
    pub tolerance: f64,
    pub entries: Vec<ConvergenceEntry>,
}

impl ConvergenceReport {
    /// Smallest level that agrees with its predecessor and with every level
    /// after it.
    pub fn converged_at(&self) -> Option<usize> {
        let e = &self.entries;
        (1..e.len())
            .find(|&i| e[i..].iter().all(|x| x.matches_previous == Some(true)))
            .map(|i| e[i - 1].n_max)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("n_max,ground_energy,gap,mean_n,top_population,matches_previous,truncation_ok\n");
        for e in &self.entries {
            let m = match e.matches_previous {
                None => String::new(),
                Some(b) => b.to_string(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.n_max,
                format_float(e.ground_energy),
                format_float(e.gap),
                format_float(e.mean_n),
                format_float(e.top_population),
                m,
                e.truncation_ok
            );
        }
        out
    }
}

pub const CONVERGENCE_TOL: f64 = 1e-10;

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Ground energy, gap and `<n>` at each Fock cutoff in `levels`.
pub fn convergence_report(spec: &ModelSpec, levels: &[usize], settings: &Settings) -> Result<ConvergenceReport> {
    if !spec.family.is_bosonic() {
        return Err(Error::InvalidInput(format!("{} has no Fock cutoff", spec.family)));
    }
    if levels.is_empty() {
        return Err(Error::InvalidInput("no truncation levels given".into()));
    }
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("duplicate truncation levels".into()));
    }
    let mut entries: Vec<ConvergenceEntry> = Vec::with_capacity(sorted.len());
    for &n_max in &sorted {
        FockSpace::new(n_max)?;
        let model = build(&spec.with_size(n_max), settings)?;
        let spectrum = eigendecompose_with(&model.hamiltonian, settings)?;
        let ground = spectrum.ground_state();
        let e = &spectrum.eigenvalues;
        let entry_values = (e[0], e[1] - e[0], expectation(&model.d_omega, ground)?);
        let matches_previous = entries.last().map(|p| {
            rel_diff(p.ground_energy, entry_values.0) <= CONVERGENCE_TOL
                && rel_diff(p.gap, entry_values.1) <= CONVERGENCE_TOL
                && rel_diff(p.mean_n, entry_values.2) <= CONVERGENCE_TOL
        });
        entries.push(ConvergenceEntry {
            n_max,
            ground_energy: entry_values.0,
            gap: entry_values.1,
            mean_n: entry_values.2,
            top_population: top_population(ground, n_max),
            matches_previous,
            truncation_ok: check_truncation(ground, n_max, settings.truncation_tol).is_ok(),
        });
    }
    Ok(ConvergenceReport {
        spec: *spec,
        tolerance: CONVERGENCE_TOL,
        entries,
    })
}

//! Command-line front end. Flags override the config file, which overrides
//! the defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{emit_config_template, Config};
use crate::error::{Error, Result};
use crate::models::{solve, Family, ModelSpec};
use crate::qfi::{
    qfi_adiabatic_generator, qfi_analytic_squeezed, qfi_phase_imprint, qfi_spectral_sum, qfi_state_fd_default, Method,
    QfiResult, RampSpec, Schedule,
};
use crate::sweep::{convergence_report, format_float, run_sweep, write_outputs, SweepConfig, SweepKind};

#[derive(Debug, Parser)]
#[command(name = "anticritical", about = "Ground-state QFI, gaps and sweeps for critical and anti-critical models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum Fisher information for omega at one parameter point
    Qfi(QfiArgs),
    /// Ground-state gap at one parameter point
    Gap(ModelArgs),
    /// Parameter sweep to CSV
    Sweep(SweepArgs),
    /// QFI accumulated along an adiabatic ramp ending at --x / --g
    Adiabatic(AdiabaticArgs),
    /// Fock-cutoff convergence table for a bosonic model
    Converge(ConvergeArgs),
    /// Print the version
    Version,
    /// Print a commented config template with every default
    Template,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// key = value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print a key=value diagnostics block
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long = "Omega")]
    pub big_omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    /// Spin count
    #[arg(long = "N")]
    pub spins: Option<usize>,
    /// Fixed Fock cutoff
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct QfiArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub method: Option<String>,
    /// Phase-imprint time
    #[arg(long = "t")]
    pub imprint_time: Option<f64>,
    #[command(flatten)]
    pub ramp: RampArgs,
}

#[derive(Debug, Args)]
pub struct RampArgs {
    /// Ramp duration
    #[arg(long = "T")]
    pub total_time: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long = "x-start")]
    pub x_start: Option<f64>,
    /// linear | constant
    #[arg(long)]
    pub schedule: Option<String>,
}

#[derive(Debug, Args)]
pub struct AdiabaticArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub ramp: RampArgs,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated Fock cutoffs
    #[arg(long)]
    pub levels: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// effective | lmg | tfim | tfim_transverse
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long = "N")]
    pub spins: Option<usize>,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// start:stop:count or a comma-separated list
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Finite-difference QFI column (true/false)
    #[arg(long)]
    pub fd: Option<bool>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Exit status for a failed run.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical_guard() {
        3
    } else {
        2
    }
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    let mut c = Config::default();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", p.display())))?;
        c.merge_str(&text)?;
    }
    Ok(c)
}

fn model_config(a: &ModelArgs) -> Result<Config> {
    let mut c = load_config(a.common.config.as_deref())?;
    if a.g.is_some() && a.x.is_some() {
        return Err(Error::InvalidInput("give either --g or --x, not both".into()));
    }
    if let Some(f) = &a.family {
        c.family = Some(f.parse()?);
    }
    if let Some(w) = a.omega {
        c.omega = w;
    }
    if a.big_omega.is_some() {
        c.big_omega = a.big_omega;
    }
    if a.g.is_some() {
        c.g = a.g;
        c.x = None;
    }
    if a.x.is_some() {
        c.x = a.x;
        c.g = None;
    }
    if a.spins.is_some() {
        c.spins = a.spins;
    }
    if a.n_max.is_some() {
        c.n_max = a.n_max;
    }
    Ok(c)
}

fn apply_ramp(c: &mut Config, r: &RampArgs) -> Result<()> {
    if let Some(t) = r.total_time {
        c.ramp_time = t;
    }
    if let Some(n) = r.steps {
        c.ramp_steps = n;
    }
    if let Some(x) = r.x_start {
        c.ramp_x_start = x;
    }
    if let Some(s) = &r.schedule {
        c.ramp_schedule = s.parse()?;
    }
    Ok(())
}

/// Model spec described by a resolved config.
pub fn model_spec(c: &Config) -> Result<ModelSpec> {
    let family = c
        .family
        .ok_or_else(|| Error::InvalidInput("no model family given (--family)".into()))?;
    if c.g.is_some() && c.x.is_some() {
        return Err(Error::InvalidInput("config sets both g and x".into()));
    }
    if let Some(x) = c.x {
        if !(x >= 0.0) {
            return Err(Error::InvalidInput(format!("x must be >= 0, got {x}")));
        }
    }
    let omega = c.omega;
    let spec = if family.is_bosonic() {
        let big = c.big_omega.unwrap_or(c.settings.reference_big_omega_ratio * omega);
        let g = match (c.g, c.x) {
            (Some(g), _) => g,
            (None, Some(x)) => (x * omega * big).sqrt(),
            _ => return Err(Error::InvalidInput("no coupling given (--g or --x)".into())),
        };
        ModelSpec {
            family,
            omega,
            big_omega: Some(big),
            g,
            size: c.n_max,
        }
    } else {
        let g = match (c.g, c.x) {
            (Some(g), _) => g,
            (None, Some(x)) => omega * x.sqrt(),
            _ => return Err(Error::InvalidInput("no coupling given (--g or --x)".into())),
        };
        let default_n = if family == Family::Lmg { 200 } else { 10 };
        ModelSpec {
            family,
            omega,
            big_omega: None,
            g,
            size: Some(c.spins.unwrap_or(default_n)),
        }
    };
    spec.validate(&c.settings)?;
    Ok(spec)
}

/// Ramp coordinate `x` of the target point.
fn target_x(c: &Config, spec: &ModelSpec) -> f64 {
    c.x.unwrap_or_else(|| spec.x())
}

fn ramp_from(c: &Config, spec: &ModelSpec) -> RampSpec {
    let x = target_x(c, spec);
    match c.ramp_schedule {
        Schedule::Constant => RampSpec::constant(x, c.ramp_time, c.ramp_steps),
        Schedule::Linear => RampSpec {
            x_start: c.ramp_x_start,
            x_end: x,
            total_time: c.ramp_time,
            steps: c.ramp_steps,
            schedule: Schedule::Linear,
        },
    }
}

fn render(value: f64, verbose: bool, extra: &[(&str, String)], diagnostics: &BTreeMap<String, f64>) -> String {
    let mut out = format_float(value);
    out.push('\n');
    if verbose {
        for (k, v) in extra {
            let _ = writeln!(out, "{k}={v}");
        }
        for (k, v) in diagnostics {
            let _ = writeln!(out, "{k}={}", format_float(*v));
        }
    }
    out
}

fn spec_fields(spec: &ModelSpec) -> Vec<(&'static str, String)> {
    let mut v = vec![
        ("family", spec.family.to_string()),
        ("omega", format_float(spec.omega)),
        ("g", format_float(spec.g)),
        ("g_over_gc", format_float(spec.g_over_gc())),
    ];
    if let Some(b) = spec.big_omega {
        v.push(("Omega", format_float(b)));
    }
    if let (false, Some(n)) = (spec.family.is_bosonic(), spec.size) {
        v.push(("N", n.to_string()));
    }
    v
}

fn run_qfi(a: &QfiArgs) -> Result<String> {
    let mut c = model_config(&a.model)?;
    if let Some(m) = &a.method {
        c.method = m.parse()?;
    }
    if let Some(t) = a.imprint_time {
        c.imprint_time = t;
    }
    apply_ramp(&mut c, &a.ramp)?;
    let spec = model_spec(&c)?;
    let s = &c.settings;
    let result: QfiResult = match c.method {
        Method::Analytic => {
            let sector = spec.family.sector().filter(|_| spec.family != Family::RabiFull).ok_or_else(|| {
                Error::InvalidInput(format!("analytic QFI needs an effective family, got {}", spec.family))
            })?;
            qfi_analytic_squeezed(sector, spec.omega, target_x(&c, &spec))?
        }
        Method::SpectralSum => qfi_spectral_sum(&solve(&spec, s)?, s)?,
        Method::StateFd => qfi_state_fd_default(&spec, s)?,
        Method::PhaseImprint => {
            let sol = solve(&spec, s)?;
            qfi_phase_imprint(sol.spectrum.ground_state(), &sol.model.d_omega, c.imprint_time)?
        }
        Method::AdiabaticGenerator => qfi_adiabatic_generator(&spec, &ramp_from(&c, &spec), s)?,
    };
    let mut extra = vec![("method", result.method.to_string())];
    extra.extend(spec_fields(&spec));
    Ok(render(result.value, a.model.common.verbose, &extra, &result.diagnostics))
}

fn run_gap(a: &ModelArgs) -> Result<String> {
    let c = model_config(a)?;
    let spec = model_spec(&c)?;
    let sol = solve(&spec, &c.settings)?;
    let e = &sol.spectrum.eigenvalues;
    let mut d = BTreeMap::new();
    d.insert("ground_energy".to_string(), e[0]);
    d.insert("dim".to_string(), e.len() as f64);
    if e.len() > 2 {
        d.insert("gap02".to_string(), e[2] - e[0]);
    }
    if let Some(n) = sol.n_max() {
        d.insert("n_max".to_string(), n as f64);
    }
    Ok(render(e[1] - e[0], a.common.verbose, &spec_fields(&spec), &d))
}

fn run_adiabatic(a: &AdiabaticArgs) -> Result<String> {
    let mut c = model_config(&a.model)?;
    apply_ramp(&mut c, &a.ramp)?;
    let spec = model_spec(&c)?;
    let ramp = ramp_from(&c, &spec);
    let r = qfi_adiabatic_generator(&spec, &ramp, &c.settings)?;
    let mut extra = vec![
        ("method", r.method.to_string()),
        ("schedule", ramp.schedule.to_string()),
        ("x_start", format_float(ramp.x_start)),
        ("x_end", format_float(ramp.x_end)),
    ];
    extra.extend(spec_fields(&spec));
    Ok(render(r.value, a.model.common.verbose, &extra, &r.diagnostics))
}

fn run_converge(a: &ConvergeArgs) -> Result<String> {
    let mut c = model_config(&a.model)?;
    if let Some(l) = &a.levels {
        c.set("converge_levels", l)?;
    }
    let spec = model_spec(&c)?;
    let report = convergence_report(&spec, &c.converge_levels, &c.settings)?;
    let mut out = report.to_table();
    if a.model.common.verbose {
        for (k, v) in spec_fields(&spec) {
            let _ = writeln!(out, "{k}={v}");
        }
        let at = report.converged_at().map(|n| n.to_string()).unwrap_or_default();
        let _ = writeln!(out, "converged_at={at}");
        let _ = writeln!(out, "tolerance={}", format_float(report.tolerance));
    }
    Ok(out)
}

fn run_sweep_cmd(a: &SweepArgs) -> Result<String> {
    let mut c = load_config(a.common.config.as_deref())?;
    let family = a
        .family
        .clone()
        .or_else(|| c.family.map(|f| f.to_string()))
        .ok_or_else(|| Error::InvalidInput("no sweep family given (--family)".into()))?;
    let kind: SweepKind = family.parse()?;
    if let Some(w) = a.omega {
        c.omega = w;
    }
    if let Some(j) = a.jobs {
        c.jobs = j;
    }
    let mut cfg = SweepConfig::new(kind);
    cfg.omega = c.omega;
    cfg.jobs = c.jobs;
    cfg.grid = match &a.grid {
        Some(g) => g.parse()?,
        None => c.sweep_grid(kind).clone(),
    };
    cfg.fd = a.fd.unwrap_or(c.sweep_fd(kind));
    cfg.columns = c.columns.clone();
    cfg.out = a.out.clone();
    cfg.size = match kind {
        SweepKind::Effective => a.n_max.or(c.n_max),
        _ => a.spins.or(c.spins).or(kind.default_size()),
    };
    cfg.settings = c.settings.clone();
    cfg.validate()?;
    let rows = run_sweep(&cfg)?;
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    match &cfg.out {
        Some(path) => {
            write_outputs(&cfg, &rows, path)?;
            let mut out = format!("rows={} failed={} out={}\n", rows.len(), failed, path.display());
            if a.common.verbose {
                let _ = writeln!(out, "sweep={kind}\ngrid={}\nfd={}", cfg.grid, cfg.fd);
            }
            Ok(out)
        }
        None => Ok(crate::sweep::to_csv(&rows, &cfg.columns)),
    }
}

/// Runs a parsed command and returns its stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Qfi(a) => run_qfi(a),
        Command::Gap(a) => run_gap(a),
        Command::Sweep(a) => run_sweep_cmd(a),
        Command::Adiabatic(a) => run_adiabatic(a),
        Command::Converge(a) => run_converge(a),
        Command::Version => Ok(format!("anticritical {}\n", env!("CARGO_PKG_VERSION"))),
        Command::Template => Ok(emit_config_template()),
    }
}

/// Parses `args` (including the program name) and runs them: stdout text on
/// success, exit code and message otherwise.
pub fn run_args<I, T>(args: I) -> std::result::Result<String, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        let code = if e.use_stderr() { 2 } else { 0 };
        (code, e.render().to_string())
    })?;
    run(&cli).map_err(|e| (exit_code(&e), format!("error: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(args: &[&str]) -> String {
        let mut v = vec!["anticritical"];
        v.extend_from_slice(args);
        run_args(v).unwrap()
    }

    fn code(args: &[&str]) -> i32 {
        let mut v = vec!["anticritical"];
        v.extend_from_slice(args);
        run_args(v).unwrap_err().0
    }

    #[test]
    fn analytic_value() {
        let out = ok(&["qfi", "--family", "effective_low", "--x", "0.25", "--method", "analytic"]);
        let v: f64 = out.trim().parse().unwrap();
        assert!((v - 1.0 / 72.0).abs() < 1e-15);
    }

    #[test]
    fn lmg_free_gap() {
        assert_eq!(ok(&["gap", "--family", "lmg", "--N", "200", "--g", "0"]), "1.0\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(code(&["qfi", "--family", "effective_low", "--x", "1.0", "--method", "analytic"]), 3);
        assert_eq!(code(&["qfi", "--family", "nope", "--x", "0.1"]), 2);
        assert_eq!(code(&["qfi", "--family", "lmg", "--bogus"]), 2);
        assert_eq!(code(&["frobnicate"]), 2);
        assert_eq!(code(&["qfi", "--family", "lmg", "--x", "0.1", "--g", "0.1"]), 2);
        assert_eq!(code(&["qfi", "--family", "lmg", "--method", "analytic", "--g", "0.1"]), 2);
    }

    #[test]
    fn negative_coupling_flag() {
        let a = ok(&["gap", "--family", "tfim", "--N", "6", "--g", "-0.5"]);
        let b = ok(&["gap", "--family", "tfim", "--N", "6", "--g", "0.5"]);
        let (a, b): (f64, f64) = (a.trim().parse().unwrap(), b.trim().parse().unwrap());
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn verbose_block() {
        let out = ok(&["qfi", "--family", "effective_high", "--x", "1", "--verbose"]);
        let mut lines = out.lines();
        let v: f64 = lines.next().unwrap().parse().unwrap();
        assert!((v - 0.03125).abs() < 1e-9);
        let keys: Vec<&str> = lines.map(|l| l.split_once('=').unwrap().0).collect();
        assert!(keys.contains(&"method") && keys.contains(&"gap01") && keys.contains(&"n_max"));
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        std::fs::write(&path, "family = lmg\ng = 0\nN = 20\nomega = 2\n").unwrap();
        let p = path.to_str().unwrap();
        assert_eq!(ok(&["gap", "--config", p]), "2.0\n");
        assert_eq!(ok(&["gap", "--config", p, "--omega", "3"]), "3.0\n");
        std::fs::write(&path, "colour = red\n").unwrap();
        assert_eq!(code(&["gap", "--config", p]), 2);
    }

    #[test]
    fn template_and_version() {
        assert_eq!(ok(&["template"]), emit_config_template());
        assert!(ok(&["version"]).starts_with("anticritical "));
    }
}

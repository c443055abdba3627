//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; unknown or repeated keys are errors. Keys with no default
//! appear commented out in the template.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::Family;
use crate::qfi::{Method, Schedule};
use crate::settings::Settings;
use crate::sweep::{format_float, Grid, SweepKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub settings: Settings,
    pub family: Option<Family>,
    pub omega: f64,
    pub big_omega: Option<f64>,
    pub g: Option<f64>,
    pub x: Option<f64>,
    pub spins: Option<usize>,
    pub n_max: Option<usize>,
    pub method: Method,
    pub jobs: usize,
    pub grid_effective: Grid,
    pub grid_lmg: Grid,
    pub grid_chain: Grid,
    pub fd_effective: bool,
    pub fd_lmg: bool,
    pub fd_chain: bool,
    pub columns: Vec<String>,
    pub ramp_x_start: f64,
    pub ramp_time: f64,
    pub ramp_steps: usize,
    pub ramp_schedule: Schedule,
    pub imprint_time: f64,
    pub converge_levels: Vec<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            settings: Settings::default(),
            family: None,
            omega: 1.0,
            big_omega: None,
            g: None,
            x: None,
            spins: None,
            n_max: None,
            method: Method::SpectralSum,
            jobs: 0,
            grid_effective: SweepKind::Effective.default_grid(),
            grid_lmg: SweepKind::Lmg.default_grid(),
            grid_chain: SweepKind::Tfim.default_grid(),
            fd_effective: SweepKind::Effective.default_fd(),
            fd_lmg: SweepKind::Lmg.default_fd(),
            fd_chain: SweepKind::Tfim.default_fd(),
            columns: Vec::new(),
            ramp_x_start: 0.0,
            ramp_time: 10.0,
            ramp_steps: 801,
            ramp_schedule: Schedule::Linear,
            imprint_time: 1.0,
            converge_levels: vec![50, 100, 200, 400, 800],
        }
    }
}

/// Key, help line. Order is the template order.
const KEYS: &[(&str, &str)] = &[
    ("family", "rabi_full | effective_low | effective_high | lmg | tfim | tfim_transverse"),
    ("omega", "oscillator / field frequency, the unit of energy"),
    ("Omega", "qubit splitting for bosonic families (default 1000 * omega)"),
    ("g", "coupling in energy units"),
    ("x", "g^2 / g_c^2 (used when g is not set)"),
    ("N", "spin count (lmg default 200, chains default 10)"),
    ("n_max", "fixed Fock cutoff (default: automatic)"),
    ("method", "analytic | spectral_sum | state_fd | adiabatic_generator | phase_imprint"),
    ("jobs", "sweep worker threads, 0 = all available"),
    ("grid_effective", "signed x grid for effective sweeps, start:stop:count or a,b,c"),
    ("grid_lmg", "g/g_c grid for lmg sweeps"),
    ("grid_chain", "signed g/g_c grid for chain sweeps"),
    ("fd_effective", "finite-difference QFI column in effective sweeps"),
    ("fd_lmg", "finite-difference QFI column in lmg sweeps"),
    ("fd_chain", "finite-difference QFI column in chain sweeps"),
    ("columns", "comma-separated CSV columns, empty = all"),
    ("ramp_x_start", "ramp start (ramp ends at x)"),
    ("ramp_time", "ramp duration T in units of 1/omega"),
    ("ramp_steps", "time nodes along the ramp"),
    ("ramp_schedule", "linear | constant"),
    ("imprint_time", "phase-imprint time t"),
    ("converge_levels", "comma-separated Fock cutoffs for convergence reports"),
    ("hermiticity_tol", "relative Hermiticity tolerance"),
    ("max_dim", "largest matrix dimension accepted by the eigensolver"),
    ("cluster_tol", "eigenvalues closer than this form a degenerate cluster"),
    ("degeneracy_tol", "minimum ground-state gap for QFI estimators"),
    ("truncation_tol", "maximum population of the top two Fock levels"),
    ("n_max_default", "starting Fock cutoff"),
    ("n_max_limit", "automatic cutoff escalation stops here"),
    ("fd_step_rel", "finite-difference step relative to omega"),
    ("richardson_tol", "tolerated relative change when the step is halved"),
    ("ramp_convergence_tol", "tolerated relative change when ramp steps are halved"),
    ("ramp_gap_tol", "minimum instantaneous gap along a ramp"),
    ("berry_tol", "largest tolerated Berry connection"),
    ("critical_margin", "low sector requires x < 1 - critical_margin"),
    ("reference_big_omega_ratio", "Omega / omega for effective models"),
];

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| Error::InvalidInput(format!("config key '{key}': cannot parse '{v}'")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = parse_num(key, v)?;
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("config key '{key}': value must be finite")));
    }
    Ok(x)
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::InvalidInput(format!("config key '{key}': expected true or false, got '{v}'"))),
    }
}

fn optional<T>(v: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
    if v.is_empty() {
        Ok(None)
    } else {
        f(v).map(Some)
    }
}

fn list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

impl Config {
    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let v = v.trim();
        let s = &mut self.settings;
        match key {
            "family" => self.family = optional(v, |v| v.parse())?,
            "omega" => self.omega = parse_f64(key, v)?,
            "Omega" => self.big_omega = optional(v, |v| parse_f64(key, v))?,
            "g" => self.g = optional(v, |v| parse_f64(key, v))?,
            "x" => self.x = optional(v, |v| parse_f64(key, v))?,
            "N" => self.spins = optional(v, |v| parse_num(key, v))?,
            "n_max" => self.n_max = optional(v, |v| parse_num(key, v))?,
            "method" => self.method = v.parse()?,
            "jobs" => self.jobs = parse_num(key, v)?,
            "grid_effective" => self.grid_effective = v.parse()?,
            "grid_lmg" => self.grid_lmg = v.parse()?,
            "grid_chain" => self.grid_chain = v.parse()?,
            "fd_effective" => self.fd_effective = parse_bool(key, v)?,
            "fd_lmg" => self.fd_lmg = parse_bool(key, v)?,
            "fd_chain" => self.fd_chain = parse_bool(key, v)?,
            "columns" => self.columns = list(v).into_iter().map(String::from).collect(),
            "ramp_x_start" => self.ramp_x_start = parse_f64(key, v)?,
            "ramp_time" => self.ramp_time = parse_f64(key, v)?,
            "ramp_steps" => self.ramp_steps = parse_num(key, v)?,
            "ramp_schedule" => self.ramp_schedule = v.parse()?,
            "imprint_time" => self.imprint_time = parse_f64(key, v)?,
            "converge_levels" => {
                self.converge_levels = list(v)
                    .into_iter()
                    .map(|t| parse_num(key, t))
                    .collect::<Result<_>>()?
            }
            "hermiticity_tol" => s.hermiticity_tol = parse_f64(key, v)?,
            "max_dim" => s.max_dim = parse_num(key, v)?,
            "cluster_tol" => s.cluster_tol = parse_f64(key, v)?,
            "degeneracy_tol" => s.degeneracy_tol = parse_f64(key, v)?,
            "truncation_tol" => s.truncation_tol = parse_f64(key, v)?,
            "n_max_default" => s.n_max_default = parse_num(key, v)?,
            "n_max_limit" => s.n_max_limit = parse_num(key, v)?,
            "fd_step_rel" => s.fd_step_rel = parse_f64(key, v)?,
            "richardson_tol" => s.richardson_tol = parse_f64(key, v)?,
            "ramp_convergence_tol" => s.ramp_convergence_tol = parse_f64(key, v)?,
            "ramp_gap_tol" => s.ramp_gap_tol = parse_f64(key, v)?,
            "berry_tol" => s.berry_tol = parse_f64(key, v)?,
            "critical_margin" => s.critical_margin = parse_f64(key, v)?,
            "reference_big_omega_ratio" => s.reference_big_omega_ratio = parse_f64(key, v)?,
            _ => return Err(Error::InvalidInput(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Text value of `key`, `None` when unset.
    pub fn get(&self, key: &str) -> Option<String> {
        let s = &self.settings;
        let f = |v: f64| Some(format_float(v));
        let join = |v: Vec<String>| Some(v.join(","));
        match key {
            "family" => self.family.map(|f| f.to_string()),
            "omega" => f(self.omega),
            "Omega" => self.big_omega.and_then(f),
            "g" => self.g.and_then(f),
            "x" => self.x.and_then(f),
            "N" => self.spins.map(|n| n.to_string()),
            "n_max" => self.n_max.map(|n| n.to_string()),
            "method" => Some(self.method.to_string()),
            "jobs" => Some(self.jobs.to_string()),
            "grid_effective" => Some(self.grid_effective.to_string()),
            "grid_lmg" => Some(self.grid_lmg.to_string()),
            "grid_chain" => Some(self.grid_chain.to_string()),
            "fd_effective" => Some(self.fd_effective.to_string()),
            "fd_lmg" => Some(self.fd_lmg.to_string()),
            "fd_chain" => Some(self.fd_chain.to_string()),
            "columns" => join(self.columns.clone()),
            "ramp_x_start" => f(self.ramp_x_start),
            "ramp_time" => f(self.ramp_time),
            "ramp_steps" => Some(self.ramp_steps.to_string()),
            "ramp_schedule" => Some(self.ramp_schedule.to_string()),
            "imprint_time" => f(self.imprint_time),
            "converge_levels" => join(self.converge_levels.iter().map(|n| n.to_string()).collect()),
            "hermiticity_tol" => f(s.hermiticity_tol),
            "max_dim" => Some(s.max_dim.to_string()),
            "cluster_tol" => f(s.cluster_tol),
            "degeneracy_tol" => f(s.degeneracy_tol),
            "truncation_tol" => f(s.truncation_tol),
            "n_max_default" => Some(s.n_max_default.to_string()),
            "n_max_limit" => Some(s.n_max_limit.to_string()),
            "fd_step_rel" => f(s.fd_step_rel),
            "richardson_tol" => f(s.richardson_tol),
            "ramp_convergence_tol" => f(s.ramp_convergence_tol),
            "ramp_gap_tol" => f(s.ramp_gap_tol),
            "berry_tol" => f(s.berry_tol),
            "critical_margin" => f(s.critical_margin),
            "reference_big_omega_ratio" => f(s.reference_big_omega_ratio),
            _ => None,
        }
    }

    /// Applies the lines of `text` on top of `self`.
    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("config line {}: expected key = value", i + 1))
            })?;
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::InvalidInput(format!("config line {}: repeated key '{key}'", i + 1)));
            }
            self.set(key, value).map_err(|e| match e {
                Error::InvalidInput(m) => Error::InvalidInput(format!("config line {}: {m}", i + 1)),
                other => other,
            })?;
            seen.push(key.to_string());
        }
        Ok(())
    }

    /// Renders every key, commenting out unset ones.
    pub fn emit(&self) -> String {
        let mut out = String::from("# anticritical configuration (key = value)\n");
        for (key, help) in KEYS {
            let _ = writeln!(out, "\n# {help}");
            match self.get(key) {
                Some(v) => {
                    let _ = writeln!(out, "{key} = {v}");
                }
                None => {
                    let _ = writeln!(out, "# {key} =");
                }
            }
        }
        out
    }

    pub fn sweep_grid(&self, kind: SweepKind) -> &Grid {
        match kind {
            SweepKind::Effective => &self.grid_effective,
            SweepKind::Lmg => &self.grid_lmg,
            SweepKind::Tfim | SweepKind::TfimTransverse => &self.grid_chain,
        }
    }

    pub fn sweep_fd(&self, kind: SweepKind) -> bool {
        match kind {
            SweepKind::Effective => self.fd_effective,
            SweepKind::Lmg => self.fd_lmg,
            SweepKind::Tfim | SweepKind::TfimTransverse => self.fd_chain,
        }
    }
}

/// Parses a config file on top of the defaults.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut c = Config::default();
    c.merge_str(text)?;
    Ok(c)
}

/// Commented template listing every default.
pub fn emit_config_template() -> String {
    Config::default().emit()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_round_trip() {
        let t = emit_config_template();
        assert_eq!(parse_config(&t).unwrap(), Config::default());
        assert_eq!(parse_config(&t).unwrap().emit(), t);
    }

    #[test]
    fn every_key_round_trips() {
        let mut c = Config::default();
        c.merge_str(
            "family = tfim\nOmega = 50\ng = 0.5\nx = 0.25\nN = 12\nn_max = 64\ncolumns = gap01, x\n\
             converge_levels = 10,20\nramp_schedule = constant\nmethod = fd\nberry_tol = 1e-9",
        )
        .unwrap();
        for (key, _) in KEYS {
            if let Some(v) = c.get(key) {
                let mut d = Config::default();
                d.set(key, &v).unwrap();
                assert_eq!(d.get(key), Some(v), "{key}");
            }
        }
        assert_eq!(parse_config(&c.emit()).unwrap(), c);
        assert_eq!(c.settings.berry_tol, 1e-9);
        assert_eq!(c.columns, vec!["gap01", "x"]);
        assert_eq!(c.method, Method::StateFd);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "bogus = 1",
            "omega",
            "omega = abc",
            "omega = 1\nomega = 2",
            "fd_lmg = yes",
            "grid_lmg = 0:1:1",
            "omega = inf",
            "family = dicke",
        ] {
            assert!(matches!(parse_config(bad), Err(Error::InvalidInput(_))), "{bad}");
        }
    }

    #[test]
    fn comments_and_blank_values() {
        let c = parse_config("# note\n\n  g =  \nx = 0.5 \n").unwrap();
        assert_eq!(c.g, None);
        assert_eq!(c.x, Some(0.5));
    }
}

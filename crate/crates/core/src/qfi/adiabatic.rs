//! QFI of an adiabatic ramp from the variance of its omega generator.
//!
//! Within the adiabatic approximation
//! `Var(G) = sum_{n>0} |int_0^T exp(i[theta_0 - theta_n]) <0(t)|dH|n(t)> dt|^2`,
//! with `theta_n` the accumulated dynamical phase. All model matrices are real
//! symmetric, so instantaneous eigenvectors are taken real and sign-aligned
//! along the path, which makes the Berry term vanish; that is checked, not
//! assumed.

use serde::Serialize;

use super::{Method, QfiResult};
use crate::error::{Error, Result};
use crate::models::{solve, ModelSpec};
use crate::settings::Settings;
use crate::spectral::{overlap_unchecked, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Linear,
    Constant,
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Schedule::Linear),
            "constant" => Ok(Schedule::Constant),
            _ => Err(Error::InvalidInput(format!("unknown schedule '{s}'"))),
        }
    }
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Schedule::Linear => "linear",
            Schedule::Constant => "constant",
        })
    }
}

/// Ramp of `x = g^2/g_c^2` over total time `total_time` (units of 1/omega),
/// sampled at `steps` equally spaced nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RampSpec {
    pub x_start: f64,
    pub x_end: f64,
    pub total_time: f64,
    pub steps: usize,
    pub schedule: Schedule,
}

impl RampSpec {
    pub fn constant(x: f64, total_time: f64, steps: usize) -> Self {
        RampSpec {
            x_start: x,
            x_end: x,
            total_time,
            steps,
            schedule: Schedule::Constant,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 10 {
            return Err(Error::InvalidInput(format!("ramp needs >= 10 steps, got {}", self.steps)));
        }
        if !(self.total_time >= 0.0) || !self.total_time.is_finite() {
            return Err(Error::InvalidInput(format!(
                "ramp time must be >= 0, got {}",
                self.total_time
            )));
        }
        if !(self.x_start >= 0.0 && self.x_end >= 0.0) {
            return Err(Error::InvalidInput("ramp endpoints must be >= 0".into()));
        }
        if self.schedule == Schedule::Constant && self.x_start != self.x_end {
            return Err(Error::InvalidInput(
                "constant schedule requires x_start == x_end".into(),
            ));
        }
        Ok(())
    }

    pub fn x_at(&self, t: f64) -> f64 {
        match self.schedule {
            Schedule::Constant => self.x_start,
            Schedule::Linear if self.total_time > 0.0 => {
                self.x_start + (self.x_end - self.x_start) * t / self.total_time
            }
            Schedule::Linear => self.x_start,
        }
    }

    fn node(&self, k: usize) -> f64 {
        self.total_time * k as f64 / (self.steps - 1) as f64
    }
}

/// Spec of `template`'s family at ramp coordinate `x`. Spin families use
/// `g = g_c sqrt(x)`.
fn spec_at(template: &ModelSpec, x: f64, settings: &Settings) -> Result<ModelSpec> {
    let coupling = if template.family.is_bosonic() { x } else { x.sqrt() };
    let mut spec = ModelSpec::from_coupling(
        template.family,
        template.omega,
        template.big_omega,
        coupling,
        template.size,
        settings,
    )?;
    if template.family.is_bosonic() {
        spec.size = template.size;
    }
    Ok(spec)
}

/// `<0|dH|n>` and energies at one node, with eigenvectors aligned to the
/// previous node.
struct Node {
    energies: Vec<f64>,
    couplings: Vec<C64>,
}

/// `4 Var(G)` for the ramp, using the family, omega, Omega and size of
/// `template` (its coupling is replaced by the ramp).
pub fn qfi_adiabatic_generator(template: &ModelSpec, ramp: &RampSpec, settings: &Settings) -> Result<QfiResult> {
    ramp.validate()?;
    if ramp.total_time == 0.0 {
        return Ok(QfiResult::new(0.0, Method::AdiabaticGenerator).with("T", 0.0));
    }

    // Fix one Fock cutoff for the whole path: the larger of the two endpoint
    // requirements.
    let mut template = *template;
    if template.family.is_bosonic() && template.size.is_none() {
        let a = solve(&spec_at(&template, ramp.x_start, settings)?, settings)?;
        let b = solve(&spec_at(&template, ramp.x_end, settings)?, settings)?;
        template.size = a.n_max().max(b.n_max());
    }

    let mut nodes: Vec<Node> = Vec::with_capacity(ramp.steps);
    let mut previous: Option<Vec<ndarray::Array1<C64>>> = None;
    let mut berry_imag: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    let mut min_alignment: f64 = 1.0;
    let dt = ramp.total_time / (ramp.steps - 1) as f64;

    let constant = ramp.schedule == Schedule::Constant;
    for k in 0..ramp.steps {
        if constant && k > 0 {
            let first = &nodes[0];
            nodes.push(Node {
                energies: first.energies.clone(),
                couplings: first.couplings.clone(),
            });
            continue;
        }
        let sol = solve(&spec_at(&template, ramp.x_at(ramp.node(k)), settings)?, settings)?;
        let e = &sol.spectrum.eigenvalues;
        let gap = e[1] - e[0];
        if !(gap > settings.ramp_gap_tol) {
            return Err(Error::GapGuard {
                gap,
                tolerance: settings.ramp_gap_tol,
            });
        }
        min_gap = min_gap.min(gap);

        let mut vectors: Vec<ndarray::Array1<C64>> = sol
            .spectrum
            .eigenvectors
            .iter()
            .map(|v| v.amplitudes().clone())
            .collect();
        if let Some(prev) = &previous {
            for (v, p) in vectors.iter_mut().zip(prev) {
                let ov = overlap_unchecked(p, v);
                let mag = ov.norm();
                berry_imag = berry_imag.max(ov.im.abs() / dt);
                min_alignment = min_alignment.min(mag);
                if mag > 0.0 {
                    let rot = ov.conj() / mag;
                    v.mapv_inplace(|z| z * rot);
                }
            }
        }
        let dh_ground = sol.model.d_omega.apply(vectors[0].view());
        // <0|dH|n> = conj(<n|dH|0>)
        let couplings = vectors
            .iter()
            .map(|v| overlap_unchecked(v, &dh_ground).conj())
            .collect();
        nodes.push(Node {
            energies: e.clone(),
            couplings,
        });
        previous = Some(vectors);
    }

    if berry_imag > settings.berry_tol {
        return Err(Error::GaugeGuard(berry_imag));
    }

    let all: Vec<usize> = (0..ramp.steps).collect();
    let mut half: Vec<usize> = (0..ramp.steps).step_by(2).collect();
    if *half.last().unwrap() != ramp.steps - 1 {
        half.push(ramp.steps - 1);
    }
    let fine = generator_variance(ramp, &nodes, &all);
    let coarse = generator_variance(ramp, &nodes, &half);

    // Largest value the integrals could reach, used as a floor when the
    // result itself is (close to) zero.
    let dim = nodes[0].energies.len();
    let mut scale = 0.0;
    for n in 1..dim {
        let bound = trapezoid(ramp, &all, |k| C64::new(nodes[k].couplings[n].norm(), 0.0)).re;
        scale += 4.0 * bound * bound;
    }
    let value = 4.0 * fine;
    let coarse_value = 4.0 * coarse;
    let denom = value.max(1e-6 * scale).max(f64::MIN_POSITIVE);
    let relative = (value - coarse_value).abs() / denom;
    if relative > settings.ramp_convergence_tol {
        return Err(Error::ConvergenceGuard(format!(
            "halving the ramp steps moved the QFI from {value} to {coarse_value} (relative {relative:e})"
        )));
    }

    Ok(QfiResult::new(value, Method::AdiabaticGenerator)
        .with("T", ramp.total_time)
        .with("steps", ramp.steps as f64)
        .with("half_steps_value", coarse_value)
        .with("step_halving_relative_change", relative)
        .with("min_gap", min_gap)
        .with("berry_imag_max", berry_imag)
        .with("min_alignment_overlap", min_alignment)
        .with("upper_scale", scale)
        .with("n_max", template.size.filter(|_| template.family.is_bosonic()).unwrap_or(0) as f64))
}

/// Composite trapezoid over the nodes listed in `idx`.
fn trapezoid(ramp: &RampSpec, idx: &[usize], f: impl Fn(usize) -> C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for w in idx.windows(2) {
        let h = ramp.node(w[1]) - ramp.node(w[0]);
        acc += (f(w[0]) + f(w[1])) * (0.5 * h);
    }
    acc
}

/// `sum_{n>0} |int exp(i[theta_0 - theta_n]) <0|dH|n> dt|^2` on a node subset.
fn generator_variance(ramp: &RampSpec, nodes: &[Node], idx: &[usize]) -> f64 {
    let dim = nodes[0].energies.len();
    // Accumulated dynamical phases theta_n at each listed node.
    let mut theta = vec![vec![0.0; dim]; idx.len()];
    for j in 1..idx.len() {
        let h = ramp.node(idx[j]) - ramp.node(idx[j - 1]);
        for n in 0..dim {
            theta[j][n] = theta[j - 1][n]
                + 0.5 * h * (nodes[idx[j - 1]].energies[n] + nodes[idx[j]].energies[n]);
        }
    }
    let mut total = 0.0;
    for n in 1..dim {
        let mut acc = C64::new(0.0, 0.0);
        for j in 1..idx.len() {
            let h = ramp.node(idx[j]) - ramp.node(idx[j - 1]);
            let f = |jj: usize| {
                let phase = theta[jj][0] - theta[jj][n];
                C64::from_polar(1.0, phase) * nodes[idx[jj]].couplings[n]
            };
            acc += (f(j - 1) + f(j)) * (0.5 * h);
        }
        total += acc.norm_sqr();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Sector;

    fn st() -> Settings {
        Settings::default()
    }

    /// Closed form for a time-independent Hamiltonian:
    /// `4 sum_n |M_n|^2 2(1 - cos(dE_n T)) / dE_n^2`.
    fn constant_oracle(spec: &ModelSpec, t: f64) -> f64 {
        let sol = solve(spec, &st()).unwrap();
        let g = sol.spectrum.ground_state().amplitudes().clone();
        let dg = sol.model.d_omega.apply(g.view());
        let mut acc = 0.0;
        for n in 1..sol.spectrum.dim() {
            let m = overlap_unchecked(sol.spectrum.eigenvectors[n].amplitudes(), &dg);
            let de = sol.spectrum.eigenvalues[n] - sol.spectrum.eigenvalues[0];
            acc += 4.0 * m.norm_sqr() * 2.0 * (1.0 - (de * t).cos()) / (de * de);
        }
        acc
    }

    #[test]
    fn zero_time_is_zero() {
        let spec = ModelSpec::effective(Sector::Low, 1.0, 0.25, &st()).unwrap();
        let r = qfi_adiabatic_generator(&spec, &RampSpec::constant(0.25, 0.0, 10), &st()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn constant_ramp_matches_closed_form() {
        let spec = ModelSpec::effective(Sector::Low, 1.0, 0.25, &st()).unwrap();
        for t in [0.7, 2.3] {
            let r = qfi_adiabatic_generator(&spec, &RampSpec::constant(0.25, t, 801), &st()).unwrap();
            let oracle = constant_oracle(&spec, t);
            assert!((r.value - oracle).abs() < 1e-4 * oracle, "T={t}: {} vs {oracle}", r.value);
        }
    }

    #[test]
    fn full_period_vanishes() {
        let spec = ModelSpec::effective(Sector::Low, 1.0, 0.25, &st()).unwrap();
        let sol = solve(&spec, &st()).unwrap();
        let de = sol.spectrum.eigenvalues[2] - sol.spectrum.eigenvalues[0];
        let t = 2.0 * std::f64::consts::PI / de;
        let r = qfi_adiabatic_generator(&spec, &RampSpec::constant(0.25, t, 401), &st()).unwrap();
        assert!(r.value.abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn linear_ramp_is_real_gauge_and_converges() {
        let spec = ModelSpec::lmg(1.0, 0.0, 20).unwrap();
        let ramp = RampSpec {
            x_start: 0.0,
            x_end: 0.25,
            total_time: 5.0,
            steps: 801,
            schedule: Schedule::Linear,
        };
        let r = qfi_adiabatic_generator(&spec, &ramp, &st()).unwrap();
        assert!(r.value > 0.0);
        assert_eq!(r.diagnostics["berry_imag_max"], 0.0);
        assert!(r.diagnostics["step_halving_relative_change"] < 1e-3);
    }

    #[test]
    fn ramp_validation() {
        let bad = RampSpec {
            x_start: 0.1,
            x_end: 0.2,
            total_time: 1.0,
            steps: 20,
            schedule: Schedule::Constant,
        };
        assert!(bad.validate().is_err());
        assert!(RampSpec::constant(0.1, 1.0, 9).validate().is_err());
        assert!(RampSpec::constant(0.1, -1.0, 20).validate().is_err());
    }
}

//! Quantum Fisher information with respect to omega.
//!
//! Four numerical routes are kept independent of each other:
//!
//! * [`qfi_spectral_sum`]: `4 sum_{n>0} |<n|dH|0>|^2 / (E_n - E_0)^2` from one
//!   diagonalization;
//! * [`qfi_state_fd`]: the pure-state formula with `d|psi>/domega` from
//!   central differences of gauge-fixed ground states;
//! * [`qfi_phase_imprint`]: `4 t^2 Var(n)` for free evolution under `omega n`;
//! * [`adiabatic::qfi_adiabatic_generator`]: variance of the generator of an
//!   adiabatic ramp.
//!
//! [`qfi_analytic_squeezed`] and [`qfi_oscillator_evolution`] are the closed
//! forms for the effective oscillator.

pub mod adiabatic;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::Array1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::Sector;
use crate::models::{frequency_derivative_factor, solve, ModelSpec, Solution};
use crate::settings::Settings;
use crate::spectral::{overlap_unchecked, variance, HermitianOperator, QuantumState, C64};

pub use adiabatic::{qfi_adiabatic_generator, RampSpec, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    SpectralSum,
    StateFd,
    AdiabaticGenerator,
    PhaseImprint,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Analytic,
        Method::SpectralSum,
        Method::StateFd,
        Method::AdiabaticGenerator,
        Method::PhaseImprint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::SpectralSum => "spectral_sum",
            Method::StateFd => "state_fd",
            Method::AdiabaticGenerator => "adiabatic_generator",
            Method::PhaseImprint => "phase_imprint",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => return Ok(Method::SpectralSum),
            "fd" => return Ok(Method::StateFd),
            "adiabatic" => return Ok(Method::AdiabaticGenerator),
            "imprint" => return Ok(Method::PhaseImprint),
            _ => {}
        }
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown QFI method '{s}'")))
    }
}

/// A QFI value with the method that produced it and every tolerance or
/// intermediate quantity worth reporting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QfiResult {
    pub value: f64,
    pub method: Method,
    pub diagnostics: BTreeMap<String, f64>,
}

impl QfiResult {
    fn new(value: f64, method: Method) -> Self {
        QfiResult {
            value,
            method,
            diagnostics: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }
}

/// `d xi / d omega` at fixed `(g, Omega)`, where `x = g^2/(omega Omega)`.
pub fn squeezing_derivative(sector: Sector, omega: f64, x: f64) -> Result<f64> {
    sector.check(x)?;
    Ok(sector.coupling_sign() * 0.25 * (x / omega) / sector.stiffness(x))
}

/// `x^2 / (8 omega^2 (1 -+ x)^2)`, cross-checked against `2 (d xi/d omega)^2`.
pub fn qfi_analytic_squeezed(sector: Sector, omega: f64, x: f64) -> Result<QfiResult> {
    sector.check(x)?;
    if !(omega > 0.0) {
        return Err(Error::InvalidInput(format!("omega must be > 0, got {omega}")));
    }
    let s = sector.stiffness(x);
    let value = x * x / (8.0 * omega * omega * s * s);
    let dxi = squeezing_derivative(sector, omega, x)?;
    let via_xi = 2.0 * dxi * dxi;
    let residual = (value - via_xi).abs();
    debug_assert!(residual <= 1e-12 * value.max(f64::MIN_POSITIVE));
    Ok(QfiResult::new(value, Method::Analytic)
        .with("x", x)
        .with("identity_residual", residual))
}

/// Per-level contributions `4 |<n|dH|0>|^2 / (E_n - E_0)^2`, index 0 unused.
fn spectral_terms(sol: &Solution) -> Vec<f64> {
    let spec = &sol.spectrum;
    let ground = spec.ground_state().amplitudes();
    let dh_ground = sol.model.d_omega.apply(ground.view());
    let e0 = spec.ground_energy();
    let mut terms = vec![0.0; spec.dim()];
    for n in 1..spec.dim() {
        let m = overlap_unchecked(spec.eigenvectors[n].amplitudes(), &dh_ground);
        let de = spec.eigenvalues[n] - e0;
        terms[n] = 4.0 * m.norm_sqr() / (de * de);
    }
    terms
}

fn ground_gap(sol: &Solution, settings: &Settings) -> Result<f64> {
    let e = &sol.spectrum.eigenvalues;
    if e.len() < 2 {
        return Err(Error::DimensionGuard("QFI needs dimension >= 2".into()));
    }
    let gap = e[1] - e[0];
    if !(gap > settings.degeneracy_tol) {
        return Err(Error::DegeneracyGuard {
            gap,
            tolerance: settings.degeneracy_tol,
        });
    }
    Ok(gap)
}

/// Ground-state QFI as a sum over excited states of a solved model.
pub fn qfi_spectral_sum(sol: &Solution, settings: &Settings) -> Result<QfiResult> {
    let gap = ground_gap(sol, settings)?;
    let terms = spectral_terms(sol);
    let value: f64 = terms.iter().sum();
    let (dominant, largest) = terms
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (i, &t)| if t > best.1 { (i, t) } else { best });
    let retained = terms.iter().filter(|&&t| t > 1e-16 * value).count();
    let mut out = QfiResult::new(value, Method::SpectralSum)
        .with("gap01", gap)
        .with("terms_retained", retained as f64)
        .with("dominant_level", dominant as f64)
        .with("dominant_fraction", if value > 0.0 { largest / value } else { 0.0 })
        .with("dim", sol.spectrum.dim() as f64);
    if let Some(n_max) = sol.n_max() {
        out = out.with("n_max", n_max as f64);
    }
    Ok(out)
}

/// Lower and upper bounds bracketing the spectral-sum QFI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QfiBounds {
    /// `4 |<1|dH|0>|^2 / delta^2`.
    pub lower: f64,
    pub value: f64,
    /// `4 Var(dH) / delta^2`.
    pub upper: f64,
    pub gap: f64,
}

pub fn qfi_sandwich(sol: &Solution, settings: &Settings) -> Result<QfiBounds> {
    let gap = ground_gap(sol, settings)?;
    let terms = spectral_terms(sol);
    let value: f64 = terms.iter().sum();
    let var = variance(&sol.model.d_omega, sol.spectrum.ground_state())?;
    Ok(QfiBounds {
        lower: terms[1],
        value,
        upper: 4.0 * var / (gap * gap),
        gap,
    })
}

/// Pure-state QFI `4(<dpsi|dpsi> - |<dpsi|psi>|^2)` with
/// `dpsi = (psi_+ - psi_-) / (2 step)`, after rotating `psi_+-` so that their
/// overlap with `psi` is real and positive.
pub fn fd_qfi_from_states(
    minus: &QuantumState,
    center: &QuantumState,
    plus: &QuantumState,
    step: f64,
) -> Result<f64> {
    if minus.basis() != center.basis() || plus.basis() != center.basis() {
        return Err(Error::BasisGuard {
            left: center.basis().to_string(),
            right: format!("{} / {}", minus.basis(), plus.basis()),
        });
    }
    let c = center.amplitudes();
    let gauge = |s: &QuantumState| -> Array1<C64> {
        let ov = overlap_unchecked(c, s.amplitudes());
        let rot = if ov.norm() > 0.0 { ov.conj() / ov.norm() } else { C64::new(1.0, 0.0) };
        s.amplitudes().mapv(|z| z * rot)
    };
    let p = gauge(plus);
    let m = gauge(minus);
    let d = (p - m).mapv(|z| z / (2.0 * step));
    let dd: f64 = d.iter().map(|z| z.norm_sqr()).sum();
    let dp = overlap_unchecked(&d, c);
    Ok((4.0 * (dd - dp.norm_sqr())).max(0.0))
}

/// Finite-difference ground-state QFI. `d_omega` is the absolute step; the
/// result is compared against the same estimate with half the step.
pub fn qfi_state_fd(spec: &ModelSpec, d_omega: f64, settings: &Settings) -> Result<QfiResult> {
    if !(d_omega > 0.0) || d_omega >= spec.omega {
        return Err(Error::InvalidInput(format!(
            "finite-difference step must be in (0, omega), got {d_omega}"
        )));
    }
    let center = solve(spec, settings)?;
    ground_gap(&center, settings)?;
    // Neighbours share the center's cutoff so all states live in one basis.
    let fixed = center.model.spec;
    let ground_at = |omega: f64| -> Result<QuantumState> {
        let sol = solve(&fixed.with_omega(omega), settings)?;
        ground_gap(&sol, settings)?;
        Ok(sol.spectrum.ground_state().clone())
    };
    let psi = center.spectrum.ground_state();
    let estimate = |h: f64| -> Result<f64> {
        let plus = ground_at(spec.omega + h)?;
        let minus = ground_at(spec.omega - h)?;
        fd_qfi_from_states(&minus, psi, &plus, h)
    };
    let coarse = estimate(d_omega)?;
    let fine = estimate(0.5 * d_omega)?;
    let relative = (coarse - fine).abs() / coarse.abs().max(1e-10);
    if relative > settings.richardson_tol {
        return Err(Error::StepGuard {
            coarse,
            fine,
            relative,
        });
    }
    let mut out = QfiResult::new(coarse, Method::StateFd)
        .with("fd_step", d_omega)
        .with("half_step_value", fine)
        .with("richardson_relative_change", relative)
        .with("richardson_tol", settings.richardson_tol);
    if let Some(n_max) = center.n_max() {
        out = out.with("n_max", n_max as f64);
    }
    Ok(out)
}

/// Default step `fd_step_rel * omega`.
pub fn qfi_state_fd_default(spec: &ModelSpec, settings: &Settings) -> Result<QfiResult> {
    qfi_state_fd(spec, settings.fd_step_rel * spec.omega, settings)
}

/// `4 t^2 Var(n_op)` for a phase `exp(-i omega t n_op)` imprinted on `state`.
pub fn qfi_phase_imprint(state: &QuantumState, n_op: &HermitianOperator, t: f64) -> Result<QfiResult> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("evolution time must be >= 0, got {t}")));
    }
    let var = variance(n_op, state)?;
    Ok(QfiResult::new(4.0 * t * t * var, Method::PhaseImprint)
        .with("t", t)
        .with("variance", var))
}

/// `4 t^2 Var(c^dag c) (d/domega effective frequency)^2`.
pub fn qfi_oscillator_evolution(var_c: f64, t: f64, sector: Sector, omega: f64, x: f64) -> Result<QfiResult> {
    if !(var_c >= 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "variance and time must be >= 0, got {var_c}, {t}"
        )));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidInput(format!("omega must be > 0, got {omega}")));
    }
    let factor = frequency_derivative_factor(sector, x)?;
    Ok(QfiResult::new(4.0 * t * t * var_c * factor, Method::Analytic)
        .with("derivative_factor", factor)
        .with("t", t))
}

/// `(qfi * gap, qfi * gap^2)`.
pub fn normalized_metrics(qfi: f64, gap: f64) -> Result<(f64, f64)> {
    if !(gap > 0.0) || !gap.is_finite() {
        return Err(Error::GapGuard { gap, tolerance: 0.0 });
    }
    Ok((qfi * gap, qfi * gap * gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number_operator, squeeze_vacuum, FockSpace};
    use crate::models::Family;

    fn st() -> Settings {
        Settings::default()
    }

    #[test]
    fn analytic_values() {
        assert_eq!(qfi_analytic_squeezed(Sector::Low, 1.0, 0.0).unwrap().value, 0.0);
        let low = qfi_analytic_squeezed(Sector::Low, 1.0, 0.25).unwrap();
        assert!((low.value - 0.0625 / 4.5).abs() < 1e-15);
        assert!((low.value - 0.013_888_9).abs() < 1e-7);
        let high = qfi_analytic_squeezed(Sector::High, 1.0, 1.0).unwrap();
        assert!((high.value - 0.03125).abs() < 1e-15);
        let mut prev = 0.0;
        for x in [1.0, 10.0, 100.0, 1e3, 1e4] {
            let v = qfi_analytic_squeezed(Sector::High, 1.0, x).unwrap().value;
            assert!(v > prev && v < 0.125);
            prev = v;
        }
        assert!(matches!(
            qfi_analytic_squeezed(Sector::Low, 1.0, 1.0),
            Err(Error::CriticalPointGuard { .. })
        ));
    }

    #[test]
    fn identity_with_squeezing_derivative() {
        for sector in [Sector::Low, Sector::High] {
            for x in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let r = qfi_analytic_squeezed(sector, 1.3, x).unwrap();
                assert!(r.diagnostics["identity_residual"] <= 1e-12 * r.value);
            }
        }
    }

    #[test]
    fn spectral_sum_single_term() {
        let spec = ModelSpec::effective(Sector::Low, 1.0, 0.25, &st()).unwrap();
        let sol = solve(&spec, &st()).unwrap();
        let r = qfi_spectral_sum(&sol, &st()).unwrap();
        assert!((r.value - 0.0625 / 4.5).abs() < 1e-6 * r.value);
        assert_eq!(r.diagnostics["dominant_level"], 2.0);
        assert!(r.diagnostics["dominant_fraction"] > 1.0 - 1e-10);
    }

    #[test]
    fn spectral_sum_lmg_free() {
        let sol = solve(&ModelSpec::lmg(1.0, 0.0, 20).unwrap(), &st()).unwrap();
        assert_eq!(qfi_spectral_sum(&sol, &st()).unwrap().value, 0.0);
    }

    #[test]
    fn degeneracy_guard_reports_gap() {
        let sol = solve(&ModelSpec::lmg(1.0, 3.0, 60).unwrap(), &st()).unwrap();
        match qfi_spectral_sum(&sol, &st()) {
            Err(Error::DegeneracyGuard { gap, .. }) => assert!(gap < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn state_fd_matches_spectral_sum() {
        let spec = ModelSpec::effective(Sector::Low, 1.0, 0.25, &st()).unwrap();
        let r = qfi_state_fd(&spec, 1e-5, &st()).unwrap();
        let exact = 0.0625 / 4.5;
        assert!((r.value - exact).abs() < 1e-5 * exact, "{}", r.value);
        let lmg = ModelSpec::lmg(1.0, 0.0, 10).unwrap();
        assert!(qfi_state_fd_default(&lmg, &st()).unwrap().value < 1e-8);
    }

    #[test]
    fn fd_gauge_independence() {
        let spec = ModelSpec::chain(Family::TfimTransverse, 1.0, 0.4, 4).unwrap();
        let h = 1e-4;
        let g = |w: f64| solve(&spec.with_omega(w), &st()).unwrap().spectrum.ground_state().clone();
        let (m, c, p) = (g(1.0 - h), g(1.0), g(1.0 + h));
        let base = fd_qfi_from_states(&m, &c, &p, h).unwrap();
        let rotated = fd_qfi_from_states(
            &m.with_phase(C64::from_polar(1.0, 2.1)),
            &c.with_phase(C64::from_polar(1.0, -0.7)),
            &p.with_phase(C64::from_polar(1.0, 0.3)),
            h,
        )
        .unwrap();
        assert!((base - rotated).abs() < 1e-9 * base.max(1e-12));
    }

    #[test]
    fn phase_imprint() {
        let space = FockSpace::new(40).unwrap();
        let n = number_operator(space);
        assert_eq!(qfi_phase_imprint(&space.vacuum(), &n, 3.0).unwrap().value, 0.0);
        let s = squeeze_vacuum(-0.25 * 0.25f64.ln(), space).unwrap();
        assert_eq!(qfi_phase_imprint(&s, &n, 0.0).unwrap().value, 0.0);
        assert!((qfi_phase_imprint(&s, &n, 1.0).unwrap().value - 1.125).abs() < 1e-8);
        assert!(qfi_phase_imprint(&s, &n, -1.0).is_err());
    }

    #[test]
    fn oscillator_evolution() {
        assert_eq!(qfi_oscillator_evolution(0.0, 2.0, Sector::Low, 1.0, 0.5).unwrap().value, 0.0);
        let a = qfi_oscillator_evolution(1.0, 1.0, Sector::Low, 1.0, 0.75).unwrap();
        assert!((a.value - 6.25).abs() < 1e-12);
        let b = qfi_oscillator_evolution(1.0, 2.0, Sector::High, 1.0, 8.0).unwrap();
        assert!((b.value - 16.0 * 100.0 / 36.0).abs() < 1e-12);
        assert!((b.value - 44.444).abs() < 1e-3);
        assert!(qfi_oscillator_evolution(1.0, 1.0, Sector::Low, 1.0, 1.0).is_err());
    }

    #[test]
    fn normalization() {
        assert_eq!(normalized_metrics(0.0, 0.7).unwrap(), (0.0, 0.0));
        assert_eq!(normalized_metrics(1.0, 1.0).unwrap(), (1.0, 1.0));
        let gap02 = 2.0 * 0.75f64.sqrt();
        let (a, b) = normalized_metrics(0.0625 / 4.5, gap02).unwrap();
        assert!((a - 0.024_056).abs() < 1e-6);
        assert!((b - 0.041_667).abs() < 1e-6);
        assert!(matches!(normalized_metrics(1.0, 0.0), Err(Error::GapGuard { .. })));
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("fd".parse::<Method>().unwrap(), Method::StateFd);
        assert!("bayes".parse::<Method>().is_err());
    }
}

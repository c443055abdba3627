//! Hamiltonian families, their exact `dH/domega`, and the closed-form
//! effective-oscillator quantities.
//!
//! The omega derivative is always taken at fixed `(g, Omega, N)`, so `dH/domega`
//! is the bare number operator (bosonic families), `S_z` (LMG) or
//! `sum_i sigma_z^(i)` (chains).

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{check_truncation, number_operator, quadrature_squared, FockSpace, Sector};
use crate::settings::Settings;
use crate::spectral::{eigendecompose_with, Basis, HermitianOperator, SpectralDecomposition, C64};
use crate::spin::{add_pauli, collective_spin_ops, Axis, ChainBasis, DickeBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    RabiFull,
    EffectiveLow,
    EffectiveHigh,
    Lmg,
    Tfim,
    TfimTransverse,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::RabiFull,
        Family::EffectiveLow,
        Family::EffectiveHigh,
        Family::Lmg,
        Family::Tfim,
        Family::TfimTransverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RabiFull => "rabi_full",
            Family::EffectiveLow => "effective_low",
            Family::EffectiveHigh => "effective_high",
            Family::Lmg => "lmg",
            Family::Tfim => "tfim",
            Family::TfimTransverse => "tfim_transverse",
        }
    }

    pub fn is_bosonic(self) -> bool {
        matches!(self, Family::RabiFull | Family::EffectiveLow | Family::EffectiveHigh)
    }

    pub fn is_chain(self) -> bool {
        matches!(self, Family::Tfim | Family::TfimTransverse)
    }

    pub fn sector(self) -> Option<Sector> {
        match self {
            Family::EffectiveLow => Some(Sector::Low),
            Family::EffectiveHigh => Some(Sector::High),
            _ => None,
        }
    }

    pub fn effective(sector: Sector) -> Family {
        match sector {
            Sector::Low => Family::EffectiveLow,
            Sector::High => Family::EffectiveHigh,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown model family '{s}'")))
    }
}

/// A point in a model family's parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSpec {
    pub family: Family,
    /// Oscillator or spin frequency; the estimated parameter.
    pub omega: f64,
    /// Qubit splitting. Required for bosonic families; for the effective
    /// families it only enters through `g^2 / Omega`.
    pub big_omega: Option<f64>,
    /// Coupling, same energy units as omega.
    pub g: f64,
    /// Spin count for spin families, Fock cutoff for bosonic ones (`None`
    /// means automatic escalation).
    pub size: Option<usize>,
}

impl ModelSpec {
    /// Effective oscillator at `x = g^2/g_c^2`, with `Omega` fixed to the
    /// reference ratio times omega.
    pub fn effective(sector: Sector, omega: f64, x: f64, settings: &Settings) -> Result<Self> {
        sector.check(x)?;
        let big_omega = settings.reference_big_omega_ratio * omega;
        let spec = ModelSpec {
            family: Family::effective(sector),
            omega,
            big_omega: Some(big_omega),
            g: (x * omega * big_omega).sqrt(),
            size: None,
        };
        spec.validate(settings)?;
        Ok(spec)
    }

    pub fn rabi_full(omega: f64, big_omega: f64, x: f64, n_max: Option<usize>) -> Result<Self> {
        if !(x >= 0.0) {
            return Err(Error::InvalidInput(format!("x must be >= 0, got {x}")));
        }
        let spec = ModelSpec {
            family: Family::RabiFull,
            omega,
            big_omega: Some(big_omega),
            g: (x * omega * big_omega).sqrt(),
            size: n_max,
        };
        spec.validate(&Settings::default())?;
        Ok(spec)
    }

    pub fn lmg(omega: f64, g: f64, n: usize) -> Result<Self> {
        let spec = ModelSpec {
            family: Family::Lmg,
            omega,
            big_omega: None,
            g,
            size: Some(n),
        };
        spec.validate(&Settings::default())?;
        Ok(spec)
    }

    pub fn chain(family: Family, omega: f64, g: f64, n: usize) -> Result<Self> {
        if !family.is_chain() {
            return Err(Error::InvalidInput(format!("{family} is not a chain family")));
        }
        let spec = ModelSpec {
            family,
            omega,
            big_omega: None,
            g,
            size: Some(n),
        };
        spec.validate(&Settings::default())?;
        Ok(spec)
    }

    /// Builds a spec from the family's natural coupling coordinate: `x`
    /// for bosonic families, signed `g/g_c` for spin families.
    pub fn from_coupling(
        family: Family,
        omega: f64,
        big_omega: Option<f64>,
        coupling: f64,
        size: Option<usize>,
        settings: &Settings,
    ) -> Result<Self> {
        let spec = match family {
            Family::EffectiveLow | Family::EffectiveHigh => {
                let mut s = Self::effective(family.sector().unwrap(), omega, coupling, settings)?;
                s.size = size;
                s
            }
            Family::RabiFull => {
                let big = big_omega.unwrap_or(settings.reference_big_omega_ratio * omega);
                Self::rabi_full(omega, big, coupling, size)?
            }
            Family::Lmg => Self::lmg(omega, coupling * omega, size.unwrap_or(200))?,
            Family::Tfim | Family::TfimTransverse => {
                Self::chain(family, omega, coupling * omega, size.unwrap_or(10))?
            }
        };
        spec.validate(settings)?;
        Ok(spec)
    }

    pub fn validate(&self, settings: &Settings) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidInput(format!("omega must be > 0, got {}", self.omega)));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidInput(format!("g must be finite, got {}", self.g)));
        }
        if self.family.is_bosonic() {
            match self.big_omega {
                Some(b) if b > 0.0 && b.is_finite() => {}
                other => {
                    return Err(Error::InvalidInput(format!(
                        "{} needs Omega > 0, got {other:?}",
                        self.family
                    )))
                }
            }
            if let Some(n) = self.size {
                FockSpace::new(n)?;
            }
            if self.family == Family::EffectiveLow && self.x() >= 1.0 - settings.critical_margin {
                return Err(Error::CriticalPointGuard { x: self.x() });
            }
        } else {
            let n = self
                .size
                .ok_or_else(|| Error::InvalidInput(format!("{} needs N", self.family)))?;
            if self.family == Family::Lmg {
                DickeBasis::new(n)?;
            } else {
                ChainBasis::new(n)?;
            }
        }
        Ok(())
    }

    /// `g_c = sqrt(omega Omega)` for bosonic families, `omega` for spin families.
    pub fn critical_coupling(&self) -> f64 {
        match self.big_omega {
            Some(b) if self.family.is_bosonic() => (self.omega * b).sqrt(),
            _ => self.omega,
        }
    }

    /// `g^2 / g_c^2`, derived on demand.
    pub fn x(&self) -> f64 {
        let gc = self.critical_coupling();
        self.g * self.g / (gc * gc)
    }

    pub fn g_over_gc(&self) -> f64 {
        self.g / self.critical_coupling()
    }

    /// Same `(g, Omega, size)`, different omega.
    pub fn with_omega(&self, omega: f64) -> Self {
        ModelSpec { omega, ..*self }
    }

    pub fn with_size(&self, size: usize) -> Self {
        ModelSpec {
            size: Some(size),
            ..*self
        }
    }
}

/// Hamiltonian and its exact omega derivative.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    pub hamiltonian: HermitianOperator,
    pub d_omega: HermitianOperator,
    pub spec: ModelSpec,
}

/// A model together with its full spectrum.
#[derive(Debug, Clone)]
pub struct Solution {
    pub model: ModelInstance,
    pub spectrum: SpectralDecomposition,
}

impl Solution {
    /// Fock cutoff actually used, for bosonic families.
    pub fn n_max(&self) -> Option<usize> {
        match self.model.hamiltonian.basis() {
            Basis::Fock { n_max } | Basis::FockQubit { n_max } => Some(n_max),
            _ => None,
        }
    }
}

/// Builds the Hamiltonian; bosonic families without a cutoff use
/// `n_max_default`.
pub fn build(spec: &ModelSpec, settings: &Settings) -> Result<ModelInstance> {
    spec.validate(settings)?;
    match spec.family {
        Family::RabiFull => build_rabi_full(spec, settings),
        Family::EffectiveLow => build_effective(Sector::Low, spec, settings),
        Family::EffectiveHigh => build_effective(Sector::High, spec, settings),
        Family::Lmg => build_lmg(spec),
        Family::Tfim | Family::TfimTransverse => build_chain(spec),
    }
}

/// Builds and diagonalizes. For bosonic families the cutoff is checked
/// against the ground state's top-level population and, when `spec.size` is
/// `None`, doubled until the check passes.
pub fn solve(spec: &ModelSpec, settings: &Settings) -> Result<Solution> {
    if !spec.family.is_bosonic() {
        let model = build(spec, settings)?;
        let spectrum = eigendecompose_with(&model.hamiltonian, settings)?;
        return Ok(Solution { model, spectrum });
    }
    let auto = spec.size.is_none();
    let mut n_max = spec.size.unwrap_or(settings.n_max_default);
    loop {
        let model = build(&spec.with_size(n_max), settings)?;
        let spectrum = eigendecompose_with(&model.hamiltonian, settings)?;
        match check_truncation(spectrum.ground_state(), n_max, settings.truncation_tol) {
            Ok(()) => return Ok(Solution { model, spectrum }),
            Err(Error::TruncationGuard { .. }) if auto && n_max * 2 <= settings.n_max_limit => {
                log::debug!("{}: escalating n_max {} -> {}", spec.family, n_max, 2 * n_max);
                n_max *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

fn cutoff(spec: &ModelSpec, settings: &Settings) -> Result<FockSpace> {
    FockSpace::new(spec.size.unwrap_or(settings.n_max_default))
}

/// `omega n + (Omega/2) sigma_z + (g/2)(a + a^dag) sigma_x`, index `2n + q`.
pub fn build_rabi_full(spec: &ModelSpec, settings: &Settings) -> Result<ModelInstance> {
    if spec.family != Family::RabiFull {
        return Err(Error::InvalidInput(format!("expected rabi_full, got {}", spec.family)));
    }
    let space = cutoff(spec, settings)?;
    let big_omega = spec.big_omega.expect("validated");
    let n_max = space.n_max();
    let basis = Basis::FockQubit { n_max };
    let d = basis.dim();
    let mut h = Array2::<C64>::zeros((d, d));
    let mut dh = Array2::<C64>::zeros((d, d));
    for n in 0..=n_max {
        for q in 0..2 {
            let i = 2 * n + q;
            let sz = if q == 0 { 1.0 } else { -1.0 };
            h[[i, i]] = C64::new(spec.omega * n as f64 + 0.5 * big_omega * sz, 0.0);
            dh[[i, i]] = C64::new(n as f64, 0.0);
            if n < n_max {
                let j = 2 * (n + 1) + (1 - q);
                let v = C64::new(0.5 * spec.g * ((n + 1) as f64).sqrt(), 0.0);
                h[[i, j]] = v;
                h[[j, i]] = v;
            }
        }
    }
    Ok(ModelInstance {
        hamiltonian: HermitianOperator::new(basis, h)?,
        d_omega: HermitianOperator::new(basis, dh)?,
        spec: spec.with_size(n_max),
    })
}

/// `omega n -+ (g^2 / 4 Omega)(a + a^dag)^2`, minus sign for the low sector.
pub fn build_effective(sector: Sector, spec: &ModelSpec, settings: &Settings) -> Result<ModelInstance> {
    if spec.family != Family::effective(sector) {
        return Err(Error::InvalidInput(format!(
            "sector {sector:?} does not match family {}",
            spec.family
        )));
    }
    if sector == Sector::Low && spec.x() >= 1.0 - settings.critical_margin {
        return Err(Error::CriticalPointGuard { x: spec.x() });
    }
    let space = cutoff(spec, settings)?;
    let big_omega = spec.big_omega.expect("validated");
    let n = number_operator(space);
    let coeff = sector.coupling_sign() * spec.g * spec.g / (4.0 * big_omega);
    let h = n.combine(spec.omega, &quadrature_squared(space), coeff)?;
    Ok(ModelInstance {
        hamiltonian: h,
        d_omega: n,
        spec: spec.with_size(space.n_max()),
    })
}

/// `omega S_z - (g/N) S_x^2` on the Dicke subspace.
pub fn build_lmg(spec: &ModelSpec) -> Result<ModelInstance> {
    let n = spec.size.ok_or_else(|| Error::InvalidInput("lmg needs N".into()))?;
    let basis = DickeBasis::new(n)?;
    let s = collective_spin_ops(basis);
    let sx2 = s.sx.product(&s.sx)?;
    let h = s.sz.combine(spec.omega, &sx2, -spec.g / n as f64)?;
    Ok(ModelInstance {
        hamiltonian: h,
        d_omega: s.sz,
        spec: *spec,
    })
}

/// Periodic chain, `omega sum sigma_z - g sum sigma_x sigma_x` (`tfim`), with
/// an extra `+ g sum sigma_z sigma_z` for `tfim_transverse`.
pub fn build_chain(spec: &ModelSpec) -> Result<ModelInstance> {
    if !spec.family.is_chain() {
        return Err(Error::InvalidInput(format!("{} is not a chain family", spec.family)));
    }
    let n = spec.size.ok_or_else(|| Error::InvalidInput("chain needs N".into()))?;
    let basis = ChainBasis::new(n)?;
    let dim = basis.dim();
    let transverse = spec.family == Family::TfimTransverse;
    let mut h = Array2::<C64>::zeros((dim, dim));
    for bit in 0..n {
        add_pauli(&mut h, bit, Axis::Z, spec.omega);
    }
    for state in 0..dim {
        for bit in 0..n {
            let next = (bit + 1) % n;
            let flipped = state ^ (1 << bit) ^ (1 << next);
            h[[flipped, state]] -= spec.g;
            if transverse {
                let zz = ChainBasis::z_value(state, bit) * ChainBasis::z_value(state, next);
                h[[state, state]] += spec.g * zz;
            }
        }
    }
    let mut dh = Array2::<C64>::zeros((dim, dim));
    for bit in 0..n {
        add_pauli(&mut dh, bit, Axis::Z, 1.0);
    }
    Ok(ModelInstance {
        hamiltonian: HermitianOperator::new(basis.basis(), h)?,
        d_omega: HermitianOperator::new(basis.basis(), dh)?,
        spec: *spec,
    })
}

/// `omega sqrt(1 -+ x)`.
pub fn effective_frequency(sector: Sector, omega: f64, x: f64) -> Result<f64> {
    sector.check(x)?;
    Ok(omega * sector.stiffness(x).sqrt())
}

/// `(d/domega [omega sqrt(1 -+ x)])^2 = (2 -+ x)^2 / (4 (1 -+ x))`, with
/// `g_c^2 = omega Omega` varying with omega.
pub fn frequency_derivative_factor(sector: Sector, x: f64) -> Result<f64> {
    sector.check(x)?;
    let s = sector.stiffness(x);
    let num = match sector {
        Sector::Low => 2.0 - x,
        Sector::High => 2.0 + x,
    };
    Ok(num * num / (4.0 * s))
}

/// Inverse effective gap `1 / (omega sqrt(1 -+ x))`.
pub fn characteristic_time(sector: Sector, omega: f64, x: f64) -> Result<f64> {
    Ok(1.0 / effective_frequency(sector, omega, x)?)
}

//! Truncated single-mode bosonic operators and squeezed vacua.

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::settings::Settings;
use crate::spectral::{evolve, Basis, HermitianOperator, QuantumState, C64};

/// Fock levels `0..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidInput(format!("n_max must be >= 2, got {n_max}")));
        }
        Ok(FockSpace { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn basis(&self) -> Basis {
        Basis::Fock { n_max: self.n_max }
    }

    pub fn vacuum(&self) -> QuantumState {
        QuantumState::basis_state(self.basis(), 0).expect("vacuum is in range")
    }
}

/// Which spin sector of the dispersive Rabi Hamiltonian the oscillator lives in.
///
/// `Low` closes the gap (critical side, `1 - x`), `High` opens it
/// (anti-critical side, `1 + x`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Low,
    High,
}

impl Sector {
    /// `1 - x` for the low sector, `1 + x` for the high sector.
    pub fn stiffness(self, x: f64) -> f64 {
        match self {
            Sector::Low => 1.0 - x,
            Sector::High => 1.0 + x,
        }
    }

    /// Sign in front of the `(a + a^dag)^2` term.
    pub fn coupling_sign(self) -> f64 {
        match self {
            Sector::Low => -1.0,
            Sector::High => 1.0,
        }
    }

    /// Validates `x = g^2/g_c^2` for this sector.
    pub fn check(self, x: f64) -> Result<()> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidInput(format!("x = g^2/g_c^2 must be finite and >= 0, got {x}")));
        }
        if self == Sector::Low && x >= 1.0 {
            return Err(Error::CriticalPointGuard { x });
        }
        Ok(())
    }
}

/// Lowering operator and its adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderOperators {
    pub lowering: Array2<C64>,
    pub raising: Array2<C64>,
}

/// `<n-1|a|n> = sqrt(n)`, together with `a^dag` as the conjugate transpose.
pub fn annihilation(space: FockSpace) -> LadderOperators {
    let d = space.dim();
    let mut a = Array2::<C64>::zeros((d, d));
    for n in 1..d {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    let raising = a.t().mapv(|z| z.conj());
    LadderOperators { lowering: a, raising }
}

pub fn number_operator(space: FockSpace) -> HermitianOperator {
    let diag: Vec<f64> = (0..space.dim()).map(|n| n as f64).collect();
    HermitianOperator::diagonal(space.basis(), &diag).expect("diagonal is Hermitian")
}

/// Matrix elements of `(a + a^dag)^2` restricted to the retained levels.
///
/// Unlike squaring the truncated `a + a^dag`, the top diagonal entry keeps
/// its untruncated value `2 n_max + 1`.
pub fn quadrature_squared(space: FockSpace) -> HermitianOperator {
    let d = space.dim();
    let mut m = Array2::<C64>::zeros((d, d));
    for n in 0..d {
        m[[n, n]] = C64::new(2.0 * n as f64 + 1.0, 0.0);
        if n + 2 < d {
            let v = (((n + 1) * (n + 2)) as f64).sqrt();
            m[[n + 2, n]] = C64::new(v, 0.0);
            m[[n, n + 2]] = C64::new(v, 0.0);
        }
    }
    HermitianOperator::new(space.basis(), m).expect("real symmetric")
}

/// Squeezing parameter of the effective oscillator ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingParameters {
    pub sector: Sector,
    /// `-1/4 ln(1 -+ x)`: non-negative in the low sector, non-positive in the
    /// high sector.
    pub xi: f64,
    /// `g^2 / g_c^2`.
    pub x: f64,
}

pub fn squeezing_parameter(sector: Sector, x: f64) -> Result<SqueezingParameters> {
    sector.check(x)?;
    let xi = -0.25 * sector.stiffness(x).ln();
    Ok(SqueezingParameters { sector, xi, x })
}

/// Exact mean excitation number and the large-squeezing approximation that
/// goes with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanExcitations {
    /// `sinh^2 xi`.
    pub exact: f64,
    /// `1/(4 sqrt(1 - x))` (low) or `sqrt(x)/4` (high).
    pub approximation: f64,
}

pub fn mean_excitations(params: SqueezingParameters) -> MeanExcitations {
    let exact = params.xi.sinh().powi(2);
    let approximation = match params.sector {
        Sector::Low => 0.25 / (1.0 - params.x).sqrt(),
        Sector::High => 0.25 * params.x.sqrt(),
    };
    MeanExcitations { exact, approximation }
}

/// `exp[(xi/2)(a^dag^2 - a^2)] |0>` in the given truncation.
///
/// The generator only connects even levels, so it is exponentiated on the
/// even block; odd amplitudes are exactly zero.
pub fn squeeze_vacuum(xi: f64, space: FockSpace) -> Result<QuantumState> {
    squeeze_vacuum_with(xi, space, &Settings::default())
}

pub fn squeeze_vacuum_with(xi: f64, space: FockSpace, settings: &Settings) -> Result<QuantumState> {
    if !xi.is_finite() {
        return Err(Error::InvalidInput(format!("squeezing parameter {xi} is not finite")));
    }
    let levels: Vec<usize> = (0..space.dim()).step_by(2).collect();
    let m = levels.len();
    // i * (xi/2)(a^dag^2 - a^2) on the even block, Hermitian.
    let mut gen = Array2::<C64>::zeros((m, m));
    for k in 0..m.saturating_sub(1) {
        let n = levels[k];
        let c = 0.5 * xi * (((n + 1) * (n + 2)) as f64).sqrt();
        gen[[k + 1, k]] = C64::new(0.0, c);
        gen[[k, k + 1]] = C64::new(0.0, -c);
    }
    let block = Basis::Plain { dim: m };
    let gen = HermitianOperator::new(block, gen)?;
    let vac = QuantumState::basis_state(block, 0)?;
    // exp(-i * 1 * (iK)) = exp(K)
    let evolved = evolve(&vac, &gen, 1.0)?;

    let mut amps = Array1::<C64>::zeros(space.dim());
    for (k, &n) in levels.iter().enumerate() {
        amps[n] = evolved.amplitudes()[k];
    }
    let state = QuantumState::normalized(space.basis(), amps)?;
    check_truncation(&state, space.n_max(), settings.truncation_tol)?;
    Ok(state)
}

/// Squeezed vacuum with the cutoff doubled from `n_max_default` until the
/// truncation check passes.
pub fn squeeze_vacuum_auto(xi: f64, settings: &Settings) -> Result<QuantumState> {
    let mut n_max = settings.n_max_default.max(2);
    loop {
        match squeeze_vacuum_with(xi, FockSpace::new(n_max)?, settings) {
            Err(Error::TruncationGuard { .. }) if n_max * 2 <= settings.n_max_limit => n_max *= 2,
            other => return other,
        }
    }
}

/// Fails when the top two retained levels hold `tolerance` or more probability.
pub fn check_truncation(state: &QuantumState, n_max: usize, tolerance: f64) -> Result<()> {
    let population = top_population(state, n_max);
    if population >= tolerance {
        return Err(Error::TruncationGuard {
            n_max,
            population,
            tolerance,
        });
    }
    Ok(())
}

/// Probability in Fock levels `n_max - 1` and `n_max`. For a Fock-qubit
/// product basis both qubit states are included.
pub fn top_population(state: &QuantumState, n_max: usize) -> f64 {
    let amps = state.amplitudes();
    match state.basis() {
        Basis::FockQubit { .. } => (2 * (n_max - 1)..2 * (n_max + 1)).map(|i| amps[i].norm_sqr()).sum(),
        _ => (n_max - 1..=n_max).map(|i| amps[i].norm_sqr()).sum(),
    }
}

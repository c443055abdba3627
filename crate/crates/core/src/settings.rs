use serde::Serialize;

/// Numerical tolerances and truncation limits shared by every module.
///
/// All fields can be overridden from a key=value config file (see
/// [`crate::config`]); the names there match the field names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    /// Relative Hermiticity tolerance (scaled by the largest matrix entry).
    pub hermiticity_tol: f64,
    /// Largest matrix dimension `eigendecompose` accepts.
    pub max_dim: usize,
    /// Eigenvalues closer than this are treated as one degenerate cluster.
    pub cluster_tol: f64,
    /// Minimum ground-state gap for spectral-sum and finite-difference QFI.
    pub degeneracy_tol: f64,
    /// Maximum allowed population of the top two Fock levels.
    pub truncation_tol: f64,
    /// Starting Fock cutoff for bosonic models.
    pub n_max_default: usize,
    /// Automatic cutoff escalation stops here.
    pub n_max_limit: usize,
    /// Finite-difference step, relative to omega.
    pub fd_step_rel: f64,
    /// Largest relative QFI change tolerated when the step is halved.
    pub richardson_tol: f64,
    /// Largest relative change tolerated when the ramp step count is halved.
    pub ramp_convergence_tol: f64,
    /// Minimum instantaneous gap along an adiabatic ramp.
    pub ramp_gap_tol: f64,
    /// Largest tolerated imaginary part of the Berry connection.
    pub berry_tol: f64,
    /// Low-sector models require x < 1 - critical_margin.
    pub critical_margin: f64,
    /// Reference qubit splitting for effective models, in units of omega.
    pub reference_big_omega_ratio: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            hermiticity_tol: 1e-12,
            max_dim: 1 << 14,
            cluster_tol: 1e-9,
            degeneracy_tol: 1e-9,
            truncation_tol: 1e-10,
            n_max_default: 300,
            n_max_limit: 1 << 12,
            fd_step_rel: 1e-5,
            richardson_tol: 1e-4,
            ramp_convergence_tol: 1e-3,
            ramp_gap_tol: 1e-6,
            berry_tol: 1e-10,
            critical_margin: 1e-6,
            reference_big_omega_ratio: 1000.0,
        }
    }
}

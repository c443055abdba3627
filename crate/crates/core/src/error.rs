use thiserror::Error;

/// Every failure the library can report.
///
/// Variants named `*Guard` are numerical guards: the input was well formed but
/// the requested quantity is not available at that point (closed gap, truncation
/// too small, unstable finite difference, ...). The CLI maps these to exit
/// code 3 and everything else to exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("HermiticityViolation: max |H_jk - conj(H_kj)| = {deviation:e} exceeds {tolerance:e}")]
    HermiticityViolation { deviation: f64, tolerance: f64 },

    #[error("DimensionGuard: {0}")]
    DimensionGuard(String),

    #[error("BasisGuard: {left} vs {right}")]
    BasisGuard { left: String, right: String },

    #[error("IndexGuard: {0}")]
    IndexGuard(String),

    #[error("CriticalPointGuard: x = g^2/g_c^2 = {x} leaves no open gap in the low sector")]
    CriticalPointGuard { x: f64 },

    #[error("TruncationGuard: top Fock populations {population:e} >= {tolerance:e} at n_max = {n_max}")]
    TruncationGuard {
        n_max: usize,
        population: f64,
        tolerance: f64,
    },

    #[error("DegeneracyGuard: ground-state gap {gap:e} below {tolerance:e}")]
    DegeneracyGuard { gap: f64, tolerance: f64 },

    #[error("StepGuard: halving the step moved the QFI from {coarse} to {fine} (relative {relative:e})")]
    StepGuard {
        coarse: f64,
        fine: f64,
        relative: f64,
    },

    #[error("GapGuard: gap {gap:e} below {tolerance:e}")]
    GapGuard { gap: f64, tolerance: f64 },

    #[error("ConvergenceGuard: {0}")]
    ConvergenceGuard(String),

    #[error("GaugeGuard: Berry connection imaginary part {0:e} is not negligible")]
    GaugeGuard(f64),

    #[error("InvalidInput: {0}")]
    InvalidInput(String),

    #[error("Io: {0}")]
    Io(String),
}

impl Error {
    /// Short variant name, used in CSV status cells.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::HermiticityViolation { .. } => "HermiticityViolation",
            Error::DimensionGuard(_) => "DimensionGuard",
            Error::BasisGuard { .. } => "BasisGuard",
            Error::IndexGuard(_) => "IndexGuard",
            Error::CriticalPointGuard { .. } => "CriticalPointGuard",
            Error::TruncationGuard { .. } => "TruncationGuard",
            Error::DegeneracyGuard { .. } => "DegeneracyGuard",
            Error::StepGuard { .. } => "StepGuard",
            Error::GapGuard { .. } => "GapGuard",
            Error::ConvergenceGuard(_) => "ConvergenceGuard",
            Error::GaugeGuard(_) => "GaugeGuard",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }

    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::CriticalPointGuard { .. }
                | Error::TruncationGuard { .. }
                | Error::DegeneracyGuard { .. }
                | Error::StepGuard { .. }
                | Error::GapGuard { .. }
                | Error::ConvergenceGuard(_)
                | Error::GaugeGuard(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter constraint violated: {0}")]
    Constraint(String),

    #[error("conjugation symmetry of p violated (max deviation {deviation:.3e})")]
    Symmetry { deviation: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step budget exhausted at t = {t} after {steps} steps")]
    TooManySteps { t: f64, steps: usize },

    #[error("no sign change of the leading real part on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("stability crossing at eta = {eta} is real (imaginary part {imag:.3e}); not a Hopf point")]
    RealCrossing { eta: f64, imag: f64 },

    #[error("trajectory is not periodic: {0}")]
    NotPeriodic(String),

    #[error("more than one active mode: {modes:?}")]
    MultiMode { modes: Vec<usize> },

    #[error("horizon too short: gamma * t = {gamma_t:.3} < {required}")]
    InsufficientHorizon { gamma_t: f64, required: f64 },

    #[error("time {t} outside trajectory range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("coherent state requires a limit-cycle record")]
    MissingCycle,

    #[error("Bloch vector norm {norm} exceeds 1")]
    BlochNorm { norm: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Fock truncation leak: top-level population {population:.3e} in mode {mode} at t = {t}")]
    TruncationLeak { mode: usize, population: f64, t: f64 },

    #[error("Hilbert space dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("cutoff {cutoff} too small for mode {mode} (mean photon number {mean_photons:.3})")]
    CutoffTooSmall { mode: usize, cutoff: usize, mean_photons: f64 },

    #[error("trace drifted to {trace} at t = {t}")]
    TraceDrift { trace: f64, t: f64 },

    #[error("correlator requires distinct sites, got {0} twice")]
    SameSite(i64),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Constraint(_) => "constraint",
            Error::Symmetry { .. } => "symmetry",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::TooManySteps { .. } => "too_many_steps",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::RealCrossing { .. } => "real_crossing",
            Error::NotPeriodic(_) => "not_periodic",
            Error::MultiMode { .. } => "multi_mode",
            Error::InsufficientHorizon { .. } => "insufficient_horizon",
            Error::OutOfRange { .. } => "out_of_range",
            Error::MissingCycle => "missing_cycle",
            Error::BlochNorm { .. } => "bloch_norm",
            Error::NotPsd { .. } => "not_psd",
            Error::TruncationLeak { .. } => "truncation_leak",
            Error::DimensionOverflow { .. } => "dimension_overflow",
            Error::CutoffTooSmall { .. } => "cutoff_too_small",
            Error::TraceDrift { .. } => "trace_drift",
            Error::SameSite(_) => "same_site",
            Error::Invalid(_) => "invalid",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }
}

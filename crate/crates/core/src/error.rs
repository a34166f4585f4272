use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fock space cutoff must be at least 2, got {0}")]
    InvalidCutoff(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(
        "truncation insufficient: cutoff {cutoff} leaves tail mass {tail_mass:e} for |alpha| = {alpha_abs}, \
         required cutoff is {required_cutoff}"
    )]
    TruncationInsufficient {
        cutoff: usize,
        required_cutoff: usize,
        tail_mass: f64,
        alpha_abs: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("impossible outcome: probability {0:e} below 1e-12")]
    ImpossibleOutcome(f64),

    #[error("pattern divergence: 1 + sin(phi) = {0:e} at the requested phase")]
    PatternDivergence(f64),

    #[error("mixing angle singular at phi = {0}")]
    MixingAngleSingular(f64),

    #[error("degenerate logical basis: alpha = 0")]
    DegenerateLogicalBasis,

    #[error("state is not in the parity eigenspace (residual {0:e})")]
    NotInParityEigenspace(f64),

    #[error("phase {0:e} rad is below the presence threshold")]
    SubThresholdPhase(f64),

    #[error("malformed bit string: unexpected character {0:?}")]
    MalformedBits(char),

    #[error("degenerate storage period: omega = 0 with t = {0}")]
    DegeneratePeriod(f64),

    #[error("register shapes differ: {0}")]
    RegisterMismatch(String),

    #[error("logical basis not quasi-orthogonal: overlap {0:e} exceeds 1e-3")]
    NotQuasiOrthogonal(f64),

    #[error("integrator step-size failure at t = {t}: step {step:e} after {steps} steps")]
    StepSizeFailure { t: f64, step: f64, steps: usize },
}

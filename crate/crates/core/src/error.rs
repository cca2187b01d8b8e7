use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid potential profile: {0}")]
    InvalidProfile(String),

    #[error("unsupported profile for this operation: {0}")]
    UnsupportedProfile(String),

    #[error("position x = {x} nm outside the device domain [0, {length}] nm")]
    Domain { x: f64, length: f64 },

    #[error("injected wave number k1 = {k1} nm^-1 outside the admissible band (0, {k_max}) nm^-1")]
    OutOfBand { k1: f64, k_max: f64 },

    #[error(
        "injected k1 = {k1} nm^-1 matches neither quartic root (k^2 candidates {ksq_small}, {ksq_large})"
    )]
    InconsistentInjection {
        k1: f64,
        ksq_small: Complex64,
        ksq_large: Complex64,
    },

    #[error("quartic coefficient a = {a_coeff} eV nm^4 too small in magnitude for the fourth-order equation; use the second-order model")]
    DegenerateEquation { a_coeff: f64 },

    #[error("degeneracy flag {expected_degenerate} inconsistent with wave numbers {k_a} and {k_b}")]
    DegeneracyMismatch {
        k_a: Complex64,
        k_b: Complex64,
        expected_degenerate: bool,
    },

    #[error("step size underflow at x = {x} nm (segment {segment}); the problem appears stiff at this energy")]
    StepSizeUnderflow { x: f64, segment: usize },

    #[error("integrator exceeded {max_steps} steps at x = {x} nm")]
    MaxStepsExceeded { x: f64, max_steps: usize },

    #[error(
        "singular boundary system: |det| = {det_magnitude:.3e} below threshold {threshold:.3e} \
         (condition estimate {condition_estimate:.3e}); existence and uniqueness fail together"
    )]
    SingularSystem {
        det_magnitude: f64,
        threshold: f64,
        condition_estimate: f64,
    },

    #[error("exponential dynamic range exceeded: |Im k| * length = {exponent} > {limit}")]
    DynamicRange { exponent: f64, limit: f64 },

    #[error("empty bias list for the sweep")]
    EmptySweep,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the physics and numerics layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("dark state is undefined: the products Ω₂Ω₄, Ω₁Ω₄ and Ω₁Ω₃ all vanish")]
    DegenerateDarkState,

    #[error("one-photon detunings must be nonzero (Δ₁ = {delta1}, Δ₂ = {delta2})")]
    ZeroDetuning { delta1: f64, delta2: f64 },

    #[error(
        "pulse synthesis requires Δ₁·Ω₀ > 0 and Δ₂·Ω₀ > 0 \
         (Δ₁ = {delta1}, Δ₂ = {delta2}, Ω₀ = {omega0})"
    )]
    SynthesisSign {
        delta1: f64,
        delta2: f64,
        omega0: f64,
    },

    #[error("step index {k} is outside 1..={n_pairs}")]
    StepIndex { k: usize, n_pairs: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "time step too large at t = {t}: dt·‖H‖ = {product:.4} must stay below {limit} \
         (dt = {dt}, ‖H‖ = {norm:.4})"
    )]
    StepTooLarge {
        t: f64,
        dt: f64,
        norm: f64,
        product: f64,
        limit: f64,
    },

    #[error("amplitudes became non-finite at t = {t}")]
    NonFinite { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected: "a finite number",
        })
    }
}

impl Error {
    /// True for failures of the integration itself rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::StepTooLarge { .. } | Error::NonFinite { .. })
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `a^m` annihilates the vacuum, so the subtracted state has zero norm.
    #[error("m = {m} photons cannot be subtracted from the vacuum (nbar = 0, r = 0)")]
    AnnihilatedVacuum { m: u32 },

    #[error("P function is not a regular function here (D = {discriminant:.6e}, (2nbar+1)e^(-2r) = {squeezed_width:.6e})")]
    NonRegularP {
        discriminant: f64,
        squeezed_width: f64,
    },

    #[error("kappa_t = {kappa_t:e} is too close to zero; use the unevolved evaluator")]
    UnevolvedTime { kappa_t: f64 },

    #[error("squeeze operator lost unitarity at dim {dim}: defect {defect:.3e}")]
    UnitarityLoss { dim: usize, defect: f64 },

    #[error("truncation did not converge below max_dim; dims and estimates tried: {trace:?}")]
    MaxDimExceeded { trace: Vec<(usize, f64)> },

    #[error("|alpha| = {alpha_abs:.4} exceeds the trusted displacement {limit:.4} at this dim")]
    DisplacementOutOfRange { alpha_abs: f64, limit: f64 },

    #[error("time step {dt:e} still changes the final state by {distance:.3e} in trace distance")]
    StepSizeTooCoarse { dt: f64, distance: f64 },

    #[error("convolution kernel mass outside the grid is {outside_mass:.3e}")]
    GridTooSmall { outside_mass: f64 },

    #[error("oracle invariant violated: {0}")]
    InvariantViolation(String),
}

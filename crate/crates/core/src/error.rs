use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("profile violates its invariants: {0}")]
    InvalidProfile(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("positivity clip removed mass {clipped:.3e} in one step (budget {budget:.1e})")]
    MassLoss { clipped: f64, budget: f64 },
    #[error("time step {dt:.3e} exceeds the stability limit {limit:.3e}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("not converged after t = {t:.3}: residual {residual:.3e}, energy growth rate {energy_growth_rate:.4}")]
    NotConverged {
        t: f64,
        residual: f64,
        energy_growth_rate: f64,
        best: Box<crate::selfsim::SteadyResult>,
    },
    #[error("second moments differ ({0:.3e} vs {1:.3e}); the k-norm is undefined")]
    MomentMismatch(f64, f64),
    #[error("characteristic-function bound |phi| <= 1 violated at xi = {xi:.3e} (|phi| = {modulus:.6})")]
    CharacteristicBound { xi: f64, modulus: f64 },
    #[error("matrix is singular or ill-conditioned: {0}")]
    Singular(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error(
        "quadrature did not converge: error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e} after {subdivisions} subdivisions"
    )]
    NonConvergence {
        value: f64,
        estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    /// The shape function decays too slowly for the requested quantity.
    #[error("tail condition violated: need nu > {required}, shape declares nu = {nu}")]
    TailCondition { nu: f64, required: f64 },

    /// Noise alone already exceeds the outage budget.
    #[error("infeasible outage target: beta*eta = {noise_load:.6} >= ln(1/(1-eps)) = {budget:.6}")]
    Infeasible { noise_load: f64, budget: f64 },

    /// The objective does not vary enough over the search range to locate a maximizer.
    #[error("objective is flat over the search range (spread {spread:.3e})")]
    FlatObjective { spread: f64 },

    #[error("invalid scenario: {}", format_violations(.0))]
    InvalidScenario(Vec<Violation>),

    #[error("failed to parse `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

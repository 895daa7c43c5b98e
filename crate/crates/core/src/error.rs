use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("{0}")]
    Domain(String),

    #[error("{what} did not converge after {subdivisions} subdivisions (best estimate {estimate:e}, error estimate {err_est:e})")]
    QuadNoConvergence {
        what: String,
        estimate: f64,
        err_est: f64,
        subdivisions: usize,
    },

    #[error("series did not converge within {terms} terms (partial sum {partial:e}, argument {argument:e})")]
    SeriesNoConvergence { terms: usize, partial: f64, argument: f64 },

    #[error("operation needs the {expected} viewpoint")]
    WrongViewpoint { expected: &'static str },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("{0}")]
    Infeasible(String),
}

impl Error {
    /// Tags a quadrature failure with the integral it came from.
    pub fn context(self, what: &str) -> Self {
        match self {
            Error::QuadNoConvergence {
                what: inner,
                estimate,
                err_est,
                subdivisions,
            } => Error::QuadNoConvergence {
                what: format!("{what}: {inner}"),
                estimate,
                err_est,
                subdivisions,
            },
            other => other,
        }
    }

    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadNoConvergence { .. } | Error::SeriesNoConvergence { .. } | Error::Infeasible(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

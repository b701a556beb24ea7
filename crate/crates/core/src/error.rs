use thiserror::Error;

use crate::curvature::CurvatureCertificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("r = {r} outside profile domain [0, {r_max}]")]
    Domain { r: f64, r_max: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("warping function non-positive (f = {value}) at r = {r}")]
    NonPositive { r: f64, value: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("construction error: {0}")]
    Construction(String),

    // best is boxed: certificates carry whole grids
    #[error("construction failed: {reason}")]
    ConstructionFailed {
        reason: String,
        best: Option<Box<CurvatureCertificate>>,
    },

    #[error("homotopy '{stage}' failed at s = {s}: R_min = {r_min}")]
    HomotopyFailed { stage: String, s: f64, r_min: f64 },

    #[error("profile not almost-standard: {0}")]
    NotAdmissible(String),

    #[error("retract failed in stage '{stage}': {reason}")]
    RetractFailed { stage: String, reason: String },

    #[error("family member {index} failed: {source}")]
    FamilyFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// true when the failure is mathematical (a positivity claim did not hold)
    /// rather than plumbing.
    pub fn is_math_failure(&self) -> bool {
        matches!(
            self,
            Error::NonPositive { .. }
                | Error::InvalidProfile(_)
                | Error::Construction(_)
                | Error::ConstructionFailed { .. }
                | Error::HomotopyFailed { .. }
                | Error::NotAdmissible(_)
                | Error::RetractFailed { .. }
                | Error::FamilyFailed { .. }
        )
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

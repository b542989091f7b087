use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Bad argument supplied by the caller.
    #[error("input error: {0}")]
    Input(String),
    /// The physical model cannot represent the request.
    #[error("model error: {0}")]
    Model(String),
    /// No parameters satisfy the constraints.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Energy-scale hierarchy violated; names the failing inequality.
    #[error("regime error: {0}")]
    Regime(String),
    /// The qubit encoding has no usable moment.
    #[error("degenerate encoding: {0}")]
    DegenerateEncoding(String),
    /// Configuration document problems, with the offending key path.
    #[error("parse error at `{path}`: {msg}")]
    Parse { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), msg: msg.into() }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Model(_) => "model",
            Error::Infeasible(_) => "infeasible",
            Error::Regime(_) => "regime",
            Error::DegenerateEncoding(_) => "degenerate_encoding",
            Error::Parse { .. } => "parse",
        }
    }
}

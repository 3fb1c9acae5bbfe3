use uplink_core::analytic::AnalyticError;
use uplink_core::mcsim::SimError;
use uplink_core::usercount::UserCountError;
use uplink_core::ParamError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid parameter: {0}")]
    Param(#[from] ParamError),
    #[error("analytic engine: {0}")]
    Analytic(#[from] AnalyticError),
    #[error("simulation: {0}")]
    Sim(#[from] SimError),
    #[error("user-count model: {0}")]
    UserCount(#[from] UserCountError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid grid `{spec}`: {reason}")]
    InvalidGrid { spec: String, reason: &'static str },
    #[error("{0}")]
    Usage(String),
    /// Help or version text requested on the command line; not a failure.
    #[error("{0}")]
    Help(String),
}

impl CliError {
    /// Stable machine-readable error category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Param(_) => "invalid_parameter",
            CliError::Analytic(_) => "analytic",
            CliError::Sim(_) => "simulation",
            CliError::UserCount(_) => "user_count",
            CliError::Io(_) => "io",
            CliError::Csv(_) => "csv",
            CliError::InvalidGrid { .. } => "invalid_grid",
            CliError::Usage(_) => "usage",
            CliError::Help(_) => "help",
        }
    }

    /// 2 for rejected input, 1 for failures while running, 0 for help text.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Help(_) => 0,
            CliError::Param(_) | CliError::InvalidGrid { .. } | CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// One-line JSON object with `error` and `message` keys.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

use serde::Serialize;

/// Exit code for invalid configuration or usage.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for failed computations and IO.
pub const EXIT_COMPUTATION: i32 = 3;
/// Exit code when a run completes but some checks fail.
pub const EXIT_CHECKS: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("computation failed: {0}")]
    Computation(#[from] kitaev_core::Error),

    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{} check(s) failed", .0.len())]
    ChecksFailed(Vec<String>),
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Computation(_) | CliError::Io { .. } => EXIT_COMPUTATION,
            CliError::ChecksFailed(_) => EXIT_CHECKS,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Computation(_) => "computation",
            CliError::Io { .. } => "io",
            CliError::ChecksFailed(_) => "checks",
        }
    }

    /// One-line JSON failure report.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            status: &'static str,
            kind: &'a str,
            exit_code: i32,
            failures: Vec<String>,
        }
        let failures = match self {
            CliError::ChecksFailed(names) => names.clone(),
            other => vec![other.to_string()],
        };
        serde_json::to_string(&Report { status: "error", kind: self.kind(), exit_code: self.exit_code(), failures })
            .expect("report serializes")
    }
}

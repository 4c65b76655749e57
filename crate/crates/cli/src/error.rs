use std::path::PathBuf;

use qgd_core::blockcalc::BlockError;
use qgd_core::chebyshev::ChebError;
use qgd_core::DescentError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const INFEASIBLE_SCHEDULE: i32 = 3;
    pub const NORM_BOUND_VIOLATED: i32 = 4;
    pub const POLY_BOUND_VIOLATED: i32 = 5;
    pub const DEGREE_CAP_EXCEEDED: i32 = 6;
    pub const IO: i32 = 7;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{name}: {source}")]
    Descent { name: String, source: DescentError },
}

impl CliError {
    pub fn schema(path: &str, err: &serde_json::Error) -> Self {
        let message = err.to_string();
        // serde_json appends its own position; it is reported separately
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        Self::Schema {
            path: path.to_string(),
            line: err.line(),
            column: err.column(),
            message,
        }
    }

    pub fn invalid(path: &str, message: impl Into<String>) -> Self {
        Self::Invalid {
            path: path.to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Schema { .. } | Self::Invalid { .. } => exit::CONFIG,
            Self::Io { .. } => exit::IO,
            Self::Descent { source, .. } => descent_exit_code(source),
        }
    }
}

pub fn descent_exit_code(e: &DescentError) -> i32 {
    match e {
        DescentError::InfeasibleSchedule { .. } | DescentError::InitialNormTooLarge { .. } => {
            exit::INFEASIBLE_SCHEDULE
        }
        DescentError::Block { source, .. } => match source {
            BlockError::NormBoundViolated { .. } => exit::NORM_BOUND_VIOLATED,
            BlockError::PolyBoundViolated { .. } => exit::POLY_BOUND_VIOLATED,
            _ => exit::OTHER,
        },
        DescentError::Cheb(ChebError::DegreeCapExceeded { .. }) => exit::DEGREE_CAP_EXCEEDED,
        DescentError::Cheb(_)
        | DescentError::Poly(_)
        | DescentError::Config(_)
        | DescentError::ScaleOverflow { .. }
        | DescentError::RateTooLarge { .. }
        | DescentError::GradientBoundTooSmall { .. }
        | DescentError::VariableNotInSupport { .. }
        | DescentError::TermOutOfRange(_) => exit::CONFIG,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(source: BlockError) -> DescentError {
        DescentError::Block {
            step: Some(1),
            source,
        }
    }

    #[test]
    fn each_failure_has_one_code() {
        let cases = [
            (DescentError::InfeasibleSchedule { eta_m_t: 0.6 }, exit::INFEASIBLE_SCHEDULE),
            (
                DescentError::InitialNormTooLarge { norm: 0.4, bound: 0.3 },
                exit::INFEASIBLE_SCHEDULE,
            ),
            (
                block(BlockError::NormBoundViolated { norm: 0.6, bound: 0.5 }),
                exit::NORM_BOUND_VIOLATED,
            ),
            (block(BlockError::PolyBoundViolated { sup: 0.7 }), exit::POLY_BOUND_VIOLATED),
            (
                DescentError::Cheb(ChebError::DegreeCapExceeded {
                    cap: 512,
                    eps: 1e-12,
                    best: 1e-3,
                }),
                exit::DEGREE_CAP_EXCEEDED,
            ),
            (DescentError::RateTooLarge { eta: 1.0, limit: 0.5 }, exit::CONFIG),
            (DescentError::Config("x".into()), exit::CONFIG),
            (block(BlockError::NotHermitian), exit::OTHER),
        ];
        for (e, code) in cases {
            assert_eq!(descent_exit_code(&e), code, "{e}");
        }
        let io = CliError::io("x", std::io::Error::other("gone"));
        assert_eq!(io.exit_code(), exit::IO);
    }
}

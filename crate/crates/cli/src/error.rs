// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

use qwalk_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical contract violated: {0}")]
    Numerical(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidProbability(_)
            | CoreError::InvalidConfig(_)
            | CoreError::InvalidSpec(_)
            | CoreError::InvalidGenerator(_)
            | CoreError::DegenerateObservable(_)
            | CoreError::InvalidTimes { .. }
            | CoreError::NegativeTime(_)
            | CoreError::TooManySteps { .. }
            | CoreError::ResourceLimit { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] primeprog::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = Result<T, CliError>;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_capacity() => EXIT_CAPACITY,
            _ => EXIT_FAILURE,
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: {samples} samples cannot fit {taps} taps per branch with {precursor} pre-cursor taps")]
    InsufficientData {
        samples: usize,
        taps: usize,
        precursor: usize,
    },

    #[error("data matrix is rank deficient (condition number {condition:.3e})")]
    Singular { condition: f64 },

    #[error("RF cancellation target of {target_db:.2} dB is not reachable; best achievable is {best_db:.2} dB")]
    InfeasibleRfTarget { target_db: f64, best_db: f64 },

    #[error("signal alignment mismatch: {0}")]
    Alignment(String),

    #[error("scenario '{scenario}': {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub fn in_scenario(self, scenario: &str) -> Self {
        Error::Scenario {
            scenario: scenario.to_owned(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

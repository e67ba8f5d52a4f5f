use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed input: unknown point, bad parameter, invalid file field.
    #[error("input error: {0}")]
    Input(String),
    /// A configured budget would be exceeded; carries the size that tripped it.
    #[error("resource error: {what} needs {needed}, budget is {budget}")]
    Resource {
        what: String,
        needed: u64,
        budget: u64,
    },
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn resource(what: impl Into<String>, needed: u64, budget: u64) -> Self {
        Error::Resource {
            what: what.into(),
            needed,
            budget,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

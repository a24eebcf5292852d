use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate or unordered key in input list")]
    DuplicateKey,
    #[error("key {0} already present in the search tree")]
    KeyCollision(f64),
    #[error("enumeration size {0} outside 1..=10")]
    EnumerationRange(usize),
    #[error("argument {name} = {value} outside its domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("empty sample or population")]
    Empty,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}

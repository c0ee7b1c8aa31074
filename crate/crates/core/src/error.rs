use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A user sits exactly on an antenna element; the free-space model diverges.
    #[error("user {user} coincides with radiating element {element}")]
    Singularity { user: usize, element: usize },

    /// Zero noise and zero interference leave the SINR undefined.
    #[error("SINR of user {0} is undefined (zero noise and zero interference)")]
    DivisionGuard(usize),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

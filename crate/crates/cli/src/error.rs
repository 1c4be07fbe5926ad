use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("missing data file {0}; run `fibren fixpoint` first")]
    MissingData(PathBuf),
    #[error("copy {index} is out of range for {count} copies")]
    ShardOutOfRange { index: usize, count: usize },
    #[error("corrupt endpoint file: {0}")]
    CorruptEndpointFile(String),
    #[error("fixed-point certificate for d = {0} is not valid")]
    InvalidCertificate(f64),
    #[error("malformed output file {path}: {reason}")]
    BadOutput { path: PathBuf, reason: String },
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic overflow while adding set elements")]
    Overflow,
    #[error("{0}")]
    Domain(String),
    #[error("estimated work {required} exceeds cap {cap}; raise the cap to proceed")]
    ResourceGuard { required: u128, cap: u128 },
    #[error("exact search over {ground_sets} ground sets exceeds the limit of {limit}; use force to override")]
    InstanceTooLarge { ground_sets: u128, limit: u64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An element or argument does not belong to the group it is used with.
    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    #[error("invalid weight function: {0}")]
    InvalidWeights(String),

    #[error("invalid homomorphism: {0}")]
    InvalidHomomorphism(String),

    /// Element coordinates left the 64-bit range.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// A ball was requested at a radius the truncated generating set cannot
    /// represent faithfully.
    #[error("truncation too shallow: radius {radius} needs every generator of smaller weight, but omitted generators may weigh as little as {floor}")]
    TruncationTooShallow { radius: String, floor: String },

    #[error("search limit reached: {0}")]
    SearchLimit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("inconsistent bounds: {0}")]
    InconsistentBounds(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

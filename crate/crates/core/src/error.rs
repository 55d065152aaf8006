use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("buffer length {actual} does not match {width}x{height}x{channels}")]
    DimensionMismatch {
        width: usize,
        height: usize,
        channels: usize,
        actual: usize,
    },
    #[error("empty image")]
    EmptyImage,
    #[error("invalid size {width}x{height}")]
    InvalidSize { width: usize, height: usize },
    #[error("rect {rect:?} lies outside {width}x{height} image")]
    RectOutOfBounds {
        rect: crate::Rect,
        width: usize,
        height: usize,
    },
    #[error("image {width}x{height} too small (need at least {min_w}x{min_h})")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min_w: usize,
        min_h: usize,
    },
    #[error("malformed annotation: {0}")]
    Annotation(String),
    #[error("malformed manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("vector length {actual} does not match model length {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("training failed: {0}")]
    Training(String),
    #[error("unknown image id {0:?}")]
    UnknownImage(String),
}

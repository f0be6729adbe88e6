use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("measure has no atoms")]
    EmptyMeasure,
    #[error("atom position {0} lies outside [-1, 1]")]
    PositionOutOfRange(f64),
    #[error("atom position {0} appears more than once")]
    DuplicatePosition(f64),
    #[error("atom weight {0} is not positive")]
    NonpositiveWeight(f64),
    #[error("atom weights sum to {0}, expected 1")]
    WeightsNotNormalized(f64),

    #[error("term is invalid: {0}")]
    InvalidTerm(String),
    #[error("piece {piece}: anchor {anchor} is not an endpoint of its interval")]
    InvalidAnchor { piece: usize, anchor: f64 },
    #[error("pieces do not cover the real line: {0}")]
    CoverageGap(String),
    #[error("pieces disagree at breakpoint {at}: left {left}, right {right}")]
    ContinuityViolation { at: f64, left: f64, right: f64 },
    #[error("piece {0} is not strictly monotone")]
    NotStrictlyMonotonePiece(usize),
    #[error("breakpoint {0} is not a strict local extremum")]
    NonAlternatingExtrema(f64),
    #[error("one-sided derivative limit at {0} is indeterminate (opposite infinities)")]
    IndeterminateSideLimit(f64),
    #[error("tail limit is indeterminate (opposite infinities)")]
    IndeterminateTailLimit,

    #[error("alpha must be positive, got {0}")]
    NonpositiveAlpha(f64),
    #[error("invalid sampling window [{lo}, {hi}] with {n} points")]
    InvalidWindow { lo: f64, hi: f64, n: usize },
    #[error("sampled signal is invalid: {0}")]
    InvalidSignal(String),
    #[error("resolution must be at least {min}, got {got}")]
    InvalidResolution { got: usize, min: usize },
    #[error("snake is invalid: {0}")]
    InvalidSnake(String),

    #[error("side limits must be finite to form stability numbers")]
    InfiniteSideLimit,
    #[error("stability numbers need at least two atoms")]
    SingleAtom,
    #[error("{0} is not a breakpoint of the model")]
    NotABreakpoint(f64),
    #[error("germ report carries no minimum prediction")]
    NoPrediction,
    #[error("alpha list is empty")]
    EmptyAlphas,
    #[error("alpha list must be positive and strictly descending")]
    AlphasNotDescending,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

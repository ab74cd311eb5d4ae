use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operator size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("round {round}: measurements `{first}` and `{second}` do not commute")]
    NonCommutingRound {
        round: usize,
        first: String,
        second: String,
    },

    #[error("round {round} contains the identity as a measurement")]
    IdentityMeasurement { round: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("horizon {horizon} is below the {required} rounds needed to certify the steady stage")]
    HorizonTooShort { horizon: usize, required: usize },

    #[error("steady stage not reached within {0} rounds")]
    SteadyStageNotReached(usize),

    #[error("operator is not in the instantaneous stabilizer group at fine step {0}")]
    NotInIsg(usize),

    #[error("error touches slot {slot}, before the steady stage begins at {init_time}")]
    InitialStage { slot: usize, init_time: usize },

    #[error("error is detectable: probe {probe} (detector at fine step {fine_step}) is triggered")]
    Detectable { probe: usize, fine_step: usize },

    #[error("error support exceeds the analyzed window [{start}, {end}]")]
    OutsideWindow { start: usize, end: usize },

    #[error("schedule is not CSS: `{0}` is neither X-type nor Z-type")]
    NotCss(String),

    #[error("round {round} has overlapping measurement supports; insert fictitious steps first")]
    OverlappingSupports { round: usize },

    #[error("search space too large: {0}")]
    SearchTooLarge(String),

    #[error("instantaneous code has no logical operators")]
    NoLogicals,

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

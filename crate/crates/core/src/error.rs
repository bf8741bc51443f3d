use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell index ({i}, {j}) is outside the ghost-extended grid")]
    Index { i: isize, j: isize },

    #[error("point ({x}, {y}) lies outside the ghost-extended domain")]
    Location { x: f64, y: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("level set gradient vanishes at the cell center (|grad| = {magnitude:e})")]
    DegenerateGradient { magnitude: f64 },

    #[error("VOF value {value} is outside the interface band [{eps}, 1 - {eps}]")]
    OutsideBand { value: f64, eps: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no interface cells to reinitialize from")]
    NoInterface,

    #[error("shift solve failed to converge for cell ({i}, {j})")]
    ShiftSolve { i: isize, j: isize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("step {step} (t = {time}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

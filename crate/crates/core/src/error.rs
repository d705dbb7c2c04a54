use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Arguments that do not describe a valid graph (wrong degree, loops, bad sizes).
    InvalidGraph(String),
    /// Target set is empty, repeats a vertex, points outside the graph or covers it.
    InvalidTargets(String),
    /// The graph with the targets removed is not connected.
    Disconnected,
    /// Vector or state has the wrong length or layout.
    Dimension { expected: usize, found: usize },
    /// Dense eigendecomposition requested above the configured cap.
    DenseCapExceeded { dim: usize, cap: usize },
    /// Random regular graph construction kept failing.
    Construction(String),
    /// Input vector does not satisfy the required eigen relation.
    NotEigenvector { residual: f64 },
    /// Principal eigenvector supplied with the wrong sign.
    Sign,
    /// Evaluation at a pole of a spectral function.
    Pole { alpha: f64 },
    /// Bisection could not bracket a root.
    NoBracket,
    /// Some precondition of an operation does not hold.
    Precondition(String),
    /// Monte Carlo walk exceeded the step cap.
    Runaway { steps: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGraph(m) => write!(f, "invalid graph: {m}"),
            Error::InvalidTargets(m) => write!(f, "invalid targets: {m}"),
            Error::Disconnected => write!(f, "graph without the targets is disconnected"),
            Error::Dimension { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::DenseCapExceeded { dim, cap } => {
                write!(f, "dense eigendecomposition of dimension {dim} exceeds cap {cap}")
            }
            Error::Construction(m) => write!(f, "construction failed: {m}"),
            Error::NotEigenvector { residual } => {
                write!(f, "input is not an eigenvector (residual {residual:e})")
            }
            Error::Sign => write!(f, "principal eigenvector must be positive"),
            Error::Pole { alpha } => write!(f, "pole at alpha = {alpha}"),
            Error::NoBracket => write!(f, "bisection bracket does not contain a root"),
            Error::Precondition(m) => write!(f, "precondition failed: {m}"),
            Error::Runaway { steps } => write!(f, "walk did not terminate within {steps} steps"),
        }
    }
}

impl core::error::Error for Error {}

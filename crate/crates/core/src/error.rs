use std::fmt;

/// Location of a failing evaluation, in 1-based cell indices (ghosts are 0 and n+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellIndex {
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("inadmissible state {state:?}: {reason}{}", fmt_location(.cell, .step))]
    Inadmissible {
        reason: &'static str,
        state: Vec<f64>,
        cell: Option<CellIndex>,
        step: Option<usize>,
    },

    #[error("non-finite wave speed at cell {cell}")]
    NonFiniteSpeed { cell: CellIndex },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_location(cell: &Option<CellIndex>, step: &Option<usize>) -> String {
    let mut s = String::new();
    if let Some(c) = cell {
        s.push_str(&format!(" at cell {c}"));
    }
    if let Some(n) = step {
        s.push_str(&format!(" in step {n}"));
    }
    s
}

impl Error {
    pub(crate) fn inadmissible(reason: &'static str, state: &[f64]) -> Self {
        Error::Inadmissible {
            reason,
            state: state.to_vec(),
            cell: None,
            step: None,
        }
    }

    /// Attach a cell location to an admissibility failure.
    pub fn at_cell(self, i: usize, j: usize) -> Self {
        match self {
            Error::Inadmissible {
                reason,
                state,
                step,
                ..
            } => Error::Inadmissible {
                reason,
                state,
                cell: Some(CellIndex { i, j }),
                step,
            },
            other => other,
        }
    }

    /// Attach a time-step number to an admissibility failure.
    pub fn at_step(self, n: usize) -> Self {
        match self {
            Error::Inadmissible {
                reason, state, cell, ..
            } => Error::Inadmissible {
                reason,
                state,
                cell,
                step: Some(n),
            },
            other => other,
        }
    }

    /// True for failures raised by the numerics rather than by the configuration.
    pub fn is_solver_abort(&self) -> bool {
        matches!(
            self,
            Error::Inadmissible { .. } | Error::NonFiniteSpeed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by state, element, network and mesh operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mode index {mode} out of range for {d} spatial modes")]
    ModeOutOfRange { mode: usize, d: usize },

    #[error("mode counts differ: {left} vs {right}")]
    ModeCountMismatch { left: usize, right: usize },

    #[error("element built for {element_d} modes applied to a state with {state_d}")]
    DimensionMismatch { element_d: usize, state_d: usize },

    #[error("OAM shift maps {ell} to {shifted}, outside the window [{lo}, {hi}]")]
    WindowEscape {
        ell: i64,
        shifted: i64,
        lo: i64,
        hi: i64,
    },

    #[error("matrix is not unitary: max residual {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("cannot normalize a state with zero norm")]
    ZeroState,

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

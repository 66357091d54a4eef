use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("means differ by {diff:e}, which exceeds the tolerance {tol:e}")]
    MeanMismatch { diff: f64, tol: f64 },

    #[error("length mismatch: `{what}` has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("e^(-{0}) underflows; the recursion cannot start")]
    Underflow(f64),

    #[error("{what} is too large: {size} exceeds the cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("missing moment `{table}` for pair ({i}, {j})")]
    MissingPair {
        table: &'static str,
        i: usize,
        j: usize,
    },

    #[error("truncation tolerance not met: deficit {deficit:e} exceeds {eps:e}")]
    ToleranceNotMet { deficit: f64, eps: f64 },

    #[error("{0}")]
    Unsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "truncation tolerance must lie in (0, 1)",
        })
    }
}

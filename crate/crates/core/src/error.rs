use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by the matrix calculus and the enumeration drivers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("quantale mismatch: `{left}` vs `{right}`")]
    QuantaleMismatch { left: String, right: String },
    #[error("enumerating {what} needs {needed} candidates but the budget is {limit}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        limit: u64,
    },
    #[error("gate `{gate}` does not hold: {detail}")]
    GateFailed { gate: String, detail: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Upper bound on the number of candidates any single enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_enum: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_enum: 10_000_000,
        }
    }
}

impl Budget {
    pub fn new(max_enum: u64) -> Self {
        Budget { max_enum }
    }

    pub fn check(&self, needed: u128, what: impl FnOnce() -> String) -> Result<()> {
        if needed > self.max_enum as u128 {
            Err(Error::BudgetExceeded {
                what: what(),
                needed,
                limit: self.max_enum,
            })
        } else {
            Ok(())
        }
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub fn pow_sat(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc == u128::MAX {
            break;
        }
    }
    acc
}

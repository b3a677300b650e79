use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Work caps for enumeration and search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest point set any single enumeration may scan.
    pub max_ambient: u64,
    /// Ratio evaluations allowed per search cell.
    pub max_evaluations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_ambient: 2_000_000,
            max_evaluations: 1_000_000,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            max_ambient: u64::MAX,
            max_evaluations: u64::MAX,
        }
    }

    pub fn check_ambient(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.max_ambient as u128 {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                needed,
                cap: self.max_ambient as u128,
            });
        }
        Ok(())
    }
}

/// `q^n` without overflow (saturating at `u128::MAX`).
pub fn power(q: u64, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(q as u128);
    }
    acc
}

//! Size guards bounding every exhaustive enumeration.

use serde::Serialize;

use crate::error::Error;

/// Limits applied before any exponential enumeration starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Guards {
    /// Candidate subsets examined while enumerating ideals.
    pub max_subsets: u64,
    /// Candidate value tuples (or element pairs) examined while building
    /// section rings, localizations, and direct limits.
    pub max_sections: u64,
    /// Open covers examined per open set by the sheaf checker.
    pub max_covers: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            max_subsets: 1 << 20,
            max_sections: 1 << 20,
            max_covers: 4096,
        }
    }
}

impl Guards {
    pub(crate) fn subsets(&self, what: &'static str, count: u128) -> Result<(), Error> {
        check(what, count, self.max_subsets)
    }

    pub(crate) fn sections(&self, what: &'static str, count: u128) -> Result<(), Error> {
        check(what, count, self.max_sections)
    }
}

fn check(what: &'static str, count: u128, limit: u64) -> Result<(), Error> {
    if count > limit as u128 {
        Err(Error::SizeGuard { what, count, limit })
    } else {
        Ok(())
    }
}

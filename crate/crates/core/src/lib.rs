//! Exact obstructions for finite simple groups acting on mod-p homology spheres.

pub mod borelsolve;
pub mod catalog;
pub mod classify;
pub mod dimbounds;
pub mod gfield;
pub mod matgroup;

use serde::{Deserialize, Serialize};

/// Tally of an exhaustive identity check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub checked: usize,
    pub failures: usize,
}

impl SweepReport {
    pub fn record(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

//! Work limits shared by the computational modules.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::DEFAULT_FIELD_CAP;

#[derive(Clone, Debug, Serialize)]
pub struct Limits {
    /// Largest admissible `|A| = o_q(d_a)`.
    pub max_orbit_order: u64,
    /// Largest field that may be tabulated.
    pub max_field: u64,
    /// Largest field for the `O(Q^2)` direct Jacobi sum.
    pub direct_cap: u64,
    /// Fields up to this size get every fast-path value re-checked directly.
    pub spot_check_cap: u64,
    /// Work budget for brute-force point counts.
    pub brute_budget: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_orbit_order: 20,
            max_field: DEFAULT_FIELD_CAP,
            direct_cap: 1 << 12,
            spot_check_cap: 1 << 8,
            brute_budget: 100_000_000,
        }
    }
}

impl Limits {
    pub fn check_orbit(&self, q: u64, d_a: u64, order: u64) -> Result<()> {
        if order > self.max_orbit_order {
            return Err(Error::OrbitOrderCap { q, d_a, order, cap: self.max_orbit_order });
        }
        Ok(())
    }
}

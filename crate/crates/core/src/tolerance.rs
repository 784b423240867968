//! Global comparison tolerance.
//!
//! Every stability predicate reads "x > 0" as `x > eps()` and "x <= 0" as
//! `x <= eps()`. The default is `1e-9`; the CLI overrides it from
//! `MATCHKIT_EPS`.

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_EPS: f64 = 1e-9;

// f64 bits of 1e-9
static EPS_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695);

/// Current tolerance.
#[inline]
pub fn eps() -> f64 {
    f64::from_bits(EPS_BITS.load(Ordering::Relaxed))
}

/// Replaces the tolerance for the whole process. Non-finite or negative
/// values are rejected.
pub fn set_eps(value: f64) -> bool {
    if !value.is_finite() || value < 0.0 {
        return false;
    }
    EPS_BITS.store(value.to_bits(), Ordering::Relaxed);
    true
}

/// Reads `MATCHKIT_EPS` and installs it when present and valid.
pub fn init_from_env() -> Option<f64> {
    let raw = std::env::var("MATCHKIT_EPS").ok()?;
    let value: f64 = raw.trim().parse().ok()?;
    set_eps(value).then_some(value)
}

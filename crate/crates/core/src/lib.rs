//! Stable marriage across the transferability spectrum.
//!
//! The crate covers four views of the same `N` men / `N` women market:
//!
//! * [`nt`]: fully non-transferable stability (blocking pairs, Gale-Shapley,
//!   stable-set enumeration, men-optimality).
//! * [`ft`]: fully transferable stability (optimal assignment, cyclic
//!   monotonicity, dual cuts and their core check).
//! * [`pq`]: partial transfer governed by an inter-pair level `p` and an
//!   intra-pair level `q`, with blocking-chain detection, the non-existence
//!   family and a `(p, q)` plane sweep.
//! * [`coop`]: the cooperative-game view with five pairwise bargaining models
//!   and exact core search on tiny markets.
//!
//! Indices are 0-based throughout the API; human-facing output produced by
//! [`cli`] is 1-based with primed women (`1→2'`).

pub mod assignment;
pub mod cli;
pub mod coop;
pub mod cycles;
pub mod error;
pub mod ft;
pub mod instance;
pub mod lp;
pub mod nt;
pub mod perm;
pub mod pq;
pub mod sweep;
pub mod tolerance;

pub use error::{Error, Result};
pub use instance::{CutVector, Instance, Matching, Matrix, PQParams, RewardDist};
pub use tolerance::eps;

//! Compiler toolkit for zoned neutral-atom processors that executes
//! long-range CZ gates by hopping a single Rydberg excitation along
//! reconfigurable ancilla chains, reserving AOD motion for channel setup
//! and local adjustment.
//!
//! The crate is organized around the compilation pipeline:
//!
//! - [`circuit`]: gate-level IR, text format, benchmark generators, ASAP
//!   staging, and priority scores.
//! - [`hardware`]: zoned-array geometry, timing, and fidelity parameters.
//! - [`optim`]: assignment, independent-set, and shortest-path primitives.
//! - [`layout`]: qubit-to-site placement.
//! - [`routing`]: AOD move batching with conflict detection.
//! - [`channels`]: transport-chain configuration, static and per-stage.
//! - [`pipeline`]: the static, dynamic, and shuttle-only compilers.
//! - [`validate`]: schedule legality replay and fidelity estimation.

pub mod channels;
pub mod circuit;
pub mod error;
pub mod hardware;
pub mod layout;
pub mod optim;
pub mod pipeline;
pub mod routing;
pub mod validate;

pub use error::{Error, Result};

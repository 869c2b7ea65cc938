//! State-vector simulation of query algorithms against faulty oracles,
//! together with the robust oracle construction that suppresses the faults.
//!
//! The crate is `no_std` with `alloc`. File formats, the CLI and the
//! parallel experiment harness live in the `noisy-oracle` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bits;
pub mod checks;
pub mod circuit;
pub mod classical;
pub mod density;
pub mod error;
pub mod grover;
pub mod layout;
pub mod measure;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod robust;
pub mod walk;
pub mod state;
pub mod stats;

pub use bits::BitString;
pub use circuit::{Gate, QueryAlgorithm, Target};
pub use error::{Error, Result};
pub use layout::{Register, RegisterLayout};
pub use oracle::{FaultTrace, FaultyOracleConfig, TruthTable};
pub use robust::{compute_t, robustify, Level, RobustAlgorithm, RobustParams};
pub use state::{QubitRef, StateVector};

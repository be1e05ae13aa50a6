//! Constructive cycle-spectrum toolkit for Hamiltonian graphs with minimum
//! degree three. Given a Hamilton cycle and the chord set, the engine
//! produces a set of distinct cycle lengths with explicit witness routes,
//! checked by a single trusted realizer; brute-force oracles and seeded
//! generators back every structural step.

pub mod cli;
pub mod decompose;
pub mod engine;
pub mod error;
pub mod graph;
pub mod harvest;
pub mod pathforge;
pub mod report;
pub mod section;
pub mod sumset;
pub mod testbed;

pub use error::{Error, Result};

/// True when `CS_LOG` asks for verbose diagnostics.
pub fn verbose() -> bool {
    std::env::var("CS_LOG").map(|v| !v.is_empty() && v != "0").unwrap_or(false)
}

//! Core simulation library for Voville: a deterministic tile-world traffic
//! environment in which regulated agents run a four-stage decision pipeline
//! (perception, assessment, verdict, emulation) before breaking or keeping
//! traffic rules.
//!
//! The crate is `no_std` + `alloc`; everything that touches files, sockets or
//! threads lives in the companion `voville-cli` crate. All state evolution is
//! a pure function of (map, roster, scenario, condition, seed), which is what
//! makes byte-identical event logs possible.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod census;
pub mod geom;
pub mod judgment;
pub mod pave;
pub mod rng;
pub mod scenario;
pub mod telemetry;
pub mod world;

use alloc::string::String;

/// Crate-wide error type. Variants map onto the failure classes the public
/// operations can report (bad coordinates, malformed config, provider
/// breakdowns, incomplete logs).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("coordinate out of bounds: ({x}, {y})")]
    OutOfBounds { x: i32, y: i32 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("map parse error (line {line}): {msg}")]
    MapParse { line: usize, msg: String },
    #[error("judgment provider failure: {0}")]
    Provider(String),
    #[error("fatal provider error: {0}")]
    ProviderFatal(String),
    #[error("incomplete log: {0}")]
    IncompleteLog(String),
}

pub type Result<T> = core::result::Result<T, Error>;

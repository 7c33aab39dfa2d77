//! A workbench for durable software transactional memory.
//!
//! The crate models NOrec, its crash-tolerant variants and the memory
//! libraries they run on as enumerable input/output automata, and checks
//! them against opacity, durable opacity and durable linearizability, both
//! on sampled histories and by bounded forward-simulation model checking.

pub mod history;
pub mod ioa;
pub mod specs;
pub mod memlib;
pub mod norec;
pub mod checkers;
pub mod harness;

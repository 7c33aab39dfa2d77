//! Orchestration: seeded simulation with crash injection, bounded
//! exploration with invariant checks, simulation checks, history checking
//! and seed sweeps. The CLI is a thin layer over this module.

mod check;
mod config;
mod dispatch;
mod explore;
mod report;
mod simcheck;
mod simulate;
mod sweep;

pub use check::{am_object_for, check_history, check_text, checkfile, CheckKind, CheckOutcome, HARNESS_OP_CAP};
pub use config::{ConfigError, ImplKind, Mutant, Ratio, RunConfig};
pub use explore::{explore, explore_automaton, ExploreReport, StateInvariants, Summary};
pub use simcheck::{simcheck, AbstractKind, SimOutcome, SimcheckReport};
pub use simulate::{drive, render, simulate, trace_file_contents, write_trace, Simulation};
pub use sweep::{
    default_check, map_seeds, run_seed, sweep, trace_inclusion, Exec, SeedFailure, SweepReport,
};

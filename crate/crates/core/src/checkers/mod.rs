//! Decision procedures for opacity, durable opacity, linearizability and
//! durable linearizability over finite histories.
//!
//! Both searches are exhaustive over the definitions' witness space:
//! response extensions of pending operations and orders consistent with
//! real time. They prune with memoization on (placed set, object state),
//! so they are exact but exponential in the worst case; the size caps turn
//! runaway inputs into [`CheckError::TooLarge`].

mod linearizability;
mod opacity;
mod tm;

pub use linearizability::{
    check_durably_linearizable, check_linearizable, check_linearizable_with_cap,
    legal_sequential, revalidate_linearization, DEFAULT_OP_CAP,
};
pub use opacity::{
    check_durably_opaque, check_durably_opaque_with_cap, check_opaque, check_opaque_with_cap,
    end_to_end_opaque, revalidate_opacity, DEFAULT_TX_CAP,
};
pub use tm::{legal_tm, valid_at, valid_transactional};

use crate::history::History;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("history is not sequential")]
    NotSequential,
    #[error("history is not transaction sequential")]
    NotTransactionSequential,
    #[error("history contains a crash event")]
    ContainsCrash,
    #[error("history is not {0}")]
    IllFormed(&'static str),
    #[error("too large: {count} {what} exceeds the cap of {cap}")]
    TooLarge {
        what: &'static str,
        count: usize,
        cap: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    /// The equivalent sequential history, when accepted.
    pub witness: Option<History>,
    /// Length of the shortest prefix that fails, when rejected.
    pub failing_prefix: Option<usize>,
    pub note: String,
}

impl Verdict {
    pub fn accept(witness: History) -> Self {
        Verdict {
            accepted: true,
            witness: Some(witness),
            failing_prefix: None,
            note: String::new(),
        }
    }

    pub fn reject(failing_prefix: Option<usize>, note: impl Into<String>) -> Self {
        Verdict {
            accepted: false,
            witness: None,
            failing_prefix,
            note: note.into(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.accepted {
            f.write_str("ACCEPT")
        } else {
            f.write_str("REJECT")?;
            if let Some(n) = self.failing_prefix {
                write!(f, " at prefix {n}")?;
            }
            if !self.note.is_empty() {
                write!(f, ": {}", self.note)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests;

use crate::checkers::{
    check_durably_linearizable, check_durably_opaque_with_cap, check_linearizable_with_cap,
    check_opaque_with_cap, CheckError, Verdict, DEFAULT_TX_CAP,
};
use crate::history::{parse_history, Args, Event, History, RetVal};
use crate::specs::AmObject;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::config::ConfigError;

/// Operation cap for library histories produced by the harness.
pub const HARNESS_OP_CAP: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Opacity,
    DurableOpacity,
    Lin,
    DurableLin,
}

impl CheckKind {
    pub const ALL: [CheckKind; 4] = [
        CheckKind::Opacity,
        CheckKind::DurableOpacity,
        CheckKind::Lin,
        CheckKind::DurableLin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Opacity => "opacity",
            CheckKind::DurableOpacity => "durable-opacity",
            CheckKind::Lin => "lin",
            CheckKind::DurableLin => "durable-lin",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError::Unknown("check", s.to_string()))
    }
}

/// The AM object over the locations and values a library history mentions
/// (at least two values, so that reads under ownership are unconstrained).
pub fn am_object_for(h: &History) -> AmObject {
    let mut locs = 1u8;
    let mut vals = 2u8;
    let mut see_val = |v: u8| vals = vals.max(v + 1);
    for e in h {
        match e {
            Event::Inv { args: Args::Loc(l), .. } => locs = locs.max(l.0 + 1),
            Event::Inv { args: Args::WriteSet(ws), .. } => {
                for (l, v) in ws.iter() {
                    locs = locs.max(l.0 + 1);
                    see_val(v.0);
                }
            }
            Event::Res { rval: RetVal::Value(v), .. } => see_val(v.0),
            _ => {}
        }
    }
    AmObject::new(locs, vals)
}

/// Runs one checker. Transaction caps grow with the history so that the
/// harness never rejects a run for its size alone.
pub fn check_history(kind: CheckKind, h: &History) -> Result<Verdict, CheckError> {
    let tx_cap = DEFAULT_TX_CAP.max(h.transactions().len());
    match kind {
        CheckKind::Opacity => check_opaque_with_cap(h, tx_cap),
        CheckKind::DurableOpacity => check_durably_opaque_with_cap(h, tx_cap),
        CheckKind::Lin => check_linearizable_with_cap(h, &am_object_for(h), HARNESS_OP_CAP),
        CheckKind::DurableLin => check_durably_linearizable(h, &am_object_for(h), HARNESS_OP_CAP),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Accept(Verdict),
    Reject(Verdict),
    Error(String),
}

impl CheckOutcome {
    pub fn from_result(r: Result<Verdict, CheckError>) -> Self {
        match r {
            Ok(v) if v.accepted => CheckOutcome::Accept(v),
            Ok(v) => CheckOutcome::Reject(v),
            Err(e) => CheckOutcome::Error(e.to_string()),
        }
    }

    /// 0 on ACCEPT, 1 on REJECT, 2 on error or inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            CheckOutcome::Accept(_) => 0,
            CheckOutcome::Reject(_) => 1,
            CheckOutcome::Error(_) => 2,
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckOutcome::Accept(v) => {
                writeln!(f, "ACCEPT")?;
                if let Some(w) = &v.witness {
                    writeln!(f, "# witness")?;
                    write!(f, "{w}")?;
                }
                Ok(())
            }
            CheckOutcome::Reject(v) => writeln!(f, "{v}"),
            CheckOutcome::Error(e) => writeln!(f, "ERROR {e}"),
        }
    }
}

pub fn check_text(kind: CheckKind, text: &str) -> CheckOutcome {
    match parse_history(text) {
        Ok(h) => CheckOutcome::from_result(check_history(kind, &h)),
        Err(e) => CheckOutcome::Error(e.to_string()),
    }
}

pub fn checkfile(kind: CheckKind, path: &Path) -> CheckOutcome {
    match std::fs::read_to_string(path) {
        Ok(text) => check_text(kind, &text),
        Err(e) => CheckOutcome::Error(format!("{}: {e}", path.display())),
    }
}

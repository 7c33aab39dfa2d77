//! Line-based trace format:
//!
//! ```text
//! inv <tx> <op> [<loc>] [<val>]
//! res <tx> <op> <rval>
//! crash
//! ```
//!
//! Locations are written `x<i>`, values as integers, write sets as
//! `{x0:1,x1:0}`. Blank lines and lines starting with `#` are ignored.

use super::{Args, Event, History, Loc, OpName, PartialMap, RetVal, TxId, Val};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

pub fn format_history(h: &History) -> String {
    h.to_string()
}

pub fn parse_history(input: &str) -> Result<History, ParseError> {
    let mut events = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let event = parse_event(line).map_err(|message| ParseError {
            line: i + 1,
            message,
        })?;
        events.push(event);
    }
    Ok(History::new(events))
}

fn parse_event(line: &str) -> Result<Event, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    match fields.as_slice() {
        ["crash"] => Ok(Event::Crash),
        ["inv", tx, op, rest @ ..] => {
            let tx = parse_tx(tx)?;
            let op = parse_op(op)?;
            let args = parse_args(op, rest)?;
            Ok(Event::Inv { tx, op, args })
        }
        ["res", tx, op, rval] => {
            let tx = parse_tx(tx)?;
            let op = parse_op(op)?;
            let rval = parse_rval(rval)?;
            if !op.admits(&rval) {
                return Err(format!("{op} cannot return {rval}"));
            }
            Ok(Event::Res { tx, op, rval })
        }
        ["res", ..] => Err("expected `res <tx> <op> <rval>`".into()),
        _ => Err(format!("unrecognised event `{line}`")),
    }
}

fn parse_tx(s: &str) -> Result<TxId, String> {
    match s.parse::<u16>() {
        Ok(0) | Err(_) => Err(format!("bad transaction id `{s}`")),
        Ok(v) => Ok(TxId(v)),
    }
}

fn parse_op(s: &str) -> Result<OpName, String> {
    s.parse().map_err(|()| format!("unknown operation `{s}`"))
}

fn parse_loc(s: &str) -> Result<Loc, String> {
    s.strip_prefix('x')
        .and_then(|n| n.parse().ok())
        .map(Loc)
        .ok_or_else(|| format!("bad location `{s}`"))
}

fn parse_val(s: &str) -> Result<Val, String> {
    s.parse().map(Val).map_err(|_| format!("bad value `{s}`"))
}

fn parse_rval(s: &str) -> Result<RetVal, String> {
    match s {
        "ok" => Ok(RetVal::Ok),
        "abort" => Ok(RetVal::Abort),
        v => parse_val(v)
            .map(RetVal::Value)
            .map_err(|_| format!("bad return value `{s}`")),
    }
}

fn parse_write_set(s: &str) -> Result<PartialMap, String> {
    let inner = s
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| format!("bad write set `{s}`"))?;
    let mut ws = PartialMap::new();
    for entry in inner.split(',').filter(|e| !e.is_empty()) {
        let (l, v) = entry
            .split_once(':')
            .ok_or_else(|| format!("bad write-set entry `{entry}`"))?;
        let l = parse_loc(l)?;
        if ws.contains(l) {
            return Err(format!("duplicate location {l} in write set"));
        }
        ws.insert(l, parse_val(v)?);
    }
    Ok(ws)
}

fn parse_args(op: OpName, rest: &[&str]) -> Result<Args, String> {
    let args = match (op, rest) {
        (
            OpName::TMBegin
            | OpName::TMCommit
            | OpName::LibAcquire
            | OpName::LibRelease
            | OpName::LibRecovery,
            [],
        ) => Args::None,
        (OpName::TMRead | OpName::LibRead, [l]) => Args::Loc(parse_loc(l)?),
        (OpName::TMWrite, [l, v]) => Args::LocVal(parse_loc(l)?, parse_val(v)?),
        (OpName::LibCommit, [ws]) => Args::WriteSet(parse_write_set(ws)?),
        _ => return Err(format!("wrong arguments for {op}")),
    };
    Ok(args)
}

//! NOrec and its durable variants as automata.
//!
//! One automaton covers the family. With [`Backend::Flat`] it owns a memory
//! array and writes back location by location (NOrec, and cNOrec when
//! crashes are enabled). With [`Backend::Library`] every memory access is a
//! library call and the automaton is meant to be composed with a library
//! such as [`crate::memlib::Am`] or [`crate::memlib::Cm`]; see
//! [`build_cnorec_modular`].

mod invariant;
mod relation;

pub use invariant::{glb_parity, in_commit_region, norec_mutex_invariant};
pub use relation::{modular_relation, norec_pc_map, simulation_relation_r, AbstractView};

use crate::history::{Args, Event, Loc, Memory, OpName, PartialMap, RetVal, TxId, Val};
use crate::ioa::{Action, ActionKind, Automaton, IoaError, Line, Namespace, Product};
use std::marker::PhantomData;

/// Selects the validation rule at V5.
pub trait NorecVariant: Clone + Copy + std::fmt::Debug + Send + Sync + 'static {
    const NAME: &'static str;
    /// Abort at V5 only when `time = glb` still holds.
    const CHECK_TIME_AT_V5: bool;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Standard;

impl NorecVariant for Standard {
    const NAME: &'static str = "norec";
    const CHECK_TIME_AT_V5: bool = true;
}

/// Aborts on any value mismatch, even if a writer has since committed.
#[derive(Clone, Copy, Debug, Default)]
pub struct SkipV5GlbCheck;

impl NorecVariant for SkipV5GlbCheck {
    const NAME: &'static str = "skip-v5-glb-check";
    const CHECK_TIME_AT_V5: bool = false;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Flat,
    Library,
}

/// Where validation returns to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Caller {
    Read(Loc),
    Commit,
}

impl Caller {
    pub fn op(self) -> OpName {
        match self {
            Caller::Read(_) => OpName::TMRead,
            Caller::Commit => OpName::TMCommit,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resp {
    Begin,
    Read(Val),
    Write,
    Commit,
    Abort(Caller),
}

/// Program counter. `E4(i)`/`E5(i)` carry the write-back index in flat
/// mode; in library mode the index is always 0. The `*Wait` states wait for
/// a library response.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NorecPc {
    NotStarted,
    B1,
    B2,
    Ready,
    R1(Loc),
    R2(Loc),
    R2Wait(Loc),
    R3(Loc),
    R4(Loc),
    R5(Loc),
    R5Wait(Loc),
    R6(Loc),
    W1(Loc, Val),
    E1,
    E2,
    E3,
    E4(u8),
    E4Wait,
    E5(u8),
    E5Wait,
    E6,
    E6Wait,
    E7,
    V1(Caller),
    V2(Caller),
    V3(Caller),
    V4(Caller, u8),
    V5(Caller, u8),
    V5Wait(Caller, u8),
    V5Cmp(Caller, u8, Val),
    V6(Caller),
    Respond(Resp),
    Committed,
    Aborted,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NorecTx {
    pub pc: NorecPc,
    pub loc: u8,
    pub time: u8,
    pub v: Val,
    pub rd: PartialMap,
    pub wr: PartialMap,
}

impl NorecTx {
    fn fresh() -> Self {
        NorecTx {
            pc: NorecPc::NotStarted,
            loc: 0,
            time: 0,
            v: Val(0),
            rd: PartialMap::new(),
            wr: PartialMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NorecState {
    pub glb: u8,
    /// Empty in library mode.
    pub mem: Memory,
    pub txs: Vec<NorecTx>,
}

impl NorecState {
    pub fn tx(&self, t: TxId) -> &NorecTx {
        &self.txs[t.index()]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Norec<V: NorecVariant = Standard> {
    pub locs: u8,
    pub vals: u8,
    pub txs: u16,
    pub crashes: bool,
    pub backend: Backend,
    _variant: PhantomData<V>,
}

impl<V: NorecVariant> Norec<V> {
    fn make(locs: u8, vals: u8, txs: u16, crashes: bool, backend: Backend) -> Self {
        Norec {
            locs,
            vals,
            txs,
            crashes,
            backend,
            _variant: PhantomData,
        }
    }

    /// Volatile NOrec: no crash action.
    pub fn norec(locs: u8, vals: u8, txs: u16) -> Self {
        Self::make(locs, vals, txs, false, Backend::Flat)
    }

    /// cNOrec: NOrec over persistent memory with crash recovery.
    pub fn cnorec(locs: u8, vals: u8, txs: u16) -> Self {
        Self::make(locs, vals, txs, true, Backend::Flat)
    }

    /// The TM half of cNOrec[L]: memory accesses go through library calls.
    pub fn modular(locs: u8, vals: u8, txs: u16) -> Self {
        Self::make(locs, vals, txs, true, Backend::Library)
    }

    pub fn initial(&self) -> NorecState {
        NorecState {
            glb: 0,
            mem: match self.backend {
                Backend::Flat => Memory::zeroed(self.locs),
                Backend::Library => Memory::zeroed(0),
            },
            txs: vec![NorecTx::fresh(); usize::from(self.txs)],
        }
    }

    pub fn crash(&self, s: &NorecState) -> NorecState {
        let mut s2 = s.clone();
        s2.glb = 0;
        for tx in &mut s2.txs {
            if !matches!(tx.pc, NorecPc::NotStarted | NorecPc::Committed) {
                tx.pc = NorecPc::Aborted;
            }
        }
        s2
    }

    fn covers(&self, t: TxId) -> bool {
        (1..=self.txs).contains(&t.0)
    }

    fn library(&self) -> bool {
        self.backend == Backend::Library
    }

    fn tx_steps(&self, s: &NorecState, i: usize, out: &mut Vec<(Action, NorecState)>) {
        let t = TxId::from_index(i);
        let tx = &s.txs[i];
        let line = |l: Line| Action::line(Namespace::NOrec, t, l);
        let inv = |op, args| Action::from(Event::inv(t, op, args));
        let res = |op, rv| Action::from(Event::res(t, op, rv));
        let goto = |pc: NorecPc| {
            let mut s2 = s.clone();
            s2.txs[i].pc = pc;
            s2
        };
        let update = |f: &dyn Fn(&mut NorecState, &mut NorecTx)| {
            let mut s2 = s.clone();
            let mut tx2 = s2.txs[i].clone();
            f(&mut s2, &mut tx2);
            s2.txs[i] = tx2;
            s2
        };

        match tx.pc {
            NorecPc::NotStarted => {
                out.push((inv(OpName::TMBegin, Args::None), goto(NorecPc::B1)));
            }
            NorecPc::B1 => out.push((
                line(Line::B1),
                update(&|s, tx| {
                    tx.loc = s.glb;
                    tx.pc = NorecPc::B2;
                }),
            )),
            NorecPc::B2 => {
                let next = if tx.loc % 2 == 0 {
                    NorecPc::Respond(Resp::Begin)
                } else {
                    NorecPc::B1
                };
                out.push((line(Line::B2), goto(next)));
            }
            NorecPc::Ready => {
                for l in Loc::all(self.locs) {
                    out.push((inv(OpName::TMRead, Args::Loc(l)), goto(NorecPc::R1(l))));
                    for v in Val::all(self.vals) {
                        out.push((
                            inv(OpName::TMWrite, Args::LocVal(l, v)),
                            goto(NorecPc::W1(l, v)),
                        ));
                    }
                }
                out.push((inv(OpName::TMCommit, Args::None), goto(NorecPc::E1)));
            }
            NorecPc::R1(l) => {
                let next = match tx.wr.get(l) {
                    Some(v) => NorecPc::Respond(Resp::Read(v)),
                    None => NorecPc::R2(l),
                };
                out.push((line(Line::R1), goto(next)));
            }
            NorecPc::R2(l) | NorecPc::R5(l) => {
                let (ln, wait) = match tx.pc {
                    NorecPc::R2(_) => (Line::R2, NorecPc::R2Wait(l)),
                    _ => (Line::R5, NorecPc::R5Wait(l)),
                };
                if self.library() {
                    out.push((inv(OpName::LibRead, Args::Loc(l)), goto(wait)));
                } else {
                    let v = s.mem.get(l);
                    out.push((
                        line(ln),
                        update(&|_, tx| {
                            tx.v = v;
                            tx.pc = NorecPc::R3(l);
                        }),
                    ));
                }
            }
            NorecPc::R2Wait(l) | NorecPc::R5Wait(l) => {
                for v in Val::all(self.vals) {
                    out.push((
                        res(OpName::LibRead, RetVal::Value(v)),
                        update(&|_, tx| {
                            tx.v = v;
                            tx.pc = NorecPc::R3(l);
                        }),
                    ));
                }
            }
            NorecPc::R3(l) => {
                let next = if tx.loc != s.glb {
                    NorecPc::V1(Caller::Read(l))
                } else {
                    NorecPc::R6(l)
                };
                out.push((line(Line::R3), goto(next)));
            }
            NorecPc::R4(l) => out.push((
                line(Line::R4),
                update(&|_, tx| {
                    tx.loc = tx.time;
                    tx.pc = NorecPc::R5(l);
                }),
            )),
            NorecPc::R6(l) => out.push((
                line(Line::R6),
                update(&|_, tx| {
                    tx.rd.insert(l, tx.v);
                    tx.pc = NorecPc::Respond(Resp::Read(tx.v));
                }),
            )),
            NorecPc::W1(l, v) => out.push((
                line(Line::W1),
                update(&|_, tx| {
                    tx.wr.insert(l, v);
                    tx.pc = NorecPc::Respond(Resp::Write);
                }),
            )),
            NorecPc::E1 => {
                let next = if tx.wr.is_empty() {
                    NorecPc::Respond(Resp::Commit)
                } else {
                    NorecPc::E2
                };
                out.push((line(Line::E1), goto(next)));
            }
            NorecPc::E2 => {
                if s.glb == tx.loc {
                    out.push((
                        line(Line::E2),
                        update(&|s, tx| {
                            s.glb = tx.loc + 1;
                            tx.pc = NorecPc::E4(0);
                        }),
                    ));
                } else {
                    out.push((line(Line::E2), goto(NorecPc::V1(Caller::Commit))));
                }
            }
            NorecPc::E3 => out.push((
                line(Line::E3),
                update(&|_, tx| {
                    tx.loc = tx.time;
                    tx.pc = NorecPc::E2;
                }),
            )),
            NorecPc::E4(k) => {
                if self.library() {
                    out.push((inv(OpName::LibAcquire, Args::None), goto(NorecPc::E4Wait)));
                } else {
                    let next = if usize::from(k) < tx.wr.len() {
                        NorecPc::E5(k)
                    } else {
                        NorecPc::E6
                    };
                    out.push((line(Line::E4), goto(next)));
                }
            }
            NorecPc::E4Wait => {
                out.push((res(OpName::LibAcquire, RetVal::Ok), goto(NorecPc::E5(0))));
            }
            NorecPc::E5(k) => {
                if self.library() {
                    out.push((
                        inv(OpName::LibCommit, Args::WriteSet(tx.wr.clone())),
                        goto(NorecPc::E5Wait),
                    ));
                } else {
                    let (l, v) = tx.wr.nth(usize::from(k)).expect("index within write set");
                    out.push((
                        line(Line::E5),
                        update(&|s, tx| {
                            s.mem.set(l, v);
                            tx.pc = NorecPc::E4(k + 1);
                        }),
                    ));
                }
            }
            NorecPc::E5Wait => {
                out.push((res(OpName::LibCommit, RetVal::Ok), goto(NorecPc::E6)));
            }
            NorecPc::E6 => {
                if self.library() {
                    out.push((inv(OpName::LibRelease, Args::None), goto(NorecPc::E6Wait)));
                } else {
                    out.push((
                        line(Line::E6),
                        update(&|s, tx| {
                            s.glb = tx.loc + 2;
                            tx.pc = NorecPc::Respond(Resp::Commit);
                        }),
                    ));
                }
            }
            NorecPc::E6Wait => {
                out.push((res(OpName::LibRelease, RetVal::Ok), goto(NorecPc::E7)));
            }
            NorecPc::E7 => out.push((
                line(Line::E7),
                update(&|s, tx| {
                    s.glb = tx.loc + 2;
                    tx.pc = NorecPc::Respond(Resp::Commit);
                }),
            )),
            NorecPc::V1(c) => out.push((line(Line::V1), goto(NorecPc::V2(c)))),
            NorecPc::V2(c) => out.push((
                line(Line::V2),
                update(&|s, tx| {
                    tx.time = s.glb;
                    tx.pc = NorecPc::V3(c);
                }),
            )),
            NorecPc::V3(c) => {
                let next = if tx.time % 2 == 1 {
                    NorecPc::V2(c)
                } else {
                    NorecPc::V4(c, 0)
                };
                out.push((line(Line::V3), goto(next)));
            }
            NorecPc::V4(c, k) => {
                let next = if usize::from(k) < tx.rd.len() {
                    NorecPc::V5(c, k)
                } else {
                    NorecPc::V6(c)
                };
                out.push((line(Line::V4), goto(next)));
            }
            NorecPc::V5(c, k) => {
                let (l, val) = tx.rd.nth(usize::from(k)).expect("index within read set");
                if self.library() {
                    out.push((inv(OpName::LibRead, Args::Loc(l)), goto(NorecPc::V5Wait(c, k))));
                } else {
                    let next = self.v5_outcome(s, tx, c, k, s.mem.get(l) != val);
                    out.push((line(Line::V5), goto(next)));
                }
            }
            NorecPc::V5Wait(c, k) => {
                for v in Val::all(self.vals) {
                    out.push((
                        res(OpName::LibRead, RetVal::Value(v)),
                        goto(NorecPc::V5Cmp(c, k, v)),
                    ));
                }
            }
            NorecPc::V5Cmp(c, k, v) => {
                let (_, val) = tx.rd.nth(usize::from(k)).expect("index within read set");
                let next = self.v5_outcome(s, tx, c, k, v != val);
                out.push((line(Line::V5), goto(next)));
            }
            NorecPc::V6(c) => {
                let next = if tx.time == s.glb {
                    match c {
                        Caller::Read(l) => NorecPc::R4(l),
                        Caller::Commit => NorecPc::E3,
                    }
                } else {
                    NorecPc::V2(c)
                };
                out.push((line(Line::V6), goto(next)));
            }
            NorecPc::Respond(r) => {
                let (op, rv, next) = match r {
                    Resp::Begin => (OpName::TMBegin, RetVal::Ok, NorecPc::Ready),
                    Resp::Read(v) => (OpName::TMRead, RetVal::Value(v), NorecPc::Ready),
                    Resp::Write => (OpName::TMWrite, RetVal::Ok, NorecPc::Ready),
                    Resp::Commit => (OpName::TMCommit, RetVal::Ok, NorecPc::Committed),
                    Resp::Abort(c) => (c.op(), RetVal::Abort, NorecPc::Aborted),
                };
                out.push((res(op, rv), goto(next)));
            }
            NorecPc::Committed | NorecPc::Aborted => {}
        }
    }

    fn v5_outcome(&self, s: &NorecState, tx: &NorecTx, c: Caller, k: u8, differs: bool) -> NorecPc {
        if differs && (!V::CHECK_TIME_AT_V5 || tx.time == s.glb) {
            NorecPc::Respond(Resp::Abort(c))
        } else {
            NorecPc::V4(c, k + 1)
        }
    }
}

impl<V: NorecVariant> Automaton for Norec<V> {
    type State = NorecState;

    fn start_states(&self) -> Vec<NorecState> {
        vec![self.initial()]
    }

    fn transitions(&self, s: &NorecState) -> Vec<(Action, NorecState)> {
        let mut out = Vec::new();
        for i in 0..s.txs.len() {
            self.tx_steps(s, i, &mut out);
        }
        if self.crashes {
            out.push((Action::crash(), self.crash(s)));
        }
        out
    }

    fn classify(&self, a: &Action) -> Option<ActionKind> {
        match a {
            Action::Event(Event::Crash) => self.crashes.then_some(ActionKind::Input),
            Action::Event(e @ (Event::Inv { tx, op, .. } | Event::Res { tx, op, .. }))
                if self.covers(*tx) =>
            {
                let is_inv = matches!(e, Event::Inv { .. });
                if op.is_transactional() {
                    Some(if is_inv {
                        ActionKind::Input
                    } else {
                        ActionKind::Output
                    })
                } else if self.library() && op.is_library() && *op != OpName::LibRecovery {
                    Some(if is_inv {
                        ActionKind::Output
                    } else {
                        ActionKind::Input
                    })
                } else {
                    None
                }
            }
            Action::Internal(i) if i.ns == Namespace::NOrec && self.covers(i.tx) => {
                Some(ActionKind::Internal)
            }
            _ => None,
        }
    }

    fn namespaces(&self) -> Vec<Namespace> {
        vec![Namespace::NOrec]
    }
}

/// cNOrec[L]: the library-mode TM composed with `lib`. The library must
/// accept every library call the TM makes and the crash action.
pub fn build_cnorec_modular<V: NorecVariant, L: Automaton>(
    tm: Norec<V>,
    lib: L,
) -> Result<Product<Norec<V>, L>, IoaError> {
    let t = TxId(1);
    let l = Loc(0);
    let required: [(Action, &str); 9] = [
        (Event::inv(t, OpName::LibRead, Args::Loc(l)).into(), "LibRead invocation"),
        (Event::res(t, OpName::LibRead, RetVal::Value(Val(0))).into(), "LibRead response"),
        (Event::inv(t, OpName::LibAcquire, Args::None).into(), "LibAcquire invocation"),
        (Event::res(t, OpName::LibAcquire, RetVal::Ok).into(), "LibAcquire response"),
        (
            Event::inv(t, OpName::LibCommit, Args::WriteSet(PartialMap::new().with(l, Val(0))))
                .into(),
            "LibCommit invocation",
        ),
        (Event::res(t, OpName::LibCommit, RetVal::Ok).into(), "LibCommit response"),
        (Event::inv(t, OpName::LibRelease, Args::None).into(), "LibRelease invocation"),
        (Event::res(t, OpName::LibRelease, RetVal::Ok).into(), "LibRelease response"),
        (Action::crash(), "crash"),
    ];
    for (a, name) in required {
        if !lib.is_external(&a) {
            return Err(IoaError::MissingAction(name.to_string()));
        }
    }
    Product::new(tm, lib)
}

#[cfg(test)]
mod tests;

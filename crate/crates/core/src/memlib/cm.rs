use crate::history::{Args, Event, Loc, Memory, OpName, PartialMap, RetVal, TxId, Val};
use crate::ioa::{Action, ActionKind, Automaton, Line, Namespace};
use std::fmt::Write as _;
use std::marker::PhantomData;

/// Compile-time selection between the verified library and its mutants.
pub trait CmVariant: Clone + Copy + std::fmt::Debug + Send + Sync + 'static {
    const NAME: &'static str;
    /// W4 records the old value in the undo log.
    const LOG_OLD_VALUES: bool;
    /// Recovery applies the undo log to persistent memory.
    const RESTORE_FROM_LOG: bool;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Faithful;

impl CmVariant for Faithful {
    const NAME: &'static str = "cm";
    const LOG_OLD_VALUES: bool = true;
    const RESTORE_FROM_LOG: bool = true;
}

/// Mutant: W4 does not log.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoUndoLog;

impl CmVariant for NoUndoLog {
    const NAME: &'static str = "no-undo-log";
    const LOG_OLD_VALUES: bool = false;
    const RESTORE_FROM_LOG: bool = true;
}

/// Mutant: recovery reloads persistent memory without undoing.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoRecoveryRestore;

impl CmVariant for NoRecoveryRestore {
    const NAME: &'static str = "no-recovery-restore";
    const LOG_OLD_VALUES: bool = true;
    const RESTORE_FROM_LOG: bool = false;
}

/// How W2 resolves its `SOME l ∈ dom(wrSet)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum W2Choice {
    /// Every location is a successor (exploration).
    #[default]
    Exhaustive,
    /// The least location only (replayable runs).
    Least,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmPc {
    NotStarted,
    Ready,
    DoAcquire,
    ResAcquire,
    DoRelease,
    ResRelease,
    R1(Loc),
    ResRead(Val),
    W1(PartialMap),
    W2(PartialMap),
    W3(PartialMap, Loc),
    W4(PartialMap, Loc),
    W5(PartialMap, Loc),
    W6(PartialMap, Loc),
    W7(PartialMap, Loc),
    W8,
    ResCommit,
    Crashed,
}

impl CmPc {
    /// `pc ∈ W1..W8`.
    pub fn in_write_back(&self) -> bool {
        matches!(
            self,
            CmPc::W1(_)
                | CmPc::W2(_)
                | CmPc::W3(..)
                | CmPc::W4(..)
                | CmPc::W5(..)
                | CmPc::W6(..)
                | CmPc::W7(..)
                | CmPc::W8
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CmThread {
    pub pc: CmPc,
    pub oldv: Val,
    /// Auxiliary: the write set the running commit was invoked with.
    pub input: PartialMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CmState {
    pub vmem: Memory,
    pub pmem: Memory,
    pub log: PartialMap,
    pub owns: Option<TxId>,
    pub threads: Vec<CmThread>,
}

impl CmState {
    pub fn thread(&self, t: TxId) -> &CmThread {
        &self.threads[t.index()]
    }

    /// `vmem ⊕ log`, the memory as of the start of the running commit.
    pub fn snapshot(&self) -> Memory {
        self.vmem.overridden(&self.log)
    }
}

/// The concrete memory library over volatile and persistent memory with an
/// undo log.
#[derive(Clone, Copy, Debug)]
pub struct Cm<V: CmVariant = Faithful> {
    pub locs: u8,
    pub vals: u8,
    pub threads: u16,
    pub w2: W2Choice,
    _variant: PhantomData<V>,
}

impl<V: CmVariant> Cm<V> {
    pub fn new(locs: u8, vals: u8, threads: u16) -> Self {
        Cm {
            locs,
            vals,
            threads,
            w2: W2Choice::Exhaustive,
            _variant: PhantomData,
        }
    }

    pub fn with_w2(mut self, w2: W2Choice) -> Self {
        self.w2 = w2;
        self
    }

    pub fn initial(&self) -> CmState {
        CmState {
            vmem: Memory::zeroed(self.locs),
            pmem: Memory::zeroed(self.locs),
            log: PartialMap::new(),
            owns: None,
            threads: vec![
                CmThread {
                    pc: CmPc::NotStarted,
                    oldv: Val(0),
                    input: PartialMap::new(),
                };
                usize::from(self.threads)
            ],
        }
    }

    /// The crashRecovery effect: `vmem := pmem ⊕ log`, with the undo also
    /// written to persistent memory.
    pub fn crash(&self, s: &CmState) -> CmState {
        let mut s2 = s.clone();
        // the undo is persistent: pmem is rolled back along with vmem
        if V::RESTORE_FROM_LOG {
            s2.pmem = s.pmem.overridden(&s.log);
        }
        s2.vmem = s2.pmem.clone();
        s2.log = PartialMap::new();
        s2.owns = None;
        for th in &mut s2.threads {
            if !matches!(th.pc, CmPc::NotStarted | CmPc::Ready) {
                th.pc = CmPc::Crashed;
            }
        }
        s2
    }

    fn covers(&self, t: TxId) -> bool {
        (1..=self.threads).contains(&t.0)
    }
}

impl<V: CmVariant> Automaton for Cm<V> {
    type State = CmState;

    fn start_states(&self) -> Vec<CmState> {
        vec![self.initial()]
    }

    fn transitions(&self, s: &CmState) -> Vec<(Action, CmState)> {
        let mut out = Vec::new();
        for (i, th) in s.threads.iter().enumerate() {
            let t = TxId::from_index(i);
            let set = |pc: CmPc| {
                let mut s2 = s.clone();
                s2.threads[i].pc = pc;
                s2
            };
            let line = |l| Action::line(Namespace::Cm, t, l);
            let inv = |op, args| Action::from(Event::inv(t, op, args));
            let res = |op, rv| Action::from(Event::res(t, op, rv));
            match &th.pc {
                CmPc::NotStarted => out.push((Action::Run(t), set(CmPc::Ready))),
                CmPc::Ready => {
                    out.push((inv(OpName::LibAcquire, Args::None), set(CmPc::DoAcquire)));
                    out.push((inv(OpName::LibRelease, Args::None), set(CmPc::DoRelease)));
                    for l in Loc::all(self.locs) {
                        out.push((inv(OpName::LibRead, Args::Loc(l)), set(CmPc::R1(l))));
                    }
                    if s.owns == Some(t) {
                        for ws in PartialMap::enumerate(self.locs, self.vals) {
                            let mut s2 = set(CmPc::W1(ws.clone()));
                            s2.threads[i].input = ws.clone();
                            out.push((inv(OpName::LibCommit, Args::WriteSet(ws)), s2));
                        }
                    }
                }
                CmPc::DoAcquire if s.owns.is_none() => {
                    let mut s2 = set(CmPc::ResAcquire);
                    s2.owns = Some(t);
                    out.push((line(Line::DoAcquire), s2));
                }
                CmPc::DoRelease if s.owns == Some(t) => {
                    let mut s2 = set(CmPc::ResRelease);
                    s2.owns = None;
                    out.push((line(Line::DoRelease), s2));
                }
                CmPc::R1(l) => {
                    if s.owns.is_none() {
                        out.push((line(Line::R1), set(CmPc::ResRead(s.vmem.get(*l)))));
                    } else {
                        for v in Val::all(self.vals) {
                            out.push((line(Line::R1), set(CmPc::ResRead(v))));
                        }
                    }
                }
                CmPc::W1(ws) => {
                    let next = if ws.is_empty() {
                        CmPc::W8
                    } else {
                        CmPc::W2(ws.clone())
                    };
                    out.push((line(Line::W1), set(next)));
                }
                CmPc::W2(ws) => {
                    let locs: Vec<Loc> = match self.w2 {
                        W2Choice::Exhaustive => ws.keys().collect(),
                        W2Choice::Least => ws.first_key().into_iter().collect(),
                    };
                    for l in locs {
                        out.push((line(Line::W2), set(CmPc::W3(ws.clone(), l))));
                    }
                }
                CmPc::W3(ws, l) => {
                    let mut s2 = set(CmPc::W4(ws.clone(), *l));
                    s2.threads[i].oldv = s.vmem.get(*l);
                    out.push((line(Line::W3), s2));
                }
                CmPc::W4(ws, l) => {
                    let mut s2 = set(CmPc::W5(ws.clone(), *l));
                    if V::LOG_OLD_VALUES {
                        s2.log.insert(*l, th.oldv);
                    }
                    out.push((line(Line::W4), s2));
                }
                CmPc::W5(ws, l) => {
                    let mut s2 = set(CmPc::W6(ws.clone(), *l));
                    s2.vmem.set(*l, ws.get(*l).expect("W2 picked from dom(wrSet)"));
                    out.push((line(Line::W5), s2));
                }
                CmPc::W6(ws, l) => {
                    let mut s2 = set(CmPc::W7(ws.clone(), *l));
                    s2.pmem.set(*l, s.vmem.get(*l));
                    out.push((line(Line::W6), s2));
                }
                CmPc::W7(ws, l) => out.push((line(Line::W7), set(CmPc::W1(ws.without(*l))))),
                CmPc::W8 => {
                    let mut s2 = set(CmPc::ResCommit);
                    s2.log = PartialMap::new();
                    out.push((line(Line::W8), s2));
                }
                CmPc::ResAcquire => out.push((res(OpName::LibAcquire, RetVal::Ok), set(CmPc::Ready))),
                CmPc::ResRelease => out.push((res(OpName::LibRelease, RetVal::Ok), set(CmPc::Ready))),
                CmPc::ResRead(v) => {
                    out.push((res(OpName::LibRead, RetVal::Value(*v)), set(CmPc::Ready)))
                }
                CmPc::ResCommit => {
                    let mut s2 = set(CmPc::Ready);
                    s2.threads[i].input = PartialMap::new();
                    out.push((res(OpName::LibCommit, RetVal::Ok), s2));
                }
                _ => {}
            }
        }
        out.push((Action::crash(), self.crash(s)));
        out
    }

    fn classify(&self, a: &Action) -> Option<ActionKind> {
        match a {
            Action::Event(Event::Crash) => Some(ActionKind::Input),
            Action::Run(t) if self.covers(*t) => Some(ActionKind::Input),
            Action::Event(Event::Inv { tx, op, .. }) if self.covers(*tx) => {
                (op.is_library() && *op != OpName::LibRecovery).then_some(ActionKind::Input)
            }
            Action::Event(Event::Res { tx, op, .. }) if self.covers(*tx) => {
                (op.is_library() && *op != OpName::LibRecovery).then_some(ActionKind::Output)
            }
            Action::Internal(i) if i.ns == Namespace::Cm => Some(ActionKind::Internal),
            _ => None,
        }
    }

    fn namespaces(&self) -> Vec<Namespace> {
        vec![Namespace::Cm]
    }

    fn show(&self, s: &CmState) -> String {
        let mut out = format!(
            "vmem={} pmem={} log={} owns={}",
            s.vmem,
            s.pmem,
            s.log,
            s.owns.map_or("_".to_string(), |t| t.to_string())
        );
        for (i, th) in s.threads.iter().enumerate() {
            let _ = write!(out, " t{}:{:?}", i + 1, th.pc);
        }
        out
    }
}

/// `if owns = ⊥ then vmem = pmem ∧ log = ∅ else vmem ⊕ log = pmem ⊕ log`.
pub fn cm_global_invariant(s: &CmState) -> bool {
    match s.owns {
        None => s.vmem == s.pmem && s.log.is_empty(),
        Some(_) => s.vmem.overridden(&s.log) == s.pmem.overridden(&s.log),
    }
}

/// The rely condition for thread `t` over a step `s → s2` of another thread.
pub fn cm_rely(t: TxId, s: &CmState, s2: &CmState) -> bool {
    if s.owns == Some(t) {
        s.vmem == s2.vmem && s.pmem == s2.pmem && s.owns == s2.owns && s.log == s2.log
    } else {
        s2.owns != Some(t)
    }
}

/// Local assertion: a thread inside W1..W8 owns the library.
pub fn cm_ownership_assertion(s: &CmState) -> bool {
    s.threads
        .iter()
        .enumerate()
        .all(|(i, th)| !th.pc.in_write_back() || s.owns == Some(TxId::from_index(i)))
}

/// Recovery from `s` restores the snapshot taken at the start of the
/// running commit.
pub fn cm_recoverable<V: CmVariant>(cm: &Cm<V>, s: &CmState) -> bool {
    cm.crash(s).vmem == s.snapshot()
}

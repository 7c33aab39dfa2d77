use crate::history::{Args, Event, Loc, Memory, OpName, PartialMap, RetVal, TxId, Val};
use crate::ioa::{Action, ActionKind, Automaton, Namespace, Step};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dtms2Pc {
    NotStarted,
    BeginPending,
    Ready,
    DoRead(Loc),
    ResRead(Val),
    DoWrite(Loc, Val),
    ResWrite,
    DoCommit,
    ResCommit,
    Committed,
    Aborted,
    /// Listed among the pc values but produced by no action.
    CancelPending,
}

impl Dtms2Pc {
    /// The operation a pending abort response belongs to.
    fn pending_op(self) -> Option<OpName> {
        match self {
            Dtms2Pc::BeginPending => Some(OpName::TMBegin),
            Dtms2Pc::DoRead(_) | Dtms2Pc::ResRead(_) => Some(OpName::TMRead),
            Dtms2Pc::DoWrite(..) | Dtms2Pc::ResWrite => Some(OpName::TMWrite),
            Dtms2Pc::DoCommit | Dtms2Pc::CancelPending => Some(OpName::TMCommit),
            _ => None,
        }
    }

    pub fn is_live(self) -> bool {
        !matches!(
            self,
            Dtms2Pc::NotStarted | Dtms2Pc::Committed | Dtms2Pc::Aborted
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dtms2Tx {
    pub pc: Dtms2Pc,
    pub begin_idx: u8,
    pub rd: PartialMap,
    pub wr: PartialMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dtms2State {
    pub mems: Vec<Memory>,
    pub txs: Vec<Dtms2Tx>,
}

impl Dtms2State {
    pub fn last_mem(&self) -> &Memory {
        self.mems.last().expect("mems is never empty")
    }

    pub fn tx(&self, t: TxId) -> &Dtms2Tx {
        &self.txs[t.index()]
    }

    /// `validIdx(t, n)`.
    pub fn valid_idx(&self, t: TxId, n: usize) -> bool {
        let tx = self.tx(t);
        usize::from(tx.begin_idx) <= n && n < self.mems.len() && tx.rd.subset_of(&self.mems[n])
    }
}

/// dTMS2 over transactions `1..=txs`; with `durable = false` it is TMS2.
#[derive(Clone, Copy, Debug)]
pub struct Dtms2 {
    pub locs: u8,
    pub vals: u8,
    pub txs: u16,
    pub durable: bool,
}

impl Dtms2 {
    pub fn new(locs: u8, vals: u8, txs: u16) -> Self {
        Dtms2 {
            locs,
            vals,
            txs,
            durable: true,
        }
    }

    pub fn tms2(locs: u8, vals: u8, txs: u16) -> Self {
        Dtms2 {
            durable: false,
            ..Dtms2::new(locs, vals, txs)
        }
    }

    pub fn initial(&self) -> Dtms2State {
        Dtms2State {
            mems: vec![Memory::zeroed(self.locs)],
            txs: vec![
                Dtms2Tx {
                    pc: Dtms2Pc::NotStarted,
                    begin_idx: 0,
                    rd: PartialMap::new(),
                    wr: PartialMap::new(),
                };
                usize::from(self.txs)
            ],
        }
    }

    fn covers(&self, t: TxId) -> bool {
        (1..=self.txs).contains(&t.0)
    }

    fn tau(t: TxId, step: Step) -> Action {
        Action::internal(Namespace::Dtms2, t, step)
    }
}

fn index_u8(n: usize) -> u8 {
    u8::try_from(n).expect("memory sequence index fits u8")
}

impl Automaton for Dtms2 {
    type State = Dtms2State;

    fn start_states(&self) -> Vec<Dtms2State> {
        vec![self.initial()]
    }

    fn transitions(&self, s: &Dtms2State) -> Vec<(Action, Dtms2State)> {
        let mut out = Vec::new();
        for i in 0..s.txs.len() {
            let t = TxId::from_index(i);
            let tx = &s.txs[i];
            let with = |f: &dyn Fn(&mut Dtms2Tx)| {
                let mut s2 = s.clone();
                f(&mut s2.txs[i]);
                s2
            };
            let set_pc = |pc: Dtms2Pc| with(&|x| x.pc = pc);
            let inv = |op, args| Action::from(Event::inv(t, op, args));
            let res = |op, rv| Action::from(Event::res(t, op, rv));
            match tx.pc {
                Dtms2Pc::NotStarted => {
                    let idx = index_u8(s.mems.len() - 1);
                    out.push((
                        inv(OpName::TMBegin, Args::None),
                        with(&|x| {
                            x.pc = Dtms2Pc::BeginPending;
                            x.begin_idx = idx;
                        }),
                    ));
                }
                Dtms2Pc::BeginPending => {
                    out.push((res(OpName::TMBegin, RetVal::Ok), set_pc(Dtms2Pc::Ready)))
                }
                Dtms2Pc::Ready => {
                    for l in Loc::all(self.locs) {
                        out.push((inv(OpName::TMRead, Args::Loc(l)), set_pc(Dtms2Pc::DoRead(l))));
                    }
                    for l in Loc::all(self.locs) {
                        for v in Val::all(self.vals) {
                            out.push((
                                inv(OpName::TMWrite, Args::LocVal(l, v)),
                                set_pc(Dtms2Pc::DoWrite(l, v)),
                            ));
                        }
                    }
                    out.push((inv(OpName::TMCommit, Args::None), set_pc(Dtms2Pc::DoCommit)));
                }
                Dtms2Pc::DoRead(l) => {
                    if let Some(v) = tx.wr.get(l) {
                        // any index satisfies the guard; one label stands for all
                        let index = index_u8(s.mems.len() - 1);
                        out.push((
                            Self::tau(t, Step::DoRead { loc: l, index }),
                            set_pc(Dtms2Pc::ResRead(v)),
                        ));
                    } else {
                        for n in usize::from(tx.begin_idx)..s.mems.len() {
                            if s.valid_idx(t, n) {
                                let v = s.mems[n].get(l);
                                out.push((
                                    Self::tau(t, Step::DoRead { loc: l, index: index_u8(n) }),
                                    with(&|x| {
                                        x.pc = Dtms2Pc::ResRead(v);
                                        x.rd.insert(l, v);
                                    }),
                                ));
                            }
                        }
                    }
                }
                Dtms2Pc::ResRead(v) => {
                    out.push((res(OpName::TMRead, RetVal::Value(v)), set_pc(Dtms2Pc::Ready)))
                }
                Dtms2Pc::DoWrite(l, v) => out.push((
                    Self::tau(t, Step::DoWrite),
                    with(&|x| {
                        x.pc = Dtms2Pc::ResWrite;
                        x.wr.insert(l, v);
                    }),
                )),
                Dtms2Pc::ResWrite => {
                    out.push((res(OpName::TMWrite, RetVal::Ok), set_pc(Dtms2Pc::Ready)))
                }
                Dtms2Pc::DoCommit => {
                    if tx.wr.is_empty() {
                        for n in usize::from(tx.begin_idx)..s.mems.len() {
                            if s.valid_idx(t, n) {
                                out.push((
                                    Self::tau(t, Step::DoCommitReadOnly { index: index_u8(n) }),
                                    set_pc(Dtms2Pc::ResCommit),
                                ));
                            }
                        }
                    }
                    if tx.rd.subset_of(s.last_mem()) {
                        let mut s2 = set_pc(Dtms2Pc::ResCommit);
                        s2.mems.push(s.last_mem().overridden(&tx.wr));
                        out.push((Self::tau(t, Step::DoCommitWriter), s2));
                    }
                }
                Dtms2Pc::ResCommit => {
                    out.push((res(OpName::TMCommit, RetVal::Ok), set_pc(Dtms2Pc::Committed)))
                }
                Dtms2Pc::Committed | Dtms2Pc::Aborted | Dtms2Pc::CancelPending => {}
            }
            // AbortResp: enabled outside {notStarted, ready, resCommit, committed, aborted}
            if let Some(op) = tx.pc.pending_op() {
                out.push((res(op, RetVal::Abort), set_pc(Dtms2Pc::Aborted)));
            }
        }
        if self.durable {
            let mut s2 = s.clone();
            s2.mems = vec![s.last_mem().clone()];
            for tx in &mut s2.txs {
                if !matches!(tx.pc, Dtms2Pc::NotStarted | Dtms2Pc::Committed) {
                    tx.pc = Dtms2Pc::Aborted;
                }
            }
            out.push((Action::crash(), s2));
        }
        out
    }

    fn classify(&self, a: &Action) -> Option<ActionKind> {
        match a {
            Action::Event(Event::Crash) => self.durable.then_some(ActionKind::Input),
            Action::Event(Event::Inv { tx, op, .. }) if self.covers(*tx) => {
                op.is_transactional().then_some(ActionKind::Input)
            }
            Action::Event(Event::Res { tx, op, .. }) if self.covers(*tx) => {
                op.is_transactional().then_some(ActionKind::Output)
            }
            Action::Internal(i) if i.ns == Namespace::Dtms2 => Some(ActionKind::Internal),
            _ => None,
        }
    }

    fn namespaces(&self) -> Vec<Namespace> {
        vec![Namespace::Dtms2]
    }

    fn show(&self, s: &Dtms2State) -> String {
        let mut out = String::from("mems=");
        for m in &s.mems {
            let _ = write!(out, "{m}");
        }
        for (i, tx) in s.txs.iter().enumerate() {
            let _ = write!(
                out,
                " t{}:{:?} b{} rd{} wr{}",
                i + 1,
                tx.pc,
                tx.begin_idx,
                tx.rd,
                tx.wr
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ioa::{reachable, run, trace_member, Bounds, Membership, Scheduler, SeededScheduler};

    fn t1() -> TxId {
        TxId(1)
    }

    fn advance(d: &Dtms2, s: &Dtms2State, a: Action) -> Dtms2State {
        let succ = d.step(s, &a);
        assert_eq!(succ.len(), 1, "{a} from {}", d.show(s));
        succ.into_iter().next().unwrap()
    }

    #[test]
    fn writer_commit_appends_a_snapshot() {
        let d = Dtms2::new(1, 2, 1);
        let mut s = d.initial();
        for a in [
            Event::inv(1, OpName::TMBegin, Args::None).into(),
            Event::res(1, OpName::TMBegin, RetVal::Ok).into(),
            Event::inv(1, OpName::TMWrite, Args::LocVal(Loc(0), Val(1))).into(),
            Dtms2::tau(t1(), Step::DoWrite),
            Event::res(1, OpName::TMWrite, RetVal::Ok).into(),
            Event::inv(1, OpName::TMCommit, Args::None).into(),
            Dtms2::tau(t1(), Step::DoCommitWriter),
        ] {
            s = advance(&d, &s, a);
        }
        let m0 = Memory::zeroed(1);
        let m1 = Memory::from_values([Val(1)]);
        assert_eq!(s.mems, vec![m0, m1.clone()]);
        assert_eq!(s.tx(t1()).pc, Dtms2Pc::ResCommit);

        // crash keeps only the last snapshot
        let s = advance(&d, &s, Action::crash());
        assert_eq!(s.mems, vec![m1]);
        assert_eq!(s.tx(t1()).pc, Dtms2Pc::Aborted);
    }

    #[test]
    fn read_hits_the_write_set() {
        let d = Dtms2::new(1, 2, 1);
        let mut s = d.initial();
        s.txs[0].pc = Dtms2Pc::DoRead(Loc(0));
        s.txs[0].wr.insert(Loc(0), Val(1));
        let succ = d.transitions(&s);
        let reads: Vec<_> = succ
            .iter()
            .filter(|(a, _)| matches!(a, Action::Internal(_)))
            .collect();
        assert_eq!(reads.len(), 1);
        assert_eq!(reads[0].1.tx(t1()).pc, Dtms2Pc::ResRead(Val(1)));
        assert!(reads[0].1.tx(t1()).rd.is_empty());
    }

    #[test]
    fn tms2_has_no_crash() {
        let d = Dtms2::tms2(1, 2, 1);
        assert_eq!(d.classify(&Action::crash()), None);
        assert!(d.transitions(&d.initial()).iter().all(|(a, _)| !a.is_crash()));
        assert_eq!(d.start_states(), Dtms2::new(1, 2, 1).start_states());
    }

    #[test]
    fn small_closure_is_complete() {
        let r = reachable(&Dtms2::new(1, 2, 1), Bounds::default());
        assert!(r.complete);
        assert!(r.states.len() < 10_000, "{}", r.states.len());
        for s in &r.states {
            assert!(!s.mems.is_empty());
            for (i, tx) in s.txs.iter().enumerate() {
                if tx.pc.is_live() && tx.pc != Dtms2Pc::NotStarted {
                    assert!(usize::from(tx.begin_idx) < s.mems.len(), "t{}", i + 1);
                }
            }
        }
    }

    /// Drives a fixed sequence of labels.
    struct Script(Vec<Action>);

    impl Scheduler for Script {
        fn pick<S>(&mut self, step: usize, options: &[(Action, S)]) -> Option<usize> {
            let want = self.0.get(step)?;
            options.iter().position(|(a, _)| a == want)
        }
    }

    #[test]
    fn scripted_begin_commit_run() {
        let d = Dtms2::new(1, 2, 1);
        let labels: Vec<Action> = vec![
            Event::inv(1, OpName::TMBegin, Args::None).into(),
            Event::res(1, OpName::TMBegin, RetVal::Ok).into(),
            Event::inv(1, OpName::TMCommit, Args::None).into(),
            Dtms2::tau(t1(), Step::DoCommitReadOnly { index: 0 }),
            Event::res(1, OpName::TMCommit, RetVal::Ok).into(),
        ];
        let e = run(&d, &mut Script(labels.clone()), 10);
        let trace = e.trace(&d);
        let expected: Vec<Action> = labels.into_iter().filter(|a| d.is_external(a)).collect();
        assert_eq!(trace, expected);
        assert_eq!(e.last_state().tx(t1()).pc, Dtms2Pc::Committed);
    }

    #[test]
    fn traces_of_runs_are_members() {
        let d = Dtms2::new(2, 2, 2);
        for seed in 0..20 {
            let e = run(&d, &mut SeededScheduler::new(seed), 30);
            let tr = e.trace(&d);
            assert_eq!(trace_member(&d, &tr, Bounds::default()), Membership::Member);
        }
        let bad = [Action::from(Event::res(1, OpName::TMBegin, RetVal::Ok))];
        assert_eq!(trace_member(&d, &bad, Bounds::default()), Membership::NotMember);
        assert_eq!(trace_member(&d, &[], Bounds::default()), Membership::Member);
    }
}

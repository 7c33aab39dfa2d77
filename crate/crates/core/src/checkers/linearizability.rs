use super::opacity::completes_to;
use super::{CheckError, Verdict};
use crate::history::{
    is_sequential, is_well_formed, project, strip_crashes, Args, Event, History, OpName, RetVal,
    TxId,
};
use crate::specs::SequentialObject;
use std::collections::HashSet;

pub const DEFAULT_OP_CAP: usize = 12;

/// Whether a sequential history threads a state chain of `obj` from some
/// initial state. A trailing pending invocation must merely be enabled.
pub fn legal_sequential<S: SequentialObject>(hs: &History, obj: &S) -> Result<bool, CheckError> {
    if !is_sequential(hs) {
        return Err(CheckError::NotSequential);
    }
    let mut states = obj.init();
    let evs = hs.events();
    let mut i = 0;
    while i < evs.len() {
        let Event::Inv { tx, op, args } = &evs[i] else {
            return Err(CheckError::NotSequential);
        };
        let want = evs.get(i + 1).map(Event::rval);
        let mut next = Vec::new();
        for s in &states {
            for (s2, r) in obj.apply(*tx, *op, args, s) {
                if want.is_none_or(|w| w == r) && !next.contains(&s2) {
                    next.push(s2);
                }
            }
        }
        if next.is_empty() {
            return Ok(false);
        }
        states = next;
        i += 2;
    }
    Ok(true)
}

struct Op {
    tx: TxId,
    op: OpName,
    args: Args,
    rval: Option<RetVal>,
    pred: u128,
}

fn operations(h: &History) -> Vec<Op> {
    let mut ops: Vec<Op> = Vec::new();
    let mut res_at: Vec<Option<usize>> = Vec::new();
    let mut inv_at: Vec<usize> = Vec::new();
    for (i, e) in h.iter().enumerate() {
        match e {
            Event::Inv { tx, op, args } => {
                ops.push(Op {
                    tx: *tx,
                    op: *op,
                    args: args.clone(),
                    rval: None,
                    pred: 0,
                });
                res_at.push(None);
                inv_at.push(i);
            }
            Event::Res { tx, rval, .. } => {
                let k = ops
                    .iter()
                    .rposition(|o| o.tx == *tx)
                    .expect("well-formed response has an invocation");
                ops[k].rval = Some(*rval);
                res_at[k] = Some(i);
            }
            Event::Crash => {}
        }
    }
    for b in 0..ops.len() {
        for a in 0..ops.len() {
            if res_at[a].is_some_and(|r| r < inv_at[b]) {
                ops[b].pred |= 1 << a;
            }
        }
    }
    ops
}

struct Search<'a, S: SequentialObject> {
    obj: &'a S,
    ops: &'a [Op],
    must: u128,
    failed: HashSet<(u128, S::State)>,
    order: Vec<(usize, RetVal)>,
}

impl<S: SequentialObject> Search<'_, S> {
    fn run(&mut self, done: u128, s: &S::State) -> bool {
        if done & self.must == self.must {
            return true;
        }
        if self.failed.contains(&(done, s.clone())) {
            return false;
        }
        for (i, op) in self.ops.iter().enumerate() {
            let bit = 1u128 << i;
            if done & bit != 0 || op.pred & !done != 0 {
                continue;
            }
            let mut tried: Vec<(S::State, RetVal)> = Vec::new();
            for (s2, r) in self.obj.apply(op.tx, op.op, &op.args, s) {
                if op.rval.is_some_and(|want| want != r) || tried.contains(&(s2.clone(), r)) {
                    continue;
                }
                tried.push((s2.clone(), r));
                self.order.push((i, r));
                if self.run(done | bit, &s2) {
                    return true;
                }
                self.order.pop();
            }
        }
        self.failed.insert((done, s.clone()));
        false
    }
}

pub fn check_linearizable<S: SequentialObject>(h: &History, obj: &S) -> Result<Verdict, CheckError> {
    check_linearizable_with_cap(h, obj, DEFAULT_OP_CAP)
}

/// Linearizability: a response extension whose completion is equivalent to
/// a legal sequential history preserving `≪`. Pending operations are
/// either linearized with some return value or dropped.
pub fn check_linearizable_with_cap<S: SequentialObject>(
    h: &History,
    obj: &S,
    cap: usize,
) -> Result<Verdict, CheckError> {
    if h.iter().any(Event::is_crash) {
        return Err(CheckError::ContainsCrash);
    }
    if !is_well_formed(h) {
        return Err(CheckError::IllFormed("well-formed"));
    }
    let ops = operations(h);
    let cap = cap.min(128);
    if ops.len() > cap {
        return Err(CheckError::TooLarge {
            what: "operations",
            count: ops.len(),
            cap,
        });
    }
    let must = ops
        .iter()
        .enumerate()
        .filter(|(_, o)| o.rval.is_some())
        .fold(0u128, |m, (i, _)| m | 1 << i);
    let mut search = Search {
        obj,
        ops: &ops,
        must,
        failed: HashSet::new(),
        order: Vec::new(),
    };
    for s in obj.init() {
        if search.run(0, &s) {
            let witness = search
                .order
                .iter()
                .flat_map(|&(i, r)| {
                    let o = &ops[i];
                    [Event::inv(o.tx, o.op, o.args.clone()), Event::res(o.tx, o.op, r)]
                })
                .collect();
            return Ok(Verdict::accept(witness));
        }
    }
    Ok(Verdict::reject(None, "no legal linearization"))
}

pub fn check_durably_linearizable<S: SequentialObject>(
    h: &History,
    obj: &S,
    cap: usize,
) -> Result<Verdict, CheckError> {
    if !is_well_formed(h) {
        return Ok(Verdict::reject(None, "not well-formed"));
    }
    check_linearizable_with_cap(&strip_crashes(h), obj, cap)
}

/// Re-checks a linearization of `ops(h)`: legality, per-thread equivalence
/// up to completion, and preservation of `≪`.
pub fn revalidate_linearization<S: SequentialObject>(h: &History, witness: &History, obj: &S) -> bool {
    let h = strip_crashes(h);
    if legal_sequential(witness, obj) != Ok(true) {
        return false;
    }
    for t in h.transactions() {
        if !completes_to(project(&h, t).events(), project(witness, t).events()) {
            return false;
        }
    }
    // Operation k of thread t sits at the same per-thread index in both.
    let key = |hist: &History, i: usize| {
        let t = hist.get(i).and_then(Event::tx);
        let k = hist.events()[..i]
            .iter()
            .filter(|e| e.is_inv() && e.tx() == t)
            .count();
        (t, k)
    };
    let pos_in_witness = |t: Option<TxId>, k: usize| {
        (0..witness.len()).find(|&i| witness.get(i).is_some_and(Event::is_inv) && key(witness, i) == (t, k))
    };
    for a in 0..h.len() {
        if !h.get(a).is_some_and(Event::is_res) {
            continue;
        }
        let (ta, _) = key(&h, a);
        let ka = h.events()[..a].iter().filter(|e| e.is_inv() && e.tx() == ta).count() - 1;
        for b in a + 1..h.len() {
            if !h.get(b).is_some_and(Event::is_inv) {
                continue;
            }
            let (tb, kb) = key(&h, b);
            if let (Some(pa), Some(pb)) = (pos_in_witness(ta, ka), pos_in_witness(tb, kb)) {
                if pa > pb {
                    return false;
                }
            }
        }
    }
    true
}

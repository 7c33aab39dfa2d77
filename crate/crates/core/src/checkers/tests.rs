use super::*;
use crate::history::{Args, Event, Loc, OpName, PartialMap, RetVal, Val};
use crate::specs::AmObject;

fn begin(t: u16) -> Vec<Event> {
    vec![
        Event::inv(t, OpName::TMBegin, Args::None),
        Event::res(t, OpName::TMBegin, RetVal::Ok),
    ]
}
fn write(t: u16, l: u8, v: u8) -> Vec<Event> {
    vec![
        Event::inv(t, OpName::TMWrite, Args::LocVal(Loc(l), Val(v))),
        Event::res(t, OpName::TMWrite, RetVal::Ok),
    ]
}
fn read(t: u16, l: u8, v: u8) -> Vec<Event> {
    vec![
        Event::inv(t, OpName::TMRead, Args::Loc(Loc(l))),
        Event::res(t, OpName::TMRead, RetVal::Value(Val(v))),
    ]
}
fn commit(t: u16, rv: RetVal) -> Vec<Event> {
    vec![
        Event::inv(t, OpName::TMCommit, Args::None),
        Event::res(t, OpName::TMCommit, rv),
    ]
}
fn h(parts: &[Vec<Event>]) -> History {
    History::new(parts.concat())
}

#[test]
fn empty_history_is_opaque() {
    let v = check_opaque(&History::empty()).unwrap();
    assert!(v.accepted);
}

#[test]
fn single_reader_is_opaque() {
    let hist = h(&[begin(1), read(1, 0, 0), commit(1, RetVal::Ok)]);
    let v = check_opaque(&hist).unwrap();
    assert!(v.accepted);
    assert!(revalidate_opacity(&hist, v.witness.as_ref().unwrap()));
}

#[test]
fn reading_a_later_aborted_write_is_rejected() {
    let hist = h(&[
        begin(1),
        begin(2),
        write(1, 0, 1),
        vec![Event::inv(1, OpName::TMCommit, Args::None)],
        read(2, 0, 1),
        vec![Event::res(1, OpName::TMCommit, RetVal::Abort)],
    ]);
    let v = check_opaque(&hist).unwrap();
    assert!(!v.accepted);
    assert_eq!(v.failing_prefix, Some(hist.len()));
}

#[test]
fn reading_a_pending_commit_is_fine_until_it_aborts() {
    let hist = h(&[
        begin(1),
        begin(2),
        write(1, 0, 1),
        vec![Event::inv(1, OpName::TMCommit, Args::None)],
        read(2, 0, 1),
    ]);
    let v = check_opaque(&hist).unwrap();
    assert!(v.accepted, "{v}");
    assert!(revalidate_opacity(&hist, v.witness.as_ref().unwrap()));
}

#[test]
fn real_time_order_is_respected() {
    // t2 starts after t1 committed x := 1, yet reads the old value.
    let hist = h(&[begin(1), write(1, 0, 1), commit(1, RetVal::Ok), begin(2), read(2, 0, 0)]);
    assert!(!check_opaque(&hist).unwrap().accepted);
}

#[test]
fn crashes_are_input_errors_for_plain_opacity() {
    assert_eq!(
        check_opaque(&History::new(vec![Event::Crash])),
        Err(CheckError::ContainsCrash)
    );
}

#[test]
fn durable_opacity_examples() {
    assert!(check_durably_opaque(&History::new(vec![Event::Crash])).unwrap().accepted);

    let survives = h(&[
        begin(1),
        write(1, 0, 1),
        commit(1, RetVal::Ok),
        vec![Event::Crash],
        begin(2),
        read(2, 0, 1),
        commit(2, RetVal::Ok),
    ]);
    assert!(check_durably_opaque(&survives).unwrap().accepted);

    let torn = h(&[
        begin(1),
        write(1, 0, 1),
        write(1, 1, 1),
        vec![Event::inv(1, OpName::TMCommit, Args::None), Event::Crash],
        begin(2),
        read(2, 0, 1),
        read(2, 1, 0),
    ]);
    assert!(!check_durably_opaque(&torn).unwrap().accepted);

    let reused = h(&[begin(1), vec![Event::Crash], commit(1, RetVal::Ok)]);
    assert!(!check_durably_opaque(&reused).unwrap().accepted);
}

#[test]
fn transaction_cap_is_enforced() {
    let parts: Vec<Vec<Event>> = (1..=3).map(begin).collect();
    assert!(matches!(
        check_opaque_with_cap(&h(&parts), 2),
        Err(CheckError::TooLarge { count: 3, .. })
    ));
}

fn lib_inv(t: u16, op: OpName, args: Args) -> Event {
    Event::inv(t, op, args)
}
fn lib_res(t: u16, op: OpName, rv: RetVal) -> Event {
    Event::res(t, op, rv)
}
fn lread(t: u16, l: u8) -> Event {
    lib_inv(t, OpName::LibRead, Args::Loc(Loc(l)))
}
fn lread_res(t: u16, v: u8) -> Event {
    lib_res(t, OpName::LibRead, RetVal::Value(Val(v)))
}

#[test]
fn legal_sequential_examples() {
    let am = AmObject::new(1, 2);
    assert_eq!(legal_sequential(&History::empty(), &am), Ok(true));
    assert_eq!(
        legal_sequential(&History::new(vec![lread(1, 0), lread_res(1, 0)]), &am),
        Ok(true)
    );
    assert_eq!(
        legal_sequential(&History::new(vec![lread(1, 0), lread_res(1, 1)]), &am),
        Ok(false)
    );
    assert_eq!(
        legal_sequential(&History::new(vec![lread(1, 0), lread(2, 0)]), &am),
        Err(CheckError::NotSequential)
    );
}

#[test]
fn linearizability_examples() {
    let am = AmObject::new(1, 2);
    let seq = History::new(vec![lread(1, 0), lread_res(1, 0)]);
    let v = check_linearizable(&seq, &am).unwrap();
    assert!(v.accepted);
    assert_eq!(v.witness.as_ref(), Some(&seq));

    let concurrent = History::new(vec![lread(1, 0), lread(2, 0), lread_res(2, 0), lread_res(1, 0)]);
    let v = check_linearizable(&concurrent, &am).unwrap();
    assert!(v.accepted);
    assert!(revalidate_linearization(&concurrent, v.witness.as_ref().unwrap(), &am));

    let invented = History::new(vec![lread(1, 0), lread_res(1, 1)]);
    assert!(!check_linearizable(&invented, &am).unwrap().accepted);
}

fn bracket_commit(t: u16, ws: PartialMap, done: bool) -> Vec<Event> {
    let mut out = vec![
        lib_inv(t, OpName::LibAcquire, Args::None),
        lib_res(t, OpName::LibAcquire, RetVal::Ok),
        lib_inv(t, OpName::LibCommit, Args::WriteSet(ws)),
    ];
    if done {
        out.push(lib_res(t, OpName::LibCommit, RetVal::Ok));
    }
    out
}

fn recovery(t: u16) -> Vec<Event> {
    vec![
        Event::Crash,
        lib_inv(t, OpName::LibRecovery, Args::None),
        lib_res(t, OpName::LibRecovery, RetVal::Ok),
    ]
}

#[test]
fn durable_linearizability_examples() {
    let am = AmObject::new(2, 2);
    let crashes = History::new(vec![Event::Crash, Event::Crash]);
    assert!(check_durably_linearizable(&crashes, &am, DEFAULT_OP_CAP).unwrap().accepted);

    let ws = PartialMap::new().with(Loc(0), Val(1)).with(Loc(1), Val(1));
    let undone = h(&[
        bracket_commit(1, ws.clone(), false),
        recovery(9),
        vec![lread(2, 0), lread_res(2, 0), lread(2, 1), lread_res(2, 0)],
    ]);
    let v = check_durably_linearizable(&undone, &am, DEFAULT_OP_CAP).unwrap();
    assert!(v.accepted, "{v}");
    assert!(revalidate_linearization(&undone, v.witness.as_ref().unwrap(), &am));

    let torn = h(&[
        bracket_commit(1, ws, false),
        recovery(9),
        vec![lread(2, 0), lread_res(2, 1), lread(2, 1), lread_res(2, 0)],
    ]);
    assert!(!check_durably_linearizable(&torn, &am, DEFAULT_OP_CAP).unwrap().accepted);

    let reused = h(&[vec![lread(1, 0), lread_res(1, 0), Event::Crash], vec![lread(1, 0), lread_res(1, 0)]]);
    assert!(!check_durably_linearizable(&reused, &am, DEFAULT_OP_CAP).unwrap().accepted);
}

use super::{Action, Automaton, Bounds};
use std::collections::HashSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Member,
    NotMember,
    /// The frontier outgrew the state bound.
    Inconclusive,
}

/// Decides whether `trace` (a sequence of external actions) is a trace of
/// `aut`, by tracking the set of states reachable while producing it.
pub fn trace_member<A: Automaton>(aut: &A, trace: &[Action], bounds: Bounds) -> Membership {
    let mut frontier: HashSet<A::State> = aut.start_states().into_iter().collect();
    if !close(aut, &mut frontier, bounds) {
        return Membership::Inconclusive;
    }
    for act in trace {
        let mut next = HashSet::new();
        for s in &frontier {
            for (a, s2) in aut.transitions(s) {
                if a == *act {
                    next.insert(s2);
                }
            }
        }
        if next.is_empty() {
            return Membership::NotMember;
        }
        if !close(aut, &mut next, bounds) {
            return Membership::Inconclusive;
        }
        frontier = next;
    }
    Membership::Member
}

/// Closes `set` under internal steps. False if it exceeds the bound.
fn close<A: Automaton>(aut: &A, set: &mut HashSet<A::State>, bounds: Bounds) -> bool {
    let mut work: Vec<A::State> = set.iter().cloned().collect();
    while let Some(s) = work.pop() {
        for (a, s2) in aut.transitions(&s) {
            if !aut.is_external(&a) && set.insert(s2.clone()) {
                if set.len() > bounds.max_states {
                    return false;
                }
                work.push(s2);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::super::toy::{inc, ping, Counter};
    use super::*;

    #[test]
    fn internal_steps_are_invisible() {
        let c = Counter { modulus: 2, ns: 0 };
        // inc reaches 1, the internal reset returns to 0, so ping is possible
        let t = [inc(), ping()];
        assert_eq!(trace_member(&c, &t, Bounds::default()), Membership::Member);
        let c3 = Counter { modulus: 3, ns: 0 };
        assert_eq!(trace_member(&c3, &t, Bounds::default()), Membership::NotMember);
    }
}

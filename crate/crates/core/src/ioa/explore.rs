use super::{Action, Automaton, Bounds};
use indexmap::IndexSet;

/// What an exploration visitor is shown.
pub enum Visit<'a, S> {
    State(&'a S),
    Transition(&'a S, &'a Action, &'a S),
}

#[derive(Clone, Debug)]
pub struct Violation<S> {
    pub message: String,
    /// Actions from a start state to `state`.
    pub path: Vec<Action>,
    pub state: S,
}

#[derive(Clone, Debug)]
pub struct Exploration<S> {
    pub states: usize,
    pub transitions: usize,
    /// False when a bound cut the search short.
    pub complete: bool,
    pub depth: usize,
    pub violation: Option<Violation<S>>,
}

#[derive(Clone, Debug)]
pub struct Reachability<S> {
    pub states: Vec<S>,
    pub edges: Vec<(usize, Action, usize)>,
    pub complete: bool,
}

struct Graph<S> {
    states: IndexSet<S>,
    parents: Vec<Option<(usize, Action)>>,
}

impl<S: Clone + Eq + std::hash::Hash> Graph<S> {
    fn path_to(&self, mut id: usize) -> Vec<Action> {
        let mut path = Vec::new();
        while let Some((p, a)) = &self.parents[id] {
            path.push(a.clone());
            id = *p;
        }
        path.reverse();
        path
    }
}

enum Stop {
    Done,
    Violation(String, Vec<Action>, usize),
}

/// Breadth-first search shared by [`explore`] and [`reachable`]. The edge
/// callback sees state ids and may report a violation.
fn bfs<A: Automaton>(
    aut: &A,
    bounds: Bounds,
    mut on_state: impl FnMut(usize, &A::State) -> Result<(), String>,
    mut on_edge: impl FnMut(usize, &A::State, &Action, usize, &A::State) -> Result<(), String>,
) -> (Graph<A::State>, usize, bool, usize, Stop) {
    let mut g = Graph {
        states: IndexSet::new(),
        parents: Vec::new(),
    };
    let mut complete = true;
    let mut transitions = 0usize;
    let mut frontier = Vec::new();
    for s in aut.start_states() {
        if g.states.len() >= bounds.max_states {
            complete = false;
            break;
        }
        let (id, fresh) = g.states.insert_full(s);
        if fresh {
            g.parents.push(None);
            frontier.push(id);
            if let Err(m) = on_state(id, &g.states[id]) {
                return (g, transitions, complete, 0, Stop::Violation(m, Vec::new(), id));
            }
        }
    }
    let mut depth = 0usize;
    while !frontier.is_empty() {
        if depth >= bounds.max_depth {
            if frontier
                .iter()
                .any(|&id| !aut.transitions(&g.states[id]).is_empty())
            {
                complete = false;
            }
            break;
        }
        let mut next = Vec::new();
        for &id in &frontier {
            let src = g.states[id].clone();
            for (a, s2) in aut.transitions(&src) {
                transitions += 1;
                let to = match g.states.get_index_of(&s2) {
                    Some(to) => to,
                    None if g.states.len() >= bounds.max_states => {
                        complete = false;
                        continue;
                    }
                    None => {
                        let (to, _) = g.states.insert_full(s2);
                        g.parents.push(Some((id, a.clone())));
                        next.push(to);
                        if let Err(m) = on_state(to, &g.states[to]) {
                            let path = g.path_to(to);
                            return (g, transitions, complete, depth + 1, Stop::Violation(m, path, to));
                        }
                        to
                    }
                };
                if let Err(m) = on_edge(id, &src, &a, to, &g.states[to]) {
                    let mut path = g.path_to(id);
                    path.push(a);
                    return (g, transitions, complete, depth + 1, Stop::Violation(m, path, to));
                }
            }
        }
        if !next.is_empty() {
            depth += 1;
        }
        frontier = next;
    }
    (g, transitions, complete, depth, Stop::Done)
}

/// Explores the reachable states, calling `visit` on every state and every
/// transition. Stops at the first `Err`, reporting the path to it.
pub fn explore<A: Automaton>(
    aut: &A,
    bounds: Bounds,
    mut visit: impl FnMut(Visit<'_, A::State>) -> Result<(), String>,
) -> Exploration<A::State> {
    // Both callbacks need the visitor; route them through one cell.
    let visit = std::cell::RefCell::new(&mut visit);
    let (g, transitions, complete, depth, stop) = bfs(
        aut,
        bounds,
        |_, s| (visit.borrow_mut())(Visit::State(s)),
        |_, s, a, _, s2| (visit.borrow_mut())(Visit::Transition(s, a, s2)),
    );
    let violation = match stop {
        Stop::Done => None,
        Stop::Violation(message, path, id) => Some(Violation {
            message,
            path,
            state: g.states[id].clone(),
        }),
    };
    Exploration {
        states: g.states.len(),
        transitions,
        complete,
        depth,
        violation,
    }
}

/// The reachable state graph within `bounds`.
pub fn reachable<A: Automaton>(aut: &A, bounds: Bounds) -> Reachability<A::State> {
    let mut edges = Vec::new();
    let (g, _, complete, _, _) = bfs(
        aut,
        bounds,
        |_, _| Ok(()),
        |from, _, a, to, _| {
            edges.push((from, a.clone(), to));
            Ok(())
        },
    );
    Reachability {
        states: g.states.into_iter().collect(),
        edges,
        complete,
    }
}

#[cfg(test)]
mod tests {
    use super::super::toy::{inc, Counter};
    use super::*;

    #[test]
    fn counter_state_space() {
        let c = Counter { modulus: 5, ns: 0 };
        let r = reachable(&c, Bounds::default());
        assert!(r.complete);
        assert_eq!(r.states.len(), 5);
        // 5 increments, 1 ping, 1 reset
        assert_eq!(r.edges.len(), 7);
    }

    #[test]
    fn state_bound_truncates() {
        let c = Counter { modulus: 2, ns: 0 };
        let r = reachable(&c, Bounds::new(100, 1));
        assert!(!r.complete);
        assert_eq!(r.states.len(), 1);
    }

    #[test]
    fn depth_bound_truncates() {
        let c = Counter { modulus: 10, ns: 0 };
        let r = reachable(&c, Bounds::new(3, 100));
        assert!(!r.complete);
        assert_eq!(r.states.len(), 4);
    }

    #[test]
    fn violations_carry_a_shortest_path() {
        let c = Counter { modulus: 6, ns: 0 };
        let e = explore(&c, Bounds::default(), |v| match v {
            Visit::State(s) if *s == 3 => Err("three".into()),
            _ => Ok(()),
        });
        let v = e.violation.unwrap();
        assert_eq!(v.state, 3);
        assert_eq!(v.path, vec![inc(), inc(), inc()]);
        assert_eq!(v.message, "three");
    }
}

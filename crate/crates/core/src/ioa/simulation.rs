use super::{Action, Automaton, Bounds};
use indexmap::IndexSet;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A decidable relation between concrete and abstract states.
pub trait SimulationRelation<C, A> {
    fn holds(&self, concrete: &C, abstract_: &A) -> bool;
}

impl<C, A, F: Fn(&C, &A) -> bool> SimulationRelation<C, A> for F {
    fn holds(&self, concrete: &C, abstract_: &A) -> bool {
        self(concrete, abstract_)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    Initialisation,
    ExternalStep,
    InternalStep,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Initialisation => "initialisation",
            Clause::ExternalStep => "external step correspondence",
            Clause::InternalStep => "internal step correspondence",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SimCounterexample {
    pub clause: Clause,
    /// Concrete actions from a start state to the offending pair.
    pub path: Vec<Action>,
    /// The concrete step that could not be matched (absent for
    /// initialisation failures).
    pub action: Option<Action>,
    pub concrete: String,
    pub concrete_after: Option<String>,
    pub abstract_: String,
}

impl fmt::Display for SimCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "failed clause: {}", self.clause)?;
        writeln!(f, "path ({} steps):", self.path.len())?;
        for a in &self.path {
            writeln!(f, "  {a}")?;
        }
        if let Some(a) = &self.action {
            writeln!(f, "unmatched step: {a}")?;
        }
        writeln!(f, "concrete: {}", self.concrete)?;
        if let Some(c) = &self.concrete_after {
            writeln!(f, "concrete after: {c}")?;
        }
        write!(f, "abstract: {}", self.abstract_)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimStats {
    pub pairs: usize,
    pub concrete_states: usize,
    pub transitions: usize,
}

#[derive(Clone, Debug)]
pub enum SimVerdict {
    Holds(SimStats),
    Counterexample(Box<SimCounterexample>, SimStats),
    Inconclusive(SimStats),
}

impl SimVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SimVerdict::Holds(_))
    }

    pub fn stats(&self) -> SimStats {
        match self {
            SimVerdict::Holds(s) | SimVerdict::Inconclusive(s) => *s,
            SimVerdict::Counterexample(_, s) => *s,
        }
    }
}

fn fingerprint<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Checks that `rel` is a forward simulation from `c` to `a`.
///
/// Explores the pairs `(cs, as)` reachable jointly from related start
/// states: every witness found for a step is enqueued. External concrete
/// steps need an abstract step with the same label to a related state;
/// internal ones need either `rel(cs', as)` or one abstract internal step to
/// a related state. The first unmatched step is a counterexample. If the
/// search finishes within `bounds` the visited pairs form a forward
/// simulation contained in `rel`.
pub fn check_forward_simulation<C: Automaton, A: Automaton>(
    c: &C,
    a: &A,
    rel: &impl SimulationRelation<C::State, A::State>,
    bounds: Bounds,
) -> SimVerdict {
    let mut pairs: IndexSet<(C::State, A::State)> = IndexSet::new();
    let mut parents: Vec<Option<(usize, Action)>> = Vec::new();
    let mut depth_of: Vec<usize> = Vec::new();
    let mut seen_concrete: HashSet<u64> = HashSet::new();
    let mut stats = SimStats::default();
    let mut truncated = false;

    let a_starts = a.start_states();
    for cs in c.start_states() {
        let related: Vec<_> = a_starts.iter().filter(|s| rel.holds(&cs, s)).collect();
        if related.is_empty() {
            let cx = SimCounterexample {
                clause: Clause::Initialisation,
                path: Vec::new(),
                action: None,
                concrete: c.show(&cs),
                concrete_after: None,
                abstract_: a_starts
                    .iter()
                    .map(|s| a.show(s))
                    .collect::<Vec<_>>()
                    .join(" / "),
            };
            stats.pairs = pairs.len();
            return SimVerdict::Counterexample(Box::new(cx), stats);
        }
        seen_concrete.insert(fingerprint(&cs));
        for s in related {
            if pairs.insert((cs.clone(), s.clone())) {
                parents.push(None);
                depth_of.push(0);
            }
        }
    }

    let path_to = |parents: &Vec<Option<(usize, Action)>>, mut id: usize| {
        let mut path = Vec::new();
        while let Some((p, act)) = &parents[id] {
            path.push(act.clone());
            id = *p;
        }
        path.reverse();
        path
    };

    let mut next = 0usize;
    while next < pairs.len() {
        let id = next;
        next += 1;
        if depth_of[id] >= bounds.max_depth {
            truncated = true;
            continue;
        }
        let (cs, as_) = pairs[id].clone();
        let a_trans = a.transitions(&as_);
        for (act, cs2) in c.transitions(&cs) {
            stats.transitions += 1;
            seen_concrete.insert(fingerprint(&cs2));
            let external = c.is_external(&act);
            let mut witnesses: Vec<A::State> = Vec::new();
            if external {
                for (b, as2) in &a_trans {
                    if *b == act && rel.holds(&cs2, as2) {
                        witnesses.push(as2.clone());
                    }
                }
            } else {
                if rel.holds(&cs2, &as_) {
                    witnesses.push(as_.clone());
                }
                for (b, as2) in &a_trans {
                    if !a.is_external(b) && rel.holds(&cs2, as2) && !witnesses.contains(as2) {
                        witnesses.push(as2.clone());
                    }
                }
            }
            if witnesses.is_empty() {
                let cx = SimCounterexample {
                    clause: if external {
                        Clause::ExternalStep
                    } else {
                        Clause::InternalStep
                    },
                    path: path_to(&parents, id),
                    action: Some(act),
                    concrete: c.show(&cs),
                    concrete_after: Some(c.show(&cs2)),
                    abstract_: a.show(&as_),
                };
                stats.pairs = pairs.len();
                stats.concrete_states = seen_concrete.len();
                return SimVerdict::Counterexample(Box::new(cx), stats);
            }
            for w in witnesses {
                let key = (cs2.clone(), w);
                if pairs.contains(&key) {
                    continue;
                }
                if pairs.len() >= bounds.max_states {
                    truncated = true;
                    continue;
                }
                pairs.insert(key);
                parents.push(Some((id, act.clone())));
                depth_of.push(depth_of[id] + 1);
            }
        }
    }
    stats.pairs = pairs.len();
    stats.concrete_states = seen_concrete.len();
    if truncated {
        SimVerdict::Inconclusive(stats)
    } else {
        SimVerdict::Holds(stats)
    }
}

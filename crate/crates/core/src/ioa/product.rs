use super::{Action, ActionKind, Automaton, IoaError, Namespace};

/// Parallel composition `A × B`.
///
/// Actions in both signatures step jointly; the rest step one component
/// while the other stays put. An action is internal in the product if either
/// component hides it, otherwise an output if either component outputs it.
#[derive(Clone, Debug)]
pub struct Product<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: Automaton, B: Automaton> Product<A, B> {
    pub fn new(left: A, right: B) -> Result<Self, IoaError> {
        let theirs = right.namespaces();
        if let Some(ns) = left.namespaces().into_iter().find(|n| theirs.contains(n)) {
            return Err(IoaError::InternalCollision(ns));
        }
        Ok(Product { left, right })
    }
}

impl<A: Automaton, B: Automaton> Automaton for Product<A, B> {
    type State = (A::State, B::State);

    fn start_states(&self) -> Vec<Self::State> {
        let rs = self.right.start_states();
        let mut out = Vec::new();
        for l in self.left.start_states() {
            for r in &rs {
                out.push((l.clone(), r.clone()));
            }
        }
        out
    }

    fn transitions(&self, (l, r): &Self::State) -> Vec<(Action, Self::State)> {
        let lt = self.left.transitions(l);
        let rt = self.right.transitions(r);
        let mut out = Vec::with_capacity(lt.len() + rt.len());
        for (a, l2) in &lt {
            if self.right.classify(a).is_some() {
                for (b, r2) in &rt {
                    if a == b {
                        out.push((a.clone(), (l2.clone(), r2.clone())));
                    }
                }
            } else {
                out.push((a.clone(), (l2.clone(), r.clone())));
            }
        }
        for (b, r2) in rt {
            if self.left.classify(&b).is_none() {
                out.push((b, (l.clone(), r2)));
            }
        }
        out
    }

    fn classify(&self, action: &Action) -> Option<ActionKind> {
        match (self.left.classify(action), self.right.classify(action)) {
            (None, None) => None,
            (a, b) => {
                let kinds = [a, b];
                if kinds.contains(&Some(ActionKind::Internal)) {
                    Some(ActionKind::Internal)
                } else if kinds.contains(&Some(ActionKind::Output)) {
                    Some(ActionKind::Output)
                } else {
                    Some(ActionKind::Input)
                }
            }
        }
    }

    fn namespaces(&self) -> Vec<Namespace> {
        let mut ns = self.left.namespaces();
        ns.extend(self.right.namespaces());
        ns
    }

    fn show(&self, (l, r): &Self::State) -> String {
        format!("{} | {}", self.left.show(l), self.right.show(r))
    }
}

#[cfg(test)]
mod tests {
    use super::super::toy::{inc, ping, Counter};
    use super::super::{reachable, Bounds, Unit};
    use super::*;

    #[test]
    fn unit_is_a_neutral_element() {
        let c = Counter { modulus: 3, ns: 0 };
        let p = Product::new(c.clone(), Unit).unwrap();
        let a = reachable(&c, Bounds::default());
        let b = reachable(&p, Bounds::default());
        assert_eq!(a.states.len(), b.states.len());
        assert_eq!(a.edges.len(), b.edges.len());
    }

    #[test]
    fn shared_actions_synchronise() {
        let p = Product::new(Counter { modulus: 2, ns: 0 }, Counter { modulus: 3, ns: 1 }).unwrap();
        let s = (0u8, 0u8);
        let next = p.step(&s, &inc());
        assert_eq!(next, vec![(1, 1)]);
        // ping needs both components at zero
        assert!(p.step(&(1, 0), &ping()).is_empty());
        assert_eq!(p.step(&(0, 0), &ping()), vec![(0, 0)]);
    }

    #[test]
    fn colliding_namespaces_are_rejected() {
        let err = Product::new(Counter { modulus: 2, ns: 4 }, Counter { modulus: 3, ns: 4 });
        assert_eq!(err.unwrap_err(), IoaError::InternalCollision(Namespace::Custom(4)));
    }

    #[test]
    fn kinds_combine() {
        let p = Product::new(Counter { modulus: 2, ns: 0 }, Unit).unwrap();
        assert_eq!(p.classify(&inc()), Some(ActionKind::Input));
        assert_eq!(p.classify(&ping()), Some(ActionKind::Output));
        assert_eq!(p.classify(&Action::crash()), None);
    }
}

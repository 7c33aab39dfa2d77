use smallvec::SmallVec;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TxId(pub u16);

impl TxId {
    /// Zero-based slot for per-transaction arrays (ids start at 1).
    pub fn index(self) -> usize {
        usize::from(self.0) - 1
    }

    pub fn from_index(i: usize) -> Self {
        TxId(u16::try_from(i + 1).expect("transaction index fits u16"))
    }
}

impl From<u16> for TxId {
    fn from(v: u16) -> Self {
        TxId(v)
    }
}

impl fmt::Display for TxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc(pub u8);

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl Loc {
    pub fn all(count: u8) -> impl Iterator<Item = Loc> + Clone {
        (0..count).map(Loc)
    }
}

/// A value. `Val(0)` is the initial value of every location.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Val(pub u8);

impl Val {
    pub fn all(count: u8) -> impl Iterator<Item = Val> + Clone {
        (0..count).map(Val)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A total map from locations to values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Memory(SmallVec<[Val; 4]>);

impl Memory {
    pub fn zeroed(locs: u8) -> Self {
        Memory(SmallVec::from_elem(Val(0), usize::from(locs)))
    }

    pub fn from_values(vals: impl IntoIterator<Item = Val>) -> Self {
        Memory(vals.into_iter().collect())
    }

    pub fn get(&self, l: Loc) -> Val {
        self.0[usize::from(l.0)]
    }

    pub fn set(&mut self, l: Loc, v: Val) {
        self.0[usize::from(l.0)] = v;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ⊕ m`.
    pub fn overridden(&self, m: &PartialMap) -> Memory {
        let mut out = self.clone();
        for (l, v) in m.iter() {
            out.set(l, v);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (Loc, Val)> + '_ {
        self.0
            .iter()
            .enumerate()
            .map(|(i, v)| (Loc(i as u8), *v))
    }
}

impl fmt::Display for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// A partial map from locations to values, kept sorted by location so that
/// structural equality is semantic equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialMap(SmallVec<[(Loc, Val); 4]>);

impl PartialMap {
    pub fn new() -> Self {
        PartialMap::default()
    }

    pub fn get(&self, l: Loc) -> Option<Val> {
        self.0
            .binary_search_by_key(&l, |(k, _)| *k)
            .ok()
            .map(|i| self.0[i].1)
    }

    pub fn contains(&self, l: Loc) -> bool {
        self.get(l).is_some()
    }

    /// `self := self ⊕ {l ↦ v}`.
    pub fn insert(&mut self, l: Loc, v: Val) {
        match self.0.binary_search_by_key(&l, |(k, _)| *k) {
            Ok(i) => self.0[i].1 = v,
            Err(i) => self.0.insert(i, (l, v)),
        }
    }

    pub fn with(&self, l: Loc, v: Val) -> PartialMap {
        let mut out = self.clone();
        out.insert(l, v);
        out
    }

    pub fn remove(&mut self, l: Loc) -> Option<Val> {
        self.0
            .binary_search_by_key(&l, |(k, _)| *k)
            .ok()
            .map(|i| self.0.remove(i).1)
    }

    pub fn without(&self, l: Loc) -> PartialMap {
        let mut out = self.clone();
        out.remove(l);
        out
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// The `i`-th entry in location order.
    pub fn nth(&self, i: usize) -> Option<(Loc, Val)> {
        self.0.get(i).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Loc, Val)> + '_ {
        self.0.iter().copied()
    }

    pub fn keys(&self) -> impl Iterator<Item = Loc> + '_ {
        self.0.iter().map(|(l, _)| *l)
    }

    pub fn first_key(&self) -> Option<Loc> {
        self.0.first().map(|(l, _)| *l)
    }

    /// `self ⊆ m`, treating the total map as a set of pairs.
    pub fn subset_of(&self, m: &Memory) -> bool {
        self.iter().all(|(l, v)| m.get(l) == v)
    }

    /// The first `n` entries in location order.
    pub fn prefix(&self, n: usize) -> PartialMap {
        PartialMap(self.0.iter().take(n).copied().collect())
    }

    /// Every partial map over the given domains, in a fixed order.
    pub fn enumerate(locs: u8, vals: u8) -> Vec<PartialMap> {
        let mut out = vec![PartialMap::new()];
        for l in Loc::all(locs) {
            let mut next = Vec::with_capacity(out.len() * (usize::from(vals) + 1));
            for m in &out {
                next.push(m.clone());
                for v in Val::all(vals) {
                    next.push(m.with(l, v));
                }
            }
            out = next;
        }
        out
    }
}

impl FromIterator<(Loc, Val)> for PartialMap {
    fn from_iter<I: IntoIterator<Item = (Loc, Val)>>(iter: I) -> Self {
        let mut m = PartialMap::new();
        for (l, v) in iter {
            m.insert(l, v);
        }
        m
    }
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}:{v}")?;
        }
        f.write_str("}")
    }
}

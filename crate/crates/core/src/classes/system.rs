use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::tree::{isomorphic, RootedTree};

/// Index of a state in a [`StateSystem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of the cap alphabet `{0, .., kappa - 1, omega}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Count {
    Exact(u32),
    /// At least `kappa`.
    Omega,
}

/// The cap alphabet with threshold `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapSet {
    kappa: u32,
}

impl CapSet {
    pub fn new(kappa: u32) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::InvalidParameter(
                "cap threshold must be positive".into(),
            ));
        }
        Ok(CapSet { kappa })
    }

    pub fn threshold(&self) -> u32 {
        self.kappa
    }

    /// `kappa + 1` symbols.
    pub fn size(&self) -> usize {
        self.kappa as usize + 1
    }

    pub fn cap(&self, n: usize) -> Count {
        if n >= self.kappa as usize {
            Count::Omega
        } else {
            Count::Exact(n as u32)
        }
    }

    /// Dense index of a symbol: `Exact(u) -> u`, `Omega -> kappa`.
    pub fn digit(&self, c: Count) -> u32 {
        match c {
            Count::Exact(u) => u.min(self.kappa),
            Count::Omega => self.kappa,
        }
    }

    pub fn from_digit(&self, d: u32) -> Count {
        if d >= self.kappa {
            Count::Omega
        } else {
            Count::Exact(d)
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = Count> + '_ {
        (0..=self.kappa).map(|d| self.from_digit(d))
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Exact(u) => write!(f, "{u}"),
            Count::Omega => f.write_str("w"),
        }
    }
}

/// Capped counts of rootchild classes, one entry per state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CountVector(pub Vec<Count>);

impl CountVector {
    pub fn zero(m: usize) -> Self {
        CountVector(vec![Count::Exact(0); m])
    }

    /// Caps the multiplicities of `states` at `cap`.
    pub fn from_children(m: usize, cap: CapSet, states: impl IntoIterator<Item = StateId>) -> Self {
        let mut raw = vec![0usize; m];
        for s in states {
            raw[s.0] += 1;
        }
        CountVector(raw.into_iter().map(|n| cap.cap(n)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A set of states as a bitset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    words: Vec<u64>,
    m: usize,
}

impl StateSet {
    pub fn empty(m: usize) -> Self {
        StateSet {
            words: vec![0; m.div_ceil(64).max(1)],
            m,
        }
    }

    pub fn full(m: usize) -> Self {
        let mut s = Self::empty(m);
        for j in 0..m {
            s.insert(StateId(j));
        }
        s
    }

    pub fn singleton(m: usize, j: StateId) -> Self {
        let mut s = Self::empty(m);
        s.insert(j);
        s
    }

    pub fn universe(&self) -> usize {
        self.m
    }

    pub fn insert(&mut self, j: StateId) {
        assert!(j.0 < self.m, "state {j} out of range");
        self.words[j.0 / 64] |= 1 << (j.0 % 64);
    }

    pub fn contains(&self, j: StateId) -> bool {
        j.0 < self.m && self.words[j.0 / 64] >> (j.0 % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// The single member, if the set is a singleton.
    pub fn only(&self) -> Option<StateId> {
        if self.len() == 1 {
            self.iter().next()
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.m).map(StateId).filter(|&j| self.contains(j))
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }
}

impl FromIterator<StateId> for StateSet {
    /// Panics if the universe cannot be inferred; prefer building from
    /// [`StateSet::empty`] when the set may be empty.
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let items: Vec<StateId> = iter.into_iter().collect();
        let m = items.iter().map(|j| j.0 + 1).max().unwrap_or(0);
        let mut s = StateSet::empty(m);
        for j in items {
            s.insert(j);
        }
        s
    }
}

/// One line of a rule file: all constrained entries must match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub target: StateId,
    /// `None` is a wildcard.
    pub pattern: Vec<Option<Count>>,
}

impl Rule {
    pub fn matches(&self, v: &CountVector) -> bool {
        self.pattern
            .iter()
            .zip(&v.0)
            .all(|(p, c)| p.is_none_or(|p| p == *c))
    }
}

/// Root-merge tables of a compiled system. The class of a root whose child
/// multiset is `A + B` is `merge(class(A), class(B))`, so the recursion
/// function is a fold of `merge` over `lift(child class)`, starting at the
/// single-node class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeTables {
    pub leaf: StateId,
    /// `lift[j]`: class of a root with one child of class `j`.
    pub lift: Vec<StateId>,
    /// Row-major `m * m`, symmetric.
    pub merge: Vec<StateId>,
}

impl MergeTables {
    pub fn merge(&self, a: StateId, b: StateId) -> StateId {
        self.merge[a.0 * self.lift.len() + b.0]
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.lift.len();
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.merge.len() != m * m {
            return bad(format!(
                "merge table has {} entries, need {}",
                self.merge.len(),
                m * m
            ));
        }
        if self.leaf.0 >= m || self.lift.iter().chain(&self.merge).any(|s| s.0 >= m) {
            return bad("merge tables reference an unknown state".into());
        }
        for a in 0..m {
            if self.merge(StateId(a), self.leaf) != StateId(a) {
                return bad(format!("leaf state is not a merge identity for state {a}"));
            }
            for b in 0..m {
                if self.merge(StateId(a), StateId(b)) != self.merge(StateId(b), StateId(a)) {
                    return bad(format!("merge table is not symmetric at ({a}, {b})"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recursion {
    /// First matching rule wins; `default` otherwise.
    Rules {
        rules: Vec<Rule>,
        default: StateId,
    },
    Merge(MergeTables),
}

/// Cached mapping from rule-system accumulators to states.
const RULE_TABLE_LIMIT: u64 = 1 << 22;

/// A finite state space with its recursion function and accepting set.
#[derive(Clone, Debug)]
pub struct StateSystem {
    names: Vec<String>,
    cap: CapSet,
    recursion: Recursion,
    accept: StateSet,
    representatives: Option<Vec<RootedTree>>,
    k: Option<usize>,
    /// `copies[j][d]`: merge class of `d` children of class `j` (merge only).
    copies: Vec<Vec<StateId>>,
    /// Mixed-radix weights for rule-system accumulators.
    radix: Vec<u64>,
    rule_table: OnceLock<Vec<u32>>,
}

impl PartialEq for StateSystem {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.cap == other.cap
            && self.recursion == other.recursion
            && self.accept == other.accept
            && match (&self.representatives, &other.representatives) {
                (Some(a), Some(b)) => {
                    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| isomorphic(x, y))
                }
                (a, b) => a.is_none() && b.is_none(),
            }
            && self.k == other.k
    }
}

impl StateSystem {
    pub fn new(
        names: Vec<String>,
        cap: CapSet,
        recursion: Recursion,
        accept: StateSet,
    ) -> Result<Self> {
        let m = names.len();
        if m == 0 {
            return Err(Error::InvalidParameter("state system has no states".into()));
        }
        if accept.universe() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: accept.universe(),
            });
        }
        let mut copies = Vec::new();
        let mut radix = Vec::new();
        match &recursion {
            Recursion::Rules { rules, default } => {
                if default.0 >= m
                    || rules
                        .iter()
                        .any(|r| r.target.0 >= m || r.pattern.len() != m)
                {
                    return Err(Error::InvalidParameter(
                        "rule references unknown state".into(),
                    ));
                }
                let base = cap.size() as u64;
                let mut w = 1u64;
                for _ in 0..m {
                    radix.push(w);
                    w = w.checked_mul(base).ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "{m} states with threshold {} overflow the count encoding",
                            cap.threshold()
                        ))
                    })?;
                }
            }
            Recursion::Merge(t) => {
                if t.lift.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: t.lift.len(),
                    });
                }
                t.validate()?;
                for j in 0..m {
                    let mut row = vec![t.leaf];
                    for _ in 0..cap.threshold() {
                        let last = *row.last().unwrap();
                        row.push(t.merge(last, t.lift[j]));
                    }
                    copies.push(row);
                }
            }
        }
        Ok(StateSystem {
            names,
            cap,
            recursion,
            accept,
            representatives: None,
            k: None,
            copies,
            radix,
            rule_table: OnceLock::new(),
        })
    }

    /// Attaches compiled metadata.
    pub fn with_representatives(mut self, reps: Vec<RootedTree>, k: usize) -> Result<Self> {
        if reps.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: reps.len(),
            });
        }
        self.representatives = Some(reps);
        self.k = Some(k);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, j: StateId) -> &str {
        &self.names[j.0]
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(StateId)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.len()).map(StateId)
    }

    pub fn cap(&self) -> CapSet {
        self.cap
    }

    pub fn recursion(&self) -> &Recursion {
        &self.recursion
    }

    pub fn accept(&self) -> &StateSet {
        &self.accept
    }

    pub fn with_accept(mut self, accept: StateSet) -> Result<Self> {
        if accept.universe() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: accept.universe(),
            });
        }
        self.accept = accept;
        Ok(self)
    }

    pub fn representatives(&self) -> Option<&[RootedTree]> {
        self.representatives.as_deref()
    }

    /// Quantifier depth the system was compiled for.
    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn is_compiled(&self) -> bool {
        self.representatives.is_some() && self.k.is_some()
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.len())
    }

    /// The recursion function on a count vector.
    pub fn gamma(&self, v: &CountVector) -> Result<StateId> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: v.len(),
            });
        }
        let mut acc = self.acc_empty();
        for (j, &c) in v.0.iter().enumerate() {
            acc = self.acc_add(acc, StateId(j), self.cap.digit(c));
        }
        Ok(self.acc_finish(acc))
    }

    /// Class of a root with no children.
    pub fn leaf_state(&self) -> StateId {
        self.acc_finish(self.acc_empty())
    }

    /// Bottom-up fold of the recursion function over a finite tree.
    pub fn fold(&self, t: &RootedTree) -> StateId {
        let mut state = vec![StateId(0); t.len()];
        for v in t.bfs_order().into_iter().rev() {
            let acc = t
                .children(v)
                .iter()
                .fold(self.acc_empty(), |acc, &c| self.acc_add(acc, state[c], 1));
            state[v] = self.acc_finish(acc);
        }
        state[t.root()]
    }

    // Accumulators: a summary of the children seen so far, enough to
    // determine the parent's state. Rule systems use the capped count vector
    // packed in mixed radix `kappa + 1`; merge systems use the partial class.

    /// Number of distinct accumulator values; the cost of exact psi.
    pub fn acc_space(&self) -> u64 {
        match &self.recursion {
            Recursion::Rules { .. } => {
                let m = self.len() as u32;
                (self.cap.size() as u64).checked_pow(m).unwrap_or(u64::MAX)
            }
            Recursion::Merge(_) => self.len() as u64,
        }
    }

    pub fn acc_empty(&self) -> u64 {
        match &self.recursion {
            Recursion::Rules { .. } => 0,
            Recursion::Merge(t) => t.leaf.0 as u64,
        }
    }

    /// Adds `d` more children of class `j` (`d >= kappa` saturates).
    pub fn acc_add(&self, acc: u64, j: StateId, d: u32) -> u64 {
        let kappa = self.cap.threshold();
        match &self.recursion {
            Recursion::Rules { .. } => {
                let w = self.radix[j.0];
                let cur = (acc / w % (kappa as u64 + 1)) as u32;
                let next = (cur + d.min(kappa)).min(kappa);
                acc + (next - cur) as u64 * w
            }
            Recursion::Merge(t) => {
                let add = self.copies[j.0][d.min(kappa) as usize];
                t.merge(StateId(acc as usize), add).0 as u64
            }
        }
    }

    pub fn acc_finish(&self, acc: u64) -> StateId {
        match &self.recursion {
            Recursion::Rules { rules, default } => {
                if self.acc_space() <= RULE_TABLE_LIMIT {
                    let table = self.rule_table.get_or_init(|| {
                        (0..self.acc_space())
                            .map(|a| self.match_rules(rules, *default, a).0 as u32)
                            .collect()
                    });
                    StateId(table[acc as usize] as usize)
                } else {
                    self.match_rules(rules, *default, acc)
                }
            }
            Recursion::Merge(_) => StateId(acc as usize),
        }
    }

    fn decode(&self, acc: u64) -> CountVector {
        let base = self.cap.size() as u64;
        CountVector(
            self.radix
                .iter()
                .map(|&w| self.cap.from_digit((acc / w % base) as u32))
                .collect(),
        )
    }

    fn match_rules(&self, rules: &[Rule], default: StateId, acc: u64) -> StateId {
        let v = self.decode(acc);
        rules
            .iter()
            .find(|r| r.matches(&v))
            .map_or(default, |r| r.target)
    }
}

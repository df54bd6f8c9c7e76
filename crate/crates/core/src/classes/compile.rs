use std::collections::HashMap;
use std::time::{Duration, Instant};

use super::system::{CapSet, CountVector, MergeTables, Recursion, StateId, StateSet, StateSystem};
use crate::error::{Error, Result};
use crate::logic::{evaluate, GameTyper, Sentence};
use crate::tree::RootedTree;

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_states: usize,
    pub max_seconds: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 2_000,
            max_seconds: 600.0,
        }
    }
}

/// Root whose children are the rootchild subtrees of `a` and of `b`.
fn join_roots(a: &RootedTree, b: &RootedTree) -> RootedTree {
    let mut t = a.clone();
    let root = t.root();
    for &c in b.children(b.root()) {
        t.graft(root, &b.subtree(c).expect("child of b"));
    }
    t
}

fn lift_tree(a: &RootedTree) -> RootedTree {
    RootedTree::with_children([a])
}

struct Closure {
    typer: GameTyper,
    by_type: HashMap<u32, StateId>,
    reps: Vec<RootedTree>,
    limits: Limits,
    deadline: Instant,
}

impl Closure {
    fn class_of(&mut self, t: RootedTree) -> Result<StateId> {
        let ty = self.typer.root_type(&t);
        if let Some(&j) = self.by_type.get(&ty) {
            return Ok(j);
        }
        if self.reps.len() >= self.limits.max_states {
            return Err(Error::LimitExceeded(format!(
                "more than {} classes",
                self.limits.max_states
            )));
        }
        if Instant::now() > self.deadline {
            return Err(Error::LimitExceeded(format!(
                "closure ran longer than {} s",
                self.limits.max_seconds
            )));
        }
        let j = StateId(self.reps.len());
        self.by_type.insert(ty, j);
        self.reps.push(t);
        Ok(j)
    }
}

/// Enumerates the `k`-classes of finite rooted trees reachable from the
/// single node by adding a parent (`lift`) and joining two roots (`merge`).
/// Every finite tree is built this way, and both operations respect
/// `k`-equivalence, so the resulting tables determine the recursion function:
/// the class of a root is the `merge` fold of `lift` over its children, and
/// `k` copies of a class already saturate the fold.
pub fn build_state_space(k: usize, limits: Limits) -> Result<StateSystem> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let deadline = Instant::now()
        .checked_add(Duration::from_secs_f64(limits.max_seconds.max(0.0)))
        .unwrap_or_else(|| Instant::now() + Duration::from_secs(u32::MAX as u64));
    let mut cl = Closure {
        typer: GameTyper::new(k),
        by_type: HashMap::new(),
        reps: Vec::new(),
        limits,
        deadline,
    };
    let leaf = cl.class_of(RootedTree::leaf())?;
    let mut lift = Vec::new();
    let mut merge: HashMap<(usize, usize), StateId> = HashMap::new();
    let mut done = 0;
    while done < cl.reps.len() {
        let j = done;
        let lifted = lift_tree(&cl.reps[j]);
        lift.push(cl.class_of(lifted)?);
        for i in 0..=j {
            let joined = join_roots(&cl.reps[i], &cl.reps[j]);
            let c = cl.class_of(joined)?;
            merge.insert((i, j), c);
        }
        done += 1;
    }
    let m = cl.reps.len();
    let mut table = vec![StateId(0); m * m];
    for (&(i, j), &c) in &merge {
        table[i * m + j] = c;
        table[j * m + i] = c;
    }
    let names = (0..m).map(|j| format!("s{j}")).collect();
    let tables = MergeTables {
        leaf,
        lift,
        merge: table,
    };
    let cap = CapSet::new(k as u32)?;
    StateSystem::new(names, cap, Recursion::Merge(tables), StateSet::empty(m))?
        .with_representatives(cl.reps, k)
}

/// Classifies trees against a compiled system. Keeps its type table between
/// calls, so batch use is much faster than repeated [`classify`].
#[derive(Debug)]
pub struct Classifier<'a> {
    sys: &'a StateSystem,
    typer: GameTyper,
    by_type: HashMap<u32, StateId>,
}

impl<'a> Classifier<'a> {
    pub fn new(sys: &'a StateSystem) -> Result<Self> {
        let (reps, k) = sys
            .representatives()
            .zip(sys.k())
            .ok_or(Error::NotCompiled)?;
        let mut typer = GameTyper::new(k);
        let by_type = reps
            .iter()
            .enumerate()
            .map(|(j, t)| (typer.root_type(t), StateId(j)))
            .collect();
        Ok(Classifier {
            sys,
            typer,
            by_type,
        })
    }

    pub fn system(&self) -> &StateSystem {
        self.sys
    }

    pub fn classify(&mut self, t: &RootedTree) -> Result<StateId> {
        let ty = self.typer.root_type(t);
        self.by_type.get(&ty).copied().ok_or(Error::Unclassifiable)
    }
}

/// The class of `t` in a compiled system.
pub fn classify(sys: &StateSystem, t: &RootedTree) -> Result<StateId> {
    Classifier::new(sys)?.classify(t)
}

/// Recursion function lookup.
pub fn gamma_of_tree_counts(sys: &StateSystem, v: &CountVector) -> Result<StateId> {
    sys.gamma(v)
}

/// States whose representatives satisfy `sentence`.
pub fn accepting_set(sys: &StateSystem, sentence: &Sentence) -> Result<StateSet> {
    let (reps, k) = sys
        .representatives()
        .zip(sys.k())
        .ok_or(Error::NotCompiled)?;
    let depth = sentence.quantifier_depth();
    if depth > k {
        return Err(Error::DepthExceedsK { depth, k });
    }
    let mut set = StateSet::empty(sys.len());
    for (j, t) in reps.iter().enumerate() {
        if evaluate(t, sentence) {
            set.insert(StateId(j));
        }
    }
    Ok(set)
}

/// Compiles `sentence` at its own quantifier depth (at least 1).
pub fn compile_sentence(sentence: &Sentence, limits: Limits) -> Result<StateSystem> {
    let k = sentence.quantifier_depth().max(1);
    let sys = build_state_space(k, limits)?;
    let accept = accepting_set(&sys, sentence)?;
    sys.with_accept(accept)
}

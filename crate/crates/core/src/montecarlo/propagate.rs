//! Set propagation: the root classes consistent with every labelling of the
//! frontier of a truncated tree.
//!
//! A node's candidates are tracked as a reach set of recursion-function
//! accumulators (see [`StateSystem::acc_add`]); adding a child whose set is
//! `S` maps each accumulator through every member of `S`. This is exact, and
//! costs `|reach| * |S|` per child instead of the product of all child set
//! sizes.

use std::collections::BTreeSet;

use crate::classes::{StateId, StateSet, StateSystem};
use crate::error::{Error, Result};
use crate::tree::{GwSampler, NodeKey, SampleOutcome};

/// Default cap on `|reach| * |S|` before a node is widened to all states.
pub const DEFAULT_SET_LIMIT: usize = 10_000;

/// Work allowed for one pruning check, in reach-set steps.
const CHECK_BUDGET: usize = 256;

/// Cap on the reach-set family explored when computing minimal sets.
const FAMILY_BUDGET: usize = 4096;

/// Deepest truncation the recursive evaluator accepts.
pub const MAX_DEPTH: usize = 2_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PossibleValues {
    pub states: StateSet,
    /// Some node was widened to all states; the set may be too large but
    /// still contains the true class.
    pub over_approx: bool,
}

impl PossibleValues {
    pub fn determined(&self) -> Option<StateId> {
        self.states.only()
    }
}

type Reach = Vec<u64>;

fn step(sys: &StateSystem, reach: &[u64], set: &StateSet) -> Reach {
    let mut out: Reach = reach
        .iter()
        .flat_map(|&a| set.iter().map(move |j| sys.acc_add(a, j, 1)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn finish(sys: &StateSystem, reach: &[u64]) -> StateSet {
    let mut s = StateSet::empty(sys.len());
    for &a in reach {
        s.insert(sys.acc_finish(a));
    }
    s
}

/// Reach set after `r` more children of arbitrary class.
fn saturate(sys: &StateSystem, reach: &[u64], all: &StateSet, r: usize) -> Reach {
    let mut cur = reach.to_vec();
    for _ in 0..r {
        let next = step(sys, &cur, all);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Candidates at the root of a materialized sample, bottom up.
pub fn possible_values(sys: &StateSystem, sample: &SampleOutcome, limit: usize) -> PossibleValues {
    let t = &sample.tree;
    let all = sys.all_states();
    let mut sets: Vec<Option<StateSet>> = vec![None; t.len()];
    for &v in &sample.frontier {
        sets[v] = Some(all.clone());
    }
    let mut over = false;
    for v in t.bfs_order().into_iter().rev() {
        if sets[v].is_some() {
            continue;
        }
        let mut reach = vec![sys.acc_empty()];
        let mut widened = false;
        for &c in t.children(v) {
            let s = sets[c].as_ref().expect("children first");
            if reach.len() * s.len() > limit {
                widened = true;
                break;
            }
            reach = step(sys, &reach, s);
        }
        over |= widened;
        sets[v] = Some(if widened {
            all.clone()
        } else {
            finish(sys, &reach)
        });
    }
    PossibleValues {
        states: sets[t.root()].take().expect("root set"),
        over_approx: over,
    }
}

/// Lazy set propagation over Galton-Watson samples.
///
/// Offspring counts are read on demand from the counter-based sampler, so
/// the tree is never stored. A node stops expanding children as soon as
/// the rest of them cannot change its set: either every completion gives
/// the same single class, or every completion by minimal achievable child
/// sets already produces the largest possible set.
#[derive(Clone, Debug)]
pub struct Propagator<'a> {
    sys: &'a StateSystem,
    depth: usize,
    limit: usize,
    all: StateSet,
    /// `minimal[h]`: every set a node with `h` generations left can end up
    /// with contains a member of this family.
    minimal: Vec<Vec<StateSet>>,
}

struct Walk<'s> {
    sampler: &'s GwSampler,
    visited: usize,
    max_nodes: usize,
    over: bool,
}

impl<'a> Propagator<'a> {
    pub fn new(sys: &'a StateSystem, depth: usize, limit: usize) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::InvalidParameter(format!(
                "depth {depth} exceeds the supported maximum {MAX_DEPTH}"
            )));
        }
        if limit == 0 {
            return Err(Error::InvalidParameter("set limit must be positive".into()));
        }
        let all = sys.all_states();
        let mut minimal = vec![vec![all.clone()]];
        for h in 1..=depth {
            let prev = &minimal[h - 1];
            let next = minimal_sets(sys, prev, limit);
            let stable = next == *prev;
            minimal.push(next);
            if stable {
                // Each family depends only on the previous one.
                let last = minimal[h].clone();
                minimal.resize(depth + 1, last);
                break;
            }
        }
        Ok(Propagator {
            sys,
            depth,
            limit,
            all,
            minimal,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn minimal_sets(&self, h: usize) -> &[StateSet] {
        &self.minimal[h.min(self.depth)]
    }

    /// Candidates for sample `index` of `sampler` truncated at the
    /// propagator's depth. Fails once more than `max_nodes` nodes are read.
    pub fn evaluate(
        &self,
        sampler: &GwSampler,
        index: u64,
        max_nodes: usize,
    ) -> Result<PossibleValues> {
        let mut walk = Walk {
            sampler,
            visited: 0,
            max_nodes,
            over: false,
        };
        let states = self.node(sampler.root_key(index), self.depth, &mut walk)?;
        Ok(PossibleValues {
            states,
            over_approx: walk.over,
        })
    }

    fn node(&self, key: NodeKey, h: usize, walk: &mut Walk<'_>) -> Result<StateSet> {
        walk.visited += 1;
        if walk.visited > walk.max_nodes {
            return Err(Error::BudgetExceeded {
                what: "nodes visited by set propagation",
                limit: walk.max_nodes,
            });
        }
        if h == 0 {
            return Ok(self.all.clone());
        }
        let n = walk.sampler.offspring(key);
        let mut reach = vec![self.sys.acc_empty()];
        for i in 0..n {
            let left = n - i;
            let upper = finish(self.sys, &saturate(self.sys, &reach, &self.all, left));
            if upper.len() == 1 || self.completions_fill(&reach, left, h - 1, &upper) {
                return Ok(upper);
            }
            let s = self.node(key.child(i), h - 1, walk)?;
            if reach.len() * s.len() > self.limit {
                walk.over = true;
                return Ok(self.all.clone());
            }
            reach = step(self.sys, &reach, &s);
        }
        Ok(finish(self.sys, &reach))
    }

    /// Does every way of adding `left` children with minimal sets at height
    /// `h` already yield `upper`? Gives up (false) past the work budget.
    fn completions_fill(&self, reach: &[u64], left: usize, h: usize, upper: &StateSet) -> bool {
        let family = &self.minimal[h];
        let mut level: BTreeSet<Reach> = BTreeSet::from([reach.to_vec()]);
        let mut work = 0;
        for _ in 0..left {
            let mut next = BTreeSet::new();
            for r in &level {
                for m in family {
                    work += 1;
                    if work > CHECK_BUDGET {
                        return false;
                    }
                    next.insert(step(self.sys, r, m));
                }
            }
            if next == level {
                break;
            }
            level = next;
        }
        level.iter().all(|r| finish(self.sys, r) == *upper)
    }
}

/// Minimal elements of the sets reachable by a node whose children each
/// realize some member of `prev`. Falls back to all singletons (always a
/// valid family) past the work budget.
fn minimal_sets(sys: &StateSystem, prev: &[StateSet], limit: usize) -> Vec<StateSet> {
    let singletons = || {
        sys.states()
            .map(|j| StateSet::singleton(sys.len(), j))
            .collect()
    };
    let start: Reach = vec![sys.acc_empty()];
    let mut seen: BTreeSet<Reach> = BTreeSet::from([start.clone()]);
    let mut queue = vec![start];
    while let Some(r) = queue.pop() {
        for m in prev {
            if r.len() * m.len() > limit {
                return singletons();
            }
            let next = step(sys, &r, m);
            if seen.insert(next.clone()) {
                if seen.len() > FAMILY_BUDGET {
                    return singletons();
                }
                queue.push(next);
            }
        }
    }
    let candidates: BTreeSet<StateSet> = seen.iter().map(|r| finish(sys, r)).collect();
    candidates
        .iter()
        .filter(|a| !candidates.iter().any(|b| b != *a && b.is_subset(a)))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::bundled;
    use crate::tree::RootedTree;

    fn outcome(tree: RootedTree, s: usize) -> SampleOutcome {
        let depths = tree.depths();
        let frontier: Vec<_> = (0..tree.len()).filter(|&v| depths[v] == s).collect();
        SampleOutcome {
            aborted: frontier.is_empty(),
            tree,
            frontier,
            depth: s,
        }
    }

    #[test]
    fn fully_known_tree() {
        let sys = bundled::example1();
        let pv = possible_values(&sys, &outcome(RootedTree::star(2), 5), DEFAULT_SET_LIMIT);
        assert_eq!(pv.determined(), Some(sys.state("1").unwrap()));
        assert!(!pv.over_approx);
    }

    #[test]
    fn infinite_system_never_determined_while_alive() {
        let sys = bundled::infinite();
        let pv = possible_values(&sys, &outcome(RootedTree::path(3), 3), DEFAULT_SET_LIMIT);
        assert_eq!(pv.states, sys.all_states());
    }

    #[test]
    fn widening_is_flagged() {
        let sys = bundled::example2();
        let pv = possible_values(&sys, &outcome(RootedTree::star(6), 1), 4);
        assert!(pv.over_approx);
        assert_eq!(pv.states, sys.all_states());
    }

    #[test]
    fn minimal_families() {
        let inf = bundled::infinite();
        let p = Propagator::new(&inf, 10, DEFAULT_SET_LIMIT).unwrap();
        let dead = StateSet::singleton(2, inf.state("dead").unwrap());
        assert_eq!(p.minimal_sets(0), &[inf.all_states()]);
        for h in 1..=10 {
            assert_eq!(p.minimal_sets(h), std::slice::from_ref(&dead));
        }
        let ex1 = bundled::example1();
        let p = Propagator::new(&ex1, 4, DEFAULT_SET_LIMIT).unwrap();
        assert_eq!(p.minimal_sets(2).len(), 2);
    }

    #[test]
    fn lazy_matches_materialized() {
        let k2 = crate::classes::build_state_space(2, Default::default()).unwrap();
        for sys in [
            bundled::example1(),
            bundled::example2(),
            bundled::infinite(),
            k2,
        ] {
            for (c, s) in [(0.8, 6), (1.5, 4), (2.5, 3)] {
                let sampler = GwSampler::new(c, 17).unwrap();
                let prop = Propagator::new(&sys, s, DEFAULT_SET_LIMIT).unwrap();
                for i in 0..300 {
                    let o = sampler.sample(i, s, 100_000).unwrap();
                    let full = possible_values(&sys, &o, DEFAULT_SET_LIMIT);
                    let lazy = prop.evaluate(&sampler, i, 100_000).unwrap();
                    if !full.over_approx && !lazy.over_approx {
                        assert_eq!(full.states, lazy.states, "c={c} s={s} i={i}");
                    }
                }
            }
        }
    }

    #[test]
    fn node_budget() {
        let sys = bundled::infinite();
        let sampler = GwSampler::new(3.0, 1).unwrap();
        let prop = Propagator::new(&sys, 30, DEFAULT_SET_LIMIT).unwrap();
        let hit = (0..50).any(|i| prop.evaluate(&sampler, i, 5).is_err());
        assert!(hit);
    }
}

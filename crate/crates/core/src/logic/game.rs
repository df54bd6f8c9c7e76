//! The k-move Ehrenfeucht game on rooted trees.
//!
//! Both roots form a mandatory 0th pair. After every move the selected pairs
//! (including the roots) must form a partial isomorphism for equality and the
//! parent relation; Duplicator wins if that still holds after `k` moves.
//!
//! [`ehr_wins`] is a memoized alternating search. [`GameTyper`] computes the
//! same relation through interned game types: the `r`-round type of a tuple
//! is its atomic type together with the set of `(r - 1)`-round types of its
//! one-element extensions, and Duplicator wins from a position iff both
//! tuples have equal types. Types are shared across trees, so classifying a
//! tree is one type computation plus a hash lookup.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tree::{NodeId, RootedTree};

pub const DEFAULT_MEMO_LIMIT: usize = 2_000_000;

/// A position of the game: the pairs selected so far and the moves left.
#[derive(Clone, Debug)]
pub struct GamePosition<'a> {
    pub left: &'a RootedTree,
    pub right: &'a RootedTree,
    /// Selected pairs, starting with `(left root, right root)`.
    pub pairs: Vec<(NodeId, NodeId)>,
    pub moves_left: usize,
}

impl<'a> GamePosition<'a> {
    pub fn start(left: &'a RootedTree, right: &'a RootedTree, k: usize) -> Self {
        GamePosition {
            left,
            right,
            pairs: vec![(left.root(), right.root())],
            moves_left: k,
        }
    }

    /// Whether adding `(x, y)` keeps the selection a partial isomorphism.
    pub fn consistent(&self, x: NodeId, y: NodeId) -> bool {
        let (l, r) = (self.left, self.right);
        self.pairs.iter().all(|&(a, b)| {
            (x == a) == (y == b)
                && (l.parent(x) == Some(a)) == (r.parent(y) == Some(b))
                && (l.parent(a) == Some(x)) == (r.parent(b) == Some(y))
        })
    }

    pub fn is_partial_isomorphism(&self) -> bool {
        self.pairs.iter().enumerate().all(|(i, &(x, y))| {
            let before = GamePosition {
                pairs: self.pairs[..i].to_vec(),
                ..self.clone()
            };
            before.consistent(x, y)
        })
    }

    fn after(&self, x: NodeId, y: NodeId) -> Self {
        let mut next = self.clone();
        next.pairs.push((x, y));
        next.moves_left -= 1;
        next
    }

    fn memo_key(&self) -> (usize, Vec<(NodeId, NodeId)>) {
        let mut pairs = self.pairs[1..].to_vec();
        pairs.sort_unstable();
        pairs.dedup();
        (self.moves_left, pairs)
    }
}

pub fn ehr_wins(left: &RootedTree, right: &RootedTree, k: usize) -> Result<bool> {
    ehr_wins_with_limit(left, right, k, DEFAULT_MEMO_LIMIT)
}

/// Does Duplicator win the `k`-move game? Fails once the memo table holds
/// more than `memo_limit` positions.
pub fn ehr_wins_with_limit(
    left: &RootedTree,
    right: &RootedTree,
    k: usize,
    memo_limit: usize,
) -> Result<bool> {
    let mut memo = HashMap::new();
    solve(&GamePosition::start(left, right, k), &mut memo, memo_limit)
}

type Memo = HashMap<(usize, Vec<(NodeId, NodeId)>), bool>;

fn solve(pos: &GamePosition<'_>, memo: &mut Memo, limit: usize) -> Result<bool> {
    if pos.moves_left == 0 {
        return Ok(true);
    }
    let key = pos.memo_key();
    if let Some(&w) = memo.get(&key) {
        return Ok(w);
    }
    let won = duplicator_answers(pos, memo, limit)?;
    if memo.len() >= limit {
        return Err(Error::BudgetExceeded {
            what: "game memo table",
            limit,
        });
    }
    memo.insert(key, won);
    Ok(won)
}

fn duplicator_answers(pos: &GamePosition<'_>, memo: &mut Memo, limit: usize) -> Result<bool> {
    // Spoiler on the left.
    for x in 0..pos.left.len() {
        let mut answered = false;
        for y in 0..pos.right.len() {
            if pos.consistent(x, y) && solve(&pos.after(x, y), memo, limit)? {
                answered = true;
                break;
            }
        }
        if !answered {
            return Ok(false);
        }
    }
    // Spoiler on the right.
    for y in 0..pos.right.len() {
        let mut answered = false;
        for x in 0..pos.left.len() {
            if pos.consistent(x, y) && solve(&pos.after(x, y), memo, limit)? {
                answered = true;
                break;
            }
        }
        if !answered {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Interned game types; see the module docs.
#[derive(Debug)]
pub struct GameTyper {
    k: usize,
    table: HashMap<(Vec<u8>, Vec<u32>), u32>,
}

impl GameTyper {
    pub fn new(k: usize) -> Self {
        GameTyper {
            k,
            table: HashMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of distinct types interned so far (all round counts).
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// The `k`-round type of `(t, root)`. Two trees are `k`-equivalent iff
    /// their root types are equal.
    pub fn root_type(&mut self, t: &RootedTree) -> u32 {
        let mut tuple = vec![t.root()];
        self.type_of(t, &mut tuple, self.k)
    }

    fn type_of(&mut self, t: &RootedTree, tuple: &mut Vec<NodeId>, rounds: usize) -> u32 {
        let atomic = atomic_type(t, tuple);
        let mut ext = Vec::new();
        if rounds > 0 {
            ext.reserve(t.len());
            for b in 0..t.len() {
                tuple.push(b);
                ext.push(self.type_of(t, tuple, rounds - 1));
                tuple.pop();
            }
            ext.sort_unstable();
            ext.dedup();
        }
        let next = self.table.len() as u32;
        *self.table.entry((atomic, ext)).or_insert(next)
    }
}

/// Equality and parent relations among the tuple, 3 bits per ordered pair.
fn atomic_type(t: &RootedTree, tuple: &[NodeId]) -> Vec<u8> {
    let mut out = Vec::with_capacity(tuple.len() * tuple.len() / 2 + 1);
    out.push(tuple.len() as u8);
    for j in 1..tuple.len() {
        for i in 0..j {
            let (a, b) = (tuple[i], tuple[j]);
            let bits = (a == b) as u8
                | ((t.parent(b) == Some(a)) as u8) << 1
                | ((t.parent(a) == Some(b)) as u8) << 2;
            out.push(bits);
        }
    }
    out
}

pub fn ehr_equivalent(left: &RootedTree, right: &RootedTree, k: usize) -> bool {
    let mut typer = GameTyper::new(k);
    typer.root_type(left) == typer.root_type(right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{all_trees, random_tree};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Unmemoized reference: plain alternating search checking the partial
    /// isomorphism only at the end.
    fn reference(pos: &GamePosition<'_>) -> bool {
        if pos.moves_left == 0 {
            return pos.is_partial_isomorphism();
        }
        let step = |x: NodeId, y: NodeId| {
            let mut next = pos.clone();
            next.pairs.push((x, y));
            next.moves_left -= 1;
            reference(&next)
        };
        (0..pos.left.len()).all(|x| (0..pos.right.len()).any(|y| step(x, y)))
            && (0..pos.right.len()).all(|y| (0..pos.left.len()).any(|x| step(x, y)))
    }

    #[test]
    fn mirror_strategy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 0..=3 {
            let t = random_tree(7, &mut rng);
            assert!(ehr_wins(&t, &t, k).unwrap());
        }
    }

    #[test]
    fn path_one_vs_path_two() {
        let (p1, p2) = (RootedTree::path(1), RootedTree::path(2));
        assert!(ehr_wins(&p1, &p2, 0).unwrap());
        // One move already separates them: the grandchild is neither the
        // root nor a rootchild.
        assert!(!ehr_wins(&p1, &p2, 1).unwrap());
        assert!(!ehr_wins(&p1, &p2, 2).unwrap());
        assert!(!reference(&GamePosition::start(&p1, &p2, 2)));
    }

    #[test]
    fn large_stars_agree() {
        let (a, b) = (RootedTree::star(5), RootedTree::star(7));
        assert!(ehr_wins(&a, &b, 3).unwrap());
        assert!(!ehr_wins(&RootedTree::star(2), &RootedTree::star(3), 3).unwrap());
        assert!(ehr_wins(&RootedTree::star(2), &RootedTree::star(3), 2).unwrap());
    }

    #[test]
    fn memo_budget() {
        let (a, b) = (RootedTree::star(6), RootedTree::star(7));
        let err = ehr_wins_with_limit(&a, &b, 3, 5).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn memoized_search_matches_reference() {
        let small: Vec<RootedTree> = (1..=5).flat_map(all_trees).collect();
        for k in 0..=2 {
            for a in &small {
                for b in &small {
                    let expected = reference(&GamePosition::start(a, b, k));
                    assert_eq!(ehr_wins(a, b, k).unwrap(), expected, "{a} {b} k={k}");
                    assert_eq!(ehr_equivalent(a, b, k), expected, "{a} {b} k={k}");
                }
            }
        }
    }

    #[test]
    fn types_match_search_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut equal = 0;
        for _ in 0..300 {
            let k = rng.random_range(1..=3);
            let a = random_tree(rng.random_range(1..=8), &mut rng);
            let b = random_tree(rng.random_range(1..=8), &mut rng);
            let w = ehr_wins(&a, &b, k).unwrap();
            assert_eq!(ehr_equivalent(&a, &b, k), w);
            equal += w as usize;
        }
        assert!(equal > 10);
    }

    #[test]
    fn equivalence_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let trees: Vec<RootedTree> = (0..30)
            .map(|_| random_tree(rng.random_range(1..=7), &mut rng))
            .collect();
        for k in 1..=2 {
            for a in &trees {
                for b in &trees {
                    let ab = ehr_wins(a, b, k).unwrap();
                    assert_eq!(ab, ehr_wins(b, a, k).unwrap());
                    if ehr_wins(a, b, k + 1).unwrap() {
                        assert!(ab, "monotonicity");
                    }
                    if ab {
                        for c in trees.iter().take(10) {
                            if ehr_wins(b, c, k).unwrap() {
                                assert!(ehr_wins(a, c, k).unwrap(), "transitivity");
                            }
                        }
                    }
                }
            }
        }
    }
}

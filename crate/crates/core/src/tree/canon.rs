use std::collections::HashMap;
use std::fmt;

use super::{NodeId, RootedTree};

/// Canonical parenthesis string: equal codes iff isomorphic rooted trees.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeCode(String);

impl TreeCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for TreeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Post-order over the tree without recursion.
fn post_order(t: &RootedTree) -> Vec<NodeId> {
    let mut order = t.bfs_order();
    order.reverse();
    order
}

/// `code(leaf) = "()"`, `code(v) = "(" + sorted child codes + ")"`, e.g. a
/// root over a leaf and a one-edge path is `(()(()))`.
pub fn canonical_code(t: &RootedTree) -> TreeCode {
    let mut codes: Vec<Option<String>> = vec![None; t.len()];
    for v in post_order(t) {
        let mut kids: Vec<String> = t
            .children(v)
            .iter()
            .map(|&c| codes[c].take().expect("children precede parents"))
            .collect();
        // Lexicographic with `)` ordered before `(`. Two distinct codes are
        // never prefixes of one another, so this is descending byte order.
        kids.sort_unstable_by(|a, b| b.cmp(a));
        let mut s = String::with_capacity(2 + kids.iter().map(String::len).sum::<usize>());
        s.push('(');
        for k in &kids {
            s.push_str(k);
        }
        s.push(')');
        codes[v] = Some(s);
    }
    TreeCode(codes[t.root()].take().unwrap())
}

/// AHU-style integer shapes shared across trees: two subtrees get the same id
/// iff they are isomorphic. Cheaper than strings on large trees.
#[derive(Default, Debug)]
pub struct ShapeInterner {
    ids: HashMap<Vec<u32>, u32>,
}

impl ShapeInterner {
    /// Shape id of every node's subtree.
    pub fn shapes(&mut self, t: &RootedTree) -> Vec<u32> {
        let mut shape = vec![0u32; t.len()];
        for v in post_order(t) {
            let mut key: Vec<u32> = t.children(v).iter().map(|&c| shape[c]).collect();
            key.sort_unstable();
            let next = self.ids.len() as u32;
            shape[v] = *self.ids.entry(key).or_insert(next);
        }
        shape
    }

    pub fn shape_of(&mut self, t: &RootedTree) -> u32 {
        self.shapes(t)[t.root()]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

pub fn isomorphic(a: &RootedTree, b: &RootedTree) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut interner = ShapeInterner::default();
    interner.shape_of(a) == interner.shape_of(b)
}

/// True iff some `T(v)` is isomorphic to `pattern`.
pub fn contains_subtree_iso(t: &RootedTree, pattern: &RootedTree) -> bool {
    let mut interner = ShapeInterner::default();
    let target = interner.shape_of(pattern);
    interner.shapes(t).contains(&target)
}

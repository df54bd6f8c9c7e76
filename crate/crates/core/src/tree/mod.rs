//! Finite rooted trees.
//!
//! Trees are unordered: the order of a node's child list is an artifact of
//! construction and carries no meaning. Identity up to isomorphism is decided
//! by [`canonical_code`] (or the integer form in [`ShapeInterner`]).
//!
//! Text format: a tree is `(` followed by the texts of its children followed
//! by `)`, so a single node is `()`. Whitespace between tokens is ignored when
//! parsing and never emitted.

mod canon;
mod metric;
mod sample;
mod univ;

pub use canon::{canonical_code, contains_subtree_iso, isomorphic, ShapeInterner, TreeCode};
pub use metric::{ball, distance, rad};
pub use sample::{poisson, sample_gw, GwSampler, NodeKey, SampleOutcome, DEFAULT_MAX_NODES};
pub use univ::christmas_tree;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    root: NodeId,
}

impl Default for RootedTree {
    fn default() -> Self {
        Self::leaf()
    }
}

impl RootedTree {
    /// The single-node tree.
    pub fn leaf() -> Self {
        RootedTree {
            parent: vec![None],
            children: vec![Vec::new()],
            root: 0,
        }
    }

    /// A path with `len` edges hanging down from the root.
    pub fn path(len: usize) -> Self {
        let mut t = Self::leaf();
        let mut tip = t.root;
        for _ in 0..len {
            tip = t.add_child(tip);
        }
        t
    }

    /// A root with `leaves` leaf children.
    pub fn star(leaves: usize) -> Self {
        let mut t = Self::leaf();
        for _ in 0..leaves {
            t.add_child(t.root);
        }
        t
    }

    /// A root whose child subtrees are copies of `subtrees`.
    pub fn with_children<'a>(subtrees: impl IntoIterator<Item = &'a RootedTree>) -> Self {
        let mut t = Self::leaf();
        for s in subtrees {
            t.graft(t.root, s);
        }
        t
    }

    /// Builds a tree from a parent list. Exactly one entry must be `None`.
    pub fn from_parents(parents: Vec<Option<NodeId>>) -> Result<Self> {
        let n = parents.len();
        if n == 0 {
            return Err(Error::InvalidTree("tree has no nodes".into()));
        }
        let mut root = None;
        let mut children = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate() {
            match *p {
                None if root.is_some() => {
                    return Err(Error::InvalidTree("more than one root".into()))
                }
                None => root = Some(v),
                Some(p) if p >= n => return Err(Error::UnknownNode(p)),
                Some(p) if p == v => {
                    return Err(Error::InvalidTree(format!("node {v} is its own parent")))
                }
                Some(p) => children[p].push(v),
            }
        }
        let root = root.ok_or_else(|| Error::InvalidTree("no root".into()))?;
        let t = RootedTree {
            parent: parents,
            children,
            root,
        };
        // Acyclic and connected iff BFS from the root reaches everything.
        if t.bfs_order().len() != n {
            return Err(Error::InvalidTree("parent links contain a cycle".into()));
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v < self.len()
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }

    /// Parent of `v`; `None` for the root.
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parent
    }

    pub fn add_child(&mut self, v: NodeId) -> NodeId {
        assert!(self.contains(v), "add_child on unknown node {v}");
        let id = self.len();
        self.parent.push(Some(v));
        self.children.push(Vec::new());
        self.children[v].push(id);
        id
    }

    /// Attaches a copy of `other` as a new child subtree of `at`. Returns the
    /// id of the copied root.
    pub fn graft(&mut self, at: NodeId, other: &RootedTree) -> NodeId {
        let mut map = vec![0; other.len()];
        let mut top = 0;
        for v in other.bfs_order() {
            let attach = match other.parent(v) {
                None => at,
                Some(p) => map[p],
            };
            map[v] = self.add_child(attach);
            if v == other.root {
                top = map[v];
            }
        }
        top
    }

    /// Nodes in breadth-first order starting at the root.
    pub fn bfs_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(self.children[v].iter().copied());
        }
        order
    }

    /// Generation of every node (root = 0).
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.len()];
        for v in self.bfs_order() {
            if let Some(p) = self.parent[v] {
                depth[v] = depth[p] + 1;
            }
        }
        depth
    }

    pub fn depth_of(&self, v: NodeId) -> Result<usize> {
        self.check(v)?;
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            d += 1;
            cur = p;
        }
        Ok(d)
    }

    /// Maximum generation present.
    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len()).filter(|&v| self.children[v].is_empty())
    }

    /// The s-cutoff: the induced tree on generations `0..=s`.
    pub fn cutoff(&self, s: usize) -> RootedTree {
        let depth = self.depths();
        self.induced(|v| depth[v] <= s, self.root)
    }

    /// `T(v)`: `v` and all of its descendants, rooted at `v`.
    pub fn subtree(&self, v: NodeId) -> Result<RootedTree> {
        self.check(v)?;
        Ok(self.induced(|_| true, v))
    }

    /// Copies the nodes below `top` that satisfy `keep` (closed upwards).
    fn induced(&self, keep: impl Fn(NodeId) -> bool, top: NodeId) -> RootedTree {
        let mut out = RootedTree::leaf();
        let mut queue = VecDeque::from([(top, out.root)]);
        while let Some((v, image)) = queue.pop_front() {
            for &c in &self.children[v] {
                if keep(c) {
                    let ci = out.add_child(image);
                    queue.push_back((c, ci));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }

    /// Text form with children in stored order.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(2 * self.len());
        // Explicit stack: (node, next child index).
        let mut stack = vec![(self.root, 0usize)];
        out.push('(');
        while let Some((v, i)) = stack.last_mut() {
            let kids = &self.children[*v];
            if *i < kids.len() {
                let c = kids[*i];
                *i += 1;
                out.push('(');
                stack.push((c, 0));
            } else {
                out.push(')');
                stack.pop();
            }
        }
        out
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for RootedTree {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let err = |pos: usize, msg: &str| Error::TreeSyntax {
            pos,
            msg: msg.to_string(),
        };
        let mut parents: Vec<Option<NodeId>> = Vec::new();
        let mut stack: Vec<NodeId> = Vec::new();
        let mut closed = false;
        for (pos, ch) in text.char_indices() {
            match ch {
                c if c.is_whitespace() => {}
                '(' => {
                    if closed {
                        return Err(err(pos, "trailing input after tree"));
                    }
                    let id = parents.len();
                    parents.push(stack.last().copied());
                    stack.push(id);
                }
                ')' => {
                    if stack.pop().is_none() {
                        return Err(err(pos, "unbalanced `)`"));
                    }
                    if stack.is_empty() {
                        closed = true;
                    }
                }
                _ => return Err(err(pos, "unexpected character")),
            }
        }
        if parents.is_empty() {
            return Err(err(text.len(), "empty tree text"));
        }
        if !stack.is_empty() {
            return Err(err(text.len(), "unclosed `(`"));
        }
        RootedTree::from_parents(parents)
    }
}

/// Reads one tree per non-blank line.
pub fn parse_tree_lines(text: &str) -> Result<Vec<RootedTree>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(RootedTree::parse)
        .collect()
}

/// A random recursive tree: node `i` attaches to a uniform earlier node.
pub fn random_tree<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> RootedTree {
    assert!(n >= 1);
    let mut parents = vec![None];
    for i in 1..n {
        parents.push(Some(rng.random_range(0..i)));
    }
    RootedTree::from_parents(parents).expect("recursive construction is a tree")
}

/// Every rooted unordered tree with exactly `n` nodes, one per isomorphism
/// class.
pub fn all_trees(n: usize) -> Vec<RootedTree> {
    let mut by_size: Vec<Vec<RootedTree>> = vec![Vec::new(), vec![RootedTree::leaf()]];
    for size in 2..=n {
        let mut interner = ShapeInterner::default();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        // Root plus a multiset of child trees with sizes summing to size - 1,
        // enumerated in non-increasing (size, index) order.
        let mut acc: Vec<(usize, usize)> = Vec::new();
        enumerate_forests(
            size - 1,
            (usize::MAX, usize::MAX),
            &by_size,
            &mut acc,
            &mut |forest| {
                let t = RootedTree::with_children(forest.iter().map(|&(s, i)| &by_size[s][i]));
                if seen.insert(interner.shape_of(&t)) {
                    out.push(t);
                }
            },
        );
        by_size.push(out);
    }
    by_size.into_iter().nth(n).unwrap_or_default()
}

fn enumerate_forests(
    remaining: usize,
    bound: (usize, usize),
    by_size: &[Vec<RootedTree>],
    acc: &mut Vec<(usize, usize)>,
    emit: &mut impl FnMut(&[(usize, usize)]),
) {
    if remaining == 0 {
        emit(acc);
        return;
    }
    for size in (1..=remaining.min(by_size.len() - 1)).rev() {
        for idx in 0..by_size[size].len() {
            if (size, idx) > bound {
                continue;
            }
            acc.push((size, idx));
            enumerate_forests(remaining - size, (size, idx), by_size, acc, emit);
            acc.pop();
        }
    }
}

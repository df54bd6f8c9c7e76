use std::collections::{BTreeSet, VecDeque};

use super::{NodeId, RootedTree};
use crate::error::{Error, Result};

/// Radius schedule: `rad(0) = 0`, `rad(i + 1) = 3 * rad(i) + 1`.
pub fn rad(i: u32) -> u64 {
    (0..i).fold(0u64, |r, _| 3 * r + 1)
}

/// Length of the shortest parent/child path between `v` and `w`.
pub fn distance(t: &RootedTree, v: NodeId, w: NodeId) -> Result<usize> {
    let (mut a, mut b) = (v, w);
    let mut da = t.depth_of(a)?;
    let mut db = t.depth_of(b)?;
    let mut steps = 0;
    while da > db {
        a = t.parent(a).unwrap();
        da -= 1;
        steps += 1;
    }
    while db > da {
        b = t.parent(b).unwrap();
        db -= 1;
        steps += 1;
    }
    while a != b {
        a = t.parent(a).unwrap();
        b = t.parent(b).unwrap();
        steps += 2;
    }
    Ok(steps)
}

/// All nodes within distance `r` of `v`.
pub fn ball(t: &RootedTree, v: NodeId, r: usize) -> Result<BTreeSet<NodeId>> {
    if !t.contains(v) {
        return Err(Error::UnknownNode(v));
    }
    let mut seen = BTreeSet::from([v]);
    let mut queue = VecDeque::from([(v, 0usize)]);
    while let Some((u, d)) = queue.pop_front() {
        if d == r {
            continue;
        }
        let nbrs = t.parent(u).into_iter().chain(t.children(u).iter().copied());
        for x in nbrs {
            if seen.insert(x) {
                queue.push_back((x, d + 1));
            }
        }
    }
    Ok(seen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rad_values() {
        assert_eq!(rad(0), 0);
        assert_eq!(rad(1), 1);
        assert_eq!(rad(2), 4);
        assert_eq!(rad(3), 13);
        for i in 0..20 {
            assert_eq!(rad(i + 1), 3 * rad(i) + 1);
        }
    }

    #[test]
    fn distances() {
        // R with children a, b; a has child c; b has child d.
        let t = RootedTree::parse("((())(()))").unwrap();
        let (a, c) = (1, 2);
        let (b, d) = (3, 4);
        assert_eq!(distance(&t, a, a).unwrap(), 0);
        assert_eq!(distance(&t, a, b).unwrap(), 2);
        assert_eq!(distance(&t, c, d).unwrap(), 4);
        assert_eq!(distance(&t, 0, d).unwrap(), 2);
        assert_eq!(distance(&t, 0, 9), Err(Error::UnknownNode(9)));
    }

    #[test]
    fn balls() {
        let t = RootedTree::path(2);
        assert_eq!(ball(&t, 1, 0).unwrap(), BTreeSet::from([1]));
        assert_eq!(ball(&t, 1, 1).unwrap(), BTreeSet::from([0, 1, 2]));
        let star = RootedTree::star(5);
        assert_eq!(ball(&star, 3, 2).unwrap().len(), 6);
        assert_eq!(ball(&star, 3, 1).unwrap(), BTreeSet::from([0, 3]));
        assert!(ball(&star, 6, 1).is_err());
    }
}

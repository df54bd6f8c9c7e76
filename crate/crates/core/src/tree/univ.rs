use super::{rad, RootedTree};

/// Christmas tree: the root carries `k` disjoint paths per ornament, each of
/// length `rad(k) + rad(k - 1) + 1`, and the far endpoint of each path is the
/// root of a fresh copy of its ornament.
pub fn christmas_tree(ornaments: &[RootedTree], k: u32) -> RootedTree {
    assert!(
        !ornaments.is_empty(),
        "christmas_tree needs at least one ornament"
    );
    assert!(k >= 1, "christmas_tree needs k >= 1");
    let len = (rad(k) + rad(k - 1) + 1) as usize;
    let mut t = RootedTree::leaf();
    for ornament in ornaments {
        for _ in 0..k {
            let mut tip = t.root();
            for _ in 0..len - 1 {
                tip = t.add_child(tip);
            }
            t.graft(tip, ornament);
        }
    }
    t
}

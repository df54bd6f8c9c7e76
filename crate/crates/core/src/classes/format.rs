//! Line-oriented system files.
//!
//! Rule systems:
//!
//! ```text
//! states: 1 2
//! threshold: 2
//! accept: 1
//! rule: 1 n[1]=0 n[2]=0
//! rule: 1 n[1]=w n[2]=0
//! default: 2
//! ```
//!
//! Unlisted states in a pattern are wildcards, as is `n[s]=*`. Compiled
//! systems replace `rule`/`default` with root-merge tables and carry one
//! representative tree per state:
//!
//! ```text
//! k: 1
//! leaf: s0
//! lift: s0 s1
//! merge: s0 s1 s1
//! rep: s0 ()
//! ```
//!
//! `lift: a b` says a root whose only child is in class `a` is in class `b`;
//! `merge: a b c` says joining the child lists of roots in classes `a` and `b`
//! gives class `c`. `#` starts a comment.

use std::fmt::Write as _;

use super::system::{CapSet, Count, MergeTables, Recursion, Rule, StateId, StateSet, StateSystem};
use crate::error::{Error, Result};
use crate::tree::RootedTree;

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::SystemSyntax {
        line,
        msg: msg.into(),
    }
}

/// A rule line: line number, target, and `(state, count)` constraints.
type DraftRule = (usize, String, Vec<(String, String)>);

#[derive(Default)]
struct Draft {
    names: Option<Vec<String>>,
    threshold: Option<u32>,
    accept: Option<Vec<(usize, String)>>,
    rules: Vec<DraftRule>,
    default: Option<(usize, String)>,
    k: Option<usize>,
    leaf: Option<(usize, String)>,
    lift: Vec<(usize, String, String)>,
    merge: Vec<(usize, String, String, String)>,
    reps: Vec<(usize, String, String)>,
}

fn words(rest: &str) -> Vec<String> {
    rest.split_whitespace().map(str::to_string).collect()
}

fn exactly<const N: usize>(line: usize, key: &str, rest: &str) -> Result<[String; N]> {
    let w = words(rest);
    w.try_into()
        .map_err(|_| syntax(line, format!("`{key}` takes {N} argument(s)")))
}

fn once<T>(slot: &mut Option<T>, line: usize, key: &str, v: T) -> Result<()> {
    if slot.is_some() {
        return Err(syntax(line, format!("duplicate `{key}`")));
    }
    *slot = Some(v);
    Ok(())
}

fn parse_pattern_item(line: usize, item: &str) -> Result<(String, String)> {
    let bad = || {
        syntax(
            line,
            format!("bad pattern item `{item}`, expected n[<state>]=<value>"),
        )
    };
    let inner = item.strip_prefix("n[").ok_or_else(bad)?;
    let (state, value) = inner.split_once("]=").ok_or_else(bad)?;
    if state.is_empty() || value.is_empty() {
        return Err(bad());
    }
    Ok((state.to_string(), value.to_string()))
}

/// Parses a system file.
pub fn load_manual_system(text: &str) -> Result<StateSystem> {
    let mut d = Draft::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content
            .split_once(':')
            .ok_or_else(|| syntax(line, "expected `key: value`"))?;
        let key = key.trim();
        match key {
            "states" => {
                let names = words(rest);
                if names.is_empty() {
                    return Err(syntax(line, "no states listed"));
                }
                for (a, n) in names.iter().enumerate() {
                    if n.contains(['[', ']', '=']) {
                        return Err(syntax(line, format!("invalid state name `{n}`")));
                    }
                    if names[..a].contains(n) {
                        return Err(syntax(line, format!("duplicate state `{n}`")));
                    }
                }
                once(&mut d.names, line, key, names)?;
            }
            "threshold" => {
                let [v] = exactly::<1>(line, key, rest)?;
                let kappa: u32 = v
                    .parse()
                    .ok()
                    .filter(|&k| k > 0)
                    .ok_or_else(|| syntax(line, "threshold must be a positive integer"))?;
                once(&mut d.threshold, line, key, kappa)?;
            }
            "accept" => {
                let names = words(rest).into_iter().map(|n| (line, n)).collect();
                once(&mut d.accept, line, key, names)?;
            }
            "rule" => {
                let mut it = rest.split_whitespace();
                let target = it
                    .next()
                    .ok_or_else(|| syntax(line, "rule needs a target state"))?;
                let items = it
                    .map(|item| parse_pattern_item(line, item))
                    .collect::<Result<_>>()?;
                d.rules.push((line, target.to_string(), items));
            }
            "default" => {
                let [s] = exactly::<1>(line, key, rest)?;
                once(&mut d.default, line, key, (line, s))?;
            }
            "k" => {
                let [v] = exactly::<1>(line, key, rest)?;
                let k = v
                    .parse()
                    .map_err(|_| syntax(line, "k must be a nonnegative integer"))?;
                once(&mut d.k, line, key, k)?;
            }
            "leaf" => {
                let [s] = exactly::<1>(line, key, rest)?;
                once(&mut d.leaf, line, key, (line, s))?;
            }
            "lift" => {
                let [a, b] = exactly::<2>(line, key, rest)?;
                d.lift.push((line, a, b));
            }
            "merge" => {
                let [a, b, c] = exactly::<3>(line, key, rest)?;
                d.merge.push((line, a, b, c));
            }
            "rep" => {
                let rest = rest.trim();
                let (s, tree) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| syntax(line, "`rep` takes a state and a tree"))?;
                d.reps.push((line, s.to_string(), tree.trim().to_string()));
            }
            other => return Err(syntax(line, format!("unknown key `{other}`"))),
        }
    }
    build(d)
}

fn build(d: Draft) -> Result<StateSystem> {
    let names = d.names.ok_or_else(|| syntax(0, "missing `states`"))?;
    let m = names.len();
    let lookup = |line: usize, n: &str| -> Result<StateId> {
        names
            .iter()
            .position(|x| x == n)
            .map(StateId)
            .ok_or_else(|| Error::UnknownState(format!("{n}` on line `{line}")))
    };
    let mut accept = StateSet::empty(m);
    for (line, n) in d.accept.unwrap_or_default() {
        accept.insert(lookup(line, &n)?);
    }

    let compiled = d.leaf.is_some() || !d.lift.is_empty() || !d.merge.is_empty();
    if compiled && (!d.rules.is_empty() || d.default.is_some()) {
        return Err(syntax(
            0,
            "a system has either rules or merge tables, not both",
        ));
    }

    let (cap, recursion) = if compiled {
        let kappa = d
            .threshold
            .or(d.k.map(|k| k.max(1) as u32))
            .ok_or_else(|| syntax(0, "missing `threshold`"))?;
        let (leaf_line, leaf) = d.leaf.ok_or_else(|| syntax(0, "missing `leaf`"))?;
        let leaf = lookup(leaf_line, &leaf)?;
        let mut lift = vec![None; m];
        for (line, a, b) in d.lift {
            let a = lookup(line, &a)?;
            if lift[a.0].replace(lookup(line, &b)?).is_some() {
                return Err(syntax(line, "duplicate `lift`"));
            }
        }
        let lift = lift
            .into_iter()
            .enumerate()
            .map(|(j, l)| l.ok_or_else(|| syntax(0, format!("no `lift` for `{}`", names[j]))))
            .collect::<Result<Vec<_>>>()?;
        let mut merge = vec![None; m * m];
        for (line, a, b, c) in d.merge {
            let (a, b, c) = (lookup(line, &a)?, lookup(line, &b)?, lookup(line, &c)?);
            for idx in [a.0 * m + b.0, b.0 * m + a.0] {
                if merge[idx].is_some_and(|old| old != c) {
                    return Err(syntax(line, "conflicting `merge`"));
                }
                merge[idx] = Some(c);
            }
        }
        for a in 0..m {
            // The single-node class is the identity and may be left implicit.
            merge[a * m + leaf.0].get_or_insert(StateId(a));
            merge[leaf.0 * m + a].get_or_insert(StateId(a));
        }
        let merge = merge
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    syntax(
                        0,
                        format!("no `merge` for `{}` `{}`", names[i / m], names[i % m]),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cap = CapSet::new(kappa).map_err(|_| syntax(0, "threshold must be positive"))?;
        (cap, Recursion::Merge(MergeTables { leaf, lift, merge }))
    } else {
        let kappa = d
            .threshold
            .ok_or_else(|| syntax(0, "missing `threshold`"))?;
        let cap = CapSet::new(kappa).map_err(|_| syntax(0, "threshold must be positive"))?;
        let mut rules = Vec::new();
        for (line, target, items) in d.rules {
            let target = lookup(line, &target)?;
            let mut pattern = vec![None; m];
            for (state, value) in items {
                let j = lookup(line, &state)?;
                pattern[j.0] = match value.as_str() {
                    "*" => None,
                    "w" => Some(Count::Omega),
                    v => {
                        let u: u32 = v
                            .parse()
                            .map_err(|_| syntax(line, format!("bad count `{v}`")))?;
                        if u >= kappa {
                            return Err(syntax(
                                line,
                                format!("count {u} is not below the threshold {kappa}; use `w`"),
                            ));
                        }
                        Some(Count::Exact(u))
                    }
                };
            }
            rules.push(Rule { target, pattern });
        }
        let (line, default) = d.default.ok_or(Error::MissingDefault)?;
        let default = lookup(line, &default)?;
        (cap, Recursion::Rules { rules, default })
    };

    let sys = StateSystem::new(names.clone(), cap, recursion, accept)?;
    if d.reps.is_empty() {
        return Ok(sys);
    }
    let mut reps = vec![None; m];
    for (line, s, text) in d.reps {
        let j = lookup(line, &s)?;
        let t = RootedTree::parse(&text).map_err(|e| syntax(line, e.to_string()))?;
        reps[j.0] = Some(t);
    }
    let reps = reps
        .into_iter()
        .enumerate()
        .map(|(j, t)| t.ok_or_else(|| syntax(0, format!("no `rep` for `{}`", names[j]))))
        .collect::<Result<Vec<_>>>()?;
    let k = d.k.ok_or_else(|| syntax(0, "representatives need `k`"))?;
    sys.with_representatives(reps, k)
}

/// Writes a system in the format read by [`load_manual_system`].
pub fn format_system(sys: &StateSystem) -> String {
    let mut out = String::new();
    let names = sys.names();
    let name = |j: StateId| names[j.0].as_str();
    let _ = writeln!(out, "states: {}", names.join(" "));
    let _ = writeln!(out, "threshold: {}", sys.cap().threshold());
    let accept: Vec<&str> = sys.accept().iter().map(name).collect();
    let _ = writeln!(out, "accept: {}", accept.join(" "));
    if let Some(k) = sys.k() {
        let _ = writeln!(out, "k: {k}");
    }
    match sys.recursion() {
        Recursion::Rules { rules, default } => {
            for r in rules {
                let _ = write!(out, "rule: {}", name(r.target));
                for (j, p) in r.pattern.iter().enumerate() {
                    if let Some(c) = p {
                        let _ = write!(out, " n[{}]={c}", names[j]);
                    }
                }
                out.push('\n');
            }
            let _ = writeln!(out, "default: {}", name(*default));
        }
        Recursion::Merge(t) => {
            let _ = writeln!(out, "leaf: {}", name(t.leaf));
            for j in sys.states() {
                let _ = writeln!(out, "lift: {} {}", name(j), name(t.lift[j.0]));
            }
            for a in sys.states().filter(|&a| a != t.leaf) {
                for b in sys.states().filter(|&b| b >= a && b != t.leaf) {
                    let _ = writeln!(
                        out,
                        "merge: {} {} {}",
                        name(a),
                        name(b),
                        name(t.merge(a, b))
                    );
                }
            }
        }
    }
    if let Some(reps) = sys.representatives() {
        for (j, t) in reps.iter().enumerate() {
            let _ = writeln!(out, "rep: {} {t}", names[j]);
        }
    }
    out
}

/// Systems shipped with the library.
pub mod bundled {
    use super::load_manual_system;
    use crate::classes::StateSystem;

    pub const EXAMPLE1: &str = include_str!("../../systems/example1.sys");
    pub const EXAMPLE2: &str = include_str!("../../systems/example2.sys");
    pub const INFINITE: &str = include_str!("../../systems/infinite.sys");

    /// Looks up a bundled system by file name, e.g. `example1.sys`.
    pub fn by_name(name: &str) -> Option<&'static str> {
        let stem = name.rsplit(['/', '\\']).next()?;
        match stem {
            "example1.sys" | "example1" => Some(EXAMPLE1),
            "example2.sys" | "example2" => Some(EXAMPLE2),
            "infinite.sys" | "infinite" => Some(INFINITE),
            _ => None,
        }
    }

    /// No node has exactly one child.
    pub fn example1() -> StateSystem {
        load_manual_system(EXAMPLE1).expect("bundled system parses")
    }

    /// Some node has exactly one child, which has exactly one child.
    pub fn example2() -> StateSystem {
        load_manual_system(EXAMPLE2).expect("bundled system parses")
    }

    /// The tree is infinite.
    pub fn infinite() -> StateSystem {
        load_manual_system(INFINITE).expect("bundled system parses")
    }
}

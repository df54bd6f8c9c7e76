use super::{Formula, Sentence, Term};
use crate::tree::{NodeId, RootedTree};

/// Tarskian truth of `sentence` on the finite tree `t`.
pub fn evaluate(t: &RootedTree, sentence: &Sentence) -> bool {
    let mut env = Vec::new();
    holds(t, sentence.formula(), &mut env)
}

fn lookup(t: &RootedTree, term: &Term, env: &[(&str, NodeId)]) -> NodeId {
    match term {
        Term::Root => t.root(),
        Term::Var(v) => {
            env.iter()
                .rev()
                .find(|(name, _)| name == v)
                .expect("sentences are closed")
                .1
        }
    }
}

fn holds<'f>(t: &RootedTree, f: &'f Formula, env: &mut Vec<(&'f str, NodeId)>) -> bool {
    match f {
        Formula::Not(x) => !holds(t, x, env),
        Formula::And(xs) => xs.iter().all(|x| holds(t, x, env)),
        Formula::Or(xs) => xs.iter().any(|x| holds(t, x, env)),
        Formula::Implies(a, b) => !holds(t, a, env) || holds(t, b, env),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let want = matches!(f, Formula::Exists(..));
            for node in 0..t.len() {
                env.push((v.as_str(), node));
                let r = holds(t, body, env);
                env.pop();
                if r == want {
                    return want;
                }
            }
            !want
        }
        Formula::Eq(a, b) => lookup(t, a, env) == lookup(t, b, env),
        Formula::Parent(a, b) => {
            let (a, b) = (lookup(t, a, env), lookup(t, b, env));
            t.parent(a) == Some(b)
        }
    }
}

use std::collections::BTreeSet;

use gwfo::logic::{ehr_wins, evaluate};
use gwfo::tree::random_tree;
use gwfo::Sentence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn term(scope: &[String], rng: &mut ChaCha8Rng) -> String {
    let i = rng.random_range(0..=scope.len());
    scope.get(i).cloned().unwrap_or_else(|| "R".into())
}

fn formula(depth: usize, scope: &mut Vec<String>, rng: &mut ChaCha8Rng, budget: usize) -> String {
    let roll = rng.random_range(0..10);
    if budget == 0 || (roll < 3 && !scope.is_empty()) || (depth == 0 && roll < 6) {
        let (a, b) = (term(scope, rng), term(scope, rng));
        return if rng.random_bool(0.7) {
            format!("(parent {a} {b})")
        } else {
            format!("(= {a} {b})")
        };
    }
    if depth > 0 && roll >= 5 {
        let v = format!("v{}", scope.len());
        let q = if rng.random_bool(0.5) {
            "exists"
        } else {
            "forall"
        };
        scope.push(v.clone());
        let body = formula(depth - 1, scope, rng, budget - 1);
        scope.pop();
        return format!("({q} {v} {body})");
    }
    match rng.random_range(0..4) {
        0 => format!("(not {})", formula(depth, scope, rng, budget - 1)),
        1 => format!(
            "(and {} {})",
            formula(depth, scope, rng, budget - 1),
            formula(depth, scope, rng, budget - 1)
        ),
        2 => format!(
            "(or {} {})",
            formula(depth, scope, rng, budget - 1),
            formula(depth, scope, rng, budget - 1)
        ),
        _ => format!(
            "(implies {} {})",
            formula(depth, scope, rng, budget - 1),
            formula(depth, scope, rng, budget - 1)
        ),
    }
}

fn pool(k: usize, size: usize, seed: u64) -> Vec<Sentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut texts = BTreeSet::new();
    while texts.len() < size {
        texts.insert(formula(k, &mut Vec::new(), &mut rng, 5));
    }
    let sentences: Vec<Sentence> = texts.iter().map(|t| Sentence::parse(t).unwrap()).collect();
    assert!(sentences.iter().all(|s| s.quantifier_depth() <= k));
    sentences
}

#[test]
fn game_equivalence_implies_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for k in 1..=2 {
        let sentences = pool(k, 60, k as u64);
        let mut equivalent = 0;
        for _ in 0..200 {
            let a = random_tree(rng.random_range(1..=10), &mut rng);
            // Bias towards equivalent pairs: small perturbations of `a`.
            let b = if rng.random_bool(0.5) {
                let mut b = a.clone();
                let v = rng.random_range(0..b.len());
                b.add_child(v);
                b
            } else {
                random_tree(rng.random_range(1..=10), &mut rng)
            };
            if !ehr_wins(&a, &b, k).unwrap() {
                continue;
            }
            equivalent += 1;
            for s in &sentences {
                assert_eq!(evaluate(&a, s), evaluate(&b, s), "{s} on {a} / {b}");
            }
        }
        assert!(
            equivalent >= 20,
            "k={k}: only {equivalent} equivalent pairs"
        );
    }
}

#[test]
fn parsed_sentences_round_trip() {
    for s in pool(2, 80, 9) {
        assert_eq!(Sentence::parse(&s.to_string()).unwrap(), s);
    }
}

//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::time::{Duration, Instant};

use gwfo::classes::{build_state_space, bundled, compile_sentence, Classifier, Limits};
use gwfo::logic::{ehr_wins, evaluate};
use gwfo::montecarlo::{estimate_interval, rapid_determination_curve, EstimateOptions};
use gwfo::solver::{
    contraction_probe, derivative_report, f_of_a, iterate_fixed_point, multi_start_uniqueness, psi,
    sweep, uniform_grid, Distribution, SolveOptions, SweepRow,
};
use gwfo::tree::{random_tree, GwSampler};
use gwfo::{Sentence, StateSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

/// Class count of the k = 2 closure, frozen from its first run and checked
/// against exhaustive games on all trees of at most 5 nodes.
const K2_CLASSES: usize = 27;

/// `1 - exp(-c (1 - exp(-c)))` to 30 digits.
const GRANDCHILD: [(f64, f64); 3] = [
    (0.5, 0.178_591_451_386_157_26),
    (1.0, 0.468_536_394_613_384_3),
    (2.0, 0.822_596_669_180_859_8),
];

fn ex1_rhs(c: f64, x: f64) -> f64 {
    (-c * (1.0 - x)).exp() * (1.0 - c * x * (-c * x).exp())
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant, detail: String, ok: bool) -> Check {
    let t = start.elapsed();
    let detail = format!(
        "{detail}; {:.2}s (limit {}s)",
        t.as_secs_f64(),
        limit.as_secs()
    );
    ensure(ok && t < limit, detail)
}

fn grid() -> Vec<f64> {
    uniform_grid(0.1, 3.0, 0.1).unwrap()
}

fn example_sweep(sys: &StateSystem) -> Result<Vec<SweepRow>, String> {
    sweep(sys, sys.accept(), &grid(), &SolveOptions::default()).map_err(|e| e.to_string())
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let rows = example_sweep(&bundled::example1())?;
    let worst = rows
        .iter()
        .map(|r| (r.fixed_point.get(0) - ex1_rhs(r.c, r.fixed_point.get(0))).abs())
        .fold(0.0, f64::max);
    let ok = rows.iter().all(|r| r.converged) && worst < 1e-9;
    within(
        Duration::from_secs(10),
        t,
        format!("max residual {worst:.2e} over {} rows", rows.len()),
        ok,
    )
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let rows = example_sweep(&bundled::example2())?;
    let mut worst = 0.0f64;
    for r in &rows {
        let (c, w) = (r.c, r.fixed_point.weights());
        let (x, y, z) = (w[0], w[1], w[2]);
        worst = worst
            .max((x - (1.0 - (-c * x).exp() + c * y * (-c).exp())).abs())
            .max((y - c * z * (-c).exp()).abs());
    }
    let ok = rows.iter().all(|r| r.converged) && worst < 1e-9;
    within(
        Duration::from_secs(10),
        t,
        format!("max residual {worst:.2e} over {} rows", rows.len()),
        ok,
    )
}

fn criterion_3() -> Check {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, sys) in [
        ("example1", bundled::example1()),
        ("example2", bundled::example2()),
    ] {
        for c in [0.2, 0.5, 0.9] {
            let r = contraction_probe(&sys, c, 1, 1000, 7, &[]).map_err(|e| e.to_string())?;
            ok &= r.max_ratio <= c + 1e-12 && r.evaluated == 1000;
            parts.push(format!("{name}@{c}: {:.4}", r.max_ratio));
        }
    }
    within(Duration::from_secs(30), t, parts.join(", "), ok)
}

fn criterion_4() -> Check {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, sys) in [
        ("example1", bundled::example1()),
        ("example2", bundled::example2()),
    ] {
        for c in [0.5, 2.0] {
            let r = multi_start_uniqueness(&sys, c, 20, &SolveOptions::default(), 11)
                .map_err(|e| e.to_string())?;
            ok &= r.converged == 20 && r.unique(1e-8);
            parts.push(format!("{name}@{c}: {:.1e}", r.max_pairwise_tv));
        }
    }
    within(
        Duration::from_secs(30),
        t,
        format!("max pairwise TV {}", parts.join(", ")),
        ok,
    )
}

fn criterion_5() -> Check {
    let sys = bundled::infinite();
    let dead = Distribution::vertex(2, 1);
    let stationary = psi(&sys, 2.0, &dead).map_err(|e| e.to_string())? == dead;
    let fp = iterate_fixed_point(
        &sys,
        2.0,
        &Distribution::uniform(2),
        &SolveOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let y = fp.x.get(0);
    let residual = ((-2.0 * y).exp() - (1.0 - y)).abs();
    let near = Distribution::new(vec![1e-6, 1.0 - 1e-6]).unwrap();
    let probe =
        contraction_probe(&sys, 2.0, 1, 0, 1, &[(dead, near)]).map_err(|e| e.to_string())?;
    ensure(
        stationary && fp.converged && residual < 1e-9 && probe.max_ratio > 1.0,
        format!(
            "(0,1) stationary: {stationary}; y = {y:.12} residual {residual:.1e}; ratio near (0,1) {:.4}",
            probe.max_ratio
        ),
    )
}

fn criterion_6() -> Check {
    let t = Instant::now();
    let h = 1e-3;
    let grid: Vec<f64> = (0..=20).map(|i| 0.99 + i as f64 * h).collect();
    let slopes = |sys: &StateSystem| -> Result<(f64, f64), String> {
        let rows =
            sweep(sys, sys.accept(), &grid, &SolveOptions::default()).map_err(|e| e.to_string())?;
        let r = derivative_report(&rows, h, Some(1.0)).map_err(|e| e.to_string())?;
        let b = r.breakpoint.expect("breakpoint requested");
        Ok((b.left, b.right))
    };
    let (il, ir) = slopes(&bundled::infinite())?;
    let (el, er) = slopes(&bundled::example1())?;
    let ok = (1.8..=2.2).contains(&ir) && (-0.1..=0.1).contains(&il) && (el - er).abs() <= 1e-2;
    within(
        Duration::from_secs(60),
        t,
        format!("infinite left {il:.4} right {ir:.4}; example1 left {el:.6} right {er:.6}"),
        ok,
    )
}

fn criterion_7() -> Check {
    let t = Instant::now();
    let sys = bundled::example1();
    let n = 100_000;
    let mut ok = true;
    let mut parts = Vec::new();
    for c in [0.5, 1.0, 2.0] {
        let fp = iterate_fixed_point(&sys, c, &Distribution::uniform(2), &SolveOptions::default())
            .map_err(|e| e.to_string())?;
        let f = f_of_a(sys.accept(), &fp.x).map_err(|e| e.to_string())?;
        let est = estimate_interval(&sys, sys.accept(), c, 30, n, 1, &EstimateOptions::default())
            .map_err(|e| e.to_string())?;
        let se = |p: f64| (p * (1.0 - p) / n as f64).sqrt();
        let (lo, hi) = (
            est.lower - 3.0 * se(est.lower),
            est.upper + 3.0 * se(est.upper),
        );
        ok &= fp.converged && lo <= f && f <= hi && est.over_approx_fraction == 0.0;
        parts.push(format!("c={c}: {f:.5} in [{lo:.5}, {hi:.5}]"));
    }
    within(Duration::from_secs(120), t, parts.join(", "), ok)
}

fn log_slope(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Positive root of `exp(-c y) = 1 - y`.
fn survival_newton(c: f64) -> f64 {
    let mut y = 1.0f64;
    for _ in 0..100 {
        y -= ((-c * y).exp() - 1.0 + y) / (1.0 - c * (-c * y).exp());
    }
    y
}

fn criterion_8() -> Check {
    let depths = [5, 10, 15, 20];
    let n = 10_000;
    let opts = EstimateOptions::default();
    let ex1 = rapid_determination_curve(&bundled::example1(), 2.0, &depths, n, 1, &opts)
        .map_err(|e| e.to_string())?;
    let decreasing = ex1.windows(2).all(|w| w[1].1 < w[0].1);
    let slope = if ex1.iter().all(|p| p.1 > 0.0) {
        log_slope(&ex1)
    } else {
        f64::NAN
    };
    let inf = rapid_determination_curve(&bundled::infinite(), 2.0, &depths, n, 1, &opts)
        .map_err(|e| e.to_string())?;
    let y = survival_newton(2.0);
    let floor = y - 3.0 * (y * (1.0 - y) / n as f64).sqrt();
    let stays = inf.iter().all(|p| p.1 >= floor);
    let fmt = |v: &[(usize, f64)]| {
        v.iter()
            .map(|p| format!("{:.4}", p.1))
            .collect::<Vec<_>>()
            .join(" ")
    };
    ensure(
        decreasing && slope < 0.0 && stays,
        format!(
            "example1 [{}] log slope {slope:.3}; infinite [{}] floor {floor:.4}",
            fmt(&ex1),
            fmt(&inf)
        ),
    )
}

/// Fraction of `n` depth-2 samples satisfying `sentence`, with its standard error.
fn sentence_frequency(sentence: &Sentence, c: f64, n: u64) -> (f64, f64) {
    let sampler = GwSampler::new(c, 5).unwrap();
    let hits = (0..n)
        .into_par_iter()
        .filter(|&i| evaluate(&sampler.sample(i, 2, 1_000_000).unwrap().tree, sentence))
        .count();
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

fn criterion_9() -> Check {
    let one = Sentence::parse("(exists x (parent x R))").map_err(|e| e.to_string())?;
    let two = Sentence::parse("(exists x (exists y (and (parent x R) (parent y x))))")
        .map_err(|e| e.to_string())?;
    let s1 = compile_sentence(&one, Limits::default()).map_err(|e| e.to_string())?;
    let s2 = compile_sentence(&two, Limits::default()).map_err(|e| e.to_string())?;
    let solve = |sys: &StateSystem, c: f64| -> Result<f64, String> {
        let fp = iterate_fixed_point(
            sys,
            c,
            &Distribution::uniform(sys.len()),
            &SolveOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        f_of_a(sys.accept(), &fp.x).map_err(|e| e.to_string())
    };
    let mut ok = s1.len() == 3 && s2.len() == K2_CLASSES;
    let mut worst: (f64, f64) = (0.0, 0.0);
    let mut oracle_ok = true;
    for (c, frozen) in GRANDCHILD {
        worst.0 = worst.0.max((solve(&s1, c)? - (1.0 - (-c).exp())).abs());
        let closed = 1.0 - (-c * (1.0 - (-c).exp())).exp();
        worst.1 = worst
            .1
            .max((solve(&s2, c)? - closed).abs())
            .max((closed - frozen).abs());
        let (p, se) = sentence_frequency(&two, c, 1_000_000);
        oracle_ok &= (p - closed).abs() < 4.0 * se;
    }
    ok &= worst.0 < 1e-9 && worst.1 < 1e-8 && oracle_ok;
    ensure(
        ok,
        format!(
            "k=1 max error {:.1e}; k=2 max error {:.1e}; sampling oracle within 4 sigma: {oracle_ok}",
            worst.0, worst.1
        ),
    )
}

fn criterion_10() -> Check {
    let k1 = build_state_space(1, Limits::default()).map_err(|e| e.to_string())?;
    let k2 = build_state_space(2, Limits::default()).map_err(|e| e.to_string())?;
    let mut classifier = Classifier::new(&k2).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let trees: Vec<_> = (0..200)
        .map(|_| random_tree(rng.random_range(1..=12), &mut rng))
        .collect();
    let classes = trees
        .iter()
        .map(|t| classifier.classify(t))
        .collect::<gwfo::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let pairs: Vec<(usize, usize)> = (0..trees.len())
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .collect();
    let mismatches = pairs
        .par_iter()
        .filter(|&&(i, j)| ehr_wins(&trees[i], &trees[j], 2).unwrap() != (classes[i] == classes[j]))
        .count();
    let equal = pairs
        .iter()
        .filter(|&&(i, j)| classes[i] == classes[j])
        .count();
    ensure(
        mismatches == 0 && k1.len() == 3 && k2.len() == K2_CLASSES,
        format!(
            "{} pairs ({equal} same class), {mismatches} mismatches; {} classes at k=1, {} at k=2",
            pairs.len(),
            k1.len(),
            k2.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("example-1 residual", criterion_1),
        ("example-2 residuals", criterion_2),
        ("subcritical contraction", criterion_3),
        ("uniqueness from 20 starts", criterion_4),
        ("two fixed points of the survival system", criterion_5),
        ("kink at c = 1", criterion_6),
        ("solver inside simulation interval", criterion_7),
        ("rapid determination", criterion_8),
        ("compiled closed forms", criterion_9),
        ("game and compiler coherence", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} criterion {:>2} {name}: {detail} [{:.2}s]",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use gwfo::classes::{
    accepting_set, build_state_space, bundled, format_system, load_manual_system, Limits,
};
use gwfo::logic::{ehr_wins, evaluate};
use gwfo::montecarlo::{estimate_interval, write_simulate_csv, EstimateOptions};
use gwfo::solver::{
    contraction_probe, derivative_report, fmt_real, iterate_fixed_point, multi_start_uniqueness,
    sweep, uniform_grid, write_sweep_csv, Distribution, PsiConfig, SolveOptions,
};
use gwfo::tree::{christmas_tree, parse_tree_lines};
use gwfo::{RootedTree, Sentence, StateSet, StateSystem};

use crate::failure::Failure;
use crate::{Command, SolverArgs, SystemArgs, Verify};

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Compile {
            sentence,
            k,
            out,
            max_states,
            max_seconds,
        } => {
            let sentence = read_sentence(&sentence)?;
            let limits = Limits {
                max_states,
                max_seconds,
            };
            let sys = build_state_space(k, limits)?;
            let accept = accepting_set(&sys, &sentence)?;
            let sys = sys.with_accept(accept)?;
            let text = format!("# {sentence}\n{}", format_system(&sys));
            emit(Some(&out), &text)
        }
        Command::Solve {
            system,
            c,
            solver,
            out,
        } => {
            let (sys, accept) = load_system(&system)?;
            let opts = solver.options(true);
            let fp = iterate_fixed_point(&sys, c, &Distribution::uniform(sys.len()), &opts)?;
            let row = gwfo::solver::SweepRow {
                c,
                f_a: gwfo::solver::f_of_a(&accept, &fp.x)?,
                fixed_point: fp.x.clone(),
                iterations: fp.iterations,
                residual_tv: fp.residual_tv,
                converged: fp.converged,
                estimated: fp.estimated,
            };
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &sys, std::slice::from_ref(&row))?;
            emit(out.as_deref(), &String::from_utf8(buf)?)?;
            if !fp.converged {
                return Err(Failure::NonConvergence(format!(
                    "no convergence after {} iterations (residual {})",
                    fp.iterations,
                    fmt_real(fp.residual_tv)
                ))
                .into());
            }
            Ok(())
        }
        Command::Sweep {
            system,
            from,
            to,
            step,
            cold,
            solver,
            out,
        } => {
            let (sys, accept) = load_system(&system)?;
            let grid = uniform_grid(from, to, step)?;
            let rows = sweep(&sys, &accept, &grid, &solver.options(!cold))?;
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &sys, &rows)?;
            emit(out.as_deref(), &String::from_utf8(buf)?)?;
            let failed: Vec<String> = rows
                .iter()
                .filter(|r| !r.converged)
                .map(|r| fmt_real(r.c))
                .collect();
            if !failed.is_empty() {
                return Err(Failure::NonConvergence(format!(
                    "{} of {} rows did not converge (c = {})",
                    failed.len(),
                    rows.len(),
                    failed.join(", ")
                ))
                .into());
            }
            Ok(())
        }
        Command::Simulate {
            system,
            c,
            depth,
            samples,
            seed,
            set_limit,
            max_nodes,
            out,
        } => {
            let (sys, accept) = load_system(&system)?;
            let opts = EstimateOptions {
                set_limit,
                max_nodes,
            };
            let est = estimate_interval(&sys, &accept, c, depth, samples, seed, &opts)?;
            let mut buf = Vec::new();
            write_simulate_csv(&mut buf, &[est])?;
            emit(out.as_deref(), &String::from_utf8(buf)?)
        }
        Command::Verify(v) => verify(v),
        Command::Game { left, right, k } => {
            let (l, r) = (read_tree(&left)?, read_tree(&right)?);
            let duplicator = ehr_wins(&l, &r, k)?;
            println!("{}", if duplicator { "duplicator" } else { "spoiler" });
            Ok(())
        }
        Command::Eval { sentence, tree } => {
            let sentence = read_sentence(&sentence)?;
            println!("{}", evaluate(&read_tree(&tree)?, &sentence));
            Ok(())
        }
        Command::Universal { ornaments, k, out } => {
            let text = fs::read_to_string(&ornaments)
                .with_context(|| format!("reading {}", ornaments.display()))?;
            let trees = parse_tree_lines(&text)?;
            if trees.is_empty() {
                return Err(gwfo::Error::InvalidParameter("no ornaments given".into()).into());
            }
            if k == 0 {
                return Err(gwfo::Error::InvalidParameter("k must be at least 1".into()).into());
            }
            emit(
                out.as_deref(),
                &format!("{}\n", christmas_tree(&trees, k).to_text()),
            )
        }
    }
}

fn verify(v: Verify) -> Result<()> {
    match v {
        Verify::Contraction {
            system,
            c,
            power,
            pairs,
            seed,
        } => {
            let (sys, _) = load_system(&system)?;
            let r = contraction_probe(&sys, c, power, pairs, seed, &[])?;
            let bound = c.powi(power as i32) + 1e-12;
            println!(
                "max_ratio={} bound={} evaluated={} skipped={}",
                fmt_real(r.max_ratio),
                fmt_real(bound),
                r.evaluated,
                r.skipped
            );
            if r.max_ratio > bound {
                return Err(verification(
                    "contraction-violated",
                    format!(
                        "ratio {} exceeds c^s = {}",
                        fmt_real(r.max_ratio),
                        fmt_real(bound)
                    ),
                ));
            }
            Ok(())
        }
        Verify::Uniqueness {
            system,
            c,
            starts,
            tolerance,
            seed,
            solver,
        } => {
            let (sys, _) = load_system(&system)?;
            let r = multi_start_uniqueness(&sys, c, starts, &solver.options(true), seed)?;
            println!(
                "max_pairwise_tv={} converged={}/{} clusters={}",
                fmt_real(r.max_pairwise_tv),
                r.converged,
                r.runs,
                r.clusters.len()
            );
            for x in &r.clusters {
                println!("fixed_point={x}");
            }
            if !r.unique(tolerance) {
                return Err(verification(
                    "multiple-fixed-points",
                    format!(
                        "{} distinct limits, largest distance {}",
                        r.clusters.len(),
                        fmt_real(r.max_pairwise_tv)
                    ),
                ));
            }
            if r.converged < r.runs {
                return Err(Failure::NonConvergence(format!(
                    "{} of {} starts did not converge",
                    r.runs - r.converged,
                    r.runs
                ))
                .into());
            }
            Ok(())
        }
        Verify::Smoothness {
            system,
            from,
            to,
            step,
            breakpoint,
            tolerance,
            solver,
        } => {
            let (sys, accept) = load_system(&system)?;
            let grid = uniform_grid(from, to, step)?;
            let rows = sweep(&sys, &accept, &grid, &solver.options(true))?;
            let report = derivative_report(&rows, step, breakpoint)?;
            println!("c,first,second");
            for d in &report.interior {
                println!(
                    "{},{},{}",
                    fmt_real(d.c),
                    fmt_real(d.first),
                    fmt_real(d.second)
                );
            }
            // Right minus left slope at each checked point.
            let gaps: Vec<(f64, f64)> = match &report.breakpoint {
                Some(b) => {
                    println!(
                        "breakpoint={} left={} right={}",
                        fmt_real(b.c),
                        fmt_real(b.left),
                        fmt_real(b.right)
                    );
                    vec![(b.c, b.right - b.left)]
                }
                None => report
                    .interior
                    .iter()
                    .map(|d| (d.c, d.second * step))
                    .collect(),
            };
            if let Some(&(c, gap)) = gaps.iter().find(|g| g.1.abs() > tolerance) {
                return Err(verification(
                    "not-smooth",
                    format!(
                        "one-sided slopes at c = {} differ by {}",
                        fmt_real(c),
                        fmt_real(gap)
                    ),
                ));
            }
            Ok(())
        }
    }
}

fn verification(category: &'static str, msg: String) -> anyhow::Error {
    Failure::Verification { category, msg }.into()
}

impl SolverArgs {
    fn options(&self, warm_start: bool) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            psi: PsiConfig {
                seed: self.psi_seed,
                ..PsiConfig::default()
            },
            warm_start,
        }
    }
}

/// Loads a system file, falling back to a bundled system of that name.
fn load_system(args: &SystemArgs) -> Result<(StateSystem, StateSet)> {
    let path = Path::new(&args.system);
    let text = if path.exists() {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    } else {
        bundled::by_name(&args.system)
            .ok_or_else(|| anyhow!("no system file or bundled system named {}", args.system))?
            .to_string()
    };
    let sys = load_manual_system(&text)?;
    let accept = match &args.accept {
        None => sys.accept().clone(),
        Some(names) => {
            let mut set = StateSet::empty(sys.len());
            for n in names {
                set.insert(sys.state(n.trim())?);
            }
            set
        }
    };
    Ok((sys, accept))
}

fn read_tree(path: &PathBuf) -> Result<RootedTree> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(RootedTree::parse(text.trim())?)
}

/// Sentence text, or the contents of a file of that name.
fn read_sentence(arg: &str) -> Result<Sentence> {
    let path = Path::new(arg);
    let text = if !arg.trim_start().starts_with('(') && path.is_file() {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    } else {
        arg.to_string()
    };
    Ok(Sentence::parse(text.trim())?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

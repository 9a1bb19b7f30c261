//! Command-line surface. Human-readable output goes to standard error,
//! machine JSON to standard output. Exit codes: 0 decided (or all checks
//! pass), 2 inconclusive, 1 usage/validation error or failing check.

use crate::catalog;
use crate::decide::{self, triviality_json, Question, Verdict};
use crate::fullgroup::{self, FullGroupElement};
use crate::invariants::{min_generators, profinite_type, supernatural};
use crate::oracle::{self, CheckReport, FiniteModel, Side, DEFAULT_SEED};
use crate::scale::{ScaleKind, ZdScale};
use crate::tower::{FiniteGroup, FiniteGroupTower, QuotientTower, DEFAULT_ENUMERATION_BOUND};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};

pub const EXIT_DECIDED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "odometer",
    about = "Exact computation with Z^d-odometers: invariants, truncated full groups, \
             and orbit-equivalence decision procedures",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the classification invariants of one scale
    Invariants { scale: PathBuf },
    /// Decide a classification question for a pair of scales
    Decide {
        /// one of: oe, stab-iso, coe
        question: String,
        scale_a: PathBuf,
        scale_b: PathBuf,
    },
    /// Operate on truncated full-group elements
    Fullgroup {
        #[command(subcommand)]
        op: FullgroupOp,
    },
    /// Run brute-force validation suites
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
    /// Run the bundled catalog of published examples and flag discrepancies
    PaperExamples {
        /// emit the machine-readable record list on standard output
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum FullgroupOp {
    /// Composition g . f (f applied first)
    Compose {
        #[arg(long)]
        scale: PathBuf,
        g: PathBuf,
        f: PathBuf,
    },
    /// Inverse element
    Invert {
        #[arg(long)]
        scale: PathBuf,
        f: PathBuf,
    },
    /// Factor into kernel part and cell permutation
    Decompose {
        #[arg(long)]
        scale: PathBuf,
        f: PathBuf,
    },
    /// Validate a table: bijectivity and measure preservation
    Verify {
        #[arg(long)]
        scale: PathBuf,
        f: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleOp {
    /// Run a named suite of checks
    Run {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// enumeration bound for exhaustive parts
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BOUND)]
        bound: u64,
    },
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Invariants { scale } => cmd_invariants(&scale),
        Command::Decide {
            question,
            scale_a,
            scale_b,
        } => cmd_decide(&question, &scale_a, &scale_b),
        Command::Fullgroup { op } => cmd_fullgroup(op),
        Command::Oracle {
            op: OracleOp::Run { suite, seed, bound },
        } => cmd_oracle_run(&suite, seed, bound),
        Command::PaperExamples { json } => cmd_paper_examples(json),
    }
}

fn load_scale(path: &Path) -> Result<ZdScale, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ZdScale::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_invariants(path: &Path) -> i32 {
    let scale = match load_scale(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let triviality = match scale.certify_trivial_intersection() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if matches!(scale.kind(), ScaleKind::Explicit { .. }) {
        eprintln!(
            "evidence-only: '{}' is an explicit chain; exponents may carry lower bounds (>=k) \
             and the trivial-intersection status is evidence, not a certificate",
            scale.name()
        );
    }
    let sn = supernatural(&scale);
    let ty = profinite_type(&scale);
    let doc = json!({
        "name": scale.name(),
        "dim": scale.dim(),
        "triviality": triviality_json(&triviality),
        "supernatural": match &sn {
            Ok(s) => serde_json::Value::Array(
                s.factors().iter().map(|(p, e)| json!([p, decide::exponent_json(e)])).collect(),
            ),
            Err(e) => json!({"error": e.to_string()}),
        },
        "supernatural_rendered": sn.as_ref().map(|s| s.to_string()).unwrap_or_default(),
        "profinite_type": match &ty {
            Ok(t) => decide::profinite_type_json(t),
            Err(e) => json!(e.to_string()),
        },
        "profinite_type_rendered": ty.as_ref().map(|t| t.render()).unwrap_or_default(),
        "min_generators": match ty.as_ref().ok().and_then(min_generators) {
            Some(k) => json!(k),
            None => json!("unknown"),
        },
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    EXIT_DECIDED
}

fn cmd_decide(question: &str, a: &Path, b: &Path) -> i32 {
    let Some(q) = Question::parse(question) else {
        eprintln!("error: unknown question '{question}' (expected oe, stab-iso or coe)");
        return EXIT_ERROR;
    };
    let (sa, sb) = match (load_scale(a), load_scale(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let report = decide::decide(q, &sa, &sb);
    eprintln!("{}", report.summary());
    for note in &report.notes {
        eprintln!("  note: {note}");
    }
    println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
    match report.verdict {
        Verdict::Yes | Verdict::No => EXIT_DECIDED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn element_depth(text: &str) -> Result<usize, String> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("invalid element JSON: {e}"))?;
    v.get("depth")
        .and_then(|d| d.as_u64())
        .map(|d| d as usize)
        .ok_or_else(|| "element JSON lacks a numeric 'depth'".to_string())
}

fn load_elements(
    scale_path: &Path,
    element_paths: &[&Path],
) -> Result<(std::sync::Arc<QuotientTower>, Vec<FullGroupElement>), String> {
    let scale = load_scale(scale_path)?;
    let texts = element_paths
        .iter()
        .map(|p| {
            std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let depth = texts
        .iter()
        .map(|t| element_depth(t))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(1);
    let tower = QuotientTower::build(&scale, depth).map_err(|e| e.to_string())?;
    let elements = texts
        .iter()
        .map(|t| FullGroupElement::from_json(&tower, t).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((tower, elements))
}

fn cmd_fullgroup(op: FullgroupOp) -> i32 {
    let result = match &op {
        FullgroupOp::Compose { scale, g, f } => {
            load_elements(scale, &[g.as_path(), f.as_path()]).and_then(|(_, el)| {
                fullgroup::compose(&el[0], &el[1])
                    .map(|r| r.to_json())
                    .map_err(|e| e.to_string())
            })
        }
        FullgroupOp::Invert { scale, f } => {
            load_elements(scale, &[f.as_path()]).and_then(|(_, el)| {
                fullgroup::invert(&el[0])
                    .map(|r| r.to_json())
                    .map_err(|e| e.to_string())
            })
        }
        FullgroupOp::Decompose { scale, f } => {
            load_elements(scale, &[f.as_path()]).and_then(|(tower, el)| {
                let f = &el[0];
                let reps = tower
                    .section(f.level(), f.depth())
                    .map_err(|e| e.to_string())?;
                let dec = fullgroup::decompose(f, &reps).map_err(|e| e.to_string())?;
                let to_i64 = |c: &num_bigint::BigInt| {
                    use num_traits::ToPrimitive;
                    c.to_i64().expect("canonical residues fit i64")
                };
                let cell = |rank: usize| {
                    tower
                        .coset_by_rank(f.level(), rank)
                        .unwrap()
                        .residue()
                        .iter()
                        .map(to_i64)
                        .collect::<Vec<_>>()
                };
                let doc = json!({
                    "level": f.level(),
                    "depth": f.depth(),
                    "sigma": (0..dec.sigma().len()).map(|r| json!({
                        "cell": cell(r),
                        "image": cell(dec.sigma().apply(r)),
                    })).collect::<Vec<_>>(),
                    "phi": (0..dec.phi().len()).map(|r| json!({
                        "cell": cell(r),
                        "w": dec.phi()[r].residue().iter().map(to_i64).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                });
                Ok(serde_json::to_string_pretty(&doc).unwrap())
            })
        }
        FullgroupOp::Verify { scale, f } => {
            load_elements(scale, &[f.as_path()]).and_then(|(tower, el)| {
                let f = &el[0];
                let mp = f.is_measure_preserving().map_err(|e| e.to_string())?;
                if !mp {
                    return Err("element does not preserve the uniform measure".into());
                }
                let doc = json!({
                    "valid": true,
                    "level": f.level(),
                    "depth": f.depth(),
                    "cells": tower.card_usize(f.level()).map_err(|e| e.to_string())?,
                    "measure_preserving": true,
                });
                Ok(serde_json::to_string_pretty(&doc).unwrap())
            })
        }
    };
    match result {
        Ok(body) => {
            println!("{body}");
            EXIT_DECIDED
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn cmd_paper_examples(json_out: bool) -> i32 {
    let records = catalog::run_catalog();
    eprint!("{}", catalog::render_table(&records));
    if json_out {
        println!(
            "{}",
            serde_json::to_string_pretty(&catalog::records_json(&records)).unwrap()
        );
    }
    EXIT_DECIDED
}

fn fixture_scale(name: &str, entries: &[i64]) -> ZdScale {
    ZdScale::diagonal(name, entries).expect("fixture scale")
}

fn shear_scale() -> ZdScale {
    ZdScale::geometric(
        "shear(2)",
        crate::lattice::IntMatrix::identity(2),
        crate::lattice::IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap(),
    )
    .unwrap()
}

fn triple_dyadic() -> ZdScale {
    ZdScale::geometric(
        "(3*2^n)",
        crate::lattice::IntMatrix::diagonal(&[3]),
        crate::lattice::IntMatrix::diagonal(&[2]),
    )
    .unwrap()
}

fn model(scale: &ZdScale, lower: usize, upper: usize, bound: u64) -> FiniteModel {
    FiniteModel::from_scale(scale, lower, upper, bound).expect("fixture model")
}

fn heisenberg_model() -> FiniteModel {
    let t = FiniteGroupTower::heisenberg(2, 2).expect("Heisenberg tower");
    FiniteModel::from_group_tower(&t, 1, 2)
}

/// The named oracle suites.
pub fn run_suite(suite: &str, seed: u64, bound: u64) -> Option<Vec<CheckReport>> {
    let two_adic = fixture_scale("(2^n)", &[2]);
    let mut checks = Vec::new();
    let mut matched = false;
    let want = |name: &str| suite == name || suite == "all";

    if want("fullgroup") {
        matched = true;
        for (s, lo, hi) in [
            (&two_adic, 1, 2),
            (&two_adic, 1, 3),
            (&two_adic, 2, 2),
            (&fixture_scale("diag(2,2)^n", &[2, 2]), 1, 2),
            (&fixture_scale("diag(2,3)^n", &[2, 3]), 1, 1),
        ] {
            checks.push(oracle::full_group_check(
                &model(s, lo, hi, bound),
                Side::Right,
                bound,
                seed,
            ));
        }
    }
    if want("centralizer") {
        matched = true;
        checks.push(oracle::centralizer_check(&model(&two_adic, 1, 3, bound), bound, seed));
        checks.push(oracle::centralizer_check(
            &model(&fixture_scale("diag(2,3)^n", &[2, 3]), 1, 2, bound),
            bound,
            seed,
        ));
        checks.push(oracle::centralizer_check(&heisenberg_model(), bound, seed));
    }
    if want("regular-commutant") {
        matched = true;
        checks.push(oracle::regular_commutant_check(&FiniteGroup::cyclic(4)));
        checks.push(oracle::regular_commutant_check(
            &FiniteGroup::heisenberg(2).expect("H3(Z/2)"),
        ));
        checks.push(oracle::regular_commutant_check(&FiniteGroup::symmetric(3)));
    }
    if want("alpha") {
        matched = true;
        checks.push(oracle::alpha_check(&heisenberg_model(), seed, oracle::DEFAULT_SAMPLES));
        checks.push(oracle::alpha_check(&model(&two_adic, 1, 2, bound), seed, 1000));
    }
    if want("orbit-count") {
        matched = true;
        for (s, lo, hi) in [
            (&two_adic, 1, 3),
            (&two_adic, 0, 2),
            (&triple_dyadic(), 1, 2),
            (&fixture_scale("(6^n)", &[6]), 1, 2),
            (&fixture_scale("diag(2,15)^n", &[2, 15]), 1, 2),
            (&fixture_scale("diag(6,10)^n", &[6, 10]), 1, 1),
            (&fixture_scale("diag(6,5)^n", &[6, 5]), 1, 1),
            (&shear_scale(), 1, 2),
        ] {
            checks.push(oracle::orbit_count_check(&model(s, lo, hi, bound)));
        }
        checks.push(oracle::orbit_count_check(&heisenberg_model()));
    }
    if want("semidirect") {
        matched = true;
        for (s, lo, hi) in [
            (&two_adic, 1, 2),
            (&two_adic, 1, 3),
            (&two_adic, 2, 2),
            (&fixture_scale("diag(2,3)^n", &[2, 3]), 1, 1),
            (&fixture_scale("diag(2,2)^n", &[2, 2]), 1, 2),
            (&fixture_scale("diag(2,15)^n", &[2, 15]), 1, 2),
            (&triple_dyadic(), 1, 2),
            (&fixture_scale("(6^n)", &[6]), 1, 2),
            (&fixture_scale("diag(6,5)^n", &[6, 5]), 1, 1),
            (&shear_scale(), 1, 2),
        ] {
            checks.push(oracle::semidirect_check(s, lo, hi, bound, seed));
        }
    }
    if want("subgroup") {
        matched = true;
        checks.push(oracle::subgroup_matching_check(2, &[2, 1], &[3]));
        checks.push(oracle::subgroup_matching_check(2, &[2], &[1, 1]));
        checks.push(oracle::subgroup_matching_check(3, &[2, 1], &[1, 1]));
        checks.push(oracle::subgroup_matching_check(2, &[2, 1], &[2, 1]));
    }
    if want("subgroup-sweep") {
        matched = true;
        checks.push(oracle::subgroup_matching_sweep(512));
    }
    if want("chain") {
        matched = true;
        checks.push(chain_check(seed, 200));
    }
    if matched {
        Some(checks)
    } else {
        None
    }
}

/// Implication-chain property on seeded random certified pairs plus the
/// catalog pairs.
pub fn chain_check(seed: u64, pairs: usize) -> CheckReport {
    let scales = oracle::random_certified_scales(seed, 2 * pairs, &[1, 2]);
    let mut pair_list: Vec<(ZdScale, ZdScale)> = scales
        .chunks(2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();
    for ex in catalog::catalog() {
        pair_list.push((ex.left.clone(), ex.right.clone()));
    }
    let report = decide::implication_chain_check(&pair_list);
    let mut check = CheckReport {
        name: "implication-chain".into(),
        pass: report.pass(),
        mode: oracle::Mode::Sampled {
            seed,
            samples: pairs,
        },
        details: report.violations.clone(),
    };
    check.details.push(format!(
        "{} pairs checked, {} skipped as inconclusive",
        report.pairs_checked, report.pairs_skipped_inconclusive
    ));
    check
}

fn cmd_oracle_run(suite: &str, seed: u64, bound: u64) -> i32 {
    let Some(checks) = run_suite(suite, seed, bound) else {
        eprintln!(
            "error: unknown suite '{suite}' (expected fullgroup, centralizer, \
             regular-commutant, alpha, orbit-count, semidirect, subgroup, subgroup-sweep, \
             chain or all)"
        );
        return EXIT_ERROR;
    };
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        eprintln!(
            "{} {} ({})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            match &c.mode {
                oracle::Mode::Exhaustive => "exhaustive".to_string(),
                oracle::Mode::Sampled { seed, samples } =>
                    format!("sampled, seed {seed}, {samples} samples"),
            }
        );
        if !c.pass {
            for d in &c.details {
                eprintln!("  {d}");
            }
        }
    }
    let doc = json!({
        "suite": suite,
        "seed": seed,
        "pass": pass,
        "checks": checks.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    if pass {
        EXIT_DECIDED
    } else {
        EXIT_ERROR
    }
}

//! Command-line front end: parse diagrams and algebras, run evaluations
//! and verification suites, emit text or JSON.

use crate::beads;
use crate::diagram::{
    apply_move, component_count, enumerate_move_sites, parse_morse, random_diagram, render_morse,
    MorseDiagram,
};
use crate::evaluator::{closure_value, evaluate};
use crate::homfly::build_homfly;
use crate::laurent::{poly_to_json, LaurentPoly};
use crate::oqa::{check_all, load_algebra_file, CheckReport, MatrixOQA};
use crate::statesum::{self, expand_states, state_to_json, ExpansionWeights};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "oqinv", version, about = "Exact regular-isotopy invariants of oriented tangles")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Args)]
struct AlgebraArgs {
    /// Built-in algebra family.
    #[arg(long, default_value = "homfly")]
    algebra: String,
    /// Rank of the built-in algebra (>= 1).
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Load the algebra from a JSON file instead.
    #[arg(long, conflicts_with_all = ["algebra", "rank"])]
    algebra_file: Option<PathBuf>,
    /// Reject algebras that fail any axiom check.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct OutArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    out: OutFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a diagram's invariant by tensor contraction.
    Eval {
        /// Path to a Morse diagram file.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate a closed diagram by the combinatorial state sum.
    Statesum {
        #[arg(long)]
        input: PathBuf,
        /// Label-set size of the built-in weight family.
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Crossing-count bound for the expansion.
        #[arg(long, default_value_t = 16)]
        max_crossings: usize,
        /// Include every expanded state in the JSON output.
        #[arg(long)]
        dump_states: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reduce a one-component diagram to its bead normal form and evaluate it.
    Beads {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run every axiom check on an algebra.
    CheckAxioms {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fuzz closed diagrams and verify move invariance of the evaluator.
    CheckMoves {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        max_crossings: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the skein relation at one crossing site of a diagram.
    Skein {
        #[arg(long)]
        input: PathBuf,
        /// Slice of the crossing.
        #[arg(long)]
        slice: usize,
        /// Event index of the crossing within its slice.
        #[arg(long)]
        index: usize,
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Run with the given argv; returns the process exit code after printing
/// the result (exit 0), a domain error (1), or a usage error (2).
pub fn run(argv: Vec<String>) -> i32 {
    match run_to_string(argv) {
        Ok(s) => {
            println!("{s}");
            0
        }
        Err(RunError::Domain(msg)) => {
            eprintln!("{msg}");
            1
        }
        Err(RunError::Usage(msg)) => {
            eprintln!("{msg}");
            2
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Domain(String),
    Usage(String),
}

fn domain<E: std::fmt::Display>(module: &str, e: E) -> RunError {
    RunError::Domain(format!("{module}: {e}"))
}

/// Run with the given argv and return the would-be standard output.
pub fn run_to_string(argv: Vec<String>) -> Result<String, RunError> {
    let cli = Cli::try_parse_from(argv).map_err(|e| RunError::Usage(e.to_string()))?;
    match cli.cmd {
        Command::Eval { input, algebra, out } => cmd_eval(&input, &algebra, out.out),
        Command::Statesum { input, rank, max_crossings, dump_states, out } => {
            cmd_statesum(&input, rank, max_crossings, dump_states, out.out)
        }
        Command::Beads { input, algebra, out } => cmd_beads(&input, &algebra, out.out),
        Command::CheckAxioms { algebra, out } => cmd_check_axioms(&algebra, out.out),
        Command::CheckMoves { algebra, trials, seed, max_crossings, out } => {
            cmd_check_moves(&algebra, trials, seed, max_crossings, out.out)
        }
        Command::Skein { input, slice, index, algebra, out } => {
            cmd_skein(&input, slice, index, &algebra, out.out)
        }
    }
}

/// Resolve the algebra selector to data plus a provenance record.
fn load_algebra(a: &AlgebraArgs) -> Result<(MatrixOQA, Value), RunError> {
    if let Some(path) = &a.algebra_file {
        let (oqa, report) = load_algebra_file(path, a.strict)
            .map_err(|e| domain(&format!("oqa ({})", path.display()), e))?;
        if a.strict && !report.all_pass() {
            return Err(RunError::Domain(format!(
                "oqa ({}): axiom check failed in strict mode:\n{}",
                path.display(),
                report_text(&report)
            )));
        }
        let prov = json!({ "kind": "file", "path": path.display().to_string(), "rank": oqa.rank });
        Ok((oqa, prov))
    } else if a.algebra == "homfly" {
        if a.rank < 1 {
            return Err(RunError::Usage("cli: --rank must be at least 1".into()));
        }
        let oqa = build_homfly(a.rank);
        let prov = json!({ "kind": "homfly", "rank": a.rank });
        Ok((oqa, prov))
    } else {
        Err(RunError::Usage(format!(
            "cli: unknown algebra family '{}' (available: homfly)",
            a.algebra
        )))
    }
}

fn read_diagram(path: &PathBuf) -> Result<MorseDiagram, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| domain(&format!("cli ({})", path.display()), e))?;
    parse_morse(&text).map_err(|e| domain(&format!("diagram ({})", path.display()), e))
}

fn diagram_summary(d: &MorseDiagram) -> Value {
    json!({
        "closed": d.is_closed(),
        "crossings": d.crossing_count(),
        "components": component_count(d),
        "morse": render_morse(d),
    })
}

/// The scalar invariant of a closed diagram, or of the right closure of a
/// one-in one-out tangle.
fn scalar_invariant(oqa: &MatrixOQA, d: &MorseDiagram) -> Result<LaurentPoly, RunError> {
    if d.is_closed() {
        Ok(evaluate(oqa, d).map_err(|e| domain("evaluator", e))?.scalar())
    } else if d.domain().len() == 1 && d.codomain() == d.domain() {
        closure_value(oqa, d).map_err(|e| domain("evaluator", e))
    } else {
        Err(RunError::Domain(
            "evaluator: diagram must be closed or a one-in one-out tangle".into(),
        ))
    }
}

fn cmd_eval(input: &PathBuf, algebra: &AlgebraArgs, out: OutFormat) -> Result<String, RunError> {
    let (oqa, prov) = load_algebra(algebra)?;
    let d = read_diagram(input)?;
    let v = scalar_invariant(&oqa, &d)?;
    Ok(match out {
        OutFormat::Text => format!("invariant: {}", v.to_text()),
        OutFormat::Json => json!({
            "invariant": poly_to_json(&v),
            "diagram": diagram_summary(&d),
            "algebra": prov,
        })
        .to_string(),
    })
}

fn cmd_statesum(
    input: &PathBuf,
    rank: usize,
    max_crossings: usize,
    dump_states: bool,
    out: OutFormat,
) -> Result<String, RunError> {
    let d = read_diagram(input)?;
    let w = ExpansionWeights::homfly();
    let v = statesum::evaluate(&d, &w, rank, max_crossings).map_err(|e| domain("statesum", e))?;
    Ok(match out {
        OutFormat::Text => format!("invariant: {}", v.to_text()),
        OutFormat::Json => {
            let mut obj = json!({
                "invariant": poly_to_json(&v),
                "diagram": diagram_summary(&d),
                "algebra": { "kind": "homfly", "rank": rank },
            });
            if dump_states {
                let states: Vec<Value> = expand_states(&d, &w, max_crossings)
                    .map_err(|e| domain("statesum", e))?
                    .iter()
                    .map(state_to_json)
                    .collect();
                obj["states"] = Value::Array(states);
            }
            obj.to_string()
        }
    })
}

fn cmd_beads(input: &PathBuf, algebra: &AlgebraArgs, out: OutFormat) -> Result<String, RunError> {
    let d = read_diagram(input)?;
    let (oqa, prov) = load_algebra(algebra)?;
    let word = beads::slide_to_top(&beads::decorate(&d).map_err(|e| domain("beads", e))?)
        .map_err(|e| domain("beads", e))?;
    let v = beads::evaluate_word(&word, &oqa).map_err(|e| domain("beads", e))?;
    let rendered = beads::render_word(&word);
    Ok(match out {
        OutFormat::Text => format!("normal form: {rendered}\ninvariant: {}", v.to_text()),
        OutFormat::Json => json!({
            "normal_form": rendered,
            "curl_count": word.curl_count,
            "invariant": poly_to_json(&v),
            "diagram": diagram_summary(&d),
            "algebra": prov,
        })
        .to_string(),
    })
}

fn report_text(report: &CheckReport) -> String {
    let mut lines = Vec::new();
    for item in &report.items {
        let status = if item.pass { "PASS" } else { "FAIL" };
        let witness = item
            .witness
            .as_ref()
            .map(|w| format!("  [{w}]"))
            .unwrap_or_default();
        lines.push(format!("{status}  {}{witness}", item.name));
    }
    lines.join("\n")
}

fn cmd_check_axioms(algebra: &AlgebraArgs, out: OutFormat) -> Result<String, RunError> {
    let (oqa, prov) = load_algebra(algebra)?;
    let report = check_all(&oqa);
    let text = match out {
        OutFormat::Text => report_text(&report),
        OutFormat::Json => json!({
            "algebra": prov,
            "all_pass": report.all_pass(),
            "checks": report.items.iter().map(|i| json!({
                "name": i.name,
                "pass": i.pass,
                "witness": i.witness,
            })).collect::<Vec<_>>(),
        })
        .to_string(),
    };
    if report.all_pass() {
        Ok(text)
    } else {
        Err(RunError::Domain(format!("oqa: axiom check failed\n{text}")))
    }
}

fn cmd_check_moves(
    algebra: &AlgebraArgs,
    trials: usize,
    seed: u64,
    max_crossings: usize,
    out: OutFormat,
) -> Result<String, RunError> {
    let (oqa, prov) = load_algebra(algebra)?;
    let mut diagrams = 0usize;
    let mut moves = 0usize;
    for t in 0..trials {
        let d = random_diagram(seed.wrapping_add(t as u64), max_crossings, true);
        let v = evaluate(&oqa, &d).map_err(|e| domain("evaluator", e))?.scalar();
        diagrams += 1;
        for m in enumerate_move_sites(&d) {
            let (d2, _) = apply_move(&d, m).map_err(|e| domain("diagram", e))?;
            let v2 = evaluate(&oqa, &d2).map_err(|e| domain("evaluator", e))?.scalar();
            moves += 1;
            if v != v2 {
                return Err(RunError::Domain(format!(
                    "evaluator: move invariance counterexample\nmove: {m:?}\nbefore ({}):\n{}after ({}):\n{}",
                    v.to_text(),
                    render_morse(&d),
                    v2.to_text(),
                    render_morse(&d2),
                )));
            }
        }
    }
    Ok(match out {
        OutFormat::Text => {
            format!("checked {moves} move sites across {diagrams} diagrams: all invariant")
        }
        OutFormat::Json => json!({
            "algebra": prov,
            "diagrams": diagrams,
            "move_sites": moves,
            "all_invariant": true,
        })
        .to_string(),
    })
}

fn cmd_skein(
    input: &PathBuf,
    slice: usize,
    index: usize,
    algebra: &AlgebraArgs,
    out: OutFormat,
) -> Result<String, RunError> {
    let d = read_diagram(input)?;
    let (oqa, prov) = load_algebra(algebra)?;
    let (pos, neg, smooth) =
        statesum::skein_triple(&d, slice, index).map_err(|e| domain("statesum", e))?;
    let vp = scalar_invariant(&oqa, &pos)?;
    let vn = scalar_invariant(&oqa, &neg)?;
    let vs = scalar_invariant(&oqa, &smooth)?;
    let defect = &(&vp - &vn) - &(&LaurentPoly::z() * &vs);
    let text = match out {
        OutFormat::Text => format!(
            "positive:  {}\nnegative:  {}\nsmoothing: {}\ndefect:    {}",
            vp.to_text(),
            vn.to_text(),
            vs.to_text(),
            defect.to_text()
        ),
        OutFormat::Json => json!({
            "positive": poly_to_json(&vp),
            "negative": poly_to_json(&vn),
            "smoothing": poly_to_json(&vs),
            "defect": poly_to_json(&defect),
            "holds": defect.is_zero(),
            "diagram": diagram_summary(&d),
            "algebra": prov,
        })
        .to_string(),
    };
    if defect.is_zero() {
        Ok(text)
    } else {
        Err(RunError::Domain(format!(
            "statesum: skein relation fails at ({slice}, {index})\n{text}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn args(s: &str) -> Vec<String> {
        std::iter::once("oqinv".to_string())
            .chain(s.split_whitespace().map(str::to_string))
            .collect()
    }

    fn morse_file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    const TREFOIL: &str =
        "in:\nslice: u<\nslice: id u< id\nslice: x/ id id\nslice: x/ id id\nslice: x/ id id\nslice: id n id\nslice: n\n";

    #[test]
    fn eval_text_and_json_agree_with_engines() {
        let f = morse_file(TREFOIL);
        let path = f.path().display();
        let text =
            run_to_string(args(&format!("eval --input {path} --rank 2"))).unwrap();
        assert_eq!(text, "invariant: -q^3 + q^7 + q^9 + q^11");
        let j = run_to_string(args(&format!("eval --input {path} --rank 2 --out json"))).unwrap();
        let v: Value = serde_json::from_str(&j).unwrap();
        assert_eq!(crate::laurent::poly_from_json(&v["invariant"]).unwrap(), {
            let d = parse_morse(TREFOIL).unwrap();
            evaluate(&build_homfly(2), &d).unwrap().scalar()
        });
        assert_eq!(v["algebra"]["kind"], "homfly");
    }

    #[test]
    fn statesum_and_beads_match_eval() {
        let f = morse_file(TREFOIL);
        let path = f.path().display();
        let eval = run_to_string(args(&format!("eval --input {path}"))).unwrap();
        let ss = run_to_string(args(&format!("statesum --input {path}"))).unwrap();
        assert_eq!(eval, ss);
        let bd = run_to_string(args(&format!("beads --input {path}"))).unwrap();
        assert!(bd.starts_with("normal form: G^-1 "), "{bd}");
        assert!(bd.ends_with(&eval), "{bd}\nvs\n{eval}");
    }

    #[test]
    fn check_axioms_passes_and_reports() {
        let out = run_to_string(args("check-axioms --rank 3")).unwrap();
        assert!(out.contains("PASS"));
        assert!(!out.contains("FAIL"));
    }

    #[test]
    fn check_moves_small_run_is_clean() {
        let out =
            run_to_string(args("check-moves --trials 4 --seed 11 --max-crossings 4")).unwrap();
        assert!(out.contains("all invariant"), "{out}");
    }

    #[test]
    fn skein_holds_on_trefoil_site() {
        let f = morse_file(TREFOIL);
        let out = run_to_string(args(&format!(
            "skein --input {} --slice 2 --index 0 --out json",
            f.path().display()
        )))
        .unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["holds"], true);
    }

    #[test]
    fn corrupted_algebra_file_fails_in_strict_mode() {
        let oqa = build_homfly(2);
        let mut j = crate::oqa::algebra_to_json(&oqa);
        // Break one braiding entry.
        j["rho"][0][0][0][0] = serde_json::json!([{ "exp": 5, "coef": "7" }]);
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(j.to_string().as_bytes()).unwrap();
        let err = run_to_string(args(&format!(
            "check-axioms --algebra-file {} --strict",
            f.path().display()
        )));
        match err {
            Err(RunError::Domain(msg)) => assert!(msg.contains("oqa"), "{msg}"),
            Err(RunError::Usage(msg)) => panic!("usage error: {msg}"),
            Ok(out) => panic!("unexpected success: {out}"),
        }
    }

    #[test]
    fn usage_errors_exit_2() {
        assert!(matches!(
            run_to_string(args("eval")),
            Err(RunError::Usage(_))
        ));
        assert!(matches!(
            run_to_string(args("frobnicate")),
            Err(RunError::Usage(_))
        ));
        assert!(matches!(
            run_to_string(args("eval --input x.morse --rank 0")),
            Err(RunError::Usage(_))
        ));
    }

    #[test]
    fn output_is_deterministic() {
        let f = morse_file(TREFOIL);
        let a = args(&format!("eval --input {} --out json", f.path().display()));
        assert_eq!(run_to_string(a.clone()).unwrap(), run_to_string(a).unwrap());
    }
}

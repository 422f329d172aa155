//! The `tds` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use tds_core::ctd::{
    fig1_census, future_collapse_report, history_break, render_grid, Census, Scenario,
    UtilityProfile,
};
use tds_core::framecheck::{
    check_frame, check_lemma8, CheckReport, Condition, HorizonMode, Severity,
};
use tds_core::gen::{gen_model, mutate, GenError, GenParams};
use tds_core::proofcheck::{check_derivation, Justification, SchemaId};
use tds_core::semantics::{EvalError, Evaluator, Semantics};
use tds_core::soundness::{axiom_sweep, SweepReport};
use tds_core::syntax::{enumerate_formulas, parse, print, Formula};
use tds_core::transform::{check_util_criteria, compare, derive_util, TransformError};
use tds_core::{Frame, Model, MomentId, NeutralModel, UtilModel, WorldSet};

use crate::io::{self, FormatError, LoadOptions, LoadedModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_WARNINGS: i32 = 1;
pub const EXIT_FINDINGS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_FORMAT: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(
    name = "tds",
    version,
    about = "Model checking for temporal deontic STIT logic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form and syntax tree.
    Parse(ParseArgs),
    /// Evaluate a formula at the worlds of a model.
    Eval(EvalArgs),
    /// Check a model against the frame conditions.
    Validate(ValidateArgs),
    /// Print the dominance orders of one agent's choices.
    Dominance(DominanceArgs),
    /// Derive a utility model from a neutral model and certify it.
    Transform(TransformArgs),
    /// Generate a random model.
    Gen(GenArgs),
    /// Search a model for false axiom instances.
    Axioms(AxiomsArgs),
    /// Check a derivation.
    Proof(ProofArgs),
    /// Diagnose obligations that cannot be violated.
    Ctd(CtdArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model file.
    #[arg(short, long)]
    model: PathBuf,
    /// Close the future relation transitively instead of rejecting gaps.
    #[arg(long)]
    close_g: bool,
    /// Accept deontic edges that are not constant on moments.
    #[arg(long)]
    permissive: bool,
}

impl ModelArgs {
    fn load(&self) -> Result<LoadedModel, CliError> {
        let opts = LoadOptions {
            close_g: self.close_g,
            permissive: self.permissive,
        };
        Ok(io::load_model(&self.model, opts)?)
    }
}

#[derive(Debug, Args)]
struct ParseArgs {
    /// Formula text.
    #[arg(short, long, allow_hyphen_values = true)]
    formula: String,
    /// Highest agent label allowed.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short, long, allow_hyphen_values = true)]
    formula: String,
    /// Restrict output to one world.
    #[arg(short, long)]
    world: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Treat worlds without a future as violations.
    #[arg(long)]
    strict_serial: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct DominanceArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short, long)]
    agent: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Output file for the utility model; standard output if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Formula depth for the truth comparison.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Variables of the comparison formulas; the model's own by default.
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 2)]
    agents: usize,
    /// Number of moment levels.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Choices per agent, comma separated; 2 each by default.
    #[arg(long, value_delimiter = ',')]
    choices: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Break the named frame condition.
    #[arg(long)]
    mutate: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    valuation_density: f64,
    #[arg(long, default_value_t = 0.5)]
    ideal_density: f64,
    #[arg(long, value_delimiter = ',', default_value = "p,q")]
    vars: Vec<String>,
}

#[derive(Debug, Args)]
struct AxiomsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Depth of the instantiating formulas.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Variables of the instantiating formulas; `p,q` by default.
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    /// Require seriality at every world.
    #[arg(long)]
    strict_serial: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ProofArgs {
    /// Derivation file.
    #[arg(short, long)]
    derivation: PathBuf,
    /// Number of agents; the highest label used by default.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CtdArgs {
    /// Model file.
    #[arg(short, long)]
    model: Option<PathBuf>,
    #[arg(long)]
    close_g: bool,
    #[arg(long)]
    permissive: bool,
    /// Enumerate every binary utility assignment on the two-agent grid.
    #[arg(long)]
    census: bool,
    /// Worlds per joint choice in the census grid.
    #[arg(long, default_value_t = 1)]
    cells_per: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Data(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Format(FormatError::Read { .. }) => EXIT_USAGE,
            CliError::Format(_) | CliError::Data(_) => EXIT_FORMAT,
            CliError::Output(_) => EXIT_IO,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

type Out<'a> = &'a mut dyn Write;

/// Runs one invocation. `argv` includes the program name.
pub fn run<I, T>(argv: I, out: Out, err: Out) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Parse(a) => cmd_parse(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Dominance(a) => cmd_dominance(a, out, err),
        Command::Transform(a) => cmd_transform(a, out, err),
        Command::Gen(a) => cmd_gen(a, out),
        Command::Axioms(a) => cmd_axioms(a, out),
        Command::Proof(a) => cmd_proof(a, out),
        Command::Ctd(a) => cmd_ctd(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn emit_json(out: Out, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn names(f: &Frame, s: &WorldSet) -> Vec<String> {
    s.ones().map(|w| f.name(w).to_string()).collect()
}

fn set_text(f: &Frame, s: &WorldSet) -> String {
    format!("{{{}}}", names(f, s).join(", "))
}

fn ast_json(f: &Formula) -> Value {
    match f {
        Formula::Var(v) => json!({ "var": v }),
        Formula::Top => json!({ "op": "top" }),
        Formula::Bot => json!({ "op": "bot" }),
        Formula::Not(a) => json!({ "op": "not", "arg": ast_json(a) }),
        Formula::And(a, b) => json!({ "op": "and", "args": [ast_json(a), ast_json(b)] }),
        Formula::Settled(a) => json!({ "op": "settled", "arg": ast_json(a) }),
        Formula::Stit(i, a) => json!({ "op": "stit", "agent": i, "arg": ast_json(a) }),
        Formula::Grand(a) => json!({ "op": "grand", "arg": ast_json(a) }),
        Formula::Henceforth(a) => json!({ "op": "henceforth", "arg": ast_json(a) }),
        Formula::Hitherto(a) => json!({ "op": "hitherto", "arg": ast_json(a) }),
        Formula::Ought(i, a) => json!({ "op": "ought", "agent": i, "arg": ast_json(a) }),
    }
}

fn parse_formula(text: &str, agents: usize) -> Result<Formula, CliError> {
    parse(text, agents).map_err(|e| CliError::Data(format!("formula: {e}")))
}

fn cmd_parse(a: &ParseArgs, out: Out) -> Result<i32, CliError> {
    let f = parse_formula(&a.formula, a.agents.unwrap_or(usize::MAX))?;
    if a.json {
        emit_json(
            out,
            &json!({
                "formula": print(&f),
                "depth": f.depth(),
                "modal_depth": f.modal_depth(),
                "ast": ast_json(&f),
            }),
        )?;
    } else {
        writeln!(out, "{}", print(&f))?;
        writeln!(out, "{f:?}")?;
    }
    Ok(EXIT_OK)
}

fn truth_table<M: Semantics>(m: &M, f: &Formula) -> Result<WorldSet, CliError> {
    Ok(Evaluator::new(m).extension(f)?)
}

fn cmd_eval(a: &EvalArgs, out: Out) -> Result<i32, CliError> {
    let model = a.model.load()?;
    let frame = model.frame().clone();
    let f = parse_formula(&a.formula, frame.agents())?;
    let ext = match &model {
        LoadedModel::Neutral(m) => truth_table(m, &f)?,
        LoadedModel::Util(m) => truth_table(m, &f)?,
    };
    let worlds: Vec<usize> = match &a.world {
        Some(w) => vec![frame
            .world_id(w)
            .map_err(|e| CliError::Usage(e.to_string()))?],
        None => frame.worlds().collect(),
    };
    if a.json {
        let rows: Vec<Value> = worlds
            .iter()
            .map(|&w| json!({ "world": frame.name(w), "value": ext.contains(w) }))
            .collect();
        emit_json(out, &json!({ "formula": print(&f), "truth": rows }))?;
    } else {
        for w in worlds {
            writeln!(out, "{}\t{}", frame.name(w), ext.contains(w))?;
        }
    }
    Ok(EXIT_OK)
}

fn report_json(f: &Frame, r: &CheckReport) -> Value {
    Value::Array(
        r.violations
            .iter()
            .map(|v| {
                json!({
                    "condition": v.condition.id(),
                    "severity": match v.severity {
                        Severity::Violation => "violation",
                        Severity::Warning => "warning",
                    },
                    "agent": v.agent,
                    "witnesses": v.witnesses.iter().map(|&w| f.name(w)).collect::<Vec<_>>(),
                    "message": v.message,
                })
            })
            .collect(),
    )
}

fn write_report(out: Out, f: &Frame, r: &CheckReport) -> Result<(), CliError> {
    for v in &r.violations {
        let kind = match v.severity {
            Severity::Violation => "violation",
            Severity::Warning => "warning",
        };
        let agent = v.agent.map(|i| format!(" agent {i}")).unwrap_or_default();
        let ws: Vec<&str> = v.witnesses.iter().map(|&w| f.name(w)).collect();
        writeln!(
            out,
            "{kind} {}{agent}: {} [{}]",
            v.condition,
            v.message,
            ws.join(", ")
        )?;
    }
    let hard = r
        .violations
        .iter()
        .filter(|v| v.severity == Severity::Violation)
        .count();
    writeln!(
        out,
        "{hard} violation(s), {} warning(s)",
        r.violations.len() - hard
    )?;
    Ok(())
}

fn cmd_validate(a: &ValidateArgs, out: Out) -> Result<i32, CliError> {
    let model = a.model.load()?;
    let mode = if a.strict_serial {
        HorizonMode::Strict
    } else {
        HorizonMode::Finite
    };
    let report = match &model {
        LoadedModel::Neutral(m) => check_frame(m, mode).merge(check_lemma8(m)),
        LoadedModel::Util(m) => check_frame(m, mode),
    };
    if a.json {
        emit_json(out, &report_json(model.frame(), &report))?;
    } else {
        write_report(out, model.frame(), &report)?;
    }
    Ok(report.exit_code())
}

/// The utility model behind `model`, deriving one from ideal worlds if
/// needed. `Err(code)` after reporting an invalid input frame.
fn as_util(model: LoadedModel, err: Out) -> Result<Result<UtilModel, i32>, CliError> {
    match model {
        LoadedModel::Util(u) => Ok(Ok(u)),
        LoadedModel::Neutral(n) => match derive_util(&n) {
            Ok(u) => {
                writeln!(err, "note: utilities derived from the ideal worlds")?;
                Ok(Ok(u))
            }
            Err(TransformError::InvalidFrame(r)) => {
                writeln!(err, "input frame is invalid:")?;
                write_report(err, n.frame(), &r)?;
                Ok(Err(EXIT_FINDINGS))
            }
            Err(e) => Err(CliError::Data(e.to_string())),
        },
    }
}

fn matrix_text(n: usize, cell: impl Fn(usize, usize) -> bool) -> Vec<String> {
    let header = format!(
        "     {}",
        (0..n).map(|b| format!("c{b:<3}")).collect::<String>()
    );
    let mut rows = vec![header.trim_end().to_string()];
    for a in 0..n {
        let mut row = format!("  c{a:<2}");
        for b in 0..n {
            row.push_str(if cell(a, b) { "1   " } else { ".   " });
        }
        rows.push(row.trim_end().to_string());
    }
    rows
}

fn cmd_dominance(a: &DominanceArgs, out: Out, err: Out) -> Result<i32, CliError> {
    let model = a.model.load()?;
    if a.agent == 0 || a.agent > model.frame().agents() {
        return Err(CliError::Usage(format!(
            "agent {} out of range 1..={}",
            a.agent,
            model.frame().agents()
        )));
    }
    let u = match as_util(model, err)? {
        Ok(u) => u,
        Err(code) => return Ok(code),
    };
    let f = u.frame();
    let mut rows = Vec::new();
    for mom in f.moment_ids() {
        let t = u.dominance(mom, a.agent);
        let n = t.len();
        if a.json {
            rows.push(json!({
                "moment": mom.0,
                "agent": a.agent,
                "cells": t.cells.iter().map(|c| names(f, c)).collect::<Vec<_>>(),
                "weak": (0..n).map(|x| (0..n).map(|y| t.weak(x, y)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "strict": (0..n).map(|x| (0..n).map(|y| t.strict(x, y)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "undominated": t.undominated(),
            }));
            continue;
        }
        writeln!(out, "moment {}, agent {}:", mom.0, a.agent)?;
        for (k, c) in t.cells.iter().enumerate() {
            writeln!(out, "  c{k} = {}", set_text(f, c))?;
        }
        writeln!(out, "  weak (row ⪯ column):")?;
        for line in matrix_text(n, |x, y| t.weak(x, y)) {
            writeln!(out, "  {line}")?;
        }
        writeln!(out, "  strict (row ≺ column):")?;
        for line in matrix_text(n, |x, y| t.strict(x, y)) {
            writeln!(out, "  {line}")?;
        }
        let und: Vec<String> = t.undominated().iter().map(|k| format!("c{k}")).collect();
        writeln!(out, "  undominated: {}", und.join(", "))?;
    }
    if a.json {
        emit_json(out, &Value::Array(rows))?;
    }
    Ok(EXIT_OK)
}

fn pool_vars(requested: &[String], f: &Frame, fallback: &[&str]) -> Vec<String> {
    if !requested.is_empty() {
        return requested.to_vec();
    }
    let own: Vec<String> = f.variables().map(|(k, _)| k.to_string()).collect();
    if own.is_empty() {
        fallback.iter().map(|s| s.to_string()).collect()
    } else {
        own
    }
}

fn cmd_transform(a: &TransformArgs, out: Out, err: Out) -> Result<i32, CliError> {
    let n: NeutralModel = match a.model.load()? {
        LoadedModel::Neutral(n) => n,
        LoadedModel::Util(_) => {
            return Err(CliError::Data(
                "transform expects a model with ideal worlds".into(),
            ))
        }
    };
    let u = match derive_util(&n) {
        Ok(u) => u,
        Err(TransformError::InvalidFrame(r)) => {
            writeln!(err, "input frame is invalid:")?;
            write_report(err, n.frame(), &r)?;
            return Ok(EXIT_FINDINGS);
        }
        Err(e) => return Err(CliError::Data(e.to_string())),
    };
    let criteria = check_util_criteria(&n, &u).map_err(|e| CliError::Data(e.to_string()))?;
    let vars = pool_vars(&a.vars, n.frame(), &["p", "q"]);
    let var_refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    let formulas = enumerate_formulas(a.depth, &var_refs, n.frame().agents());
    let preservation = compare(&n, &u, &formulas).map_err(|e| CliError::Data(e.to_string()))?;

    let model_text = io::to_json(&io::util_file(&u));
    let summary_to_err = a.output.is_none();
    match &a.output {
        Some(path) => std::fs::write(path, &model_text)?,
        None => out.write_all(model_text.as_bytes())?,
    }
    let f = n.frame();
    let summary: &mut dyn Write = if summary_to_err { err } else { out };
    if a.json {
        let crit = |k: usize| {
            criteria
                .criterion(k)
                .iter()
                .map(|c| json!({ "agent": c.agent, "w": f.name(c.w), "v": f.name(c.v), "z": f.name(c.z) }))
                .collect::<Vec<_>>()
        };
        let dis: Vec<Value> = preservation
            .disagreements
            .iter()
            .map(|d| json!({ "formula": print(&d.formula), "world": f.name(d.world), "neutral": d.neutral, "util": d.util }))
            .collect();
        emit_json(
            summary,
            &json!({
                "utilities": f.worlds().map(|w| (f.name(w).to_string(), u.util(w))).collect::<std::collections::BTreeMap<_, _>>(),
                "criteria": { "weak_order": crit(1), "joint_strict": crit(2), "ideal_level": crit(3) },
                "formulas": preservation.formulas,
                "disagreements": dis,
            }),
        )?;
    } else {
        writeln!(
            summary,
            "criteria: {} weak-order, {} joint-strict, {} ideal-level violation(s)",
            criteria.weak_order.len(),
            criteria.joint_strict.len(),
            criteria.ideal_level.len()
        )?;
        writeln!(
            summary,
            "truth comparison: {} formula(s) over {} world(s), {} disagreement(s)",
            preservation.formulas,
            preservation.worlds,
            preservation.disagreements.len()
        )?;
        for d in &preservation.disagreements {
            writeln!(
                summary,
                "  {} at {}: neutral {}, utility {}",
                print(&d.formula),
                f.name(d.world),
                d.neutral,
                d.util
            )?;
        }
    }
    Ok(if criteria.is_empty() && preservation.agrees() {
        EXIT_OK
    } else {
        EXIT_FINDINGS
    })
}

fn cmd_gen(a: &GenArgs, out: Out) -> Result<i32, CliError> {
    let choices = if a.choices.is_empty() {
        vec![2; a.agents]
    } else {
        a.choices.clone()
    };
    let mut p = GenParams::new(a.agents, a.depth, choices, a.seed);
    p.valuation_density = a.valuation_density;
    p.ideal_density = a.ideal_density;
    p.vars = a.vars.clone();
    let gen_err = |e: GenError| match e {
        GenError::InvalidParams(_) | GenError::TooLarge { .. } | GenError::NotMutable(_) => {
            CliError::Usage(e.to_string())
        }
        e => CliError::Data(e.to_string()),
    };
    let mut m = gen_model(&p).map_err(gen_err)?;
    if let Some(name) = &a.mutate {
        let c = Condition::from_id(name)
            .ok_or_else(|| CliError::Usage(format!("unknown condition `{name}`")))?;
        m = mutate(&m, c, a.seed).map_err(gen_err)?;
    }
    let text = io::to_json(&io::neutral_file(&m));
    match &a.output {
        Some(path) => {
            std::fs::write(path, &text)?;
            writeln!(
                out,
                "wrote {}: {} worlds, {} moments",
                path.display(),
                m.frame().world_count(),
                m.frame().moment_count()
            )?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn sweep<M: Semantics + Sync>(
    m: &M,
    pool: &[Formula],
    mode: HorizonMode,
) -> Result<SweepReport, CliError> {
    let parts: Vec<Result<SweepReport, EvalError>> = SchemaId::all()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&s| axiom_sweep(m, pool, &[s], mode))
        .collect();
    let mut total = SweepReport::default();
    for part in parts {
        total.merge(part?);
    }
    Ok(total)
}

fn cmd_axioms(a: &AxiomsArgs, out: Out) -> Result<i32, CliError> {
    let model = a.model.load()?;
    let f = model.frame().clone();
    let vars = if a.vars.is_empty() {
        vec!["p".to_string(), "q".to_string()]
    } else {
        a.vars.clone()
    };
    let var_refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    let pool = enumerate_formulas(a.depth, &var_refs, f.agents());
    let mode = if a.strict_serial {
        HorizonMode::Strict
    } else {
        HorizonMode::Finite
    };
    let report = match &model {
        LoadedModel::Neutral(m) => sweep(m, &pool, mode)?,
        LoadedModel::Util(m) => sweep(m, &pool, mode)?,
    };
    if a.json {
        let rows: Vec<Value> = report
            .counterexamples
            .iter()
            .map(|c| {
                json!({
                    "schema": c.schema.to_string(),
                    "agent": c.agent,
                    "world": f.name(c.world),
                    "instance": print(&c.instance(f.agents())),
                })
            })
            .collect();
        emit_json(
            out,
            &json!({ "pool": pool.len(), "instances": report.instances, "counterexamples": rows }),
        )?;
    } else {
        for c in &report.counterexamples {
            let agent = c.agent.map(|i| format!(" agent {i}")).unwrap_or_default();
            writeln!(
                out,
                "{}{agent} fails at {}: {}",
                c.schema,
                f.name(c.world),
                print(&c.instance(f.agents()))
            )?;
        }
        writeln!(
            out,
            "{} pool formula(s), {} instance(s), {} counterexample(s)",
            pool.len(),
            report.instances,
            report.counterexamples.len()
        )?;
    }
    Ok(if report.is_clean() {
        EXIT_OK
    } else {
        EXIT_FINDINGS
    })
}

fn rule_text(j: &Justification) -> String {
    match j {
        Justification::Axiom { schema, .. } => schema.to_string(),
        Justification::R0 {
            premise,
            implication,
        } => format!("R0 {premise}, {implication}"),
        Justification::R1 { premise } => format!("R1 {premise}"),
        Justification::R2 { premise, var } => format!("R2 {premise} ({var})"),
    }
}

fn cmd_proof(a: &ProofArgs, out: Out) -> Result<i32, CliError> {
    let d = io::parse_derivation(&io::read(&a.derivation)?)?;
    let agents = a.agents.unwrap_or_else(|| io::agents_used(&d));
    match check_derivation(&d, agents) {
        Ok(checked) => {
            if a.json {
                emit_json(
                    out,
                    &json!({
                        "valid": true,
                        "conclusion": print(checked.conclusion()),
                        "theorems": checked.theorems.iter().map(print).collect::<Vec<_>>(),
                        "uses_seriality": checked.uses_seriality,
                    }),
                )?;
            } else {
                for (k, l) in d.lines.iter().enumerate() {
                    writeln!(
                        out,
                        "{:>3}. {}  [{}]",
                        k + 1,
                        print(&l.formula),
                        rule_text(&l.justification)
                    )?;
                }
                writeln!(out, "valid: {}", print(checked.conclusion()))?;
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            if a.json {
                emit_json(
                    out,
                    &json!({ "valid": false, "line": e.line, "error": e.to_string() }),
                )?;
            } else {
                writeln!(out, "{e}")?;
            }
            Ok(EXIT_FINDINGS)
        }
    }
}

fn profile_text(p: UtilityProfile) -> String {
    match p {
        UtilityProfile::AllZero => "all 0".into(),
        UtilityProfile::AllOne => "all 1".into(),
        UtilityProfile::Constant(u) => format!("all {u}"),
        UtilityProfile::Mixed => "mixed".into(),
    }
}

fn scenario_text(s: Scenario) -> &'static str {
    match s {
        Scenario::OptimalAllOne => "optimal joint choices all 1",
        Scenario::OthersAllZero => "other joint choices all 0",
        Scenario::MixedOffDiagonal => "mixed off the diagonal",
    }
}

fn census_output(c: &Census, json_out: bool, out: Out) -> Result<i32, CliError> {
    let found = c.scenarios_found();
    let unmatched = c.unmatched();
    let ok = c.reproduces_all_scenarios();
    if json_out {
        let entries: Vec<Value> = c
            .satisfiable()
            .map(|e| {
                json!({
                    "assignment": e.assignment,
                    "grid": render_grid(e.grid),
                    "scenario": e.scenario.map(scenario_text),
                })
            })
            .collect();
        emit_json(
            out,
            &json!({
                "worlds_per_cell": c.worlds_per_cell,
                "assignments": c.entries.len(),
                "satisfiable": entries,
                "scenarios_found": found.iter().map(|&s| scenario_text(s)).collect::<Vec<_>>(),
                "unmatched": unmatched.len(),
                "reproduces_all_scenarios": ok,
            }),
        )?;
    } else {
        for e in c.satisfiable() {
            let bits: String = e.assignment.iter().map(|u| u.to_string()).collect();
            let s = e
                .scenario
                .map(scenario_text)
                .unwrap_or("no listed scenario");
            writeln!(out, "{bits}  {}  {s}", render_grid(e.grid))?;
        }
        writeln!(
            out,
            "{} of {} assignment(s) admit joint violable obligations; {} unmatched",
            c.satisfiable().count(),
            c.entries.len(),
            unmatched.len()
        )?;
        for s in Scenario::ALL {
            let mark = if found.contains(&s) {
                "found"
            } else {
                "missing"
            };
            writeln!(out, "  {}: {mark}", scenario_text(s))?;
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_FINDINGS })
}

fn cmd_ctd(a: &CtdArgs, out: Out, err: Out) -> Result<i32, CliError> {
    if a.model.is_none() && !a.census {
        return Err(CliError::Usage("ctd needs --model or --census".into()));
    }
    let mut code = EXIT_OK;
    if let Some(path) = &a.model {
        let opts = LoadOptions {
            close_g: a.close_g,
            permissive: a.permissive,
        };
        let u = match as_util(io::load_model(Path::new(path), opts)?, err)? {
            Ok(u) => u,
            Err(c) => return Ok(c),
        };
        let f = u.frame();
        let report = future_collapse_report(&u);
        let brk = history_break(&u);
        if a.json {
            let rows: Vec<Value> = report
                .iter()
                .map(|d| {
                    json!({
                        "moment": d.moment.0,
                        "worlds": names(f, f.moment(d.moment)),
                        "profile": profile_text(d.profile),
                        "collapse": d.collapse,
                        "deliberative": d.deliberative.iter().map(|s| s.as_ref().map(|s| names(f, s))).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let brk = brk.map(|(w, v)| json!([f.name(w), f.name(v)]));
            emit_json(
                out,
                &json!({ "moments": rows, "history_constant": brk.is_none(), "history_break": brk }),
            )?;
        } else {
            writeln!(
                out,
                "moment  worlds  profile  agent  collapse  violable obligation"
            )?;
            for d in &report {
                for (k, (&c, del)) in d.collapse.iter().zip(&d.deliberative).enumerate() {
                    let del = del
                        .as_ref()
                        .map(|s| set_text(f, s))
                        .unwrap_or_else(|| "-".into());
                    writeln!(
                        out,
                        "{:<7} {:<7} {:<8} {:<6} {:<9} {del}",
                        d.moment.0,
                        f.moment(MomentId(d.moment.0)).count_ones(..),
                        profile_text(d.profile),
                        k + 1,
                        if c { "yes" } else { "no" },
                    )?;
                }
            }
            match brk {
                None => writeln!(out, "utility is constant along every history")?,
                Some((w, v)) => {
                    writeln!(out, "utility changes along {} -> {}", f.name(w), f.name(v))?
                }
            }
        }
    }
    if a.census {
        let census = fig1_census(a.cells_per).map_err(|e| CliError::Usage(e.to_string()))?;
        code = code.max(census_output(&census, a.json, out)?);
    }
    Ok(code)
}

//! The `ioa` command line: check, compose, simulate, coordinate, export.
//!
//! Exit codes: 0 ok, 1 check failed, 2 usage or parse error, 3 unknown
//! (cap or budget exceeded).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::channel::{check_consistent, check_well_formed, CheckReport, ProtocolOptions, Verdict};
use crate::coordination::{
    check_coordinated, compose_processes, synthesize_rules, CoordinationError, ProcessSpec,
    Synthesis,
};
use crate::dsl::{
    automaton_decl, document, export_dot, parse, render_errors, rules_decl, serialize, system_decl,
    Decl, DotSource, Model,
};
use crate::exec::{
    check_fairness, run as execute, ExecError, FairnessKind, Policy, SchedulerConfig, Target,
    DEFAULT_WINDOW,
};
use crate::system::{
    check_compositionality, compose_loop, compose_parallel, compose_sequential, compose_u,
    compose_while, counter_system, num, CompositionKind, SystemError, SystemSpec, WhileOutcome,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ioa",
    version,
    about = "I/O automata, protocols and coordination"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a protocol (well-formed, consistent) or a rule set (coordinated).
    Check(CheckArgs),
    /// Compose systems or processes and write the result as `.ioa`.
    Compose(ComposeArgs),
    /// Run a target under a seeded scheduler and write the trace.
    Simulate(SimulateArgs),
    /// Apply a rule set, or synthesize one.
    Coordinate(CoordinateArgs),
    /// Write a DOT graph of a target.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub target: String,
    #[arg(long, value_enum, default_value_t = Which::All)]
    pub which: Which,
    /// Bound on explored CBR states.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Let several characters be pending at once.
    #[arg(long)]
    pub tree: bool,
    /// Write a structured JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Wellformed,
    Consistent,
    Coordinated,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Seq,
    Par,
    Loop,
    While,
    U,
    Process,
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub op: Op,
    /// Operand names. `loop` takes `[ITER] BODY`, `while` takes `G [G2]`,
    /// `u` takes three systems, `process` takes two processes.
    #[arg(long = "operand", short = 'o', required = true)]
    pub operands: Vec<String>,
    /// Number of loop iterations.
    #[arg(long)]
    pub n: Option<u64>,
    /// Initial feedback value of a loop, `g(a)`.
    #[arg(long, default_value_t = 0)]
    pub a: u64,
    /// Tick budget of a while composition.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Protocol connecting two processes.
    #[arg(long)]
    pub via: Option<String>,
    /// Output `.ioa` file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, default_value_t = Policy::Arbitrary)]
    pub policy: Policy,
    /// One input per line: `eps`, `port.sym`, `p.a+q.b` or a bare symbol.
    #[arg(long)]
    pub script: Option<PathBuf>,
    /// Trace file; JSON when the name ends in `.json`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
}

#[derive(Debug, Args)]
pub struct CoordinateArgs {
    #[command(subcommand)]
    pub action: CoordinateAction,
}

#[derive(Debug, Subcommand)]
pub enum CoordinateAction {
    /// Restrict the product of a rule set's roles by its rules.
    Apply {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        rules: String,
        /// Write the coordinated automaton as `.ioa`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search for rules over the product of a rule set's roles.
    Synthesize {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        rules: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub target: String,
    /// DOT output file; standard output when absent.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Unknown(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAIL,
            CliError::Unknown(_) => EXIT_UNKNOWN,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

impl From<SystemError> for CliError {
    fn from(e: SystemError) -> Self {
        match e {
            SystemError::BudgetExhausted(_) | SystemError::CapExceeded(_) => {
                CliError::Unknown(e.to_string())
            }
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ExecError> for CliError {
    fn from(e: ExecError) -> Self {
        match e {
            ExecError::InputRejected(_) | ExecError::NotQuasiDeterministic(_) => {
                CliError::Failed(e.to_string())
            }
            e => CliError::Usage(e.to_string()),
        }
    }
}

/// Run one command. Human text goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut text = String::new();
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, &mut text),
        Command::Compose(a) => cmd_compose(a, &mut text),
        Command::Simulate(a) => cmd_simulate(a, &mut text),
        Command::Coordinate(a) => cmd_coordinate(a, &mut text),
        Command::Export(a) => cmd_export(a, &mut text),
    };
    let _ = out.write_all(text.as_bytes());
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Parse and resolve all files as one model.
pub fn load(files: &[PathBuf]) -> Result<Model, CliError> {
    let mut docs = Vec::new();
    let mut report = String::new();
    for f in files {
        let src = fs::read_to_string(f).map_err(|source| CliError::Io {
            path: f.display().to_string(),
            source,
        })?;
        match parse(&src) {
            Ok(d) => docs.push((f, src, d)),
            Err(errs) => report.push_str(&render_errors(&src, &f.display().to_string(), &errs)),
        }
    }
    if !report.is_empty() {
        return Err(CliError::Parse(report.trim_end().to_string()));
    }
    let refs: Vec<_> = docs.iter().map(|(_, _, d)| d).collect();
    Model::resolve(&refs).map_err(|errs| {
        // Resolution errors point into whichever file holds the declaration.
        let mut text = String::new();
        for e in &errs {
            let (f, src, _) = docs
                .iter()
                .find(|(_, src, d)| {
                    e.span.end <= src.len()
                        && d.decls
                            .iter()
                            .any(|x| x.span.start <= e.span.start && e.span.end <= x.span.end)
                })
                .unwrap_or(&docs[0]);
            text.push_str(&render_errors(
                src,
                &f.display().to_string(),
                std::slice::from_ref(e),
            ));
        }
        CliError::Parse(text.trim_end().to_string())
    })
}

/// Write via a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| usage(format!("{} is not a file name", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

fn single_kind(m: &Model, name: &str) -> Result<&'static str, CliError> {
    match m.kinds_of(name).as_slice() {
        [] => Err(usage(format!("unknown target {name}"))),
        [k] => Ok(k),
        ks => Err(usage(format!(
            "target {name} is ambiguous: {}",
            ks.join(", ")
        ))),
    }
}

fn model_err(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn coordination_err(e: CoordinationError) -> CliError {
    match e {
        CoordinationError::Violation(r) => CliError::Failed(r.text().trim_end().to_string()),
        CoordinationError::BudgetExceeded(_) => CliError::Unknown(e.to_string()),
        CoordinationError::Rejected(_) => CliError::Failed(e.to_string()),
        e => CliError::Usage(e.to_string()),
    }
}

fn cmd_check(a: &CheckArgs, out: &mut String) -> Result<i32, CliError> {
    let m = load(&a.files)?;
    let kind = single_kind(&m, &a.target)?;
    let mut reports: Vec<CheckReport> = Vec::new();
    match kind {
        "protocol" => {
            if a.which == Which::Coordinated {
                return Err(usage(format!("{} is a protocol, not a rule set", a.target)));
            }
            let mut opts = ProtocolOptions {
                tree: a.tree,
                ..ProtocolOptions::default()
            };
            if let Some(cap) = a.cap {
                opts.cap = cap;
            }
            let p = m.protocol(&a.target, opts).map_err(model_err)?;
            if matches!(a.which, Which::Wellformed | Which::All) {
                reports.push(check_well_formed(&p));
            }
            if matches!(a.which, Which::Consistent | Which::All) {
                reports.push(check_consistent(&p));
            }
        }
        "rules" | "process" => {
            if matches!(a.which, Which::Wellformed | Which::Consistent) {
                return Err(usage(format!("{} is a {kind}, not a protocol", a.target)));
            }
            let rules = match kind {
                "rules" => a.target.clone(),
                _ => m.processes[&a.target].coordinate.clone(),
            };
            let (product, roles) = m.rules_product(&rules).map_err(model_err)?;
            let (result, removed) = crate::coordination::restrict(&product, &m.rules[&rules].rules)
                .map_err(coordination_err)?;
            let c = crate::coordination::CoordinatedAutomaton {
                base: product,
                roles,
                rules: m.rules[&rules].rules.clone(),
                result,
                removed,
            };
            reports.push(check_coordinated(&c));
        }
        k => return Err(usage(format!("cannot check a {k}"))),
    }
    let verdict = reports.iter().fold(Verdict::Pass, |v, r| v.and(r.verdict));
    for r in &reports {
        out.push_str(&r.text());
    }
    out.push_str(&format!("verdict: {verdict}\n"));
    if let Some(path) = &a.report {
        let doc = json!({
            "report_version": crate::channel::REPORT_VERSION,
            "command": "check",
            "target": a.target,
            "verdict": verdict,
            "checks": reports.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
        });
        write_atomic(path, &format!("{:#}\n", doc))?;
    }
    Ok(verdict.exit_code())
}

fn systems<'m>(m: &'m Model, names: &[String]) -> Result<Vec<&'m SystemSpec>, CliError> {
    names
        .iter()
        .map(|n| m.system(n).map_err(model_err))
        .collect()
}

fn emit(
    out_path: &Option<PathBuf>,
    note: &str,
    decl: Decl,
    out: &mut String,
) -> Result<(), CliError> {
    let mut text: String = note.lines().map(|l| format!("# {l}\n")).collect();
    text.push_str(&serialize(&document(vec![decl])));
    match out_path {
        Some(p) => write_atomic(p, &text),
        None => {
            out.push_str(&text);
            Ok(())
        }
    }
}

fn arity(op: Op, got: usize, want: &[usize]) -> Result<(), CliError> {
    if want.contains(&got) {
        Ok(())
    } else {
        Err(usage(format!(
            "{op:?} takes {} operands, got {got}",
            want.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" or ")
        )))
    }
}

fn cmd_compose(a: &ComposeArgs, out: &mut String) -> Result<i32, CliError> {
    let m = load(&a.files)?;
    let ops = &a.operands;
    let (note, decl) = match a.op {
        Op::Seq | Op::Par => {
            arity(a.op, ops.len(), &[2])?;
            let s = systems(&m, ops)?;
            let (c, kind) = if a.op == Op::Seq {
                (compose_sequential(s[0], s[1])?, CompositionKind::Sequential)
            } else {
                (compose_parallel(s[0], s[1])?, CompositionKind::Parallel)
            };
            let r = check_compositionality(&kind, &[s[0].clone(), s[1].clone()])?;
            let note = format!("{}: {:?}; {}", c.name, r.verdict, r.detail);
            (note, Decl::System(system_decl(&c)))
        }
        Op::Loop => {
            arity(a.op, ops.len(), &[1, 2])?;
            let n = a.n.ok_or_else(|| usage("loop needs --n"))?;
            let s = systems(&m, ops)?;
            let iter = if s.len() == 2 {
                s[0].clone()
            } else {
                counter_system(n)
            };
            let body = s[s.len() - 1];
            let c = compose_loop(&iter, body, num(a.a), n)?;
            let value = c.evaluate()?;
            let r = check_compositionality(
                &CompositionKind::Loop {
                    preload: num(a.a),
                    n,
                },
                &[iter.clone(), body.clone()],
            )?;
            let note = format!(
                "{} n={n}: value {value}\n{:?}; {}",
                c.system.name, r.verdict, r.detail
            );
            (note, Decl::System(system_decl(&c.system)))
        }
        Op::While => {
            arity(a.op, ops.len(), &[1, 2])?;
            let budget = a.budget.ok_or_else(|| usage("while needs --budget"))?;
            let s = systems(&m, ops)?;
            let iter = counter_system(budget as u64);
            let outcome = compose_while(&iter, s[0], budget)?;
            let mut note = match outcome {
                WhileOutcome::Found { delta, steps } => {
                    format!("while({}) δ={delta} after {steps} ticks", s[0].name)
                }
                WhileOutcome::BudgetExhausted { budget } => {
                    format!(
                        "while({}) δ unknown: budget of {budget} ticks exhausted",
                        s[0].name
                    )
                }
            };
            if let [_, g2] = s.as_slice() {
                let r = check_compositionality(
                    &CompositionKind::While { budget },
                    &[iter.clone(), s[0].clone(), (*g2).clone()],
                )?;
                note.push_str(&format!("\n{:?}; {}", r.verdict, r.detail));
            } else {
                note.push_str("\nEmergent: δ is known only by running the composition");
            }
            let code = match outcome {
                WhileOutcome::Found { .. } => EXIT_OK,
                WhileOutcome::BudgetExhausted { .. } => EXIT_UNKNOWN,
            };
            out.push_str(&note);
            out.push('\n');
            return Ok(code);
        }
        Op::U => {
            arity(a.op, ops.len(), &[3])?;
            let s = systems(&m, ops)?;
            let c = compose_u(s[0], s[1], s[2])?;
            (c.note.clone(), Decl::System(system_decl(&c.system)))
        }
        Op::Process => {
            arity(a.op, ops.len(), &[2])?;
            let via = a
                .via
                .as_ref()
                .ok_or_else(|| usage("process composition needs --via PROTOCOL"))?;
            let p1 = m.process(&ops[0]).map_err(model_err)?;
            let p2 = m.process(&ops[1]).map_err(model_err)?;
            let proto = m
                .protocol(via, ProtocolOptions::default())
                .map_err(model_err)?;
            let c: ProcessSpec = compose_processes(&p1, &p2, &proto).map_err(coordination_err)?;
            let bound: Vec<String> = c
                .bindings
                .iter()
                .map(|(r, b)| format!("{r} -> {} ({})", b.counterparty, b.protocol))
                .collect();
            let note = format!(
                "process {}: {} states, open bindings {}",
                c.name,
                c.automaton.states.len(),
                bound.join(", ")
            );
            let decl = automaton_decl(&c.automaton).map_err(usage)?;
            (note, Decl::Automaton(decl))
        }
    };
    if a.out.is_some() {
        out.push_str(&note);
        out.push('\n');
    }
    emit(&a.out, &note, decl, out)?;
    Ok(EXIT_OK)
}

fn read_script(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn cmd_simulate(a: &SimulateArgs, out: &mut String) -> Result<i32, CliError> {
    let m = load(&a.files)?;
    let cfg = SchedulerConfig::new(a.seed, a.policy, a.steps)?;
    let script = a.script.as_deref().map(read_script).transpose()?;
    let kind = single_kind(&m, &a.target)?;
    let (protocol, coordinated, owned);
    let target = match kind {
        "automaton" => Target::Automaton(m.automaton(&a.target).map_err(model_err)?),
        "system" => {
            owned = m.system(&a.target).map_err(model_err)?.to_diofa();
            Target::Automaton(&owned)
        }
        "protocol" => {
            protocol = m
                .protocol(&a.target, ProtocolOptions::default())
                .map_err(model_err)?;
            Target::Cbr(&protocol.cbr)
        }
        "rules" => {
            coordinated = m.coordinated(&a.target).map_err(|e| match e {
                crate::dsl::ModelError::Coordination(c) => coordination_err(c),
                e => model_err(e),
            })?;
            Target::Coordinated(&coordinated)
        }
        "process" => {
            owned = m.process(&a.target).map_err(model_err)?.automaton;
            Target::Automaton(&owned)
        }
        k => return Err(usage(format!("cannot simulate a {k}"))),
    };
    let trace = execute(target, &cfg, script.as_deref())?;
    if let Some(path) = &a.trace {
        let text = if path.extension().is_some_and(|e| e == "json") {
            trace.to_json() + "\n"
        } else {
            trace.to_text()
        };
        write_atomic(path, &text)?;
    }
    out.push_str(&format!(
        "{} steps, final {} halted={}\nacceptance: {}\n",
        trace.steps.len(),
        trace.final_state,
        trace.halted,
        trace.accepted
    ));
    for kind in [FairnessKind::Weak, FairnessKind::Strong] {
        let r = check_fairness(&trace, target, kind, a.window)?;
        match &r.violation {
            None => out.push_str(&format!("{kind:?} fairness (window {}): fair\n", a.window)),
            Some(v) => out.push_str(&format!(
                "{kind:?} fairness (window {}): {} starved at step {}\n",
                a.window, v.label, v.position
            )),
        }
    }
    Ok(EXIT_OK)
}

fn cmd_coordinate(a: &CoordinateArgs, out: &mut String) -> Result<i32, CliError> {
    match &a.action {
        CoordinateAction::Apply {
            files,
            rules,
            out: path,
            report,
        } => {
            let m = load(files)?;
            if !m.rules.contains_key(rules) {
                return Err(usage(format!("unknown rules {rules}")));
            }
            let c = m.coordinated(rules).map_err(|e| match e {
                crate::dsl::ModelError::Coordination(c) => coordination_err(c),
                e => model_err(e),
            })?;
            let r = check_coordinated(&c);
            out.push_str(&r.text());
            out.push_str(&format!(
                "{} of {} product transitions removed\n",
                c.removed.len(),
                c.base.transitions.len()
            ));
            if let Some(p) = report {
                write_atomic(p, &format!("{:#}\n", r.to_json()))?;
            }
            let mut result = c.result.clone();
            result.name = format!("{rules}_coordinated");
            let decl = automaton_decl(&result).map_err(usage)?;
            if let Some(p) = path {
                write_atomic(p, &serialize(&document(vec![Decl::Automaton(decl)])))?;
            }
            Ok(r.verdict.exit_code())
        }
        CoordinateAction::Synthesize {
            files,
            rules,
            budget,
            out: path,
        } => {
            let m = load(files)?;
            let (product, roles) = m.rules_product(rules).map_err(model_err)?;
            match synthesize_rules(&product, &roles, *budget).map_err(coordination_err)? {
                Synthesis::Found {
                    rules: found,
                    candidates,
                    ..
                } => {
                    let names = m.rules[rules].roles.clone();
                    let decl = rules_decl(&format!("{rules}_synthesized"), &names, &found);
                    let text = serialize(&document(vec![Decl::Rules(decl)]));
                    out.push_str(&format!(
                        "found {} rules after {candidates} candidates\n",
                        found.len()
                    ));
                    match path {
                        Some(p) => write_atomic(p, &text)?,
                        None => out.push_str(&text),
                    }
                    Ok(EXIT_OK)
                }
                Synthesis::Exhausted { candidates } => {
                    out.push_str(&format!(
                        "unknown: no passing rule set within {candidates} candidates\n"
                    ));
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
    }
}

fn cmd_export(a: &ExportArgs, out: &mut String) -> Result<i32, CliError> {
    let m = load(&a.files)?;
    let kind = single_kind(&m, &a.target)?;
    let dot = match kind {
        "automaton" => export_dot(DotSource::Automaton(
            m.automaton(&a.target).map_err(model_err)?,
        )),
        "system" => export_dot(DotSource::Automaton(
            &m.system(&a.target).map_err(model_err)?.to_diofa(),
        )),
        "protocol" => {
            let p = m
                .protocol(&a.target, ProtocolOptions::default())
                .map_err(model_err)?;
            export_dot(DotSource::Protocol(&p))
        }
        "rules" => {
            let c = m.coordinated(&a.target).map_err(model_err)?;
            export_dot(DotSource::Automaton(&c.result))
        }
        "process" => {
            let p = m.process(&a.target).map_err(model_err)?;
            export_dot(DotSource::Automaton(&p.automaton))
        }
        k => return Err(usage(format!("cannot export a {k}"))),
    };
    match &a.dot {
        Some(p) => {
            write_atomic(p, &dot)?;
            out.push_str(&format!("wrote {}\n", p.display()));
        }
        None => out.push_str(&dot),
    }
    Ok(EXIT_OK)
}

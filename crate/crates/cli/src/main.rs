//! Batch front end. Exit codes: 0 success, 1 semantic failure, 2 input
//! error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use modal_topos::corpus::DEFAULT_SEED;
use modal_topos::formats::{load_model, load_path, FormatError, Loaded};
use modal_topos::forcing::{forces_clauses, forces_direct, forces_traced};
use modal_topos::suites::{self, CheckReport};
use modal_topos::syntax::{parse_context, parse_term, parse_theory};
use modal_topos::{Context, FrameError, Model, ObjId, SemanticsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Parser)]
#[command(name = "modal-topos", version, about = "Higher-order intuitionistic S4 modal logic over finite presheaf toposes")]
struct Cli {
    /// Output format; `structured` is JSON with sorted keys.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Largest context size `|[[Gamma]](C)|` evaluated at any object.
    #[arg(long, env = "MODAL_TOPOS_SIZE_GUARD", default_value_t = suites::DEFAULT_GUARD, global = true,
          value_parser = positive)]
    size_guard: usize,
    /// Worker threads for independent checks.
    #[arg(long, default_value_t = 1, global = true, value_parser = positive)]
    jobs: usize,
    /// Seed for generated instances.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate category, presheaf, frame and model documents.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Check every axiom of a theory file in a model.
    Check { model: String, theory: PathBuf },
    /// Decide whether a world forces a formula.
    Force {
        model: String,
        /// Object of the base category.
        world: String,
        formula: String,
        /// Types of the free variables, as `x:A, y:B`.
        #[arg(long, default_value = "")]
        context: String,
        /// `name=element@object`; the element is an alias or canonical name.
        #[arg(long = "bind", value_name = "BINDING")]
        bindings: Vec<String>,
        /// Print the clause-by-clause derivation.
        #[arg(long)]
        trace: bool,
    },
    /// Print the component tables of a term.
    Eval {
        model: String,
        term: String,
        #[arg(long, default_value = "")]
        context: String,
    },
    /// Run every built-in check; exit 0 iff each verdict matches its
    /// expectation.
    PaperChecks,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

/// Message plus exit code.
struct Failure {
    code: u8,
    message: String,
    error: Option<String>,
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into(), error: None }
}

/// Name of the validation failure, when the error is one.
fn error_kind(e: &FormatError) -> Option<String> {
    let frame = |f: &FrameError| format!("{f:?}").split([' ', '(', '{']).next().unwrap_or_default().to_string();
    match e {
        FormatError::Frame(f) | FormatError::Semantics(SemanticsError::Frame(f)) => Some(frame(f)),
        FormatError::Category(c) => Some(format!("{c:?}").split([' ', '(', '{']).next().unwrap_or_default().to_string()),
        FormatError::Presheaf(p) | FormatError::Semantics(SemanticsError::Presheaf(p)) => {
            Some(format!("{p:?}").split([' ', '(', '{']).next().unwrap_or_default().to_string())
        }
        FormatError::Semantics(s) => Some(format!("{s:?}").split([' ', '(', '{']).next().unwrap_or_default().to_string()),
        _ => None,
    }
}

fn format_failure(e: FormatError) -> Failure {
    match error_kind(&e) {
        Some(kind) => Failure { code: 1, message: e.to_string(), error: Some(kind) },
        None => input(e.to_string()),
    }
}

fn emit(format: Format, text: String, value: Value) {
    match format {
        Format::Text => print!("{text}"),
        Format::Structured => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
    }
}

fn model(arg: &str) -> Result<Model, Failure> {
    load_model(arg).map_err(|e| match e {
        FormatError::Io { .. } | FormatError::Toml(_) | FormatError::Invalid(_) | FormatError::Parse(_) => input(e.to_string()),
        other => format_failure(other),
    })
}

fn context(m: &Model, src: &str, guard: usize) -> Result<Context, Failure> {
    let ctx = parse_context(src).map_err(|e| input(format!("context: {e}")))?;
    for (_, t) in ctx.vars() {
        m.interp_type(t).map_err(|e| input(e.to_string()))?;
    }
    for c in m.base().objects() {
        let mut n: usize = 1;
        for (_, t) in ctx.vars() {
            n = n.saturating_mul(m.interp_type(t).map_err(|e| input(e.to_string()))?.size(c));
        }
        if n > guard {
            return Err(input(format!(
                "context has {n} elements at `{}`, over the size guard {guard}",
                m.base().object_name(c)
            )));
        }
    }
    Ok(ctx)
}

fn validate(paths: &[PathBuf], format: Format) -> Result<u8, Failure> {
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut code = 0;
    for p in paths {
        let shown = p.display().to_string();
        match load_path(p) {
            Ok(doc) => {
                let detail = match &doc {
                    Loaded::Category(c) => format!("{} objects, {} arrows", c.num_objects(), c.num_arrows()),
                    Loaded::Presheaf(q) => format!("{} elements", q.total_size()),
                    Loaded::Frame(f) => format!("{} frame, faithful check needs a model", f.kind()),
                    Loaded::Model(m) => format!("model `{}`, {} frame, faithful", m.name(), m.frame().kind()),
                };
                text.push_str(&format!("ok    {shown}: {} ({detail})\n", doc.kind()));
                rows.push(json!({"path": shown, "kind": doc.kind(), "valid": true, "detail": detail}));
            }
            Err(e) => {
                let f = format_failure(e);
                code = code.max(f.code);
                let kind = f.error.clone().unwrap_or_else(|| "InputError".into());
                text.push_str(&format!("FAIL  {shown}: {kind}: {}\n", f.message));
                rows.push(json!({"path": shown, "valid": false, "error": kind, "message": f.message}));
            }
        }
    }
    emit(format, text, json!({"command": "validate", "results": rows}));
    Ok(code)
}

fn check(model_arg: &str, theory: &PathBuf, format: Format, guard: usize) -> Result<u8, Failure> {
    let m = model(model_arg)?;
    let src = std::fs::read_to_string(theory).map_err(|e| input(format!("cannot read `{}`: {e}", theory.display())))?;
    let th = parse_theory(&src).map_err(|e| input(format!("{}: {e}", theory.display())))?;
    for a in &th.axioms {
        context(&m, &a.sequent.context.to_string(), guard)?;
    }
    let report = m.check_theory(&th).map_err(|e| input(e.to_string()))?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for ((name, v), ax) in report.results.iter().zip(&th.axioms) {
        let status = if v.holds { "holds" } else { "FAILS" };
        text.push_str(&format!("{status} [{name}] {}\n", ax.sequent));
        let ws: Vec<Value> = v
            .witnesses
            .iter()
            .map(|w| {
                let b: Vec<String> = w.bindings.iter().map(|(k, v)| format!("{k}={v}")).collect();
                text.push_str(&format!("      at {} with [{}]: {} is not below {}\n", w.object, b.join(", "), w.lhs, w.rhs));
                json!({"object": w.object, "bindings": w.bindings, "lhs": w.lhs, "rhs": w.rhs})
            })
            .collect();
        rows.push(json!({"axiom": name, "sequent": ax.sequent.to_string(), "holds": v.holds, "witnesses": ws}));
    }
    let passed = report.passed();
    text.push_str(&format!("{} of {} axioms hold\n", report.results.iter().filter(|r| r.1.holds).count(), report.results.len()));
    emit(format, text, json!({"command": "check", "model": m.name(), "passed": passed, "results": rows}));
    Ok(if passed { 0 } else { 1 })
}

/// Resolves `name=element@object` bindings into the element of `[[Gamma]](world)`.
fn bind(m: &Model, ctx: &Context, world: ObjId, bindings: &[String]) -> Result<usize, Failure> {
    let mut given: BTreeMap<String, (String, String)> = BTreeMap::new();
    for b in bindings {
        let (name, rest) = b.split_once('=').ok_or_else(|| input(format!("binding `{b}` is not name=element@object")))?;
        let (elem, obj) = rest.rsplit_once('@').ok_or_else(|| input(format!("binding `{b}` has no @object")))?;
        if ctx.lookup(name).is_none() {
            return Err(input(format!("`{name}` is not in the context")));
        }
        given.insert(name.to_string(), (elem.to_string(), obj.to_string()));
    }
    let base = m.base();
    let mut parts = Vec::new();
    for (x, t) in ctx.vars() {
        let (elem, obj) = given.get(x).ok_or_else(|| input(format!("no binding for `{x}`")))?;
        let p = m.interp_type(t).map_err(|e| input(e.to_string()))?;
        let o = base.object(obj).map_err(|e| input(e.to_string()))?;
        let v = m.resolve_element(&p, o, elem, &t.to_string()).map_err(|e| input(e.to_string()))?;
        let v = if o == world {
            v
        } else {
            match base.hom(world, o).as_slice() {
                [f] => p.restrict(*f, v),
                _ => {
                    return Err(input(format!(
                        "`{x}` is bound at `{obj}`; it can be used at `{}` only along a unique arrow",
                        base.object_name(world)
                    )))
                }
            }
        };
        parts.push(v);
    }
    let g = m.context_product(ctx).map_err(|e| input(e.to_string()))?;
    Ok(g.tuple(world, &parts))
}

#[allow(clippy::too_many_arguments)]
fn force(
    model_arg: &str,
    world: &str,
    formula: &str,
    ctx_src: &str,
    bindings: &[String],
    trace: bool,
    format: Format,
    guard: usize,
) -> Result<u8, Failure> {
    let m = model(model_arg)?;
    let ctx = context(&m, ctx_src, guard)?;
    let c = m.base().object(world).map_err(|e| input(e.to_string()))?;
    let phi = parse_term(formula).map_err(|e| input(e.to_string()))?;
    let gamma = bind(&m, &ctx, c, bindings)?;
    let to_input = |e: modal_topos::ForcingError| input(e.to_string());
    let direct = forces_direct(&m, &ctx, &phi, c, gamma).map_err(to_input)?;
    let clauses = forces_clauses(&m, &ctx, &phi, c, gamma).map_err(to_input)?;
    if direct != clauses {
        return Err(Failure {
            code: 1,
            message: format!("forcing disagreement: direct {direct}, clauses {clauses}"),
            error: Some("ForcingDisagreement".into()),
        });
    }
    let mut text = format!("{direct}\n");
    let mut value = json!({"command": "force", "model": m.name(), "world": world, "formula": phi.to_string(), "forced": direct});
    if trace {
        let t = forces_traced(&m, &ctx, &phi, c, gamma).map_err(to_input)?;
        text.push_str(&t.render());
        value["trace"] = Value::String(t.render());
    }
    emit(format, text, value);
    Ok(if direct { 0 } else { 1 })
}

fn eval(model_arg: &str, term: &str, ctx_src: &str, format: Format, guard: usize) -> Result<u8, Failure> {
    let m = model(model_arg)?;
    let ctx = context(&m, ctx_src, guard)?;
    let t = parse_term(term).map_err(|e| input(e.to_string()))?;
    let (el, ty) = m.elaborate(&ctx, &t).map_err(|e| input(e.to_string()))?;
    let table = m.table(&ctx, &el).map_err(|e| input(e.to_string()))?;
    let g = m.context_product(&ctx).map_err(|e| input(e.to_string()))?;
    let p = m.interp_type(&ty).map_err(|e| input(e.to_string()))?;
    let mut text = format!("[[{t}]] : {ctx} -> {ty}\n");
    let mut comps = BTreeMap::new();
    for c in m.base().objects() {
        let name = m.base().object_name(c).to_string();
        text.push_str(&format!("at {name}:\n"));
        let mut rows = Vec::new();
        for y in 0..g.presheaf().size(c) {
            let args = m.bindings(&ctx, c, y).map_err(|e| input(e.to_string()))?;
            let shown: Vec<String> = args.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let out = m.display(&p, c, table[c.0][y]);
            text.push_str(&format!("  [{}] |-> {out}\n", shown.join(", ")));
            rows.push(json!({"bindings": args, "value": out}));
        }
        comps.insert(name, rows);
    }
    emit(format, text, json!({"command": "eval", "model": m.name(), "term": t.to_string(), "type": ty.to_string(), "components": comps}));
    Ok(0)
}

#[derive(Serialize)]
struct Row<'a> {
    anchor: &'a str,
    check: &'a str,
    model: &'a str,
    passed: bool,
    items: &'a [suites::CheckItem],
}

fn paper_checks(format: Format, jobs: usize, seed: u64, guard: usize) -> Result<u8, Failure> {
    let plan = suites::plan(seed, guard);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| input(e.to_string()))?;
    let results: Vec<Result<CheckReport, String>> =
        pool.install(|| plan.par_iter().map(|j| j.run().map_err(|e| format!("{}: {e}", j.label))).collect());
    let mut reports = Vec::new();
    for r in results {
        reports.push(r.map_err(|m| Failure { code: 1, message: m, error: Some("CheckError".into()) })?);
    }
    reports.sort_by(|a, b| (&a.anchor, &a.name, &a.model).cmp(&(&b.anchor, &b.name, &b.model)));
    let passed = reports.iter().all(CheckReport::passed);
    let mut text = format!("{:<26} {:<16} {:<34} verdict\n", "anchor", "check", "model");
    for r in &reports {
        let ok = r.items.iter().filter(|i| i.ok()).count();
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        text.push_str(&format!("{:<26} {:<16} {:<34} {verdict} ({ok}/{} items)\n", r.anchor, r.name, r.model, r.items.len()));
        for it in r.failures() {
            text.push_str(&format!("    {}: expected {}, observed {}\n", it.name, it.expect_hold, it.held));
            if let Some(w) = &it.witness {
                text.push_str(&format!("      witness: {w}\n"));
            }
        }
    }
    text.push_str(if passed { "all checks match their expected verdicts\n" } else { "some checks do not match\n" });
    let rows: Vec<Row> = reports
        .iter()
        .map(|r| Row { anchor: &r.anchor, check: &r.name, model: &r.model, passed: r.passed(), items: &r.items })
        .collect();
    let value = json!({"command": "paper-checks", "seed": seed, "passed": passed, "checks": serde_json::to_value(&rows).expect("json")});
    emit(format, text, value);
    Ok(if passed { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let (f, g) = (cli.format, cli.size_guard);
    match &cli.command {
        Command::Validate { paths } => validate(paths, f),
        Command::Check { model, theory } => check(model, theory, f, g),
        Command::Force { model, world, formula, context, bindings, trace } => {
            force(model, world, formula, context, bindings, *trace, f, g)
        }
        Command::Eval { model, term, context } => eval(model, term, context, f, g),
        Command::PaperChecks => paper_checks(f, cli.jobs, cli.seed, g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match format {
                Format::Text => eprintln!("error: {}", f.message),
                Format::Structured => {
                    let v = json!({"error": f.error.unwrap_or_else(|| "InputError".into()), "message": f.message, "exit": f.code});
                    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
                }
            }
            ExitCode::from(f.code)
        }
    }
}

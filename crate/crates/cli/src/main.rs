//! `fti`: check and transform financial transfer interface specifications.

use std::fs;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fti_core::architecture::{check_cfta, comply_events, diff, parse_event_log, Architecture, Violation};
use fti_core::lang::resolve::{run_checks, synthetic_span};
use fti_core::lang::{self, Diagnostic, Environment, ResolveOptions, SpecModule};
use fti_core::locglob::{decompose, globalize, localize};
use fti_core::reflection::{is_closed, phi_r, ClosureReport};
use fti_core::transform::{
    closed_under_all_assignments, expand_motives, refine, refinement_collisions, rename, Assignment,
    AssignmentReport, ConditionalInterface, RefinementSpec, RenameMap,
};
use fti_core::{EntityId, Error, Generator, Interface, Scope};

#[derive(Parser, Debug)]
#[command(name = "fti", version, about = "Check and transform financial transfer interface specifications")]
struct Cli {
    /// Specification file; repeat to load several files.
    #[arg(short = 's', long = "spec", value_name = "FILE", global = true)]
    specs: Vec<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Treat undeclared names as extern declarations (with a warning).
    #[arg(long, global = true)]
    allow_undeclared: bool,

    /// Fail with status 2 when any warning is reported.
    #[arg(long, global = true)]
    deny_warnings: bool,

    /// Values for condition variables, e.g. `c=true,d=false`.
    #[arg(long, value_name = "VAR=BOOL", value_delimiter = ',', global = true)]
    assign: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse, resolve and lint the specification and run its check directives.
    Check,
    /// Check that an architecture (or global interface) sums to 0 modulo reflection.
    Closed { target: String },
    /// Print an interface in normal form.
    Normalize {
        iface: String,
        /// Reduce modulo the reflection law.
        #[arg(long)]
        modulo_reflection: bool,
        /// Distribute composite motives into atomic ones.
        #[arg(long)]
        expand_motives: bool,
    },
    /// Keep the part of a global interface hosted at an entity.
    Localize {
        #[arg(short = 'e', long = "entity")]
        entity: String,
        iface: String,
    },
    /// Host a local interface at an entity.
    Globalize {
        #[arg(short = 'e', long = "entity")]
        entity: String,
        iface: String,
    },
    /// Split a global interface into local interfaces per host.
    Decompose { iface: String },
    /// Expand an entity into parts (motives are expanded first).
    Refine {
        #[arg(short = 'f', long = "entity", required_unless_present = "using")]
        entity: Option<String>,
        #[arg(long, value_delimiter = ',', required_unless_present = "using")]
        into: Vec<String>,
        /// Use a `refinement` defined in the specification.
        #[arg(long, conflicts_with_all = ["entity", "into"])]
        using: Option<String>,
        iface: String,
    },
    /// Rename entities, actions or motives.
    Rename {
        /// File of rules such as `motive m1 -> m;`.
        #[arg(long, required_unless_present = "using")]
        map: Option<PathBuf>,
        /// Use a `rename` defined in the specification.
        #[arg(long, conflicts_with = "map")]
        using: Option<String>,
        iface: String,
    },
    /// Per-entity interface changes from architecture A to architecture B.
    Diff { a: String, b: String },
    /// Check logged transfers against an architecture.
    Comply {
        #[arg(long)]
        log: PathBuf,
        arch: String,
    },
}

/// Why a run stopped early, mapped onto exit statuses 2 and 3.
enum Failure {
    Static(Vec<Diagnostic>),
    Capacity(Vec<Diagnostic>),
}

impl Failure {
    fn message(source: &str, message: impl Into<String>) -> Failure {
        Failure::Static(vec![Diagnostic::error(synthetic_span(source), message)])
    }

    fn algebra(source: &str, e: Error) -> Failure {
        let d = Diagnostic::from_error(synthetic_span(source), &e);
        if e.is_capacity() {
            Failure::Capacity(vec![d])
        } else {
            Failure::Static(vec![d])
        }
    }

    fn diagnostics(diags: Vec<Diagnostic>) -> Failure {
        if diags.iter().any(|d| d.capacity) {
            Failure::Capacity(diags)
        } else {
            Failure::Static(diags)
        }
    }
}

type Run<T> = Result<T, Failure>;

trait OrFail<T> {
    fn or_fail(self, source: &str) -> Run<T>;
}

impl<T> OrFail<T> for fti_core::Result<T> {
    fn or_fail(self, source: &str) -> Run<T> {
        self.map_err(|e| Failure::algebra(source, e))
    }
}

// ---- structured output ----

#[derive(Serialize)]
struct TermDoc {
    host: Option<String>,
    polarity: &'static str,
    target: String,
    action: String,
    motive: String,
    alpha: &'static str,
    coefficient: i64,
}

fn term_docs(i: &Interface) -> Vec<TermDoc> {
    i.terms()
        .map(|(g, n)| TermDoc {
            host: g.host.as_ref().map(|h| h.to_string()),
            polarity: g.polarity.as_str(),
            target: g.target.to_string(),
            action: g.action.to_string(),
            motive: g.motive.to_string(),
            alpha: g.alpha.as_str(),
            coefficient: n,
        })
        .collect()
}

#[derive(Serialize)]
struct BranchDoc {
    condition: String,
    terms: Vec<TermDoc>,
}

#[derive(Serialize)]
struct InterfaceDoc {
    scope: String,
    text: String,
    terms: Vec<TermDoc>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    branches: Vec<BranchDoc>,
}

fn interface_doc(c: &ConditionalInterface) -> InterfaceDoc {
    InterfaceDoc {
        scope: c.scope().to_string(),
        text: c.to_string(),
        terms: term_docs(&c.unconditional),
        branches: c
            .branches
            .iter()
            .map(|(lit, i)| BranchDoc {
                condition: lit.to_string(),
                terms: term_docs(i),
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct DiagnosticDoc {
    file: String,
    line: u32,
    column: u32,
    severity: &'static str,
    message: String,
}

fn diagnostic_docs(diags: &[Diagnostic]) -> Vec<DiagnosticDoc> {
    diags
        .iter()
        .map(|d| DiagnosticDoc {
            file: d.span.file.to_string(),
            line: d.span.line,
            column: d.span.col,
            severity: d.severity.as_str(),
            message: d.message.clone(),
        })
        .collect()
}

#[derive(Serialize)]
struct Document<T: Serialize> {
    schema: u32,
    command: &'static str,
    #[serde(flatten)]
    body: T,
    diagnostics: Vec<DiagnosticDoc>,
}

#[derive(Serialize)]
struct CheckDoc {
    directive: String,
    passed: bool,
    details: Vec<String>,
}

#[derive(Serialize)]
struct CheckBody {
    verdict: &'static str,
    interfaces: usize,
    architectures: usize,
    checks: Vec<CheckDoc>,
}

#[derive(Serialize)]
struct AssignmentDoc {
    assignment: Assignment,
    closed: bool,
    residual: Vec<TermDoc>,
    unmatched: Vec<String>,
}

#[derive(Serialize)]
struct ClosedBody {
    target: String,
    verdict: &'static str,
    sum: InterfaceDoc,
    residual: Vec<TermDoc>,
    unmatched: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assignments: Option<Vec<AssignmentDoc>>,
}

#[derive(Serialize)]
struct InterfaceBody {
    interface: InterfaceDoc,
}

#[derive(Serialize)]
struct PartDoc {
    entity: String,
    interface: InterfaceDoc,
}

#[derive(Serialize)]
struct PartsBody {
    parts: Vec<PartDoc>,
}

#[derive(Serialize)]
struct ViolationDoc {
    event: usize,
    kind: &'static str,
    member: String,
    element: String,
    candidates: Vec<String>,
}

fn violation_docs(vs: &[Violation]) -> Vec<ViolationDoc> {
    vs.iter()
        .map(|v| ViolationDoc {
            event: v.event + 1,
            kind: v.kind.as_str(),
            member: v.member.to_string(),
            element: v.element.to_string(),
            candidates: v.candidates.iter().map(Generator::to_string).collect(),
        })
        .collect()
}

#[derive(Serialize)]
struct ComplyBody {
    verdict: &'static str,
    events: usize,
    violations: Vec<ViolationDoc>,
    warnings: Vec<ViolationDoc>,
}

/// Result of a successful run: output text, structured document and exit status.
struct Outcome {
    text: String,
    json: serde_json::Value,
    status: u8,
}

fn document<T: Serialize>(command: &'static str, body: T, diags: &[Diagnostic]) -> serde_json::Value {
    serde_json::to_value(Document {
        schema: 1,
        command,
        body,
        diagnostics: diagnostic_docs(diags),
    })
    .expect("documents serialize")
}

// ---- pipeline ----

struct Session {
    module: SpecModule,
    env: Environment,
    options: ResolveOptions,
    assignment: Option<Assignment>,
    warnings: Vec<Diagnostic>,
}

fn load(cli: &Cli) -> Run<Session> {
    let mut files = Vec::new();
    for path in &cli.specs {
        let name = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| Failure::message(&name, format!("cannot read file: {e}")))?;
        files.push((name, text));
    }
    let module = lang::parse_files(&files).map_err(Failure::Static)?;
    let options = ResolveOptions {
        allow_undeclared: cli.allow_undeclared,
    };
    let env = lang::resolve(&module, options).map_err(Failure::diagnostics)?;
    let assignment = if cli.assign.is_empty() {
        None
    } else {
        Some(parse_assignment(&cli.assign)?)
    };
    let warnings = env.warnings.clone();
    Ok(Session {
        module,
        env,
        options,
        assignment,
        warnings,
    })
}

fn parse_assignment(pairs: &[String]) -> Run<Assignment> {
    let mut out = Assignment::new();
    for pair in pairs {
        let parsed = pair.split_once('=').and_then(|(k, v)| {
            let value = match v.trim() {
                "true" | "1" => true,
                "false" | "0" => false,
                _ => return None,
            };
            Some((k.trim().to_string(), value))
        });
        let Some((k, v)) = parsed else {
            return Err(Failure::message("--assign", format!("expected VAR=true or VAR=false, found `{pair}`")));
        };
        out.insert(k, v);
    }
    Ok(out)
}

const ARG: &str = "<argument>";

impl Session {
    fn expr(&mut self, text: &str, default_scope: Scope) -> Run<ConditionalInterface> {
        let (value, warnings) = self
            .env
            .evaluate_text_with_warnings(ARG, text, default_scope, self.options)
            .map_err(Failure::diagnostics)?;
        self.warnings.extend(warnings);
        match &self.assignment {
            Some(a) => Ok(value.eval(a).or_fail(ARG)?.into()),
            None => Ok(value),
        }
    }

    fn plain(&mut self, text: &str, default_scope: Scope) -> Run<Interface> {
        let value = self.expr(text, default_scope)?;
        match value.as_plain() {
            Some(i) => Ok(i.clone()),
            None => Err(Failure::message(
                ARG,
                "the interface has conditional parts; choose values with --assign",
            )),
        }
    }

    fn architecture(&self, name: &str) -> Run<&Architecture> {
        self.env
            .architecture(name)
            .ok_or_else(|| Failure::message(ARG, format!("undefined architecture `{name}`")))
    }

    fn entity(&self, name: &str) -> Run<EntityId> {
        let span = synthetic_span(ARG);
        let known = self.env.catalog.contains(lang::ast::DeclKind::Entity, name);
        if !known && !self.options.allow_undeclared {
            return Err(Failure::Static(vec![Diagnostic::error(span, format!("undeclared entity `{name}`"))]));
        }
        Ok(EntityId::new(name))
    }

    fn interface_outcome(&self, command: &'static str, value: &ConditionalInterface) -> Outcome {
        Outcome {
            text: format!("{value}\n"),
            json: document(
                command,
                InterfaceBody {
                    interface: interface_doc(value),
                },
                &self.warnings,
            ),
            status: 0,
        }
    }
}

fn residual_lines(report: &ClosureReport, prefix: &str) -> Vec<String> {
    report.unmatched.iter().map(|u| format!("{prefix}{u}")).collect()
}

fn assignment_label(a: &Assignment) -> String {
    let vars: Vec<String> = a.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("[{}] ", vars.join(", "))
}

fn closed(s: &mut Session, target: &str) -> Run<Outcome> {
    let (sum, reports) = if let Some(arch) = s.env.architecture(target) {
        let verdict = check_cfta(arch).or_fail(ARG)?;
        (verdict.sum, verdict.reports)
    } else {
        let value = s.expr(target, Scope::Global)?;
        let value = value.map(expand_motives).or_fail(ARG)?;
        let closure = closed_under_all_assignments(&value).or_fail(ARG)?;
        (value, closure.reports)
    };
    let (sum, reports) = match &s.assignment {
        Some(a) => {
            let evaluated = sum.eval(a).or_fail(ARG)?;
            let report = is_closed(&evaluated).or_fail(ARG)?;
            let reports = vec![AssignmentReport {
                assignment: a.clone(),
                report,
            }];
            (ConditionalInterface::from(evaluated), reports)
        }
        None => (sum, reports),
    };
    let is_conditional = !sum.is_plain();
    let all_closed = reports.iter().all(|r| r.report.closed);

    let mut text = String::from(if all_closed { "CLOSED\n" } else { "NOT CLOSED\n" });
    text.push_str(&format!("sum: {sum}\n"));
    for r in reports.iter().filter(|r| !r.report.closed) {
        let prefix = if is_conditional { assignment_label(&r.assignment) } else { String::new() };
        text.push_str(&format!("{prefix}residual: {}\n", r.report.residual.canonical));
        for line in residual_lines(&r.report, &format!("{prefix}  ")) {
            text.push_str(&line);
            text.push('\n');
        }
    }

    let first_open = reports.iter().find(|r| !r.report.closed);
    let body = ClosedBody {
        target: target.to_string(),
        verdict: if all_closed { "closed" } else { "not closed" },
        sum: interface_doc(&sum),
        residual: first_open.map_or_else(Vec::new, |r| term_docs(&r.report.residual.canonical)),
        unmatched: first_open.map_or_else(Vec::new, |r| residual_lines(&r.report, "")),
        assignments: is_conditional.then(|| {
            reports
                .iter()
                .map(|r| AssignmentDoc {
                    assignment: r.assignment.clone(),
                    closed: r.report.closed,
                    residual: term_docs(&r.report.residual.canonical),
                    unmatched: residual_lines(&r.report, ""),
                })
                .collect()
        }),
    };
    Ok(Outcome {
        text,
        json: document("closed", body, &s.warnings),
        status: if all_closed { 0 } else { 1 },
    })
}

fn check(s: &Session) -> Run<Outcome> {
    let lints = lang::lint(&s.module, &s.env);
    let mut diags = s.warnings.clone();
    diags.extend(lints);
    diags.sort();
    diags.dedup();
    let outcomes = run_checks(&s.env).or_fail(ARG)?;
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&format!("{} {}\n", if o.passed { "PASS" } else { "FAIL" }, o.directive));
        for d in &o.details {
            text.push_str(&format!("  {d}\n"));
        }
    }
    let plural = |n: usize, word: &str| format!("{n} {word}{}", if n == 1 { "" } else { "s" });
    if failed == 0 {
        text.push_str(&format!(
            "ok: {}, {}, {}\n",
            plural(s.env.interfaces.len(), "interface"),
            plural(s.env.architectures.len(), "architecture"),
            plural(outcomes.len(), "check")
        ));
    } else {
        text.push_str(&format!("failed: {failed} of {}\n", plural(outcomes.len(), "check")));
    }
    let body = CheckBody {
        verdict: if failed == 0 { "ok" } else { "failed" },
        interfaces: s.env.interfaces.len(),
        architectures: s.env.architectures.len(),
        checks: outcomes
            .into_iter()
            .map(|o| CheckDoc {
                directive: o.directive,
                passed: o.passed,
                details: o.details,
            })
            .collect(),
    };
    Ok(Outcome {
        text,
        json: document("check", body, &diags),
        status: if failed == 0 { 0 } else { 1 },
    })
}

fn parts_outcome(s: &Session, command: &'static str, parts: Vec<(EntityId, ConditionalInterface)>) -> Outcome {
    let text: Vec<String> = parts.iter().map(|(e, i)| format!("{e} : {i}")).collect();
    let mut text = text.join(",\n");
    if !text.is_empty() {
        text.push('\n');
    }
    let body = PartsBody {
        parts: parts
            .iter()
            .map(|(e, i)| PartDoc {
                entity: e.to_string(),
                interface: interface_doc(i),
            })
            .collect(),
    };
    Outcome {
        text,
        json: document(command, body, &s.warnings),
        status: 0,
    }
}

fn refinement_spec(s: &mut Session, entity: &Option<String>, into: &[String], using: &Option<String>) -> Run<RefinementSpec> {
    if let Some(name) = using {
        return s
            .env
            .refinements
            .get(name)
            .map(|(spec, _)| spec.clone())
            .ok_or_else(|| Failure::message(ARG, format!("undefined refinement `{name}`")));
    }
    let coarse = s.entity(entity.as_deref().unwrap_or_default())?;
    let parts = into.iter().map(|p| EntityId::new(p.trim())).collect();
    RefinementSpec::new(coarse, parts).or_fail("--into")
}

fn rename_map(s: &Session, map: &Option<PathBuf>, using: &Option<String>) -> Run<RenameMap> {
    if let Some(name) = using {
        return s
            .env
            .renames
            .get(name)
            .map(|(m, _)| m.clone())
            .ok_or_else(|| Failure::message(ARG, format!("undefined rename `{name}`")));
    }
    let path = map.as_ref().expect("clap requires --map or --using");
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Failure::message(&name, format!("cannot read file: {e}")))?;
    let rules = lang::parse_rename_rules(&name, &text).map_err(|d| Failure::Static(vec![d]))?;
    s.env.rename_map(&rules, s.options).map_err(Failure::diagnostics)
}

fn comply(s: &Session, log: &PathBuf, arch_name: &str) -> Run<Outcome> {
    let arch = s.architecture(arch_name)?;
    let name = log.display().to_string();
    let text = fs::read_to_string(log).map_err(|e| Failure::message(&name, format!("cannot read file: {e}")))?;
    let events = parse_event_log(&text).or_fail(&name)?;
    if !s.options.allow_undeclared {
        use lang::ast::DeclKind;
        let catalog = &s.env.catalog;
        for (i, e) in events.iter().enumerate() {
            let names = [
                (DeclKind::Entity, e.source.as_str()),
                (DeclKind::Entity, e.destination.as_str()),
                (DeclKind::Action, e.action.as_str()),
                (DeclKind::Motive, e.motive.as_str()),
            ];
            for (kind, n) in names {
                if !catalog.contains(kind, n) {
                    return Err(Failure::message(&name, format!("event {}: undeclared {} `{n}`", i + 1, kind.keyword())));
                }
            }
        }
    }
    let assignment = s.assignment.clone().unwrap_or_default();
    let report = comply_events(&events, arch, &assignment).or_fail(&name)?;
    let describe = |v: &Violation| {
        let e = &events[v.event];
        let reply = e.reply.map_or("-".to_string(), |r| r.to_string());
        let mut line = format!(
            "event {}: {} -> {} {}({}) reply {reply}: {} at {}, element {}",
            v.event + 1,
            e.source,
            e.destination,
            e.action,
            e.motive,
            v.kind.as_str(),
            v.member,
            v.element
        );
        if !v.candidates.is_empty() {
            let c: Vec<String> = v.candidates.iter().map(Generator::to_string).collect();
            line.push_str(&format!("; declared: {}", c.join(", ")));
        }
        line
    };
    let mut text = String::from(if report.complies() { "COMPLIANT\n" } else { "NOT COMPLIANT\n" });
    for v in &report.violations {
        text.push_str(&describe(v));
        text.push('\n');
    }
    for v in &report.warnings {
        text.push_str(&format!("warning: {}\n", describe(v)));
    }
    let body = ComplyBody {
        verdict: if report.complies() { "compliant" } else { "not compliant" },
        events: events.len(),
        violations: violation_docs(&report.violations),
        warnings: violation_docs(&report.warnings),
    };
    Ok(Outcome {
        text,
        json: document("comply", body, &s.warnings),
        status: if report.complies() { 0 } else { 1 },
    })
}

fn execute(cli: &Cli) -> Run<Outcome> {
    let mut s = load(cli)?;
    if cli.deny_warnings && !s.warnings.is_empty() {
        return Err(Failure::Static(s.warnings.clone()));
    }
    let outcome = match &cli.command {
        Command::Check => {
            let outcome = check(&s)?;
            let lints = lang::lint(&s.module, &s.env);
            if cli.deny_warnings && !lints.is_empty() {
                return Err(Failure::Static(lints));
            }
            s.warnings.extend(lints);
            outcome
        }
        Command::Closed { target } => closed(&mut s, target)?,
        Command::Normalize {
            iface,
            modulo_reflection,
            expand_motives: expand,
        } => {
            let mut value = s.expr(iface, Scope::Local)?;
            if *expand || *modulo_reflection {
                value = value.map(expand_motives).or_fail(ARG)?;
            }
            if *modulo_reflection {
                value = value.map(|i| Ok(phi_r(i)?.canonical)).or_fail(ARG)?;
            }
            s.interface_outcome("normalize", &value)
        }
        Command::Localize { entity, iface } => {
            let e = s.entity(entity)?;
            let value = s.expr(iface, Scope::Global)?;
            let value = value.map(|i| localize(&e, i)).or_fail(ARG)?;
            s.interface_outcome("localize", &value)
        }
        Command::Globalize { entity, iface } => {
            let e = s.entity(entity)?;
            let value = s.expr(iface, Scope::Local)?;
            let value = value.map(|i| globalize(&e, i)).or_fail(ARG)?;
            s.interface_outcome("globalize", &value)
        }
        Command::Decompose { iface } => {
            let value = s.plain(iface, Scope::Global)?;
            let d = decompose(&value).or_fail(ARG)?;
            let parts = d.parts.into_iter().map(|(e, i)| (e, i.into())).collect();
            parts_outcome(&s, "decompose", parts)
        }
        Command::Refine {
            entity,
            into,
            using,
            iface,
        } => {
            let spec = refinement_spec(&mut s, entity, into, using)?;
            let value = s.expr(iface, Scope::Global)?;
            let value = value.map(expand_motives).or_fail(ARG)?;
            for part in std::iter::once(&value.unconditional).chain(value.branches.values()) {
                for e in refinement_collisions(part, &spec) {
                    s.warnings.push(Diagnostic::warning(
                        synthetic_span(ARG),
                        format!("refinement part `{e}` already occurs in the interface"),
                    ));
                }
            }
            s.warnings.sort();
            s.warnings.dedup();
            let value = value.map(|i| refine(i, &spec)).or_fail(ARG)?;
            s.interface_outcome("refine", &value)
        }
        Command::Rename { map, using, iface } => {
            let map = rename_map(&s, map, using)?;
            let value = s.expr(iface, Scope::Local)?;
            let value = value.map(|i| rename(i, &map)).or_fail(ARG)?;
            s.interface_outcome("rename", &value)
        }
        Command::Diff { a, b } => {
            let (x, y) = (s.architecture(a)?, s.architecture(b)?);
            let deltas = diff(x, y).or_fail(ARG)?;
            parts_outcome(&s, "diff", deltas.into_iter().collect())
        }
        Command::Comply { log, arch } => comply(&s, log, arch)?,
    };
    if cli.deny_warnings && !s.warnings.is_empty() {
        return Err(Failure::Static(s.warnings.clone()));
    }
    // Rebuild the document so late warnings (lints, refinement collisions) are included.
    let json = match outcome.json {
        serde_json::Value::Object(mut map) => {
            let diags = serde_json::to_value(diagnostic_docs(&s.warnings)).expect("serializable");
            if !matches!(cli.command, Command::Check) {
                map.insert("diagnostics".into(), diags);
            }
            print_warnings(&s.warnings);
            serde_json::Value::Object(map)
        }
        other => other,
    };
    Ok(Outcome { json, ..outcome })
}

fn use_color() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stderr().is_terminal()
}

fn print_diagnostic(d: &Diagnostic) {
    let mut err = std::io::stderr().lock();
    if use_color() {
        let color = if d.is_error() { "\x1b[1;31m" } else { "\x1b[1;33m" };
        let _ = writeln!(err, "{}: {color}{}\x1b[0m: {}", d.span, d.severity.as_str(), d.message);
    } else {
        let _ = writeln!(err, "{d}");
    }
}

fn print_warnings(diags: &[Diagnostic]) {
    diags.iter().for_each(print_diagnostic);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = match cli.format {
                Format::Text => write!(out, "{}", outcome.text),
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&outcome.json).expect("serializable")
                ),
            };
            ExitCode::from(outcome.status)
        }
        Err(Failure::Static(diags)) => {
            print_warnings(&diags);
            ExitCode::from(2)
        }
        Err(Failure::Capacity(diags)) => {
            print_warnings(&diags);
            ExitCode::from(3)
        }
    }
}

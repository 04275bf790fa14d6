//! Name resolution and evaluation of parsed specifications.
//!
//! Every named interface is evaluated to normal form. Errors are collected
//! across the whole module rather than stopping at the first one.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::ast::*;
use super::{Diagnostic, Span};
use crate::algebra::{ActionId, Alpha, EntityId, Generator, Interface, MotiveAtom, MotiveExpr, Polarity, Scope};
use crate::architecture::{check_cfta, Architecture};
use crate::error::{Error, Result};
use crate::locglob::globalize;
use crate::transform::{
    closed_under_all_assignments, expand_motives, ConditionLiteral, ConditionalInterface, RefinementSpec,
    RenameMap,
};

#[derive(Debug, Clone, Copy, Default)]
pub struct ResolveOptions {
    /// Treat undeclared names as extern declarations, with a warning.
    pub allow_undeclared: bool,
}

#[derive(Debug, Clone)]
pub struct Decl {
    /// Enclosing entity in the declared hierarchy.
    pub parent: Option<String>,
    pub is_extern: bool,
    pub span: Span,
}

/// Declared entities, actions, motives and condition variables.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    tables: [BTreeMap<String, Decl>; 4],
}

fn slot(kind: DeclKind) -> usize {
    match kind {
        DeclKind::Entity => 0,
        DeclKind::Action => 1,
        DeclKind::Motive => 2,
        DeclKind::Condition => 3,
    }
}

impl Catalog {
    pub fn table(&self, kind: DeclKind) -> &BTreeMap<String, Decl> {
        &self.tables[slot(kind)]
    }

    pub fn get(&self, kind: DeclKind, name: &str) -> Option<&Decl> {
        self.table(kind).get(name)
    }

    pub fn contains(&self, kind: DeclKind, name: &str) -> bool {
        self.table(kind).contains_key(name)
    }

    pub fn children(&self, entity: &str) -> impl Iterator<Item = &str> + '_ {
        let entity = entity.to_string();
        self.table(DeclKind::Entity)
            .iter()
            .filter(move |(_, d)| d.parent.as_deref() == Some(entity.as_str()))
            .map(|(n, _)| n.as_str())
    }

    /// Enclosing entities, innermost first.
    pub fn ancestors(&self, entity: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut current = self.get(DeclKind::Entity, entity);
        while let Some(parent) = current.and_then(|d| d.parent.as_deref()) {
            out.push(parent);
            current = self.get(DeclKind::Entity, parent);
        }
        out
    }

    fn insert(&mut self, kind: DeclKind, name: &str, decl: Decl) -> std::result::Result<(), Span> {
        let table = &mut self.tables[slot(kind)];
        if let Some(existing) = table.get(name) {
            return Err(existing.span.clone());
        }
        table.insert(name.to_string(), decl);
        Ok(())
    }

    /// Declarations without their source positions, for comparisons.
    fn shape(&self) -> Vec<Vec<(&str, Option<&str>, bool)>> {
        self.tables
            .iter()
            .map(|t| {
                t.iter()
                    .map(|(n, d)| (n.as_str(), d.parent.as_deref(), d.is_extern))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct NamedInterface {
    pub name: String,
    pub scope: Scope,
    pub monoid: bool,
    pub value: ConditionalInterface,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct NamedArchitecture {
    pub architecture: Architecture,
    pub span: Span,
}

/// Everything a specification defines, evaluated.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    pub catalog: Catalog,
    pub interfaces: BTreeMap<String, NamedInterface>,
    pub architectures: BTreeMap<String, NamedArchitecture>,
    pub refinements: BTreeMap<String, (RefinementSpec, Span)>,
    pub renames: BTreeMap<String, (RenameMap, Span)>,
    pub checks: Vec<CheckDef>,
    pub warnings: Vec<Diagnostic>,
}

/// Evaluated expression. `0` takes the scope of whatever it is combined with.
#[derive(Debug, Clone)]
enum Value {
    Zero,
    Iface(ConditionalInterface),
}

impl Value {
    fn into_interface(self, scope: Scope) -> ConditionalInterface {
        match self {
            Value::Zero => ConditionalInterface::zero(scope),
            Value::Iface(i) => i,
        }
    }
}

#[derive(Clone)]
enum State {
    Visiting,
    Done(Option<Value>),
}

struct Resolver<'m> {
    options: ResolveOptions,
    catalog: Catalog,
    defs: BTreeMap<String, &'m InterfaceDef>,
    kinds: BTreeMap<String, &'static str>,
    states: BTreeMap<String, State>,
    stack: Vec<String>,
    reported_cycles: BTreeSet<Vec<String>>,
    extern_warned: BTreeSet<(DeclKind, String)>,
    diags: Vec<Diagnostic>,
}

impl<'m> Resolver<'m> {
    fn new(options: ResolveOptions, catalog: Catalog) -> Self {
        Resolver {
            options,
            catalog,
            defs: BTreeMap::new(),
            kinds: BTreeMap::new(),
            states: BTreeMap::new(),
            stack: Vec::new(),
            reported_cycles: BTreeSet::new(),
            extern_warned: BTreeSet::new(),
            diags: Vec::new(),
        }
    }

    fn error(&mut self, span: &Span, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(span.clone(), message));
    }

    fn algebra_error(&mut self, span: &Span, e: Error) {
        self.diags.push(Diagnostic::from_error(span.clone(), &e));
    }

    fn declare_entities(&mut self, decls: &[EntityDecl], parent: Option<&str>, is_extern: bool) {
        for decl in decls {
            let entry = Decl {
                parent: parent.map(str::to_string),
                is_extern,
                span: decl.name.span.clone(),
            };
            if let Err(first) = self.catalog.insert(DeclKind::Entity, &decl.name.text, entry) {
                self.error(
                    &decl.name.span,
                    format!("duplicate entity `{}` (first declared at {first})", decl.name),
                );
                continue;
            }
            self.declare_entities(&decl.children, Some(&decl.name.text), is_extern);
        }
    }

    fn declare(&mut self, kind: DeclKind, names: &[Name], is_extern: bool) {
        for name in names {
            let entry = Decl {
                parent: None,
                is_extern,
                span: name.span.clone(),
            };
            if let Err(first) = self.catalog.insert(kind, &name.text, entry) {
                self.error(
                    &name.span,
                    format!("duplicate {} `{name}` (first declared at {first})", kind.keyword()),
                );
            }
        }
    }

    fn define(&mut self, name: &Name, kind: &'static str) -> bool {
        if let Some(existing) = self.kinds.get(&name.text) {
            let existing = *existing;
            self.error(
                &name.span,
                format!("`{name}` is already defined as {existing}"),
            );
            return false;
        }
        self.kinds.insert(name.text.clone(), kind);
        true
    }

    /// Checks that a name is declared; with `allow_undeclared`, declares it extern.
    fn known(&mut self, kind: DeclKind, name: &Name) -> bool {
        if self.catalog.contains(kind, &name.text) {
            return true;
        }
        if self.options.allow_undeclared {
            let entry = Decl {
                parent: None,
                is_extern: true,
                span: name.span.clone(),
            };
            let _ = self.catalog.insert(kind, &name.text, entry);
            if self.extern_warned.insert((kind, name.text.clone())) {
                self.diags.push(Diagnostic::warning(
                    name.span.clone(),
                    format!("undeclared {} `{name}` treated as extern", kind.keyword()),
                ));
            }
            return true;
        }
        self.error(&name.span, format!("undeclared {} `{name}`", kind.keyword()));
        false
    }

    fn combine(&mut self, span: &Span, a: Option<Value>, b: Option<Value>, negate_b: bool) -> Option<Value> {
        let (a, b) = (a?, b?);
        let b = match (b, negate_b) {
            (Value::Iface(i), true) => match i.negate() {
                Ok(n) => Value::Iface(n),
                Err(e) => {
                    self.algebra_error(span, e);
                    return None;
                }
            },
            (b, _) => b,
        };
        match (a, b) {
            (Value::Zero, v) | (v, Value::Zero) => Some(v),
            (Value::Iface(x), Value::Iface(y)) => {
                if x.scope() != y.scope() {
                    self.error(
                        span,
                        format!("cannot combine a {} interface with a {} interface", x.scope(), y.scope()),
                    );
                    return None;
                }
                match x.add(&y) {
                    Ok(v) => Some(Value::Iface(v)),
                    Err(e) => {
                        self.algebra_error(span, e);
                        None
                    }
                }
            }
        }
    }

    fn element(&mut self, lit: &ElementLit) -> Option<Value> {
        let mut ok = self.known(DeclKind::Entity, &lit.target);
        ok &= self.known(DeclKind::Action, &lit.action);
        for m in &lit.motive {
            ok &= self.known(DeclKind::Motive, m);
        }
        if let Some(host) = &lit.host {
            ok &= self.known(DeclKind::Entity, host);
        }
        if !ok {
            return None;
        }
        let polarity = if lit.client {
            Polarity::Client
        } else {
            Polarity::Service
        };
        let generator = Generator {
            polarity,
            target: EntityId::new(&lit.target.text),
            action: ActionId::new(&lit.action.text),
            motive: MotiveExpr::from_atoms(lit.motive.iter().map(|m| MotiveAtom::new(&m.text))),
            host: lit.host.as_ref().map(|h| EntityId::new(&h.text)),
            alpha: lit.alpha.unwrap_or(Alpha::TF),
        };
        Some(Value::Iface(Interface::from_generator(generator).into()))
    }

    fn eval(&mut self, expr: &Expr) -> Option<Value> {
        let span = &expr.span;
        match &expr.kind {
            ExprKind::Zero => Some(Value::Zero),
            ExprKind::Element(lit) => self.element(lit),
            ExprKind::Ref(name) => self.reference(name, span),
            ExprKind::Group(e) | ExprKind::Commented(e, _) => self.eval(e),
            ExprKind::Neg(e) => {
                let v = self.eval(e);
                self.combine(span, Some(Value::Zero), v, true)
            }
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                let x = self.eval(a);
                let y = self.eval(b);
                self.combine(span, x, y, matches!(expr.kind, ExprKind::Sub(..)))
            }
            ExprKind::Scale(n, e) => {
                let v = self.eval(e)?;
                let Ok(n) = i64::try_from(*n) else {
                    self.algebra_error(span, Error::Overflow);
                    return None;
                };
                match v {
                    Value::Zero => Some(Value::Zero),
                    Value::Iface(i) => match i.scale(n) {
                        Ok(i) => Some(Value::Iface(i)),
                        Err(e) => {
                            self.algebra_error(span, e);
                            None
                        }
                    },
                }
            }
            ExprKind::Globalize(e, host) => {
                let host_ok = self.known(DeclKind::Entity, host);
                let v = self.eval(e)?;
                if !host_ok {
                    return None;
                }
                match v {
                    Value::Zero => Some(Value::Iface(ConditionalInterface::zero(Scope::Global))),
                    Value::Iface(i) if i.scope() == Scope::Global => {
                        self.error(span, format!("`@{host}` applies to a local interface, found a global one"));
                        None
                    }
                    Value::Iface(i) => match i.map(|part| globalize(&EntityId::new(&host.text), part)) {
                        Ok(g) => Some(Value::Iface(g)),
                        Err(e) => {
                            self.algebra_error(span, e);
                            None
                        }
                    },
                }
            }
            ExprKind::Cond(e, lit) => {
                let var_ok = self.known(DeclKind::Condition, &lit.variable);
                let v = self.eval(e)?;
                if !var_ok {
                    return None;
                }
                let literal = ConditionLiteral {
                    variable: lit.variable.text.clone(),
                    negated: lit.negated,
                };
                match v {
                    Value::Zero => Some(Value::Zero),
                    Value::Iface(i) => match i.as_plain() {
                        Some(plain) => Some(Value::Iface(ConditionalInterface::guarded(literal, plain.clone()))),
                        None => {
                            self.error(span, "conditions cannot be nested");
                            None
                        }
                    },
                }
            }
        }
    }

    fn reference(&mut self, name: &str, span: &Span) -> Option<Value> {
        match self.states.get(name) {
            Some(State::Done(v)) => return v.clone(),
            Some(State::Visiting) => {
                let start = self.stack.iter().position(|n| n == name).unwrap_or(0);
                let mut cycle: Vec<String> = self.stack[start..].to_vec();
                let mut key = cycle.clone();
                key.sort();
                if self.reported_cycles.insert(key) {
                    cycle.push(name.to_string());
                    self.error(span, format!("cyclic reference: {}", cycle.join(" -> ")));
                }
                return None;
            }
            None => {}
        }
        let Some(def) = self.defs.get(name).copied() else {
            match self.kinds.get(name) {
                Some(kind) => {
                    let kind = *kind;
                    self.error(span, format!("`{name}` is {kind}, not an interface"))
                }
                None => self.error(span, format!("undefined interface `{name}`")),
            }
            return None;
        };
        self.states.insert(name.to_string(), State::Visiting);
        self.stack.push(name.to_string());
        let value = self.eval(&def.body);
        self.stack.pop();
        // A cycle reported while evaluating may already have settled this entry.
        self.states.insert(name.to_string(), State::Done(value.clone()));
        value
    }

    fn interface(&mut self, def: &InterfaceDef) -> Option<NamedInterface> {
        let value = self.reference(&def.name.text, &def.name.span)?;
        let scope = match (&value, def.scope) {
            (Value::Zero, declared) => declared.unwrap_or(Scope::Local),
            (Value::Iface(i), Some(declared)) if i.scope() != declared => {
                self.error(
                    &def.name.span,
                    format!("interface `{}` is declared {declared} but its body is {}", def.name, i.scope()),
                );
                return None;
            }
            (Value::Iface(i), _) => i.scope(),
        };
        Some(NamedInterface {
            name: def.name.text.clone(),
            scope,
            monoid: def.monoid,
            value: value.into_interface(scope),
            span: def.name.span.clone(),
        })
    }

    fn architecture(&mut self, def: &ArchitectureDef) -> Option<NamedArchitecture> {
        let mut arch = Architecture::new(def.name.text.clone());
        let mut ok = true;
        for member in &def.members {
            let entity_ok = self.known(DeclKind::Entity, &member.entity);
            let Some(value) = self.eval(&member.body) else {
                ok = false;
                continue;
            };
            let interface = value.into_interface(Scope::Local);
            if interface.scope() != Scope::Local {
                self.error(
                    &member.entity.span,
                    format!("member `{}` of architecture `{}` needs a local interface", member.entity, def.name),
                );
                ok = false;
                continue;
            }
            if !entity_ok {
                ok = false;
                continue;
            }
            if let Err(e) = arch.add_member(EntityId::new(&member.entity.text), interface, member.contained) {
                self.algebra_error(&member.entity.span, e);
                ok = false;
            }
        }
        ok.then(|| NamedArchitecture {
            architecture: arch,
            span: def.name.span.clone(),
        })
    }

    fn refinement(&mut self, def: &RefinementDef) -> Option<RefinementSpec> {
        let mut ok = self.known(DeclKind::Entity, &def.coarse);
        for part in &def.parts {
            ok &= self.known(DeclKind::Entity, part);
        }
        if !ok {
            return None;
        }
        let parts = def.parts.iter().map(|p| EntityId::new(&p.text)).collect();
        match RefinementSpec::new(EntityId::new(&def.coarse.text), parts) {
            Ok(spec) => Some(spec),
            Err(e) => {
                self.algebra_error(&def.name.span, e);
                None
            }
        }
    }

    fn rename_map(&mut self, rules: &[RenameRule]) -> Option<RenameMap> {
        let mut map = RenameMap::default();
        let mut seen: BTreeMap<(DeclKind, &str), &str> = BTreeMap::new();
        let mut ok = true;
        for rule in rules {
            ok &= self.known(rule.kind, &rule.from);
            ok &= self.known(rule.kind, &rule.to);
            if let Some(previous) = seen.insert((rule.kind, &rule.from.text), &rule.to.text) {
                if previous != rule.to.text {
                    self.error(
                        &rule.from.span,
                        format!("{} `{}` is mapped to both `{previous}` and `{}`", rule.kind.keyword(), rule.from, rule.to),
                    );
                    ok = false;
                }
            }
            let (from, to) = (rule.from.text.as_str(), rule.to.text.as_str());
            match rule.kind {
                DeclKind::Entity => {
                    map.entities.insert(from.into(), to.into());
                }
                DeclKind::Action => {
                    map.actions.insert(from.into(), to.into());
                }
                DeclKind::Motive => {
                    map.motives.insert(from.into(), to.into());
                }
                DeclKind::Condition => {
                    self.error(&rule.from.span, "condition variables cannot be renamed");
                    ok = false;
                }
            }
        }
        ok.then_some(map)
    }

    fn check(&mut self, check: &CheckDef, interfaces: &BTreeMap<String, NamedInterface>) {
        let names: Vec<&Name> = match &check.kind {
            CheckKind::Closed { target, .. } => vec![target],
            CheckKind::Equal(a, b) | CheckKind::Leq(a, b) => vec![a, b],
        };
        for name in names {
            let kind = self.kinds.get(&name.text).copied();
            match (&check.kind, kind) {
                (_, None) => self.error(&name.span, format!("undefined name `{name}`")),
                (CheckKind::Closed { .. }, Some("an architecture")) => {}
                (_, Some("an interface")) => {
                    let local = interfaces.get(&name.text).is_some_and(|i| i.scope == Scope::Local);
                    if matches!(check.kind, CheckKind::Closed { .. }) && local {
                        self.error(&name.span, format!("closedness applies to global interfaces; `{name}` is local"));
                    }
                }
                (_, Some(kind)) => self.error(&name.span, format!("`{name}` is {kind}, not an interface")),
            }
        }
    }
}

/// Resolves a parsed module. On failure the returned diagnostics include
/// warnings as well as errors, sorted by position.
pub fn resolve(module: &SpecModule, options: ResolveOptions) -> std::result::Result<Environment, Vec<Diagnostic>> {
    let mut r = Resolver::new(options, Catalog::default());
    for item in &module.items {
        match item {
            Item::Entities { is_extern, decls } => r.declare_entities(decls, None, *is_extern),
            Item::Names { kind, is_extern, names } => r.declare(*kind, names, *is_extern),
            _ => {}
        }
    }
    for item in &module.items {
        let name = match item {
            Item::Interface(def) => {
                if r.define(&def.name, "an interface") {
                    r.defs.insert(def.name.text.clone(), def);
                }
                continue;
            }
            Item::Architecture(def) => (&def.name, "an architecture"),
            Item::Refinement(def) => (&def.name, "a refinement"),
            Item::Rename(def) => (&def.name, "a rename"),
            _ => continue,
        };
        r.define(name.0, name.1);
    }

    let mut env = Environment::default();
    let defs: Vec<&InterfaceDef> = r.defs.values().copied().collect();
    for def in defs {
        if let Some(named) = r.interface(def) {
            env.interfaces.insert(named.name.clone(), named);
        }
    }
    for item in &module.items {
        match item {
            Item::Architecture(def) => {
                if let Some(arch) = r.architecture(def) {
                    env.architectures.entry(def.name.text.clone()).or_insert(arch);
                }
            }
            Item::Refinement(def) => {
                if let Some(spec) = r.refinement(def) {
                    env.refinements
                        .entry(def.name.text.clone())
                        .or_insert((spec, def.name.span.clone()));
                }
            }
            Item::Rename(def) => {
                if let Some(map) = r.rename_map(&def.rules) {
                    env.renames
                        .entry(def.name.text.clone())
                        .or_insert((map, def.name.span.clone()));
                }
            }
            Item::Check(check) => {
                r.check(check, &env.interfaces);
                env.checks.push(check.clone());
            }
            _ => {}
        }
    }

    let mut diags = module.warnings.clone();
    diags.append(&mut r.diags);
    diags.sort();
    diags.dedup();
    env.catalog = r.catalog;
    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    env.warnings = diags;
    Ok(env)
}

impl Environment {
    /// Evaluates an interface expression against this environment. Without
    /// any element or reference to fix it, the scope is `default_scope`.
    pub fn evaluate(
        &self,
        expr: &Expr,
        default_scope: Scope,
        options: ResolveOptions,
    ) -> std::result::Result<ConditionalInterface, Vec<Diagnostic>> {
        self.evaluate_with_warnings(expr, default_scope, options).map(|(value, _)| value)
    }

    /// Like [`Environment::evaluate`], also returning the warnings raised on the way.
    pub fn evaluate_with_warnings(
        &self,
        expr: &Expr,
        default_scope: Scope,
        options: ResolveOptions,
    ) -> std::result::Result<(ConditionalInterface, Vec<Diagnostic>), Vec<Diagnostic>> {
        let mut r = Resolver::new(options, self.catalog.clone());
        for (name, named) in &self.interfaces {
            r.kinds.insert(name.clone(), "an interface");
            r.states
                .insert(name.clone(), State::Done(Some(Value::Iface(named.value.clone()))));
        }
        for name in self.architectures.keys() {
            r.kinds.insert(name.clone(), "an architecture");
        }
        for name in self.refinements.keys() {
            r.kinds.insert(name.clone(), "a refinement");
        }
        for name in self.renames.keys() {
            r.kinds.insert(name.clone(), "a rename");
        }
        let value = r.eval(expr);
        if r.diags.iter().any(Diagnostic::is_error) {
            r.diags.sort();
            return Err(r.diags);
        }
        r.diags.sort();
        Ok((value.expect("evaluation without errors").into_interface(default_scope), r.diags))
    }

    /// Parses and evaluates an expression given as text.
    pub fn evaluate_text(
        &self,
        source: &str,
        text: &str,
        default_scope: Scope,
        options: ResolveOptions,
    ) -> std::result::Result<ConditionalInterface, Vec<Diagnostic>> {
        self.evaluate_text_with_warnings(source, text, default_scope, options)
            .map(|(value, _)| value)
    }

    pub fn evaluate_text_with_warnings(
        &self,
        source: &str,
        text: &str,
        default_scope: Scope,
        options: ResolveOptions,
    ) -> std::result::Result<(ConditionalInterface, Vec<Diagnostic>), Vec<Diagnostic>> {
        let expr = super::parse_expression(source, text).map_err(|d| vec![d])?;
        self.evaluate_with_warnings(&expr, default_scope, options)
    }

    /// Resolves rename rules (as found in a map file) against the catalog.
    pub fn rename_map(
        &self,
        rules: &[RenameRule],
        options: ResolveOptions,
    ) -> std::result::Result<RenameMap, Vec<Diagnostic>> {
        let mut r = Resolver::new(options, self.catalog.clone());
        let map = r.rename_map(rules);
        match map {
            Some(map) if !r.diags.iter().any(Diagnostic::is_error) => Ok(map),
            _ => {
                r.diags.sort();
                Err(r.diags)
            }
        }
    }

    /// Same declarations and definitions with the same values, ignoring positions.
    pub fn same_as(&self, other: &Environment) -> bool {
        let interfaces = |e: &Environment| -> Vec<(String, Scope, bool, ConditionalInterface)> {
            e.interfaces
                .values()
                .map(|i| (i.name.clone(), i.scope, i.monoid, i.value.clone()))
                .collect()
        };
        let architectures = |e: &Environment| -> Vec<Architecture> {
            e.architectures.values().map(|a| a.architecture.clone()).collect()
        };
        let refinements = |e: &Environment| -> Vec<(String, RefinementSpec)> {
            e.refinements.iter().map(|(n, (s, _))| (n.clone(), s.clone())).collect()
        };
        let renames = |e: &Environment| -> Vec<(String, RenameMap)> {
            e.renames.iter().map(|(n, (m, _))| (n.clone(), m.clone())).collect()
        };
        let checks = |e: &Environment| -> Vec<String> { e.checks.iter().map(|c| c.to_string()).collect() };
        self.catalog.shape() == other.catalog.shape()
            && interfaces(self) == interfaces(other)
            && architectures(self) == architectures(other)
            && refinements(self) == refinements(other)
            && renames(self) == renames(other)
            && checks(self) == checks(other)
    }

    pub fn interface(&self, name: &str) -> Option<&NamedInterface> {
        self.interfaces.get(name)
    }

    pub fn architecture(&self, name: &str) -> Option<&Architecture> {
        self.architectures.get(name).map(|a| &a.architecture)
    }
}

/// Result of one `check` directive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub directive: String,
    pub passed: bool,
    /// Residual endpoints or other explanations when relevant.
    pub details: Vec<String>,
}

fn closure_details(reports: &[crate::transform::AssignmentReport]) -> Vec<String> {
    let mut details = Vec::new();
    for r in reports.iter().filter(|r| !r.report.closed) {
        let prefix = if r.assignment.is_empty() {
            String::new()
        } else {
            let vars: Vec<String> = r.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("[{}] ", vars.join(", "))
        };
        for u in &r.report.unmatched {
            details.push(format!("{prefix}{u}"));
        }
    }
    details
}

/// Runs every `check` directive in source order.
pub fn run_checks(env: &Environment) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for check in &env.checks {
        let directive = check.to_string();
        let (passed, details) = match &check.kind {
            CheckKind::Closed { expect_closed, target } => {
                let (closed, details) = if let Some(arch) = env.architecture(&target.text) {
                    let verdict = check_cfta(arch)?;
                    (verdict.closed, closure_details(&verdict.reports))
                } else {
                    let named = &env.interfaces[&target.text];
                    let expanded = named.value.map(expand_motives)?;
                    let closure = closed_under_all_assignments(&expanded)?;
                    (closure.closed, closure_details(&closure.reports))
                };
                (closed == *expect_closed, if closed { Vec::new() } else { details })
            }
            CheckKind::Equal(a, b) => {
                let (x, y) = (&env.interfaces[&a.text].value, &env.interfaces[&b.text].value);
                if x == y {
                    (true, Vec::new())
                } else if x.scope() != y.scope() {
                    (false, vec![format!("{a} is {} but {b} is {}", x.scope(), y.scope())])
                } else {
                    (false, vec![format!("{b} - {a} = {}", y.subtract(x)?)])
                }
            }
            CheckKind::Leq(a, b) => {
                let (x, y) = (&env.interfaces[&a.text].value, &env.interfaces[&b.text].value);
                match (x.as_plain(), y.as_plain()) {
                    (Some(x), Some(y)) if x.scope() == y.scope() => {
                        let holds = x.leq(y)?;
                        let details = if holds {
                            Vec::new()
                        } else {
                            vec![format!("{b} - {a} = {}", y.subtract(x)?)]
                        };
                        (holds, details)
                    }
                    (Some(_), Some(_)) => (false, vec![format!("{a} and {b} have different scopes")]),
                    _ => (false, vec!["the ordering is defined on unconditional interfaces".to_string()]),
                }
            }
        };
        out.push(CheckOutcome {
            directive,
            passed,
            details,
        });
    }
    Ok(out)
}

/// A span for text that did not come from a file, such as command-line arguments.
pub fn synthetic_span(source: &str) -> Span {
    Span::new(Arc::from(source), 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn env(text: &str) -> Environment {
        resolve(&parse("t.fti", text).unwrap(), ResolveOptions::default()).unwrap()
    }

    fn errors(text: &str) -> Vec<String> {
        resolve(&parse("t.fti", text).unwrap(), ResolveOptions::default())
            .unwrap_err()
            .into_iter()
            .filter(|d| d.is_error())
            .map(|d| d.to_string())
            .collect()
    }

    const DECLS: &str = "entity e, f, g;\naction a;\nmotive m, n;\ncondition c;\n";

    #[test]
    fn references_are_substituted() {
        let e = env(&format!("{DECLS}A = f.a(m)@g\nB = A + A - g.a(n)@f\n"));
        assert_eq!(e.interfaces["B"].value.to_string(), "-g.a(n)@f + 2 x f.a(m)@g");
        assert_eq!(e.interfaces["B"].scope, Scope::Global);
    }

    #[test]
    fn undeclared_entity_is_named() {
        let errs = errors(&format!("{DECLS}A = XYZ.a(m)@g\n"));
        assert_eq!(errs, vec!["t.fti:5:5: error: undeclared entity `XYZ`"]);
    }

    #[test]
    fn errors_are_collected_exhaustively() {
        let errs = errors(&format!(
            "{DECLS}A = XYZ.a(m)@g + f.b(m)@g\nB = f.a(q)@e\nC = D\nA = 0\n"
        ));
        assert_eq!(errs.len(), 5, "{errs:#?}");
    }

    #[test]
    fn allow_undeclared_declares_extern() {
        let m = parse("t", "A = XYZ.a(m)@g").unwrap();
        let e = resolve(
            &m,
            ResolveOptions {
                allow_undeclared: true,
            },
        )
        .unwrap();
        assert!(e.catalog.get(DeclKind::Entity, "XYZ").unwrap().is_extern);
        assert_eq!(e.warnings.len(), 4);
    }

    #[test]
    fn cycles_are_reported_once() {
        let errs = errors(&format!("{DECLS}A = B\nB = C + f.a(m)\nC = A\n"));
        assert_eq!(errs.len(), 1, "{errs:?}");
        assert!(errs[0].contains("cyclic reference: A -> B -> C -> A"), "{errs:?}");
        let errs = errors(&format!("{DECLS}A = A\n"));
        assert!(errs[0].contains("cyclic reference: A -> A"));
    }

    #[test]
    fn scope_mixing_is_an_error() {
        let errs = errors(&format!("{DECLS}A = f.a(m) + f.a(m)@g\n"));
        assert!(errs[0].contains("cannot combine a local interface with a global interface"));
        let errs = errors(&format!("{DECLS}interface A @local {{ f.a(m)@g }}\n"));
        assert!(errs[0].contains("declared local"));
        let errs = errors(&format!("{DECLS}A = (f.a(m)@g)@e\n"));
        assert!(errs[0].contains("applies to a local interface"));
    }

    #[test]
    fn zero_takes_context_scope() {
        let e = env(&format!("{DECLS}A = 0\ninterface B @global {{ 0 }}\nC = 0 + f.a(m)@g - 0\n"));
        assert_eq!(e.interfaces["A"].scope, Scope::Local);
        assert_eq!(e.interfaces["B"].scope, Scope::Global);
        assert_eq!(e.interfaces["C"].scope, Scope::Global);
    }

    #[test]
    fn conditionals_and_globalization() {
        let e = env(&format!(
            "{DECLS}G = (f.a(m) <| c |> 0)@g + (~g.a(m) <| c |> 0)@f\n"
        ));
        let v = &e.interfaces["G"].value;
        assert_eq!(v.branches.len(), 1);
        assert_eq!(v.to_string(), "(~g.a(m)@f + f.a(m)@g) <| c |> 0");
        let errs = errors(&format!("{DECLS}A = (f.a(m) <| c |> 0) <| c |> 0\n"));
        assert!(errs[0].contains("nested"));
        let errs = errors(&format!("{DECLS}A = f.a(m) <| d |> 0\n"));
        assert!(errs[0].contains("undeclared condition `d`"));
    }

    #[test]
    fn resolution_is_order_independent() {
        let a = env(&format!("{DECLS}A = B + f.a(m)@g\nB = 2 x e.a(n)@f\narchitecture X {{ e : f.a(m) }}\n"));
        let b = env(&format!("architecture X {{ e : f.a(m) }}\nB = 2 x e.a(n)@f\nA = B + f.a(m)@g\n{DECLS}"));
        assert!(a.same_as(&b));
    }

    #[test]
    fn architecture_members_merge() {
        let e = env(&format!("{DECLS}architecture X {{ e : f.a(m), e : f.a(n), f : 0 }}\n"));
        let arch = e.architecture("X").unwrap();
        assert_eq!(arch.members().len(), 2);
        assert_eq!(arch.members()[0].interface.to_string(), "f.a(m) + f.a(n)");
        let errs = errors(&format!("{DECLS}architecture X {{ e : f.a(m)@g }}\n"));
        assert!(errs[0].contains("needs a local interface"));
    }

    #[test]
    fn definitions_share_a_namespace() {
        let errs = errors(&format!("{DECLS}A = 0\narchitecture A {{ }}\nrefinement R : e -> f;\nB = R\n"));
        assert_eq!(errs.len(), 2, "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("already defined as an interface")));
        assert!(errs.iter().any(|e| e.contains("is a refinement, not an interface")));
    }

    #[test]
    fn rename_rules_must_be_functional() {
        let errs = errors(&format!("{DECLS}rename P {{ motive m -> n; motive m -> m; }}\n"));
        assert!(errs[0].contains("mapped to both"));
    }

    #[test]
    fn checks_run_in_order() {
        let e = env(&format!(
            "{DECLS}architecture X {{ e : f.a(m), f : ~e.a(m) }}\narchitecture Y {{ e : f.a(m) }}\n\
             A = f.a(m)@g\nB = A + A\n\
             check closed X;\ncheck not closed Y;\ncheck closed Y;\ncheck leq A B;\ncheck equal A B;\n"
        ));
        let outcomes = run_checks(&e).unwrap();
        let passed: Vec<bool> = outcomes.iter().map(|o| o.passed).collect();
        assert_eq!(passed, vec![true, true, false, true, false]);
        assert_eq!(outcomes[2].details, vec!["e -> f: a(m) may be sent but f declares no ~e.a(m)"]);
        assert_eq!(outcomes[4].details, vec!["B - A = f.a(m)@g"]);
    }

    #[test]
    fn check_targets_are_validated() {
        let errs = errors(&format!("{DECLS}A = f.a(m)\ncheck closed A;\ncheck equal A Q;\n"));
        assert_eq!(errs.len(), 2, "{errs:?}");
    }

    #[test]
    fn inline_evaluation() {
        let e = env(&format!("{DECLS}A = f.a(m)@g\n"));
        let v = e
            .evaluate_text("<arg>", "A - ~g.a(m)@f", Scope::Local, ResolveOptions::default())
            .unwrap();
        assert_eq!(v.to_string(), "-~g.a(m)@f + f.a(m)@g");
        assert_eq!(
            e.evaluate_text("<arg>", "0", Scope::Global, ResolveOptions::default())
                .unwrap()
                .scope(),
            Scope::Global
        );
        assert!(e
            .evaluate_text("<arg>", "Q", Scope::Local, ResolveOptions::default())
            .is_err());
    }
}

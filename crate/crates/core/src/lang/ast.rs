//! Syntax tree of `.fti` specifications. `Display` renders source text that
//! parses back to the same tree (up to spans).

use std::fmt;

use super::Span;
use crate::algebra::{Alpha, Scope};

#[derive(Debug, Clone)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// `[~]target.action(motive)[@host][/alpha]`; an empty motive list is the zero motive.
#[derive(Debug, Clone)]
pub struct ElementLit {
    pub client: bool,
    pub target: Name,
    pub action: Name,
    pub motive: Vec<Name>,
    pub host: Option<Name>,
    pub alpha: Option<Alpha>,
}

#[derive(Debug, Clone)]
pub struct CondLit {
    pub variable: Name,
    pub negated: bool,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Zero,
    Element(ElementLit),
    Ref(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    /// `n x expr`
    Scale(u64, Box<Expr>),
    Group(Box<Expr>),
    /// `(local)@entity`
    Globalize(Box<Expr>, Name),
    /// `expr ◁ c ▷ 0`
    Cond(Box<Expr>, CondLit),
    /// Expression followed by a `%[ ... %]` comment.
    Commented(Box<Expr>, String),
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Visits this node and all descendants, parents first.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Expr)) {
        visit(self);
        match &self.kind {
            ExprKind::Zero | ExprKind::Element(_) | ExprKind::Ref(_) => {}
            ExprKind::Neg(e)
            | ExprKind::Scale(_, e)
            | ExprKind::Group(e)
            | ExprKind::Globalize(e, _)
            | ExprKind::Cond(e, _)
            | ExprKind::Commented(e, _) => e.walk(visit),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    /// Names of interfaces referenced anywhere in the expression.
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let ExprKind::Ref(name) = &e.kind {
                out.push(name.as_str());
            }
        });
        out
    }
}

impl fmt::Display for ElementLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.client {
            f.write_str("~")?;
        }
        write!(f, "{}.{}(", self.target, self.action)?;
        if self.motive.is_empty() {
            f.write_str("0")?;
        }
        for (i, m) in self.motive.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str(")")?;
        if let Some(host) = &self.host {
            write!(f, "@{host}")?;
        }
        if let Some(alpha) = self.alpha {
            write!(f, "/{alpha}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Zero => f.write_str("0"),
            ExprKind::Element(e) => write!(f, "{e}"),
            ExprKind::Ref(name) => f.write_str(name),
            ExprKind::Neg(e) => write!(f, "-{e}"),
            ExprKind::Add(a, b) => write!(f, "{a} + {b}"),
            ExprKind::Sub(a, b) => write!(f, "{a} - {b}"),
            ExprKind::Scale(n, e) => write!(f, "{n} x {e}"),
            ExprKind::Group(e) => write!(f, "({e})"),
            ExprKind::Globalize(e, host) => write!(f, "{e}@{host}"),
            ExprKind::Cond(e, lit) => {
                let bang = if lit.negated { "!" } else { "" };
                write!(f, "{e} <| {bang}{} |> 0", lit.variable)
            }
            ExprKind::Commented(e, text) => write!(f, "{e} %[{text}%]"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EntityDecl {
    pub name: Name,
    pub children: Vec<EntityDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DeclKind {
    Entity,
    Action,
    Motive,
    Condition,
}

impl DeclKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DeclKind::Entity => "entity",
            DeclKind::Action => "action",
            DeclKind::Motive => "motive",
            DeclKind::Condition => "condition",
        }
    }
}

#[derive(Debug, Clone)]
pub struct InterfaceDef {
    pub name: Name,
    pub scope: Option<Scope>,
    pub monoid: bool,
    pub body: Expr,
    /// Written as `NAME = expr` rather than `interface NAME { expr }`.
    pub bare: bool,
}

#[derive(Debug, Clone)]
pub struct MemberDef {
    pub contained: bool,
    pub entity: Name,
    pub body: Expr,
}

#[derive(Debug, Clone)]
pub struct ArchitectureDef {
    pub name: Name,
    pub members: Vec<MemberDef>,
}

#[derive(Debug, Clone)]
pub struct RefinementDef {
    pub name: Name,
    pub coarse: Name,
    pub parts: Vec<Name>,
}

#[derive(Debug, Clone)]
pub struct RenameRule {
    pub kind: DeclKind,
    pub from: Name,
    pub to: Name,
}

#[derive(Debug, Clone)]
pub struct RenameDef {
    pub name: Name,
    pub rules: Vec<RenameRule>,
}

#[derive(Debug, Clone)]
pub enum CheckKind {
    /// `check [not] closed NAME`
    Closed { expect_closed: bool, target: Name },
    /// `check equal A B`
    Equal(Name, Name),
    /// `check leq A B`
    Leq(Name, Name),
}

#[derive(Debug, Clone)]
pub struct CheckDef {
    pub kind: CheckKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum Item {
    Entities { is_extern: bool, decls: Vec<EntityDecl> },
    Names { kind: DeclKind, is_extern: bool, names: Vec<Name> },
    Interface(InterfaceDef),
    Architecture(ArchitectureDef),
    Refinement(RefinementDef),
    Rename(RenameDef),
    Check(CheckDef),
    Comment(String, Span),
}

/// Parsed contents of one or more specification files.
#[derive(Debug, Clone, Default)]
pub struct SpecModule {
    pub items: Vec<Item>,
    pub warnings: Vec<super::Diagnostic>,
}

impl SpecModule {
    pub fn merge(&mut self, other: SpecModule) {
        self.items.extend(other.items);
        self.warnings.extend(other.warnings);
    }
}

fn write_entities(f: &mut fmt::Formatter<'_>, decls: &[EntityDecl], indent: usize) -> fmt::Result {
    for (i, decl) in decls.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "\n{:indent$}{}", "", decl.name, indent = indent)?;
        if !decl.children.is_empty() {
            f.write_str(" {")?;
            write_entities(f, &decl.children, indent + 2)?;
            write!(f, "\n{:indent$}}}", "", indent = indent)?;
        }
    }
    Ok(())
}

impl fmt::Display for RenameRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} -> {}", self.kind.keyword(), self.from, self.to)
    }
}

impl fmt::Display for CheckDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            CheckKind::Closed { expect_closed: true, target } => write!(f, "check closed {target};"),
            CheckKind::Closed { expect_closed: false, target } => {
                write!(f, "check not closed {target};")
            }
            CheckKind::Equal(a, b) => write!(f, "check equal {a} {b};"),
            CheckKind::Leq(a, b) => write!(f, "check leq {a} {b};"),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ext = |is_extern: bool| if is_extern { "extern " } else { "" };
        match self {
            Item::Entities { is_extern, decls } => {
                write!(f, "{}entity", ext(*is_extern))?;
                write_entities(f, decls, 2)?;
                f.write_str(";")
            }
            Item::Names { kind, is_extern, names } => {
                write!(f, "{}{}", ext(*is_extern), kind.keyword())?;
                for (i, name) in names.iter().enumerate() {
                    let sep = if i > 0 { "," } else { "" };
                    write!(f, "{sep} {name}")?;
                }
                f.write_str(";")
            }
            Item::Interface(def) if def.bare => write!(f, "{} = {};", def.name, def.body),
            Item::Interface(def) => {
                write!(f, "interface {}", def.name)?;
                if let Some(scope) = def.scope {
                    write!(f, " @{scope}")?;
                }
                if def.monoid {
                    f.write_str(" monoid")?;
                }
                write!(f, " {{\n  {}\n}}", def.body)
            }
            Item::Architecture(def) => {
                write!(f, "architecture {} {{", def.name)?;
                for m in &def.members {
                    let contained = if m.contained { "contained " } else { "" };
                    write!(f, "\n  {contained}{} : {},", m.entity, m.body)?;
                }
                f.write_str("\n}")
            }
            Item::Refinement(def) => {
                write!(f, "refinement {} : {} ->", def.name, def.coarse)?;
                for (i, part) in def.parts.iter().enumerate() {
                    let sep = if i > 0 { " ||" } else { "" };
                    write!(f, "{sep} {part}")?;
                }
                f.write_str(";")
            }
            Item::Rename(def) => {
                write!(f, "rename {} {{", def.name)?;
                for rule in &def.rules {
                    write!(f, "\n  {rule};")?;
                }
                f.write_str("\n}")
            }
            Item::Check(def) => write!(f, "{def}"),
            Item::Comment(text, _) => write!(f, "%[{text}%]"),
        }
    }
}

impl fmt::Display for SpecModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{item}\n")?;
        }
        Ok(())
    }
}

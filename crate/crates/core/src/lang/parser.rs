//! Recursive-descent parser.
//!
//! Expression precedence, loosest first: `+`, `-`, `/`, `@`, `~`, `.`.
//! A leading `n x` sets a multiplicity and `◁ c ▷ 0` (or `<| c |> 0`)
//! guards an operand by a condition.

use std::sync::Arc;

use super::ast::*;
use super::lexer::{lex, Tok};
use super::{Diagnostic, Span};
use crate::algebra::{Alpha, Scope};

const ITEM_KEYWORDS: &[&str] = &[
    "entity",
    "extern",
    "action",
    "motive",
    "condition",
    "interface",
    "architecture",
    "refinement",
    "rename",
    "check",
];

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    warnings: Vec<Diagnostic>,
}

impl Parser {
    fn new(file: &Arc<str>, text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(file, text)?,
            pos: 0,
            warnings: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1.clone()
    }

    fn advance(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        Diagnostic::error(
            self.span(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: &Tok) -> PResult<Span> {
        if self.peek() == tok {
            Ok(self.advance().1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(text) => {
                let span = self.advance().1;
                Ok(Name { text, span })
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    // ---- expressions ----

    fn at_expression_end(&self) -> bool {
        match self.peek() {
            Tok::Eof | Tok::RBrace | Tok::RParen | Tok::Semi | Tok::Comma => true,
            Tok::Ident(s) => {
                *self.peek_at(1) == Tok::Eq
                    || ITEM_KEYWORDS.contains(&s.as_str()) && matches!(self.peek_at(1), Tok::Ident(_))
            }
            _ => false,
        }
    }

    fn take_comments(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Tok::Comment(text) = self.peek().clone() {
            self.advance();
            out.push(text);
        }
        out
    }

    fn attach(expr: Expr, comments: Vec<String>) -> Expr {
        if comments.is_empty() {
            return expr;
        }
        let Expr { kind, span } = expr;
        match kind {
            ExprKind::Add(a, b) => Expr::new(ExprKind::Add(a, Box::new(Self::attach(*b, comments))), span),
            ExprKind::Sub(a, b) => Expr::new(ExprKind::Sub(a, Box::new(Self::attach(*b, comments))), span),
            kind => comments.into_iter().fold(Expr::new(kind, span.clone()), |e, c| {
                Expr::new(ExprKind::Commented(Box::new(e), c), span.clone())
            }),
        }
    }

    fn sum(&mut self) -> PResult<Expr> {
        let start = self.span();
        let first = self.signed()?;
        let comments = self.take_comments();
        let mut lhs = Self::attach(first, comments);
        loop {
            let minus = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            let op_span = self.advance().1;
            let comments = self.take_comments();
            lhs = Self::attach(lhs, comments);
            if self.at_expression_end() {
                if minus {
                    return Err(self.unexpected("an operand after `-`"));
                }
                self.warnings
                    .push(Diagnostic::warning(op_span, "trailing `+` ignored"));
                break;
            }
            let rhs = self.signed()?;
            let comments = self.take_comments();
            let rhs = Self::attach(rhs, comments);
            let kind = if minus {
                ExprKind::Sub(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::Add(Box::new(lhs), Box::new(rhs))
            };
            lhs = Expr::new(kind, start.clone());
        }
        Ok(lhs)
    }

    fn signed(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek() {
            Tok::Minus => {
                self.advance();
                let inner = self.signed()?;
                Ok(Expr::new(ExprKind::Neg(Box::new(inner)), start))
            }
            Tok::Int(n) if matches!(self.peek_at(1), Tok::Ident(x) if x == "x") => {
                let n = *n;
                self.advance();
                self.advance();
                let inner = self.signed()?;
                Ok(Expr::new(ExprKind::Scale(n, Box::new(inner)), start))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.primary()?;
        if self.eat(&Tok::At) {
            let host = self.ident("an entity name after `@`")?;
            expr = match expr.kind {
                ExprKind::Element(mut lit) if lit.host.is_none() => {
                    lit.host = Some(host);
                    Expr::new(ExprKind::Element(lit), expr.span)
                }
                kind => {
                    let span = expr.span;
                    Expr::new(ExprKind::Globalize(Box::new(Expr::new(kind, span.clone())), host), span)
                }
            };
        }
        if self.peek() == &Tok::Slash {
            let slash = self.advance().1;
            let alpha = match self.advance() {
                (Tok::Lambda, _) => Alpha::Lambda,
                (Tok::Ident(s), span) => Alpha::parse(&s).ok_or_else(|| {
                    Diagnostic::error(span, format!("unknown reply constraint `{s}`; expected TF, T, F or λ"))
                })?,
                (tok, span) => {
                    return Err(Diagnostic::error(
                        span,
                        format!("expected a reply constraint, found {}", tok.describe()),
                    ))
                }
            };
            match &mut expr.kind {
                ExprKind::Element(lit) if lit.alpha.is_none() => lit.alpha = Some(alpha),
                _ => {
                    return Err(Diagnostic::error(
                        slash,
                        "a reply constraint applies to a single interface element",
                    ))
                }
            }
        }
        if self.eat(&Tok::CondOpen) {
            let negated = self.eat(&Tok::Bang);
            let variable = self.ident("a condition variable")?;
            self.expect(&Tok::CondClose)?;
            if self.peek() != &Tok::Int(0) {
                return Err(self.unexpected("`0` after the condition"));
            }
            self.advance();
            let span = expr.span.clone();
            expr = Expr::new(ExprKind::Cond(Box::new(expr), CondLit { variable, negated }), span);
        }
        Ok(expr)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Tilde => {
                self.advance();
                if !matches!(self.peek(), Tok::Ident(_)) || self.peek_at(1) != &Tok::Dot {
                    return Err(Diagnostic::error(start, "`~` applies to an interface element"));
                }
                self.element(true, start)
            }
            Tok::Ident(_) if self.peek_at(1) == &Tok::Dot => self.element(false, start),
            Tok::Ident(name) => {
                self.advance();
                Ok(Expr::new(ExprKind::Ref(name), start))
            }
            Tok::Int(0) => {
                self.advance();
                Ok(Expr::new(ExprKind::Zero, start))
            }
            Tok::Int(n) => Err(Diagnostic::error(
                start,
                format!("integer `{n}` must be followed by the multiplicity keyword `x`"),
            )),
            Tok::LParen => {
                self.advance();
                let inner = self.sum()?;
                self.expect(&Tok::RParen)?;
                Ok(Expr::new(ExprKind::Group(Box::new(inner)), start))
            }
            Tok::Comment(_) => Err(Diagnostic::error(
                start,
                "a comment must directly follow an interface element",
            )),
            _ => Err(self.unexpected("an interface expression")),
        }
    }

    fn element(&mut self, client: bool, start: Span) -> PResult<Expr> {
        let target = self.ident("an entity name")?;
        self.expect(&Tok::Dot)?;
        let action = self.ident("an action name")?;
        self.expect(&Tok::LParen)?;
        let mut motive = Vec::new();
        loop {
            match self.peek() {
                Tok::Int(0) => {
                    self.advance();
                }
                Tok::Ident(_) => motive.push(self.ident("a motive")?),
                _ => return Err(self.unexpected("a motive")),
            }
            if !self.eat(&Tok::Plus) {
                break;
            }
        }
        self.expect(&Tok::RParen)?;
        Ok(Expr::new(
            ExprKind::Element(ElementLit {
                client,
                target,
                action,
                motive,
                host: None,
                alpha: None,
            }),
            start,
        ))
    }

    // ---- items ----

    fn module(&mut self) -> PResult<SpecModule> {
        let mut items = Vec::new();
        loop {
            let span = self.span();
            let item = match self.peek().clone() {
                Tok::Eof => break,
                Tok::Comment(text) => {
                    self.advance();
                    Item::Comment(text, span)
                }
                Tok::Ident(word) => match word.as_str() {
                    "entity" => {
                        self.advance();
                        self.entities(false)?
                    }
                    "extern" => {
                        self.advance();
                        self.extern_decl()?
                    }
                    "action" | "motive" | "condition" if self.peek_at(1) != &Tok::Eq => {
                        self.advance();
                        self.names(decl_kind(&word), false)?
                    }
                    "interface" if matches!(self.peek_at(1), Tok::Ident(_)) => {
                        self.advance();
                        self.interface_block()?
                    }
                    "architecture" if matches!(self.peek_at(1), Tok::Ident(_)) => {
                        self.advance();
                        self.architecture()?
                    }
                    "refinement" if matches!(self.peek_at(1), Tok::Ident(_)) => {
                        self.advance();
                        self.refinement()?
                    }
                    "rename" if matches!(self.peek_at(1), Tok::Ident(_)) => {
                        self.advance();
                        self.rename()?
                    }
                    "check" if matches!(self.peek_at(1), Tok::Ident(_)) => {
                        self.advance();
                        self.check(span)?
                    }
                    _ if self.peek_at(1) == &Tok::Eq => self.bare_definition()?,
                    _ => return Err(self.unexpected("a declaration or definition")),
                },
                _ => return Err(self.unexpected("a declaration or definition")),
            };
            items.push(item);
        }
        Ok(SpecModule {
            items,
            warnings: std::mem::take(&mut self.warnings),
        })
    }

    fn entity_list(&mut self, closing: &Tok) -> PResult<Vec<EntityDecl>> {
        let mut decls = Vec::new();
        while self.peek() != closing {
            let name = self.ident("an entity name")?;
            let children = if self.eat(&Tok::LBrace) {
                let children = self.entity_list(&Tok::RBrace)?;
                self.expect(&Tok::RBrace)?;
                children
            } else {
                Vec::new()
            };
            decls.push(EntityDecl { name, children });
            self.eat(&Tok::Comma);
        }
        Ok(decls)
    }

    fn entities(&mut self, is_extern: bool) -> PResult<Item> {
        let decls = self.entity_list(&Tok::Semi)?;
        self.expect(&Tok::Semi)?;
        Ok(Item::Entities { is_extern, decls })
    }

    fn names(&mut self, kind: DeclKind, is_extern: bool) -> PResult<Item> {
        let mut names = Vec::new();
        while self.peek() != &Tok::Semi {
            names.push(self.ident(&format!("{} name", kind.keyword()))?);
            self.eat(&Tok::Comma);
        }
        self.expect(&Tok::Semi)?;
        Ok(Item::Names {
            kind,
            is_extern,
            names,
        })
    }

    fn extern_decl(&mut self) -> PResult<Item> {
        let kind = self.ident("`entity`, `action`, `motive` or `condition`")?;
        match kind.text.as_str() {
            "entity" => self.entities(true),
            "action" | "motive" | "condition" => self.names(decl_kind(&kind.text), true),
            other => Err(Diagnostic::error(
                kind.span,
                format!("cannot declare `{other}` extern"),
            )),
        }
    }

    fn interface_block(&mut self) -> PResult<Item> {
        let name = self.ident("an interface name")?;
        let mut scope = None;
        if self.eat(&Tok::At) {
            let s = self.ident("`local` or `global`")?;
            scope = Some(match s.text.as_str() {
                "local" => Scope::Local,
                "global" => Scope::Global,
                _ => return Err(Diagnostic::error(s.span, "expected `local` or `global`")),
            });
        }
        let monoid = self.keyword("monoid");
        if monoid {
            self.advance();
        }
        let body = if self.eat(&Tok::LBrace) {
            let body = self.sum()?;
            self.expect(&Tok::RBrace)?;
            body
        } else if self.eat(&Tok::Eq) {
            let body = self.sum()?;
            self.eat(&Tok::Semi);
            body
        } else {
            return Err(self.unexpected("`{` or `=`"));
        };
        Ok(Item::Interface(InterfaceDef {
            name,
            scope,
            monoid,
            body,
            bare: false,
        }))
    }

    fn bare_definition(&mut self) -> PResult<Item> {
        let name = self.ident("an interface name")?;
        self.expect(&Tok::Eq)?;
        let body = self.sum()?;
        self.eat(&Tok::Semi);
        Ok(Item::Interface(InterfaceDef {
            name,
            scope: None,
            monoid: false,
            body,
            bare: true,
        }))
    }

    fn members(&mut self, closing: &Tok) -> PResult<Vec<MemberDef>> {
        let mut members = Vec::new();
        while self.peek() != closing {
            let contained = self.keyword("contained") && matches!(self.peek_at(1), Tok::Ident(_));
            if contained {
                self.advance();
            }
            let entity = self.ident("a member entity")?;
            self.expect(&Tok::Colon)?;
            let body = self.sum()?;
            members.push(MemberDef {
                contained,
                entity,
                body,
            });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(members)
    }

    fn architecture(&mut self) -> PResult<Item> {
        let name = self.ident("an architecture name")?;
        self.expect(&Tok::LBrace)?;
        let members = self.members(&Tok::RBrace)?;
        self.expect(&Tok::RBrace)?;
        Ok(Item::Architecture(ArchitectureDef { name, members }))
    }

    fn refinement(&mut self) -> PResult<Item> {
        let name = self.ident("a refinement name")?;
        self.expect(&Tok::Colon)?;
        let coarse = self.ident("the entity to refine")?;
        self.expect(&Tok::Arrow)?;
        let mut parts = vec![self.ident("a part entity")?];
        while self.eat(&Tok::Par) {
            parts.push(self.ident("a part entity")?);
        }
        self.expect(&Tok::Semi)?;
        Ok(Item::Refinement(RefinementDef {
            name,
            coarse,
            parts,
        }))
    }

    fn rename_rules(&mut self, closing: &Tok) -> PResult<Vec<RenameRule>> {
        let mut rules = Vec::new();
        while self.peek() != closing {
            let kind = self.ident("`entity`, `action` or `motive`")?;
            let kind = match kind.text.as_str() {
                "entity" => DeclKind::Entity,
                "action" => DeclKind::Action,
                "motive" => DeclKind::Motive,
                _ => {
                    return Err(Diagnostic::error(
                        kind.span,
                        "expected `entity`, `action` or `motive`",
                    ))
                }
            };
            let from = self.ident("a name")?;
            self.expect(&Tok::Arrow)?;
            let to = self.ident("a name")?;
            rules.push(RenameRule { kind, from, to });
            if !self.eat(&Tok::Semi) {
                self.eat(&Tok::Comma);
            }
        }
        Ok(rules)
    }

    fn rename(&mut self) -> PResult<Item> {
        let name = self.ident("a rename name")?;
        self.expect(&Tok::LBrace)?;
        let rules = self.rename_rules(&Tok::RBrace)?;
        self.expect(&Tok::RBrace)?;
        Ok(Item::Rename(RenameDef { name, rules }))
    }

    fn check(&mut self, span: Span) -> PResult<Item> {
        let word = self.ident("`closed`, `not`, `equal` or `leq`")?;
        let kind = match word.text.as_str() {
            "closed" => CheckKind::Closed {
                expect_closed: true,
                target: self.ident("a name")?,
            },
            "not" => {
                let closed = self.ident("`closed`")?;
                if closed.text != "closed" {
                    return Err(Diagnostic::error(closed.span, "expected `closed`"));
                }
                CheckKind::Closed {
                    expect_closed: false,
                    target: self.ident("a name")?,
                }
            }
            "equal" => CheckKind::Equal(self.ident("a name")?, self.ident("a name")?),
            "leq" => CheckKind::Leq(self.ident("a name")?, self.ident("a name")?),
            _ => {
                return Err(Diagnostic::error(
                    word.span,
                    "expected `closed`, `not closed`, `equal` or `leq`",
                ))
            }
        };
        self.expect(&Tok::Semi)?;
        Ok(Item::Check(CheckDef { kind, span }))
    }

    fn finish(&mut self) -> PResult<()> {
        if self.peek() != &Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(())
    }
}

fn decl_kind(word: &str) -> DeclKind {
    match word {
        "entity" => DeclKind::Entity,
        "action" => DeclKind::Action,
        "motive" => DeclKind::Motive,
        _ => DeclKind::Condition,
    }
}

/// Parses one specification file.
pub fn parse(file: &str, text: &str) -> Result<SpecModule, Diagnostic> {
    let file: Arc<str> = Arc::from(file);
    Parser::new(&file, text)?.module()
}

/// Parses several files concurrently and concatenates them in input order.
pub fn parse_files(files: &[(String, String)]) -> Result<SpecModule, Vec<Diagnostic>> {
    let results: Vec<Result<SpecModule, Diagnostic>> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|(name, text)| s.spawn(move || parse(name, text)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("parser thread panicked"))
            .collect()
    });
    let mut module = SpecModule::default();
    let mut errors = Vec::new();
    for result in results {
        match result {
            Ok(m) => module.merge(m),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(module)
    } else {
        Err(errors)
    }
}

/// Parses a standalone interface expression.
pub fn parse_expression(file: &str, text: &str) -> Result<Expr, Diagnostic> {
    let file: Arc<str> = Arc::from(file);
    let mut p = Parser::new(&file, text)?;
    let e = p.sum()?;
    p.finish()?;
    Ok(e)
}

/// Parses `entity : expr` blocks separated by commas, as printed for decompositions.
pub fn parse_members(file: &str, text: &str) -> Result<Vec<MemberDef>, Diagnostic> {
    let file: Arc<str> = Arc::from(file);
    let mut p = Parser::new(&file, text)?;
    let members = p.members(&Tok::Eof)?;
    p.finish()?;
    Ok(members)
}

/// Parses the body of a `rename` block, as used by rename map files.
pub fn parse_rename_rules(file: &str, text: &str) -> Result<Vec<RenameRule>, Diagnostic> {
    let file: Arc<str> = Arc::from(file);
    let mut p = Parser::new(&file, text)?;
    let rules = p.rename_rules(&Tok::Eof)?;
    p.finish()?;
    Ok(rules)
}

//! Warnings about specifications that resolve but are probably not what was meant.

use std::collections::BTreeSet;

use super::ast::*;
use super::resolve::Environment;
use super::Diagnostic;
use crate::algebra::{Alpha, Generator, Interface};
use crate::transform::ConditionalInterface;

fn parts(c: &ConditionalInterface) -> impl Iterator<Item = &Interface> {
    std::iter::once(&c.unconditional).chain(c.branches.values())
}

fn generators(c: &ConditionalInterface) -> BTreeSet<&Generator> {
    parts(c).flat_map(|i| i.generators()).collect()
}

#[derive(Default)]
struct Uses {
    names: BTreeSet<(DeclKind, String)>,
}

impl Uses {
    fn mark(&mut self, kind: DeclKind, name: &Name) {
        self.names.insert((kind, name.text.clone()));
    }

    fn expr(&mut self, expr: &Expr) {
        expr.walk(&mut |e| match &e.kind {
            ExprKind::Element(lit) => {
                self.mark(DeclKind::Entity, &lit.target);
                self.mark(DeclKind::Action, &lit.action);
                for m in &lit.motive {
                    self.mark(DeclKind::Motive, m);
                }
                if let Some(h) = &lit.host {
                    self.mark(DeclKind::Entity, h);
                }
            }
            ExprKind::Globalize(_, host) => self.mark(DeclKind::Entity, host),
            ExprKind::Cond(_, lit) => self.mark(DeclKind::Condition, &lit.variable),
            _ => {}
        });
    }

    fn item(&mut self, item: &Item) {
        match item {
            Item::Interface(def) => self.expr(&def.body),
            Item::Architecture(def) => {
                for m in &def.members {
                    self.mark(DeclKind::Entity, &m.entity);
                    self.expr(&m.body);
                }
            }
            Item::Refinement(def) => {
                self.mark(DeclKind::Entity, &def.coarse);
                for p in &def.parts {
                    self.mark(DeclKind::Entity, p);
                }
            }
            Item::Rename(def) => {
                for rule in &def.rules {
                    self.mark(rule.kind, &rule.from);
                    self.mark(rule.kind, &rule.to);
                }
            }
            _ => {}
        }
    }
}

/// Self-transfers, negative coefficients in `monoid` interfaces, reply
/// constraints other than `TF`, and unused declarations.
pub fn lint(module: &SpecModule, env: &Environment) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    for named in env.interfaces.values() {
        for g in generators(&named.value) {
            if g.is_self_loop() {
                out.push(Diagnostic::warning(
                    named.span.clone(),
                    format!("interface `{}` contains self-transfer {g}, which vanishes under reflection", named.name),
                ));
            }
            if g.alpha != Alpha::TF {
                out.push(Diagnostic::warning(
                    named.span.clone(),
                    format!("interface `{}` uses {g}; /{} elements never cancel", named.name, g.alpha),
                ));
            }
        }
        if named.monoid {
            for (g, n) in parts(&named.value).flat_map(|i| i.terms()).filter(|(_, n)| *n < 0) {
                out.push(Diagnostic::warning(
                    named.span.clone(),
                    format!("monoid interface `{}` has negative coefficient {n} on {g}", named.name),
                ));
            }
        }
    }

    for named in env.architectures.values() {
        let arch = &named.architecture;
        for member in arch.members() {
            for g in generators(&member.interface) {
                let host = Some(member.entity.clone());
                let global = Generator { host, ..g.clone() };
                if global.is_self_loop() {
                    out.push(Diagnostic::warning(
                        named.span.clone(),
                        format!(
                            "member `{}` of architecture `{}` contains self-transfer {g}, which vanishes under reflection",
                            member.entity, arch.name
                        ),
                    ));
                }
                if g.alpha != Alpha::TF {
                    out.push(Diagnostic::warning(
                        named.span.clone(),
                        format!(
                            "member `{}` of architecture `{}` uses {g}; /{} elements never cancel",
                            member.entity, arch.name, g.alpha
                        ),
                    ));
                }
            }
        }
    }

    let mut uses = Uses::default();
    for item in &module.items {
        uses.item(item);
    }
    let catalog = &env.catalog;
    let mut used_entities: BTreeSet<&str> = BTreeSet::new();
    for (kind, name) in &uses.names {
        if *kind == DeclKind::Entity {
            used_entities.insert(name);
            used_entities.extend(catalog.ancestors(name));
        }
    }
    for kind in [DeclKind::Entity, DeclKind::Action, DeclKind::Motive, DeclKind::Condition] {
        for (name, decl) in catalog.table(kind) {
            if decl.is_extern {
                continue;
            }
            let used = match kind {
                DeclKind::Entity => used_entities.contains(name.as_str()),
                _ => uses.names.contains(&(kind, name.clone())),
            };
            if !used {
                out.push(Diagnostic::warning(
                    decl.span.clone(),
                    format!("{} `{name}` is declared but never used", kind.keyword()),
                ));
            }
        }
    }

    out.sort();
    out.dedup();
    out
}

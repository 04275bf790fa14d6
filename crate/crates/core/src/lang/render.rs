//! Canonical source text for a resolved environment.
//!
//! Declarations and definitions come out sorted by name with every interface
//! in normal form, so the output does not depend on the order of the input.

use std::fmt::Write;

use super::ast::DeclKind;
use super::resolve::{Catalog, Environment};

fn entity_forest(out: &mut String, catalog: &Catalog, roots: &[&str], indent: usize) {
    for (i, name) in roots.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "\n{:indent$}{name}", "");
        let children: Vec<&str> = catalog.children(name).collect();
        if !children.is_empty() {
            out.push_str(" {");
            entity_forest(out, catalog, &children, indent + 2);
            let _ = write!(out, "\n{:indent$}}}", "");
        }
    }
}

fn declarations(out: &mut String, catalog: &Catalog) {
    for is_extern in [false, true] {
        let prefix = if is_extern { "extern " } else { "" };
        let roots: Vec<&str> = catalog
            .table(DeclKind::Entity)
            .iter()
            .filter(|(_, d)| d.parent.is_none() && d.is_extern == is_extern)
            .map(|(n, _)| n.as_str())
            .collect();
        if !roots.is_empty() {
            let _ = write!(out, "{prefix}entity");
            entity_forest(out, catalog, &roots, 2);
            out.push_str(";\n");
        }
        for kind in [DeclKind::Action, DeclKind::Motive, DeclKind::Condition] {
            let names: Vec<&str> = catalog
                .table(kind)
                .iter()
                .filter(|(_, d)| d.is_extern == is_extern)
                .map(|(n, _)| n.as_str())
                .collect();
            if !names.is_empty() {
                let _ = writeln!(out, "{prefix}{} {};", kind.keyword(), names.join(", "));
            }
        }
    }
}

/// Source text that resolves back to an environment equal to `env`.
pub fn render_environment(env: &Environment) -> String {
    let mut out = String::new();
    declarations(&mut out, &env.catalog);

    for named in env.interfaces.values() {
        let monoid = if named.monoid { " monoid" } else { "" };
        let _ = write!(
            out,
            "\ninterface {} @{}{monoid} {{\n  {}\n}}\n",
            named.name, named.scope, named.value
        );
    }
    for named in env.architectures.values() {
        let arch = &named.architecture;
        let _ = write!(out, "\narchitecture {} {{", arch.name);
        for m in arch.members() {
            let contained = if m.contained { "contained " } else { "" };
            let _ = write!(out, "\n  {contained}{} : {},", m.entity, m.interface);
        }
        out.push_str("\n}\n");
    }
    if !env.refinements.is_empty() {
        out.push('\n');
    }
    for (name, (spec, _)) in &env.refinements {
        let _ = writeln!(out, "refinement {name} : {spec};");
    }
    for (name, (map, _)) in &env.renames {
        let _ = write!(out, "\nrename {name} {{");
        for (from, to) in &map.entities {
            let _ = write!(out, "\n  entity {from} -> {to};");
        }
        for (from, to) in &map.actions {
            let _ = write!(out, "\n  action {from} -> {to};");
        }
        for (from, to) in &map.motives {
            let _ = write!(out, "\n  motive {from} -> {to};");
        }
        out.push_str("\n}\n");
    }
    if !env.checks.is_empty() {
        out.push('\n');
    }
    for check in &env.checks {
        let _ = writeln!(out, "{check}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, resolve, ResolveOptions};

    fn round_trip(text: &str) -> (Environment, String) {
        let env = resolve(&parse("a.fti", text).unwrap(), ResolveOptions::default()).unwrap();
        let rendered = render_environment(&env);
        let again = resolve(&parse("b.fti", &rendered).unwrap(), ResolveOptions::default())
            .unwrap_or_else(|d| panic!("{rendered}\n{d:#?}"));
        assert!(env.same_as(&again), "{rendered}");
        assert_eq!(render_environment(&again), rendered);
        (env, rendered)
    }

    #[test]
    fn module_round_trip() {
        let (_, text) = round_trip(
            "entity FS { ESSC { IO, SA }, MaEIis }, FH;\nextern entity FSs;\n\
             action it, et;\nmotive hmt:csla, fp:dsla, m1;\ncondition c;\n\
             interface L @local monoid { 2 x FH.it(hmt:csla + fp:dsla) %[note%] + ~FSs.et(m1)/λ }\n\
             G = L@MaEIis - IO.it(m1)@SA/F\n\
             C = (FH.it(m1) <| !c |> 0)@SA + FH.et(0)@IO\n\
             Z = 0\n\
             architecture A { contained SA : L - FH.it(m1), IO : 0 }\n\
             refinement R : FS -> F1 || F2;\nentity F1, F2;\n\
             rename P { motive m1 -> fp:dsla; entity FSs -> FH; }\n\
             check closed A;\ncheck equal G G;\n",
        );
        assert!(text.contains("entity\n  F1,\n  F2,\n  FH,\n  FS {\n    ESSC {\n      IO,\n      SA\n    },\n    MaEIis\n  };"));
        assert!(text.contains("extern entity\n  FSs;"));
        assert!(text.contains("interface L @local monoid {\n  2 x FH.it(fp:dsla + hmt:csla) + ~FSs.et(m1)/λ\n}"));
        assert!(text.contains("interface Z @local {\n  0\n}"));
        assert!(text.contains("(FH.it(m1)@SA) <| !c |> 0"));
        assert!(text.contains("FH.et(0)@IO"));
        assert!(text.contains("refinement R : FS -> F1 || F2;"));
    }
}

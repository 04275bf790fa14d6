//! Globalization, localization and per-host decomposition of global interfaces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::algebra::{Alpha, EntityId, Generator, Interface, Scope};
use crate::error::{Error, Result};

/// Makes the implicit entity of a local interface explicit: `f.a(m)` becomes `f.a(m)@e`.
pub fn globalize(entity: &EntityId, local: &Interface) -> Result<Interface> {
    if local.scope() != Scope::Local {
        return Err(Error::WrongScope {
            expected: Scope::Local,
            found: local.scope(),
        });
    }
    local.extend(Scope::Global, |g| {
        Ok(Interface::from_generator(g.clone().at(entity.clone())))
    })
}

/// Swaps `-f.a(m)@g` to `~g.a(m)@f` (and `-~f.a(m)@g` to `g.a(m)@f`).
fn mirror(g: &Generator) -> Generator {
    let host = g.host.clone().expect("mirror expects a global element");
    Generator {
        polarity: g.polarity.flip(),
        target: host,
        action: g.action.clone(),
        motive: g.motive.clone(),
        host: Some(g.target.clone()),
        alpha: g.alpha,
    }
}

/// Where a global term lands after localization: the host and the positive local term.
///
/// Negative `TF` terms are first mirrored to the counterpart entity. Negative
/// terms with any other reply constraint have no mirror and stay at their host.
fn route(g: &Generator, n: i64) -> (Generator, i64) {
    if n < 0 && g.alpha == Alpha::TF {
        (mirror(g), -n)
    } else {
        (g.clone(), n)
    }
}

/// Keeps the terms of a global interface hosted at `entity`, with the host made implicit.
pub fn localize(entity: &EntityId, global: &Interface) -> Result<Interface> {
    global.require_scope(Scope::Global)?;
    let mut out = Interface::zero(Scope::Local);
    for (g, n) in global.terms() {
        let (routed, n) = route(g, n);
        if routed.host.as_ref() == Some(entity) {
            out.accumulate(routed.local(), n)?;
        }
    }
    Ok(out)
}

/// A global interface split into local interfaces per entity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalizedDecomposition {
    pub parts: BTreeMap<EntityId, Interface>,
}

impl LocalizedDecomposition {
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for LocalizedDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (entity, part)) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",\n")?;
            }
            write!(f, "{entity} : {part}")?;
        }
        Ok(())
    }
}

pub fn decompose(global: &Interface) -> Result<LocalizedDecomposition> {
    global.require_scope(Scope::Global)?;
    let hosts: BTreeSet<EntityId> = global
        .terms()
        .filter_map(|(g, n)| route(g, n).0.host)
        .collect();
    let mut parts = BTreeMap::new();
    for host in hosts {
        let part = localize(&host, global)?;
        if !part.is_zero() {
            parts.insert(host, part);
        }
    }
    Ok(LocalizedDecomposition { parts })
}

pub fn recompose(decomposition: &LocalizedDecomposition) -> Result<Interface> {
    let mut out = Interface::zero(Scope::Global);
    for (entity, part) in &decomposition.parts {
        out = out.add(&globalize(entity, part)?)?;
    }
    Ok(out)
}

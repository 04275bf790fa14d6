//! The interface group modulo reflection.
//!
//! The reflection law `f.a(m)@g + ~g.a(m)@f = 0` identifies every incoming
//! element with the negation of its matching outgoing element. Canonical
//! representatives use service elements only; self-transfers vanish. Elements
//! with a reply constraint other than `TF` have no reflection rule and are
//! carried through unchanged.

use std::fmt;

use crate::algebra::{ActionId, Alpha, EntityId, Generator, Interface, MotiveExpr, Polarity, Scope};
use crate::error::{Error, Result};
use crate::transform::expand_motives;

/// Image of a single generator under the reflection mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reflected {
    Zero,
    /// `sign * generator`, with `generator` a canonical service element.
    Term(i64, Generator),
    /// No rewrite rule applies (reply constraint other than `TF`).
    NonCancellable(Generator),
}

pub fn reflect_generator(g: &Generator) -> Result<Reflected> {
    let Some(host) = &g.host else {
        return Err(Error::WrongScope {
            expected: Scope::Global,
            found: Scope::Local,
        });
    };
    if g.alpha != Alpha::TF {
        return Ok(Reflected::NonCancellable(g.clone()));
    }
    if g.is_self_loop() {
        return Ok(Reflected::Zero);
    }
    Ok(match g.polarity {
        Polarity::Service => Reflected::Term(1, g.clone()),
        Polarity::Client => {
            let mirrored = Generator {
                polarity: Polarity::Service,
                target: host.clone(),
                action: g.action.clone(),
                motive: g.motive.clone(),
                host: Some(g.target.clone()),
                alpha: Alpha::TF,
            };
            Reflected::Term(-1, mirrored)
        }
    })
}

/// Canonical representative of an interface modulo reflection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub canonical: Interface,
    pub non_cancellable: Vec<Generator>,
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        self.canonical.is_zero() && self.non_cancellable.is_empty()
    }
}

/// The reflection mapping. Motives are expanded to atoms first.
pub fn phi_r(interface: &Interface) -> Result<Residual> {
    interface.require_scope(Scope::Global)?;
    let expanded = expand_motives(interface)?;
    let mut non_cancellable = Vec::new();
    let canonical = expanded.extend(Scope::Global, |g| {
        Ok(match reflect_generator(g)? {
            Reflected::Zero => Interface::zero(Scope::Global),
            Reflected::Term(sign, h) => Interface::from_terms(Scope::Global, [(h, sign)])?,
            Reflected::NonCancellable(h) => {
                non_cancellable.push(h.clone());
                Interface::from_generator(h)
            }
        })
    })?;
    Ok(Residual {
        canonical,
        non_cancellable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EndpointKind {
    /// An outgoing transfer nobody declared to receive.
    UnmatchedOutgoing,
    /// An expected incoming transfer nobody declared to send.
    UnmatchedIncoming,
    /// Reply-constrained element without a reflection rule.
    NonCancellable,
}

/// One residual term, read as a transfer endpoint that is still open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnmatchedEndpoint {
    pub kind: EndpointKind,
    /// Entity issuing the transfer.
    pub issuer: EntityId,
    /// Entity receiving the transfer.
    pub receiver: EntityId,
    pub action: ActionId,
    pub motive: MotiveExpr,
    /// Residual term as it appears in the canonical form.
    pub generator: Generator,
    pub coefficient: i64,
}

impl fmt::Display for UnmatchedEndpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.coefficient.unsigned_abs();
        let times = if n == 1 { String::new() } else { format!(" ({n} x)") };
        let transfer = format!("{}({})", self.action, self.motive);
        match self.kind {
            EndpointKind::UnmatchedOutgoing => write!(
                f,
                "{} -> {}: {transfer}{times} may be sent but {} declares no ~{}.{transfer}",
                self.issuer, self.receiver, self.receiver, self.issuer
            ),
            EndpointKind::UnmatchedIncoming => write!(
                f,
                "{} -> {}: {transfer}{times} is expected by {} but {} declares no {}.{transfer}",
                self.issuer, self.receiver, self.receiver, self.issuer, self.receiver
            ),
            EndpointKind::NonCancellable => write!(
                f,
                "{}: reply constraint /{} has no reflection rule",
                self.generator, self.generator.alpha
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub closed: bool,
    pub residual: Residual,
    pub unmatched: Vec<UnmatchedEndpoint>,
}

/// The 0-sum check: closed iff the interface vanishes modulo reflection.
pub fn is_closed(interface: &Interface) -> Result<ClosureReport> {
    let residual = phi_r(interface)?;
    let unmatched = residual
        .canonical
        .terms()
        .map(|(g, n)| endpoint(g, n))
        .collect();
    Ok(ClosureReport {
        closed: residual.is_zero(),
        residual,
        unmatched,
    })
}

fn endpoint(g: &Generator, n: i64) -> UnmatchedEndpoint {
    let host = g.host.clone().expect("residual terms are global");
    let (issuer, receiver) = match g.polarity {
        Polarity::Service => (host, g.target.clone()),
        Polarity::Client => (g.target.clone(), host),
    };
    let kind = if g.alpha != Alpha::TF {
        EndpointKind::NonCancellable
    } else if n > 0 {
        EndpointKind::UnmatchedOutgoing
    } else {
        EndpointKind::UnmatchedIncoming
    };
    UnmatchedEndpoint {
        kind,
        issuer,
        receiver,
        action: g.action.clone(),
        motive: g.motive.clone(),
        generator: g.clone(),
        coefficient: n,
    }
}

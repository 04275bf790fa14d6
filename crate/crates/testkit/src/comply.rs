//! Brute-force compliance matcher.
//!
//! Each member's interface is flattened into atomic permissions by hand and
//! every event is compared against the full list.

use std::collections::BTreeMap;

use fti_core::architecture::{Architecture, ComplianceReport, Reply, TransferEvent};
use fti_core::transform::Assignment;
use fti_core::{Alpha, EntityId, Generator, MotiveExpr, Polarity};
use rand::Rng;

use crate::gen::{pick, Catalog};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Finding {
    pub event: usize,
    pub kind: &'static str,
    pub member: String,
    pub element: String,
    pub candidates: Vec<String>,
    pub warning: bool,
}

fn permissions(arch: &Architecture, assignment: &Assignment) -> BTreeMap<EntityId, Vec<Generator>> {
    let mut out = BTreeMap::new();
    for m in arch.members() {
        let mut counts: BTreeMap<Generator, i64> = BTreeMap::new();
        let mut parts = vec![&m.interface.unconditional];
        for (lit, part) in &m.interface.branches {
            if lit.holds(assignment[&lit.variable]) {
                parts.push(part);
            }
        }
        for part in parts {
            for (g, n) in part.terms() {
                for atom in g.motive.atoms() {
                    let atomic = g.clone().with_motive(MotiveExpr::atom(atom.clone()));
                    *counts.entry(atomic).or_default() += n;
                }
            }
        }
        let positive = counts.into_iter().filter(|(_, n)| *n > 0).map(|(g, _)| g).collect();
        out.insert(m.entity.clone(), positive);
    }
    out
}

fn admits(alpha: Alpha, reply: Option<Reply>) -> bool {
    match (alpha, reply) {
        (Alpha::Lambda, _) => true,
        (Alpha::TF, Some(_)) => true,
        (Alpha::T, Some(Reply::T)) => true,
        (Alpha::F, Some(Reply::F)) => true,
        _ => false,
    }
}

pub fn findings(log: &[TransferEvent], arch: &Architecture, assignment: &Assignment) -> Vec<Finding> {
    let perms = permissions(arch, assignment);
    let mut out = Vec::new();
    for (index, e) in log.iter().enumerate() {
        for (member, polarity, other) in [
            (&e.source, Polarity::Service, &e.destination),
            (&e.destination, Polarity::Client, &e.source),
        ] {
            let Some(list) = perms.get(member) else { continue };
            let element = Generator::new(polarity, other.clone(), e.action.clone(), MotiveExpr::atom(e.motive.clone()));
            let same = |g: &&Generator| g.polarity == polarity && &g.target == other;
            let matching: Vec<&Generator> = list
                .iter()
                .filter(same)
                .filter(|g| g.action == e.action && g.motive == element.motive)
                .collect();
            let (kind, candidates): (&str, Vec<&Generator>) = if matching.is_empty() {
                let kind = if polarity == Polarity::Service { "unmatched-outgoing" } else { "unmatched-incoming" };
                let by_action: Vec<&Generator> = list.iter().filter(same).filter(|g| g.action == e.action).collect();
                let near = if by_action.is_empty() { list.iter().filter(same).collect() } else { by_action };
                (kind, near)
            } else if matching.iter().any(|g| admits(g.alpha, e.reply)) {
                continue;
            } else {
                ("reply-forbidden", matching)
            };
            let contained = arch.member(member).is_some_and(|m| m.contained);
            let mut candidates: Vec<String> = candidates.iter().map(|g| g.to_string()).collect();
            candidates.sort();
            out.push(Finding {
                event: index,
                kind,
                member: member.to_string(),
                element: element.to_string(),
                candidates,
                warning: kind == "unmatched-incoming" && !contained,
            });
        }
    }
    out.sort();
    out
}

/// The implementation's report in the same shape as [`findings`].
pub fn report_findings(report: &ComplianceReport) -> Vec<Finding> {
    let mut out = Vec::new();
    for (list, warning) in [(&report.violations, false), (&report.warnings, true)] {
        for v in list {
            let mut candidates: Vec<String> = v.candidates.iter().map(|g| g.to_string()).collect();
            candidates.sort();
            out.push(Finding {
                event: v.event,
                kind: v.kind.as_str(),
                member: v.member.to_string(),
                element: v.element.to_string(),
                candidates,
                warning,
            });
        }
    }
    out.sort();
    out
}

/// A random event between two distinct catalog entities, at least one of them a member.
pub fn event<R: Rng>(rng: &mut R, catalog: &Catalog, arch: &Architecture) -> TransferEvent {
    let members: Vec<&EntityId> = arch.members().iter().map(|m| &m.entity).collect();
    let anchor = (*pick(rng, &members)).clone();
    let other = loop {
        let e = EntityId::new(*pick(rng, &catalog.entities));
        if e != anchor {
            break e;
        }
    };
    let (source, destination) = if rng.gen_bool(0.5) { (anchor, other) } else { (other, anchor) };
    TransferEvent {
        source,
        destination,
        action: (*pick(rng, &catalog.actions)).into(),
        motive: (*pick(rng, &catalog.motives)).into(),
        reply: *pick(rng, &[None, Some(Reply::T), Some(Reply::F)]),
    }
}

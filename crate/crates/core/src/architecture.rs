//! Architectures of named local interfaces: the 0-sum check, diffs between
//! design stages, and compliance of logged transfers.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{ActionId, Alpha, EntityId, Generator, Interface, MotiveAtom, MotiveExpr, Polarity, Scope};
use crate::error::{Error, Result};
use crate::locglob::globalize;
use crate::transform::{
    closed_under_all_assignments, expand_motives, Assignment, AssignmentReport, ConditionalInterface,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub entity: EntityId,
    pub interface: ConditionalInterface,
    /// Contained components block undeclared transfers; only affects compliance severity here.
    pub contained: bool,
}

/// A sequence of named local interfaces `e1 : i1, ..., en : in`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    pub name: String,
    members: Vec<Member>,
}

impl Architecture {
    pub fn new(name: impl Into<String>) -> Self {
        Architecture {
            name: name.into(),
            members: Vec::new(),
        }
    }

    /// Adds a member. A second listing for the same entity is merged into the first.
    pub fn add_member(
        &mut self,
        entity: EntityId,
        interface: ConditionalInterface,
        contained: bool,
    ) -> Result<()> {
        interface.unconditional.require_scope(Scope::Local)?;
        if let Some(existing) = self.members.iter_mut().find(|m| m.entity == entity) {
            existing.interface = existing.interface.add(&interface)?;
            existing.contained |= contained;
        } else {
            self.members.push(Member {
                entity,
                interface,
                contained,
            });
        }
        Ok(())
    }

    pub fn with_member(mut self, entity: impl Into<EntityId>, interface: Interface) -> Result<Self> {
        self.add_member(entity.into(), interface.into(), false)?;
        Ok(self)
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn member(&self, entity: &EntityId) -> Option<&Member> {
        self.members.iter().find(|m| &m.entity == entity)
    }

    pub fn is_conditional(&self) -> bool {
        self.members.iter().any(|m| !m.interface.is_plain())
    }
}

/// `Σ globalize(e_k, i_k)` with motives expanded, conditional parts kept as branches.
pub fn cfta_conditional_sum(arch: &Architecture) -> Result<ConditionalInterface> {
    let mut sum = ConditionalInterface::zero(Scope::Global);
    for member in &arch.members {
        let global = member
            .interface
            .map(|i| expand_motives(&globalize(&member.entity, i)?))?;
        sum = sum.add(&global)?;
    }
    Ok(sum)
}

pub fn cfta_sum(arch: &Architecture, assignment: &Assignment) -> Result<Interface> {
    cfta_conditional_sum(arch)?.eval(assignment)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CftaVerdict {
    pub closed: bool,
    pub sum: ConditionalInterface,
    /// One report per assignment; a single report with the empty assignment
    /// when no member is conditional.
    pub reports: Vec<AssignmentReport>,
}

/// Closed iff the globalized sum vanishes modulo reflection under every assignment.
pub fn check_cfta(arch: &Architecture) -> Result<CftaVerdict> {
    let sum = cfta_conditional_sum(arch)?;
    let closure = closed_under_all_assignments(&sum)?;
    Ok(CftaVerdict {
        closed: closure.closed,
        sum,
        reports: closure.reports,
    })
}

/// Per-entity deltas `b_i - a_i`, a missing member counting as 0.
pub fn diff(a: &Architecture, b: &Architecture) -> Result<BTreeMap<EntityId, ConditionalInterface>> {
    let zero = ConditionalInterface::zero(Scope::Local);
    let mut out = BTreeMap::new();
    for entity in a.members.iter().chain(&b.members).map(|m| &m.entity) {
        if out.contains_key(entity) {
            continue;
        }
        let before = a.member(entity).map_or(&zero, |m| &m.interface);
        let after = b.member(entity).map_or(&zero, |m| &m.interface);
        out.insert(entity.clone(), after.subtract(before)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Reply {
    T,
    F,
}

impl fmt::Display for Reply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reply::T => "T",
            Reply::F => "F",
        })
    }
}

/// One logged transfer from `source` to `destination`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferEvent {
    pub source: EntityId,
    pub destination: EntityId,
    pub action: ActionId,
    pub motive: MotiveAtom,
    /// `None` when no reply was recorded.
    pub reply: Option<Reply>,
}

/// `TF` demands some reply, `T`/`F` demand that reply, `λ` accepts anything.
pub fn alpha_admits(alpha: Alpha, reply: Option<Reply>) -> bool {
    match alpha {
        Alpha::TF => reply.is_some(),
        Alpha::T => reply == Some(Reply::T),
        Alpha::F => reply == Some(Reply::F),
        Alpha::Lambda => true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    UnmatchedOutgoing,
    UnmatchedIncoming,
    ReplyForbidden,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::UnmatchedOutgoing => "unmatched-outgoing",
            ViolationKind::UnmatchedIncoming => "unmatched-incoming",
            ViolationKind::ReplyForbidden => "reply-forbidden",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Index of the event in the log.
    pub event: usize,
    pub kind: ViolationKind,
    /// Member whose interface was checked.
    pub member: EntityId,
    /// The local element the event instantiates (reply constraint `TF`).
    pub element: Generator,
    /// Declared elements closest to the observed transfer.
    pub candidates: Vec<Generator>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComplianceReport {
    pub violations: Vec<Violation>,
    /// Undeclared incoming transfers at members that are not contained.
    pub warnings: Vec<Violation>,
}

impl ComplianceReport {
    pub fn complies(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Positive, motive-expanded interface of each member under the assignment.
fn member_permissions(arch: &Architecture, assignment: &Assignment) -> Result<BTreeMap<EntityId, Interface>> {
    arch.members
        .iter()
        .map(|m| {
            let i = expand_motives(&m.interface.eval(assignment)?)?;
            Ok((m.entity.clone(), i.positive_part()))
        })
        .collect()
}

fn check_side(
    permissions: &Interface,
    element: &Generator,
) -> Result<(bool, Vec<Generator>)> {
    let mut matching = Vec::new();
    for alpha in [Alpha::TF, Alpha::T, Alpha::F, Alpha::Lambda] {
        let p = Interface::from_generator(element.clone().with_alpha(alpha));
        if p.leq(permissions)? {
            matching.push(element.clone().with_alpha(alpha));
        }
    }
    Ok((!matching.is_empty(), matching))
}

fn nearest(permissions: &Interface, element: &Generator) -> Vec<Generator> {
    let same_target = |g: &&Generator| g.polarity == element.polarity && g.target == element.target;
    let same_action: Vec<Generator> = permissions
        .generators()
        .filter(same_target)
        .filter(|g| g.action == element.action)
        .cloned()
        .collect();
    if !same_action.is_empty() {
        return same_action;
    }
    permissions.generators().filter(same_target).cloned().collect()
}

/// Checks every event against the members' declared interfaces.
///
/// An outgoing transfer must instantiate a positive element `destination.a(m)`
/// of the source's interface; an incoming transfer must instantiate a
/// positive `~source.a(m)` of the destination's interface. The reply must be
/// admitted by the element's reply constraint.
pub fn comply_events(
    log: &[TransferEvent],
    arch: &Architecture,
    assignment: &Assignment,
) -> Result<ComplianceReport> {
    let permissions = member_permissions(arch, assignment)?;
    let mut report = ComplianceReport::default();
    for (index, event) in log.iter().enumerate() {
        let sides = [
            (&event.source, Polarity::Service, &event.destination),
            (&event.destination, Polarity::Client, &event.source),
        ];
        if sides.iter().all(|(m, _, _)| !permissions.contains_key(*m)) {
            return Err(Error::EventOutsideArchitecture {
                index,
                source_entity: event.source.to_string(),
                destination: event.destination.to_string(),
            });
        }
        for (member, polarity, counterpart) in sides {
            let Some(perms) = permissions.get(member) else {
                continue;
            };
            let element = Generator::new(
                polarity,
                counterpart.clone(),
                event.action.clone(),
                MotiveExpr::atom(event.motive.clone()),
            );
            let (found, matching) = check_side(perms, &element)?;
            let (kind, candidates) = if !found {
                let kind = match polarity {
                    Polarity::Service => ViolationKind::UnmatchedOutgoing,
                    Polarity::Client => ViolationKind::UnmatchedIncoming,
                };
                (kind, nearest(perms, &element))
            } else if matching.iter().any(|g| alpha_admits(g.alpha, event.reply)) {
                continue;
            } else {
                (ViolationKind::ReplyForbidden, matching)
            };
            let violation = Violation {
                event: index,
                kind,
                member: member.clone(),
                element,
                candidates,
            };
            let contained = arch.member(member).is_some_and(|m| m.contained);
            if kind == ViolationKind::UnmatchedIncoming && !contained {
                report.warnings.push(violation);
            } else {
                report.violations.push(violation);
            }
        }
    }
    Ok(report)
}

/// Reads `source,destination,action,motive,reply` rows. The header row is
/// optional, `#` starts a comment line and an empty reply means none was recorded.
pub fn parse_event_log(text: &str) -> Result<Vec<TransferEvent>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut events = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::EventLog {
            row: i + 1,
            message: e.to_string(),
        })?;
        let row = record.position().map_or(i + 1, |p| p.line() as usize);
        let fail = |message: String| Error::EventLog { row, message };
        let fields: Vec<&str> = record.iter().collect();
        if i == 0 && fields.first() == Some(&"source") {
            continue;
        }
        if fields.len() != 5 {
            return Err(fail(format!("expected 5 columns, found {}", fields.len())));
        }
        for (name, value) in ["source", "destination", "action", "motive"].iter().zip(&fields) {
            if value.is_empty() || value.contains(char::is_whitespace) || value.contains('+') {
                return Err(fail(format!("invalid {name} `{value}`")));
            }
        }
        let reply = match fields[4] {
            "" => None,
            "T" => Some(Reply::T),
            "F" => Some(Reply::F),
            other => return Err(fail(format!("invalid reply `{other}`, expected T, F or empty"))),
        };
        events.push(TransferEvent {
            source: fields[0].into(),
            destination: fields[1].into(),
            action: fields[2].into(),
            motive: fields[3].into(),
            reply,
        });
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn local(terms: &[(Generator, i64)]) -> Interface {
        Interface::from_terms(Scope::Local, terms.iter().cloned()).unwrap()
    }

    fn two_entity() -> Architecture {
        Architecture::new("A")
            .with_member("e1", local(&[(Generator::service("e2", "a", "m"), 1)]))
            .unwrap()
            .with_member("e2", local(&[(Generator::client("e1", "a", "m"), 1)]))
            .unwrap()
    }

    fn event(src: &str, dst: &str, m: &str, reply: Option<Reply>) -> TransferEvent {
        TransferEvent {
            source: src.into(),
            destination: dst.into(),
            action: "a".into(),
            motive: m.into(),
            reply,
        }
    }

    #[test]
    fn two_entity_sum_and_verdict() {
        let arch = two_entity();
        let sum = cfta_sum(&arch, &Assignment::new()).unwrap();
        assert_eq!(sum.to_string(), "e2.a(m)@e1 + ~e1.a(m)@e2");
        assert!(check_cfta(&arch).unwrap().closed);
    }

    #[test]
    fn empty_and_single_member() {
        let empty = Architecture::new("E");
        assert!(cfta_sum(&empty, &Assignment::new()).unwrap().is_zero());
        assert!(check_cfta(&empty).unwrap().closed);

        let single = Architecture::new("S")
            .with_member("e1", local(&[(Generator::service("e2", "a", "m"), 1)]))
            .unwrap();
        assert_eq!(
            cfta_sum(&single, &Assignment::new()).unwrap().to_string(),
            "e2.a(m)@e1"
        );
        let verdict = check_cfta(&single).unwrap();
        assert!(!verdict.closed);
        assert_eq!(
            verdict.reports[0].report.residual.canonical.to_string(),
            "e2.a(m)@e1"
        );
    }

    #[test]
    fn duplicate_listings_merge() {
        let mut arch = Architecture::new("A");
        arch.add_member("e1".into(), local(&[(Generator::service("e2", "a", "m"), 1)]).into(), false)
            .unwrap();
        arch.add_member("e1".into(), local(&[(Generator::service("e3", "a", "m"), 1)]).into(), true)
            .unwrap();
        assert_eq!(arch.members().len(), 1);
        assert!(arch.members()[0].contained);
        assert_eq!(arch.members()[0].interface.unconditional.len(), 2);
    }

    #[test]
    fn global_member_rejected() {
        let mut arch = Architecture::new("A");
        let g = Interface::from_generator(Generator::service("e2", "a", "m").at("e1"));
        assert!(arch.add_member("e1".into(), g.into(), false).is_err());
    }

    #[test]
    fn diff_examples() {
        let a = two_entity();
        let d = diff(&a, &a).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.values().all(|delta| delta.is_zero()));

        let empty = Architecture::new("E");
        let d = diff(&empty, &a).unwrap();
        for m in a.members() {
            assert_eq!(d[&m.entity], m.interface);
        }
    }

    #[test]
    fn compliant_event() {
        let report = comply_events(&[event("e1", "e2", "m", Some(Reply::T))], &two_entity(), &Assignment::new())
            .unwrap();
        assert!(report.complies());
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn wrong_motive_is_unmatched() {
        let report = comply_events(&[event("e1", "e2", "n", Some(Reply::T))], &two_entity(), &Assignment::new())
            .unwrap();
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.kind, ViolationKind::UnmatchedOutgoing);
        assert_eq!(v.member.as_str(), "e1");
        assert_eq!(v.candidates, vec![Generator::service("e2", "a", "m")]);
        // the incoming side is only a warning for a declared component
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.warnings[0].kind, ViolationKind::UnmatchedIncoming);
    }

    #[test]
    fn contained_member_escalates_incoming() {
        let mut arch = Architecture::new("A");
        arch.add_member("e1".into(), local(&[(Generator::service("e2", "a", "m"), 1)]).into(), false)
            .unwrap();
        arch.add_member("e2".into(), Interface::zero(Scope::Local).into(), true)
            .unwrap();
        let report = comply_events(&[event("e1", "e2", "m", Some(Reply::T))], &arch, &Assignment::new())
            .unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::UnmatchedIncoming);
    }

    #[test]
    fn reply_constraints() {
        let table = [
            (Alpha::TF, Some(Reply::T), true),
            (Alpha::TF, None, false),
            (Alpha::T, Some(Reply::T), true),
            (Alpha::T, Some(Reply::F), false),
            (Alpha::F, Some(Reply::F), true),
            (Alpha::F, Some(Reply::T), false),
            (Alpha::Lambda, None, true),
            (Alpha::Lambda, Some(Reply::F), true),
        ];
        for (alpha, reply, ok) in table {
            assert_eq!(alpha_admits(alpha, reply), ok, "{alpha} {reply:?}");
        }
        let arch = Architecture::new("A")
            .with_member(
                "e1",
                local(&[(Generator::service("e2", "a", "m").with_alpha(Alpha::T), 1)]),
            )
            .unwrap();
        let report = comply_events(&[event("e1", "e2", "m", Some(Reply::F))], &arch, &Assignment::new())
            .unwrap();
        assert_eq!(report.violations[0].kind, ViolationKind::ReplyForbidden);
        assert_eq!(
            report.violations[0].candidates,
            vec![Generator::service("e2", "a", "m").with_alpha(Alpha::T)]
        );
    }

    #[test]
    fn negative_terms_grant_nothing() {
        let arch = Architecture::new("A")
            .with_member(
                "e1",
                local(&[
                    (Generator::service("e2", "a", "m"), 1),
                    (Generator::service("e3", "a", "m"), -1),
                ]),
            )
            .unwrap();
        let log = [event("e1", "e2", "m", Some(Reply::T)), event("e1", "e3", "m", Some(Reply::T))];
        let report = comply_events(&log, &arch, &Assignment::new()).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].event, 1);
    }

    #[test]
    fn event_outside_architecture() {
        assert!(matches!(
            comply_events(&[event("x", "y", "m", None)], &two_entity(), &Assignment::new()),
            Err(Error::EventOutsideArchitecture { index: 0, .. })
        ));
    }

    #[test]
    fn log_parsing() {
        let log = "source,destination,action,motive,reply\n\
                   e1,e2,a,m,T\n\
                   # comment\n\
                   e1, e2, a, m,\n";
        let events = parse_event_log(log).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].reply, Some(Reply::T));
        assert_eq!(events[1].reply, None);

        let err = parse_event_log("e1,e2,a,m,T\ne1,e2,a\n").unwrap_err();
        assert!(matches!(err, Error::EventLog { row: 2, .. }), "{err:?}");
        let err = parse_event_log("e1,e2,a,m,X\n").unwrap_err();
        assert!(matches!(err, Error::EventLog { row: 1, .. }));
    }
}

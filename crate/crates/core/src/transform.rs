//! Structural homomorphisms on interfaces and conditional interfaces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::algebra::{ActionId, EntityId, Generator, Interface, MotiveAtom, MotiveExpr, Scope};
use crate::error::{Error, Result};
use crate::reflection::{is_closed, ClosureReport};

/// Upper bound on distinct condition variables for exhaustive checking.
pub const MAX_CONDITION_VARIABLES: usize = 16;

/// Distributes composite motives: `f.a(v + w)@g = f.a(v)@g + f.a(w)@g`, `f.a(0)@g = 0`.
pub fn expand_motives(interface: &Interface) -> Result<Interface> {
    if interface.generators().all(|g| g.motive.is_atomic()) {
        return Ok(interface.clone());
    }
    interface.extend(interface.scope(), |g| {
        Interface::from_terms(
            interface.scope(),
            g.motive
                .atoms()
                .iter()
                .map(|atom| (g.clone().with_motive(MotiveExpr::atom(atom.clone())), 1)),
        )
    })
}

/// Expansion of entity `coarse` into the parallel composition of `parts`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementSpec {
    coarse: EntityId,
    parts: Vec<EntityId>,
}

impl RefinementSpec {
    /// A single part is accepted and acts as a renaming of `coarse`.
    pub fn new(coarse: EntityId, parts: Vec<EntityId>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidRefinement(format!(
                "{coarse} must be refined into at least one part"
            )));
        }
        let distinct: BTreeSet<&EntityId> = parts.iter().collect();
        if distinct.len() != parts.len() {
            return Err(Error::InvalidRefinement(format!(
                "parts of {coarse} are not pairwise distinct"
            )));
        }
        if distinct.contains(&coarse) {
            return Err(Error::InvalidRefinement(format!(
                "{coarse} cannot be one of its own parts"
            )));
        }
        Ok(RefinementSpec { coarse, parts })
    }

    pub fn coarse(&self) -> &EntityId {
        &self.coarse
    }

    pub fn parts(&self) -> &[EntityId] {
        &self.parts
    }

    fn expand<'a>(&'a self, entity: &'a EntityId) -> &'a [EntityId] {
        if *entity == self.coarse {
            &self.parts
        } else {
            std::slice::from_ref(entity)
        }
    }
}

impl fmt::Display for RefinementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> ", self.coarse)?;
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

/// Refines a global interface: every occurrence of the coarse entity, as
/// target or as host, is replaced by the sum over its parts.
pub fn refine(interface: &Interface, spec: &RefinementSpec) -> Result<Interface> {
    interface.require_scope(Scope::Global)?;
    if let Some(g) = interface.generators().find(|g| !g.motive.is_atomic()) {
        return Err(Error::CompositeMotive(g.to_string()));
    }
    interface.extend(Scope::Global, |g| {
        let host = g.host.as_ref().expect("global scope");
        let mut image = Interface::zero(Scope::Global);
        for target in spec.expand(&g.target) {
            for h in spec.expand(host) {
                let mut term = g.clone().at(h.clone());
                term.target = target.clone();
                image.accumulate(term, 1)?;
            }
        }
        Ok(image)
    })
}

/// Parts of the refinement that already occur in the interface as entities.
pub fn refinement_collisions(interface: &Interface, spec: &RefinementSpec) -> Vec<EntityId> {
    let used: BTreeSet<&EntityId> = interface
        .generators()
        .flat_map(|g| std::iter::once(&g.target).chain(g.host.as_ref()))
        .collect();
    spec.parts
        .iter()
        .filter(|p| used.contains(p))
        .cloned()
        .collect()
}

/// Sends the listed generators to 0.
pub fn annihilate(interface: &Interface, kill: &BTreeSet<Generator>) -> Interface {
    Interface::from_terms(
        interface.scope(),
        interface
            .terms()
            .filter(|(g, _)| !kill.contains(*g))
            .map(|(g, n)| (g.clone(), n)),
    )
    .expect("subset of a normal form")
}

/// Catalog renaming; names without an entry map to themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenameMap {
    pub entities: BTreeMap<EntityId, EntityId>,
    pub actions: BTreeMap<ActionId, ActionId>,
    pub motives: BTreeMap<MotiveAtom, MotiveAtom>,
}

impl RenameMap {
    pub fn is_identity(&self) -> bool {
        self.entities.iter().all(|(k, v)| k == v)
            && self.actions.iter().all(|(k, v)| k == v)
            && self.motives.iter().all(|(k, v)| k == v)
    }

    pub fn entity(&self, e: &EntityId) -> EntityId {
        self.entities.get(e).unwrap_or(e).clone()
    }

    pub fn action(&self, a: &ActionId) -> ActionId {
        self.actions.get(a).unwrap_or(a).clone()
    }

    pub fn motive(&self, m: &MotiveExpr) -> MotiveExpr {
        MotiveExpr::from_atoms(
            m.atoms()
                .iter()
                .map(|a| self.motives.get(a).unwrap_or(a).clone()),
        )
    }

    pub fn apply(&self, g: &Generator) -> Generator {
        Generator {
            polarity: g.polarity,
            target: self.entity(&g.target),
            action: self.action(&g.action),
            motive: self.motive(&g.motive),
            host: g.host.as_ref().map(|h| self.entity(h)),
            alpha: g.alpha,
        }
    }
}

pub fn rename(interface: &Interface, map: &RenameMap) -> Result<Interface> {
    interface.extend(interface.scope(), |g| {
        Ok(Interface::from_generator(map.apply(g)))
    })
}

/// A boolean condition variable or its negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConditionLiteral {
    pub variable: String,
    pub negated: bool,
}

impl ConditionLiteral {
    pub fn positive(variable: impl Into<String>) -> Self {
        ConditionLiteral {
            variable: variable.into(),
            negated: false,
        }
    }

    pub fn negative(variable: impl Into<String>) -> Self {
        ConditionLiteral {
            variable: variable.into(),
            negated: true,
        }
    }

    pub fn holds(&self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Display for ConditionLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!")?;
        }
        f.write_str(&self.variable)
    }
}

pub type Assignment = BTreeMap<String, bool>;

/// An interface with parts that are present only under a condition:
/// `unconditional + Σ (branch ◁ literal ▷ 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalInterface {
    pub unconditional: Interface,
    pub branches: BTreeMap<ConditionLiteral, Interface>,
}

impl From<Interface> for ConditionalInterface {
    fn from(unconditional: Interface) -> Self {
        ConditionalInterface {
            unconditional,
            branches: BTreeMap::new(),
        }
    }
}

impl ConditionalInterface {
    pub fn zero(scope: Scope) -> Self {
        Interface::zero(scope).into()
    }

    /// `interface ◁ literal ▷ 0`.
    pub fn guarded(literal: ConditionLiteral, interface: Interface) -> Self {
        let scope = interface.scope();
        let mut branches = BTreeMap::new();
        if !interface.is_zero() {
            branches.insert(literal, interface);
        }
        ConditionalInterface {
            unconditional: Interface::zero(scope),
            branches,
        }
    }

    pub fn scope(&self) -> Scope {
        self.unconditional.scope()
    }

    pub fn is_plain(&self) -> bool {
        self.branches.is_empty()
    }

    /// The interface when there are no conditional parts.
    pub fn as_plain(&self) -> Option<&Interface> {
        self.is_plain().then_some(&self.unconditional)
    }

    pub fn is_zero(&self) -> bool {
        self.unconditional.is_zero() && self.branches.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        self.branches.keys().map(|l| l.variable.as_str()).collect()
    }

    pub fn add(&self, other: &ConditionalInterface) -> Result<ConditionalInterface> {
        let mut out = ConditionalInterface {
            unconditional: self.unconditional.add(&other.unconditional)?,
            branches: self.branches.clone(),
        };
        for (literal, part) in &other.branches {
            let merged = match out.branches.get(literal) {
                Some(existing) => existing.add(part)?,
                None => part.clone(),
            };
            if merged.is_zero() {
                out.branches.remove(literal);
            } else {
                out.branches.insert(literal.clone(), merged);
            }
        }
        Ok(out)
    }

    pub fn negate(&self) -> Result<ConditionalInterface> {
        self.map(Interface::negate)
    }

    pub fn subtract(&self, other: &ConditionalInterface) -> Result<ConditionalInterface> {
        self.add(&other.negate()?)
    }

    pub fn scale(&self, n: i64) -> Result<ConditionalInterface> {
        self.map(|i| i.scale(n))
    }

    /// Applies a homomorphism to every part, dropping branches that become 0.
    pub fn map<F>(&self, mut f: F) -> Result<ConditionalInterface>
    where
        F: FnMut(&Interface) -> Result<Interface>,
    {
        let unconditional = f(&self.unconditional)?;
        let mut branches = BTreeMap::new();
        for (literal, part) in &self.branches {
            let image = f(part)?;
            if image.scope() != unconditional.scope() {
                return Err(Error::ScopeMismatch {
                    left: unconditional.scope(),
                    right: image.scope(),
                });
            }
            if !image.is_zero() {
                branches.insert(literal.clone(), image);
            }
        }
        Ok(ConditionalInterface {
            unconditional,
            branches,
        })
    }

    /// Unconditional part plus every branch whose literal holds.
    pub fn eval(&self, assignment: &Assignment) -> Result<Interface> {
        let mut out = self.unconditional.clone();
        for (literal, part) in &self.branches {
            let value = assignment
                .get(&literal.variable)
                .ok_or_else(|| Error::MissingVariable(literal.variable.clone()))?;
            if literal.holds(*value) {
                out = out.add(part)?;
            }
        }
        Ok(out)
    }

    /// Every total assignment of the variables, in binary counting order.
    pub fn assignments(&self) -> Result<Vec<Assignment>> {
        let vars = self.variables();
        if vars.len() > MAX_CONDITION_VARIABLES {
            return Err(Error::TooManyConditions {
                count: vars.len(),
                limit: MAX_CONDITION_VARIABLES,
            });
        }
        let vars: Vec<&str> = vars.into_iter().collect();
        Ok((0..1u32 << vars.len())
            .map(|bits| {
                vars.iter()
                    .enumerate()
                    .map(|(i, v)| (v.to_string(), bits >> i & 1 == 1))
                    .collect()
            })
            .collect())
    }
}

impl fmt::Display for ConditionalInterface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.branches.is_empty() || !self.unconditional.is_zero() {
            write!(f, "{}", self.unconditional)?;
            if !self.branches.is_empty() {
                f.write_str(" + ")?;
            }
        }
        for (i, (literal, part)) in self.branches.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({part}) <| {literal} |> 0")?;
        }
        Ok(())
    }
}

pub fn eval_conditional(c: &ConditionalInterface, assignment: &Assignment) -> Result<Interface> {
    c.eval(assignment)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentReport {
    pub assignment: Assignment,
    pub report: ClosureReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalClosure {
    pub closed: bool,
    pub reports: Vec<AssignmentReport>,
}

/// Closedness under every assignment of the condition variables.
pub fn closed_under_all_assignments(c: &ConditionalInterface) -> Result<ConditionalClosure> {
    let mut reports = Vec::new();
    for assignment in c.assignments()? {
        let report = is_closed(&c.eval(&assignment)?)?;
        reports.push(AssignmentReport { assignment, report });
    }
    Ok(ConditionalClosure {
        closed: reports.iter().all(|r| r.report.closed),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locglob::globalize;

    fn global(terms: &[(Generator, i64)]) -> Interface {
        Interface::from_terms(Scope::Global, terms.iter().cloned()).unwrap()
    }

    fn split(coarse: &str, parts: &[&str]) -> RefinementSpec {
        RefinementSpec::new(coarse.into(), parts.iter().map(|&p| p.into()).collect()).unwrap()
    }

    #[test]
    fn motive_distribution() {
        let vw = Generator::service("f", "a", "v")
            .at("g")
            .with_motive(MotiveExpr::from_atoms(["v", "w"]));
        let out = expand_motives(&global(&[(vw, 1)])).unwrap();
        assert_eq!(out.to_string(), "f.a(v)@g + f.a(w)@g");

        let zero = Generator::service("f", "a", "v").at("g").with_motive(MotiveExpr::zero());
        assert!(expand_motives(&global(&[(zero.clone(), 3)])).unwrap().is_zero());
        let zero_client = Generator { polarity: crate::algebra::Polarity::Client, ..zero };
        assert!(expand_motives(&global(&[(zero_client, 1)])).unwrap().is_zero());
    }

    #[test]
    fn motive_distribution_keeps_multiplicity() {
        let g = Generator::service("OEEins", "et", "x")
            .with_motive(MotiveExpr::from_atoms(["fp:fsla", "fp:dsla"]));
        let i = Interface::from_terms(Scope::Local, [(g, 2)]).unwrap();
        assert_eq!(
            expand_motives(&i).unwrap().to_string(),
            "2 x OEEins.et(fp:dsla) + 2 x OEEins.et(fp:fsla)"
        );
    }

    #[test]
    fn refine_self_transfer_yields_all_pairs() {
        let i = global(&[(Generator::service("f", "a", "m").at("f"), 1)]);
        let out = refine(&i, &split("f", &["f1", "f2"])).unwrap();
        assert_eq!(
            out.to_string(),
            "f1.a(m)@f1 + f2.a(m)@f1 + f1.a(m)@f2 + f2.a(m)@f2"
        );
    }

    #[test]
    fn refine_host_branch() {
        let i = global(&[(Generator::service("g", "a", "m").at("f"), 1)]);
        let out = refine(&i, &split("f", &["f1", "f2"])).unwrap();
        assert_eq!(out.to_string(), "g.a(m)@f1 + g.a(m)@f2");
    }

    #[test]
    fn refine_target_branch() {
        let i = global(&[(Generator::client("f", "a", "m").at("h"), 2)]);
        let out = refine(&i, &split("f", &["f1", "f2"])).unwrap();
        assert_eq!(out.to_string(), "2 x ~f1.a(m)@h + 2 x ~f2.a(m)@h");
    }

    #[test]
    fn refine_unrelated_is_identity() {
        let i = global(&[(Generator::service("g", "a", "m").at("h"), 1)]);
        assert_eq!(refine(&i, &split("f", &["f1", "f2"])).unwrap(), i);
    }

    #[test]
    fn refine_requires_atomic_motives() {
        let g = Generator::service("g", "a", "m")
            .at("f")
            .with_motive(MotiveExpr::from_atoms(["m", "n"]));
        assert!(matches!(
            refine(&global(&[(g, 1)]), &split("f", &["f1", "f2"])),
            Err(Error::CompositeMotive(_))
        ));
        let local = Interface::from_generator(Generator::service("g", "a", "m"));
        assert!(refine(&local, &split("f", &["f1", "f2"])).is_err());
    }

    #[test]
    fn refinement_spec_validation() {
        assert!(RefinementSpec::new("f".into(), vec![]).is_err());
        assert!(RefinementSpec::new("f".into(), vec!["a".into(), "a".into()]).is_err());
        assert!(RefinementSpec::new("f".into(), vec!["f".into(), "a".into()]).is_err());
        assert_eq!(split("f", &["f1", "f2"]).to_string(), "f -> f1 || f2");
    }

    #[test]
    fn collisions_are_reported() {
        let i = global(&[(Generator::service("f1", "a", "m").at("f"), 1)]);
        assert_eq!(
            refinement_collisions(&i, &split("f", &["f1", "f2"])),
            vec![EntityId::new("f1")]
        );
    }

    #[test]
    fn annihilate_after_refine() {
        let i = global(&[(Generator::service("f", "a", "m").at("f"), 1)]);
        let refined = refine(&i, &split("f", &["f1", "f2"])).unwrap();
        let kill: BTreeSet<Generator> = [
            Generator::service("f1", "a", "m").at("f1"),
            Generator::service("f2", "a", "m").at("f2"),
        ]
        .into();
        assert_eq!(
            annihilate(&refined, &kill).to_string(),
            "f2.a(m)@f1 + f1.a(m)@f2"
        );
        assert_eq!(annihilate(&refined, &BTreeSet::new()), refined);
    }

    #[test]
    fn rename_merges_motives() {
        let i = global(&[
            (Generator::service("f", "a", "m1").at("g"), 1),
            (Generator::service("f", "a", "m2").at("g"), 1),
        ]);
        let mut map = RenameMap::default();
        map.motives.insert("m1".into(), "m".into());
        map.motives.insert("m2".into(), "m".into());
        assert_eq!(rename(&i, &map).unwrap().to_string(), "2 x f.a(m)@g");
        assert_eq!(rename(&i, &RenameMap::default()).unwrap(), i);
    }

    #[test]
    fn conditional_evaluation() {
        let fag = global(&[(Generator::service("f", "a", "m").at("g"), 1)]);
        let c = ConditionalInterface::guarded(ConditionLiteral::positive("c"), fag.clone());
        let on: Assignment = [("c".to_string(), true)].into();
        let off: Assignment = [("c".to_string(), false)].into();
        assert_eq!(c.eval(&on).unwrap(), fag);
        assert!(c.eval(&off).unwrap().is_zero());

        let not_c = ConditionalInterface::guarded(ConditionLiteral::negative("c"), fag.clone());
        assert!(not_c.eval(&on).unwrap().is_zero());
        assert_eq!(not_c.eval(&off).unwrap(), fag);

        assert_eq!(
            c.eval(&Assignment::new()),
            Err(Error::MissingVariable("c".into()))
        );
    }

    #[test]
    fn conditional_pair_is_closed_for_both_values() {
        let at_g = ConditionalInterface::guarded(
            ConditionLiteral::positive("c"),
            Interface::from_generator(Generator::service("f", "a", "m")),
        );
        let at_f = ConditionalInterface::guarded(
            ConditionLiteral::positive("c"),
            Interface::from_generator(Generator::client("g", "a", "m")),
        );
        let sum = at_g
            .map(|i| globalize(&"g".into(), i))
            .unwrap()
            .add(&at_f.map(|i| globalize(&"f".into(), i)).unwrap())
            .unwrap();
        let verdict = closed_under_all_assignments(&sum).unwrap();
        assert!(verdict.closed);
        assert_eq!(verdict.reports.len(), 2);
    }

    #[test]
    fn mismatched_conditions_are_not_closed() {
        let at_g = ConditionalInterface::guarded(
            ConditionLiteral::positive("c"),
            global(&[(Generator::service("f", "a", "m").at("g"), 1)]),
        );
        let at_f = ConditionalInterface::guarded(
            ConditionLiteral::positive("d"),
            global(&[(Generator::client("g", "a", "m").at("f"), 1)]),
        );
        let verdict = closed_under_all_assignments(&at_g.add(&at_f).unwrap()).unwrap();
        assert!(!verdict.closed);
        let bad: Assignment = [("c".to_string(), true), ("d".to_string(), false)].into();
        let r = verdict.reports.iter().find(|r| r.assignment == bad).unwrap();
        assert!(!r.report.closed);
    }

    #[test]
    fn too_many_conditions() {
        let mut c = ConditionalInterface::zero(Scope::Global);
        for i in 0..=MAX_CONDITION_VARIABLES {
            let g = Generator::service(format!("e{i}").as_str(), "a", "m").at("h");
            c = c
                .add(&ConditionalInterface::guarded(
                    ConditionLiteral::positive(format!("c{i}")),
                    Interface::from_generator(g),
                ))
                .unwrap();
        }
        assert!(matches!(
            closed_under_all_assignments(&c),
            Err(Error::TooManyConditions { count: 17, limit: 16 })
        ));
    }

    #[test]
    fn plain_conditional_reduces_to_is_closed() {
        let i = global(&[(Generator::service("f", "a", "m").at("g"), 1)]);
        let verdict = closed_under_all_assignments(&i.clone().into()).unwrap();
        assert_eq!(verdict.reports.len(), 1);
        assert_eq!(verdict.reports[0].report, is_closed(&i).unwrap());
    }

    #[test]
    fn conditional_rendering() {
        let fag = Interface::from_generator(Generator::service("f", "a", "m"));
        let c = ConditionalInterface::guarded(ConditionLiteral::negative("c"), fag.clone());
        assert_eq!(c.to_string(), "(f.a(m)) <| !c |> 0");
        let with_base = ConditionalInterface::from(fag.clone()).add(&c).unwrap();
        assert_eq!(with_base.to_string(), "f.a(m) + (f.a(m)) <| !c |> 0");
    }
}

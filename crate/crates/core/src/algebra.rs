//! Interface elements and the free commutative interface group.
//!
//! An [`Interface`] is a finitely supported map from [`Generator`]s to
//! nonzero integer coefficients. Every interface carries a [`Scope`]: local
//! interfaces leave the hosting entity implicit, global ones name it with
//! `@host`. The two never mix.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

macro_rules! ident_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                let name = name.into();
                debug_assert!(!name.is_empty(), "empty identifier");
                $name(name)
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name::new(s)
            }
        }
    };
}

ident_type!(
    /// Name of an entity. Names may contain `:`; hierarchy is never derived from them.
    EntityId
);
ident_type!(
    /// Name of a transfer action (mode), e.g. `it` or `cash`.
    ActionId
);
ident_type!(
    /// An atomic motive such as `hmt:csla`.
    MotiveAtom
);

/// A motive as a multiset of atoms. The empty multiset is the zero motive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MotiveExpr {
    atoms: Vec<MotiveAtom>,
}

impl MotiveExpr {
    pub fn zero() -> Self {
        MotiveExpr { atoms: Vec::new() }
    }

    pub fn atom(atom: impl Into<MotiveAtom>) -> Self {
        MotiveExpr {
            atoms: vec![atom.into()],
        }
    }

    pub fn from_atoms<I, A>(atoms: I) -> Self
    where
        I: IntoIterator<Item = A>,
        A: Into<MotiveAtom>,
    {
        let mut atoms: Vec<MotiveAtom> = atoms.into_iter().map(Into::into).collect();
        atoms.sort();
        MotiveExpr { atoms }
    }

    /// Multiset union.
    pub fn compose(&self, other: &MotiveExpr) -> MotiveExpr {
        MotiveExpr::from_atoms(self.atoms.iter().chain(&other.atoms).cloned())
    }

    pub fn atoms(&self) -> &[MotiveAtom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.atoms.len() == 1
    }
}

impl fmt::Display for MotiveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("0");
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

/// Reply constraint attached to an interface element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Alpha {
    /// Either reply; the default, omitted when rendering.
    #[default]
    TF,
    /// The request must be accepted.
    T,
    /// The request is always refused.
    F,
    /// No information about the reply.
    Lambda,
}

impl Alpha {
    pub fn as_str(self) -> &'static str {
        match self {
            Alpha::TF => "TF",
            Alpha::T => "T",
            Alpha::F => "F",
            Alpha::Lambda => "λ",
        }
    }

    pub fn parse(s: &str) -> Option<Alpha> {
        match s {
            "TF" => Some(Alpha::TF),
            "T" => Some(Alpha::T),
            "F" => Some(Alpha::F),
            "λ" | "lambda" => Some(Alpha::Lambda),
            _ => None,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    /// Outgoing transfer element `f.a(m)`.
    Service,
    /// Incoming transfer element `~f.a(m)`.
    Client,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Service => Polarity::Client,
            Polarity::Client => Polarity::Service,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Service => "service",
            Polarity::Client => "client",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Local,
    Global,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Local => "local",
            Scope::Global => "global",
        })
    }
}

/// One interface element `[~]target.action(motive)[@host][/alpha]`.
///
/// A service element `f.a(m)@g` is the permission of `g` to issue transfer
/// `a(m)` towards `f`; the client element `~f.a(m)@g` is the permission of
/// `g` to receive `a(m)` from `f`. Without a host the element is local.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub polarity: Polarity,
    pub target: EntityId,
    pub action: ActionId,
    pub motive: MotiveExpr,
    pub host: Option<EntityId>,
    pub alpha: Alpha,
}

impl Generator {
    pub fn new(
        polarity: Polarity,
        target: impl Into<EntityId>,
        action: impl Into<ActionId>,
        motive: MotiveExpr,
    ) -> Self {
        Generator {
            polarity,
            target: target.into(),
            action: action.into(),
            motive,
            host: None,
            alpha: Alpha::TF,
        }
    }

    /// Local service element with an atomic motive.
    pub fn service(
        target: impl Into<EntityId>,
        action: impl Into<ActionId>,
        motive: impl Into<MotiveAtom>,
    ) -> Self {
        Generator::new(Polarity::Service, target, action, MotiveExpr::atom(motive))
    }

    /// Local client element with an atomic motive.
    pub fn client(
        target: impl Into<EntityId>,
        action: impl Into<ActionId>,
        motive: impl Into<MotiveAtom>,
    ) -> Self {
        Generator::new(Polarity::Client, target, action, MotiveExpr::atom(motive))
    }

    pub fn at(mut self, host: impl Into<EntityId>) -> Self {
        self.host = Some(host.into());
        self
    }

    pub fn local(mut self) -> Self {
        self.host = None;
        self
    }

    pub fn with_alpha(mut self, alpha: Alpha) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_motive(mut self, motive: MotiveExpr) -> Self {
        self.motive = motive;
        self
    }

    pub fn scope(&self) -> Scope {
        if self.host.is_some() {
            Scope::Global
        } else {
            Scope::Local
        }
    }

    /// `f.a(m)@f` or `~f.a(m)@f`.
    pub fn is_self_loop(&self) -> bool {
        self.host.as_ref() == Some(&self.target)
    }

    fn sort_key(&self) -> (&Option<EntityId>, Polarity, &EntityId, &ActionId, &MotiveExpr, Alpha) {
        (
            &self.host,
            self.polarity,
            &self.target,
            &self.action,
            &self.motive,
            self.alpha,
        )
    }
}

impl Ord for Generator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Generator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.polarity == Polarity::Client {
            f.write_str("~")?;
        }
        write!(f, "{}.{}({})", self.target, self.action, self.motive)?;
        if let Some(host) = &self.host {
            write!(f, "@{host}")?;
        }
        if self.alpha != Alpha::TF {
            write!(f, "/{}", self.alpha)?;
        }
        Ok(())
    }
}

/// Element of the free commutative interface group, in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interface {
    scope: Scope,
    terms: BTreeMap<Generator, i64>,
}

impl Interface {
    pub fn zero(scope: Scope) -> Self {
        Interface {
            scope,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_generator(generator: Generator) -> Self {
        let scope = generator.scope();
        let mut terms = BTreeMap::new();
        terms.insert(generator, 1);
        Interface { scope, terms }
    }

    pub fn from_terms<I>(scope: Scope, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Generator, i64)>,
    {
        let mut out = Interface::zero(scope);
        for (generator, n) in terms {
            out.accumulate(generator, n)?;
        }
        Ok(out)
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct generators with nonzero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Generator, i64)> + '_ {
        self.terms.iter().map(|(g, &n)| (g, n))
    }

    pub fn generators(&self) -> impl Iterator<Item = &Generator> + '_ {
        self.terms.keys()
    }

    pub fn coefficient(&self, generator: &Generator) -> i64 {
        self.terms.get(generator).copied().unwrap_or(0)
    }

    /// Adds `n` copies of `generator` in place, keeping the normal form.
    pub fn accumulate(&mut self, generator: Generator, n: i64) -> Result<()> {
        if generator.scope() != self.scope {
            return Err(Error::ElementScope {
                element: generator.to_string(),
                scope: self.scope,
            });
        }
        if n == 0 {
            return Ok(());
        }
        match self.terms.get_mut(&generator) {
            Some(c) => {
                *c = c.checked_add(n).ok_or(Error::Overflow)?;
                if *c == 0 {
                    self.terms.remove(&generator);
                }
            }
            None => {
                self.terms.insert(generator, n);
            }
        }
        Ok(())
    }

    fn same_scope(&self, other: &Interface) -> Result<()> {
        if self.scope != other.scope {
            return Err(Error::ScopeMismatch {
                left: self.scope,
                right: other.scope,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Interface) -> Result<Interface> {
        self.same_scope(other)?;
        let mut out = self.clone();
        for (g, n) in other.terms() {
            out.accumulate(g.clone(), n)?;
        }
        Ok(out)
    }

    pub fn negate(&self) -> Result<Interface> {
        self.scale(-1)
    }

    /// `self - other`, i.e. `self + (-other)`.
    pub fn subtract(&self, other: &Interface) -> Result<Interface> {
        self.same_scope(other)?;
        self.add(&other.negate()?)
    }

    pub fn scale(&self, n: i64) -> Result<Interface> {
        if n == 0 {
            return Ok(Interface::zero(self.scope));
        }
        let terms = self
            .terms
            .iter()
            .map(|(g, &c)| c.checked_mul(n).map(|c| (g.clone(), c)).ok_or(Error::Overflow))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Interface {
            scope: self.scope,
            terms,
        })
    }

    /// Partial order: `self <= other` iff `other - self` has no negative coefficient.
    pub fn leq(&self, other: &Interface) -> Result<bool> {
        Ok(other.subtract(self)?.is_nonnegative())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|&n| n > 0)
    }

    /// Member of the interface monoid: nonnegative and only `/TF` elements.
    pub fn is_monoid_element(&self) -> bool {
        self.terms.iter().all(|(g, &n)| n > 0 && g.alpha == Alpha::TF)
    }

    pub fn positive_part(&self) -> Interface {
        Interface {
            scope: self.scope,
            terms: self
                .terms
                .iter()
                .filter(|(_, &n)| n > 0)
                .map(|(g, &n)| (g.clone(), n))
                .collect(),
        }
    }

    /// Homomorphic extension of a map on generators into `scope`.
    pub fn extend<F>(&self, scope: Scope, mut image: F) -> Result<Interface>
    where
        F: FnMut(&Generator) -> Result<Interface>,
    {
        let mut out = Interface::zero(scope);
        for (g, n) in self.terms() {
            let part = image(g)?;
            if part.scope != scope {
                return Err(Error::WrongScope {
                    expected: scope,
                    found: part.scope,
                });
            }
            for (h, m) in part.terms() {
                out.accumulate(h.clone(), m.checked_mul(n).ok_or(Error::Overflow)?)?;
            }
        }
        Ok(out)
    }

    pub fn require_scope(&self, expected: Scope) -> Result<()> {
        if self.scope != expected {
            return Err(Error::WrongScope {
                expected,
                found: self.scope,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (g, &n)) in self.terms.iter().enumerate() {
            match (i, n < 0) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            let magnitude = n.unsigned_abs();
            if magnitude != 1 {
                write!(f, "{magnitude} x ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fag() -> Generator {
        Generator::service("f", "a", "m").at("g")
    }

    fn x() -> Interface {
        Interface::from_generator(Generator::service("e", "a", "m").at("f"))
    }

    fn y() -> Interface {
        Interface::from_generator(Generator::client("f", "b", "n").at("e"))
    }

    #[test]
    fn inverse_cancels() {
        let p = Interface::from_generator(fag());
        assert!(p.add(&p.negate().unwrap()).unwrap().is_zero());
    }

    #[test]
    fn no_cancellation_in_free_group() {
        let i = Interface::from_generator(Generator::service("e2", "a", "m").at("e1"));
        let j = Interface::from_generator(Generator::client("e1", "a", "m").at("e2"));
        assert_eq!(i.add(&j).unwrap().len(), 2);
    }

    #[test]
    fn coefficients_add() {
        let sum = x().scale(2).unwrap().add(&x().scale(3).unwrap()).unwrap();
        assert_eq!(sum, x().scale(5).unwrap());
    }

    #[test]
    fn negation_examples() {
        let zero = Interface::zero(Scope::Global);
        assert_eq!(zero.negate().unwrap(), zero);
        let p = Interface::from_generator(fag());
        assert_eq!(p.negate().unwrap().coefficient(&fag()), -1);
        let i = x().scale(2).unwrap().subtract(&y()).unwrap();
        let expected = y().subtract(&x().scale(2).unwrap()).unwrap();
        assert_eq!(i.negate().unwrap(), expected);
    }

    #[test]
    fn subtraction_examples() {
        assert!(x().subtract(&x()).unwrap().is_zero());
        assert_eq!(x().add(&y()).unwrap().subtract(&y()).unwrap(), x());
    }

    #[test]
    fn scale_examples() {
        assert!(x().scale(0).unwrap().is_zero());
        assert_eq!(x().scale(-1).unwrap(), x().negate().unwrap());
        let g = Generator::service("OEEins", "et", "fp:fsla");
        let two = Interface::from_generator(g.clone()).scale(2).unwrap();
        assert_eq!(two.coefficient(&g), 2);
        assert_eq!(two.to_string(), "2 x OEEins.et(fp:fsla)");
    }

    #[test]
    fn scale_overflow_is_an_error() {
        assert_eq!(x().scale(i64::MAX).unwrap().scale(2), Err(Error::Overflow));
        let min = Interface::from_terms(Scope::Global, [(fag(), i64::MIN)]).unwrap();
        assert_eq!(min.negate(), Err(Error::Overflow));
    }

    #[test]
    fn scope_mismatch() {
        let local = Interface::from_generator(Generator::service("f", "a", "m"));
        assert!(matches!(x().add(&local), Err(Error::ScopeMismatch { .. })));
        assert!(matches!(x().leq(&local), Err(Error::ScopeMismatch { .. })));
        let mut acc = Interface::zero(Scope::Local);
        assert!(matches!(
            acc.accumulate(fag(), 1),
            Err(Error::ElementScope { .. })
        ));
    }

    #[test]
    fn leq_examples() {
        let zero = Interface::zero(Scope::Global);
        let p = Interface::from_generator(fag());
        let q = Interface::from_generator(Generator::service("h", "b", "m").at("g"));
        assert!(zero.leq(&p).unwrap());
        assert!(p.leq(&p.add(&q).unwrap()).unwrap());
        assert!(!zero.leq(&p.negate().unwrap()).unwrap());
    }

    #[test]
    fn coefficient_lookup() {
        let i = x().scale(2).unwrap().subtract(&y()).unwrap();
        let gx = x().generators().next().unwrap().clone();
        let gy = y().generators().next().unwrap().clone();
        assert_eq!(i.coefficient(&gx), 2);
        assert_eq!(i.coefficient(&gy), -1);
        assert_eq!(Interface::zero(Scope::Global).coefficient(&gx), 0);
    }

    #[test]
    fn render_examples() {
        assert_eq!(Interface::zero(Scope::Local).to_string(), "0");
        let i = Interface::from_terms(Scope::Global, [(fag(), -2)]).unwrap();
        assert_eq!(i.to_string(), "-2 x f.a(m)@g");
        let pair = Interface::from_terms(
            Scope::Global,
            [
                (Generator::client("e1", "a", "m").at("e2"), 1),
                (Generator::service("e2", "a", "m").at("e1"), 1),
            ],
        )
        .unwrap();
        // host sorts first
        assert_eq!(pair.to_string(), "e2.a(m)@e1 + ~e1.a(m)@e2");
        let alpha = Interface::from_generator(fag().with_alpha(Alpha::F));
        assert_eq!(alpha.to_string(), "f.a(m)@g/F");
        let composite = Interface::from_generator(
            Generator::service("f", "a", "m")
                .with_motive(MotiveExpr::from_atoms(["w", "v"])),
        );
        assert_eq!(composite.to_string(), "f.a(v + w)");
    }

    #[test]
    fn monoid_membership() {
        assert!(x().is_monoid_element());
        assert!(!x().negate().unwrap().is_monoid_element());
        let t = Interface::from_generator(fag().with_alpha(Alpha::T));
        assert!(!t.is_monoid_element());
    }

    #[test]
    fn generator_order_puts_absent_host_first() {
        let local = Generator::service("z", "a", "m");
        let global = Generator::service("a", "a", "m").at("a");
        assert!(local < global);
        let service = Generator::service("z", "a", "m").at("h");
        let client = Generator::client("a", "a", "m").at("h");
        assert!(service < client);
    }
}

//! Random interfaces and architectures over small catalogs.

use fti_core::architecture::Architecture;
use fti_core::{Alpha, EntityId, Generator, Interface, MotiveExpr, Polarity, Scope};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct Catalog {
    pub entities: Vec<&'static str>,
    pub actions: Vec<&'static str>,
    pub motives: Vec<&'static str>,
}

impl Catalog {
    /// Four entities, two actions, three motives.
    pub fn small() -> Self {
        Catalog {
            entities: vec!["e", "f", "g", "h"],
            actions: vec!["a", "b"],
            motives: vec!["m", "n", "k"],
        }
    }

    /// Two entities, one action, one motive.
    pub fn tiny() -> Self {
        Catalog {
            entities: vec!["e", "f"],
            actions: vec!["a"],
            motives: vec!["m"],
        }
    }

    /// Every atomic generator of the given scope with reply constraint `TF`.
    pub fn all_generators(&self, scope: Scope) -> Vec<Generator> {
        let hosts: Vec<Option<&str>> = match scope {
            Scope::Local => vec![None],
            Scope::Global => self.entities.iter().map(|e| Some(*e)).collect(),
        };
        let mut out = Vec::new();
        for host in hosts {
            for polarity in [Polarity::Service, Polarity::Client] {
                for t in &self.entities {
                    for a in &self.actions {
                        for m in &self.motives {
                            let mut g = Generator::new(polarity, *t, *a, MotiveExpr::atom(*m));
                            g.host = host.map(EntityId::new);
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub scope: Scope,
    pub max_terms: usize,
    pub max_coefficient: i64,
    pub allow_negative: bool,
    /// Chance that a generator gets a composite motive.
    pub composite: f64,
    /// Chance that a generator gets a reply constraint other than `TF`.
    pub constrained: f64,
}

impl Shape {
    pub fn atomic(scope: Scope) -> Self {
        Shape {
            scope,
            max_terms: 5,
            max_coefficient: 3,
            allow_negative: true,
            composite: 0.0,
            constrained: 0.0,
        }
    }
}

pub fn pick<'a, T, R: Rng>(rng: &mut R, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty choice")
}

pub fn motive<R: Rng>(rng: &mut R, catalog: &Catalog, composite: f64) -> MotiveExpr {
    if rng.gen_bool(composite) {
        let n = rng.gen_range(0..=3);
        MotiveExpr::from_atoms((0..n).map(|_| *pick(rng, &catalog.motives)))
    } else {
        MotiveExpr::atom(*pick(rng, &catalog.motives))
    }
}

pub fn alpha<R: Rng>(rng: &mut R) -> Alpha {
    *pick(rng, &[Alpha::TF, Alpha::T, Alpha::F, Alpha::Lambda])
}

pub fn generator<R: Rng>(rng: &mut R, catalog: &Catalog, shape: &Shape) -> Generator {
    let polarity = if rng.gen_bool(0.5) { Polarity::Service } else { Polarity::Client };
    let mut g = Generator::new(
        polarity,
        *pick(rng, &catalog.entities),
        *pick(rng, &catalog.actions),
        motive(rng, catalog, shape.composite),
    );
    if shape.scope == Scope::Global {
        g.host = Some(EntityId::new(*pick(rng, &catalog.entities)));
    }
    if rng.gen_bool(shape.constrained) {
        g.alpha = alpha(rng);
    }
    g
}

pub fn coefficient<R: Rng>(rng: &mut R, shape: &Shape) -> i64 {
    let n = rng.gen_range(1..=shape.max_coefficient);
    if shape.allow_negative && rng.gen_bool(0.5) {
        -n
    } else {
        n
    }
}

pub fn interface<R: Rng>(rng: &mut R, catalog: &Catalog, shape: &Shape) -> Interface {
    let n = rng.gen_range(0..=shape.max_terms);
    let terms: Vec<(Generator, i64)> = (0..n)
        .map(|_| (generator(rng, catalog, shape), coefficient(rng, shape)))
        .collect();
    Interface::from_terms(shape.scope, terms).expect("small coefficients")
}

/// A random architecture whose globalized sum is closed. Every transfer is
/// declared at both ends with matching multiplicity, and composite motives
/// may be split differently on the two sides. Self-transfers are avoided.
pub fn closed_architecture<R: Rng>(rng: &mut R, catalog: &Catalog, name: &str) -> Architecture {
    let mut members: Vec<(EntityId, Interface)> = catalog
        .entities
        .iter()
        .map(|e| (EntityId::new(*e), Interface::zero(Scope::Local)))
        .collect();
    let pairs = rng.gen_range(1..=4);
    for _ in 0..pairs {
        let sender = rng.gen_range(0..members.len());
        let mut receiver = rng.gen_range(0..members.len() - 1);
        if receiver >= sender {
            receiver += 1;
        }
        let action = *pick(rng, &catalog.actions);
        let motive = motive(rng, catalog, 0.5);
        let n = rng.gen_range(1..=2) * if rng.gen_bool(0.2) { -1 } else { 1 };
        let out = Generator::new(Polarity::Service, members[receiver].0.clone(), action, motive.clone());
        members[sender].1.accumulate(out, n).expect("small");
        let back = if rng.gen_bool(0.5) {
            vec![motive]
        } else {
            motive.atoms().iter().map(|m| MotiveExpr::atom(m.clone())).collect()
        };
        for m in back {
            let inc = Generator::new(Polarity::Client, members[sender].0.clone(), action, m);
            members[receiver].1.accumulate(inc, n).expect("small");
        }
    }
    members.shuffle(rng);
    let mut arch = Architecture::new(name);
    for (e, i) in members {
        if !i.is_zero() {
            arch.add_member(e, i.into(), false).expect("distinct local members");
        }
    }
    arch
}

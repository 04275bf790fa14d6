use std::collections::BTreeSet;

use fti_core::architecture::check_cfta;
use fti_core::architecture::cfta_sum;
use fti_core::reflection::is_closed;
use fti_core::transform::{annihilate, expand_motives, refine, rename, RefinementSpec, RenameMap};
use fti_core::{EntityId, Generator, Interface, MotiveExpr, Polarity, Scope};
use fti_testkit::gen::{self, Catalog, Shape};
use proptest::prelude::*;

fn global(terms: &[(Generator, i64)]) -> Interface {
    Interface::from_terms(Scope::Global, terms.iter().cloned()).unwrap()
}

fn g(target: &str, host: &str) -> Generator {
    Generator::service(target, "a", "m").at(host)
}

fn spec(coarse: &str, parts: &[&str]) -> RefinementSpec {
    RefinementSpec::new(coarse.into(), parts.iter().map(|p| EntityId::new(*p)).collect()).unwrap()
}

fn element(seed: u64, composite: f64) -> Interface {
    let shape = Shape {
        composite,
        constrained: 0.2,
        ..Shape::atomic(Scope::Global)
    };
    gen::interface(&mut fti_testkit::rng(seed), &Catalog::small(), &shape)
}

#[test]
fn motive_expansion_golden() {
    let composite = Generator::new(Polarity::Service, "f", "a", MotiveExpr::from_atoms(["v", "w"])).at("g");
    assert_eq!(
        expand_motives(&Interface::from_generator(composite)).unwrap().to_string(),
        "f.a(v)@g + f.a(w)@g"
    );
    let empty = Generator::new(Polarity::Client, "f", "a", MotiveExpr::zero()).at("g");
    assert!(expand_motives(&Interface::from_generator(empty)).unwrap().is_zero());
    let twice = Generator::new(Polarity::Service, "OEEins", "et", MotiveExpr::from_atoms(["fp:fsla", "fp:dsla"]));
    let x = Interface::from_terms(Scope::Local, [(twice, 2)]).unwrap();
    assert_eq!(
        expand_motives(&x).unwrap().to_string(),
        "2 x OEEins.et(fp:dsla) + 2 x OEEins.et(fp:fsla)"
    );
}

#[test]
fn refine_golden() {
    let s = spec("f", &["f1", "f2"]);
    assert_eq!(
        refine(&global(&[(g("f", "f"), 1)]), &s).unwrap().to_string(),
        "f1.a(m)@f1 + f2.a(m)@f1 + f1.a(m)@f2 + f2.a(m)@f2"
    );
    assert_eq!(refine(&global(&[(g("g", "f"), 1)]), &s).unwrap().to_string(), "g.a(m)@f1 + g.a(m)@f2");
    assert_eq!(refine(&global(&[(g("f", "h"), 1)]), &s).unwrap().to_string(), "f1.a(m)@h + f2.a(m)@h");
    assert_eq!(refine(&global(&[(g("g", "h"), 3)]), &s).unwrap().to_string(), "3 x g.a(m)@h");
}

#[test]
fn annihilation_after_refinement() {
    let refined = refine(&global(&[(g("f", "f"), 1)]), &spec("f", &["f1", "f2"])).unwrap();
    let kill: BTreeSet<Generator> = [g("f1", "f1"), g("f2", "f2")].into_iter().collect();
    assert_eq!(annihilate(&refined, &kill).to_string(), "f2.a(m)@f1 + f1.a(m)@f2");
    assert_eq!(annihilate(&refined, &BTreeSet::new()), refined);
}

#[test]
fn rename_merges_motives() {
    let x = global(&[
        (Generator::service("f", "a", "m1").at("g"), 1),
        (Generator::service("f", "a", "m2").at("g"), 1),
    ]);
    let mut map = RenameMap::default();
    map.motives.insert("m1".into(), "m".into());
    map.motives.insert("m2".into(), "m".into());
    assert_eq!(rename(&x, &map).unwrap().to_string(), "2 x f.a(m)@g");
    assert_eq!(rename(&x, &RenameMap::default()).unwrap(), x);
}

#[test]
fn single_part_refinement_is_a_renaming() {
    let mut map = RenameMap::default();
    map.entities.insert("e".into(), "x".into());
    for seed in 0..200 {
        let x = expand_motives(&element(seed, 0.0)).unwrap();
        assert_eq!(refine(&x, &spec("e", &["x"])).unwrap(), rename(&x, &map).unwrap());
    }
}

fn kill_set(seed: u64) -> BTreeSet<Generator> {
    let mut rng = fti_testkit::rng(seed);
    let catalog = Catalog::small();
    let shape = Shape::atomic(Scope::Global);
    (0..6).map(|_| gen::generator(&mut rng, &catalog, &shape)).collect()
}

fn random_map(seed: u64) -> RenameMap {
    let mut rng = fti_testkit::rng(seed);
    let c = Catalog::small();
    let mut map = RenameMap::default();
    for e in &c.entities {
        map.entities.insert((*e).into(), (*gen::pick(&mut rng, &c.entities)).into());
    }
    map.actions.insert("a".into(), (*gen::pick(&mut rng, &c.actions)).into());
    map.motives.insert("m".into(), (*gen::pick(&mut rng, &c.motives)).into());
    map
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn transforms_are_additive(a in any::<u64>(), b in any::<u64>(), k in any::<u64>()) {
        let (x, y) = (element(a, 0.3), element(b, 0.3));
        let sum = x.add(&y).unwrap();

        let e = |i: &Interface| expand_motives(i).unwrap();
        prop_assert_eq!(e(&sum), e(&x).add(&e(&y)).unwrap());
        prop_assert_eq!(e(&x.negate().unwrap()), e(&x).negate().unwrap());
        prop_assert_eq!(e(&e(&x)), e(&x));

        let kill = kill_set(k);
        prop_assert_eq!(annihilate(&sum, &kill), annihilate(&x, &kill).add(&annihilate(&y, &kill)).unwrap());

        let map = random_map(k);
        let r = |i: &Interface| rename(i, &map).unwrap();
        prop_assert_eq!(r(&sum), r(&x).add(&r(&y)).unwrap());
        prop_assert_eq!(r(&x.negate().unwrap()), r(&x).negate().unwrap());

        let s = spec("e", &["e1", "e2", "e3"]);
        let f = |i: &Interface| refine(&e(i), &s).unwrap();
        prop_assert_eq!(f(&sum), f(&x).add(&f(&y)).unwrap());
        prop_assert_eq!(f(&x.negate().unwrap()), f(&x).negate().unwrap());
    }
}

#[test]
fn refinement_preserves_closedness() {
    let catalog = Catalog::small();
    let mut rng = fti_testkit::rng(11);
    for i in 0..100 {
        let arch = gen::closed_architecture(&mut rng, &catalog, &format!("A{i}"));
        assert!(check_cfta(&arch).unwrap().closed, "generator produced an open architecture");
        let sum = cfta_sum(&arch, &Default::default()).unwrap();
        let coarse = *gen::pick(&mut rng, &catalog.entities);
        let s = spec(coarse, &["p1", "p2"]);
        let refined = refine(&sum, &s).unwrap();
        assert!(is_closed(&refined).unwrap().closed, "{sum}\n{refined}");
    }
}

#[test]
fn refining_a_lone_self_transfer_opens_it() {
    let x = global(&[(g("f", "f"), 1)]);
    assert!(is_closed(&x).unwrap().closed);
    let refined = refine(&x, &spec("f", &["f1", "f2"])).unwrap();
    assert!(!is_closed(&refined).unwrap().closed);
}

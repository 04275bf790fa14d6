use fti_core::locglob::{decompose, globalize, localize, recompose};
use fti_core::reflection::phi_r;
use fti_core::{Alpha, EntityId, Generator, Interface, Scope};
use fti_testkit::gen::{self, Catalog, Shape};
use proptest::prelude::*;

fn element(seed: u64, scope: Scope, allow_negative: bool) -> Interface {
    let shape = Shape {
        allow_negative,
        composite: 0.2,
        constrained: if allow_negative { 0.2 } else { 0.0 },
        max_terms: 6,
        ..Shape::atomic(scope)
    };
    gen::interface(&mut fti_testkit::rng(seed), &Catalog::small(), &shape)
}

/// Drops negative `TF` terms, which localization answers at the counterpart entity.
fn without_negative_tf(i: &Interface) -> Interface {
    let kept = i.terms().filter(|(g, n)| *n > 0 || g.alpha != Alpha::TF).map(|(g, n)| (g.clone(), n));
    Interface::from_terms(i.scope(), kept).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn localize_inverts_globalize(seed in any::<u64>(), host in 0usize..4) {
        let e = EntityId::new(Catalog::small().entities[host]);
        let local = without_negative_tf(&element(seed, Scope::Local, true));
        prop_assert_eq!(localize(&e, &globalize(&e, &local).unwrap()).unwrap(), local);
    }

    #[test]
    fn negative_elements_move_to_the_counterpart(seed in any::<u64>(), host in 0usize..4) {
        let e = EntityId::new(Catalog::small().entities[host]);
        let local = element(seed, Scope::Local, true);
        let global = globalize(&e, &local).unwrap();
        let back = localize(&e, &global).unwrap();
        let mut expected = without_negative_tf(&local);
        for (g, n) in local.terms().filter(|(g, n)| *n < 0 && g.alpha == Alpha::TF && g.target == e) {
            let mirrored = Generator { polarity: g.polarity.flip(), ..g.clone() };
            expected.accumulate(mirrored, -n).unwrap();
        }
        prop_assert_eq!(back, expected);
        prop_assert!(phi_r(&recompose(&decompose(&global).unwrap()).unwrap().subtract(&global).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn decomposition_is_exact_on_the_monoid(seed in any::<u64>()) {
        let x = element(seed, Scope::Global, false);
        prop_assert_eq!(recompose(&decompose(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn decomposition_holds_modulo_reflection(seed in any::<u64>()) {
        let x = element(seed, Scope::Global, true);
        let back = recompose(&decompose(&x).unwrap()).unwrap();
        prop_assert!(phi_r(&back.subtract(&x).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn decomposed_parts_are_monoid_elements_for_reply_free_input(seed in any::<u64>()) {
        let shape = Shape { max_terms: 6, ..Shape::atomic(Scope::Global) };
        let x = gen::interface(&mut fti_testkit::rng(seed), &Catalog::small(), &shape);
        for part in decompose(&x).unwrap().parts.values() {
            prop_assert!(part.is_monoid_element(), "{}", part);
        }
    }
}

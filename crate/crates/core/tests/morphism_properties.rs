mod common;

use common::*;
use proptest::prelude::*;
use semiosis_core::morphism::*;

fn same_maps(a: &SemioticMorphism, b: &SemioticMorphism) -> bool {
    a.sort_map() == b.sort_map() && a.ctor_map() == b.ctor_map() && a.rel_map() == b.rel_map()
}

proptest! {
    #[test]
    fn composition_is_associative(seed: u64) {
        let mut r = rng(seed);
        let a = random_system(&mut r, "A", &SMALL);
        let (b, ab) = renamed_copy(&a, "B", "b_", |l| l);
        let (c, bc) = renamed_copy(&b, "C", "c_", |l| l);
        let (_, cd) = renamed_copy(&c, "D", "d_", |l| l);
        let (ab, bc, cd) = (thin(&mut r, ab), thin(&mut r, bc), thin(&mut r, cd));
        let left = compose(&cd, &compose(&bc, &ab).unwrap()).unwrap();
        let right = compose(&compose(&cd, &bc).unwrap(), &ab).unwrap();
        prop_assert!(same_maps(&left, &right));
    }

    #[test]
    fn identity_is_a_unit(seed: u64) {
        let mut r = rng(seed);
        let a = random_system(&mut r, "A", &SMALL);
        let (b, ab) = renamed_copy(&a, "B", "b_", |l| l);
        let m = thin(&mut r, ab);
        let left = compose(&SemioticMorphism::identity(b), &m).unwrap();
        let right = compose(&m, &SemioticMorphism::identity(a)).unwrap();
        prop_assert!(same_maps(&left, &m));
        prop_assert!(same_maps(&right, &m));
        if validate_morphism(&m).valid {
            prop_assert!(validate_morphism(&right).diagnostics.is_empty());
        }
    }

    #[test]
    fn isomorphisms_preserve_levels_both_ways(seed: u64, shift in 0i64..3, flip: bool) {
        let mut r = rng(seed);
        let a = random_system(&mut r, "A", &SMALL);
        let (_, m) = renamed_copy(&a, "B", "b_", |l| if flip { -l } else { l + shift });
        if is_isomorphism(&m).unwrap() {
            prop_assert!(is_level_preserving(&m).unwrap());
            prop_assert!(is_level_preserving(&m.inverse().unwrap()).unwrap());
        }
        if !flip {
            prop_assert!(is_isomorphism(&m).unwrap());
        }
    }

    #[test]
    fn translation_yields_valid_configurations(seed: u64) {
        let mut r = rng(seed);
        let a = random_system(&mut r, "A", &SMALL);
        let cfg = random_config(&mut r, &a, "c");
        let (_, m) = renamed_copy(&a, "B", "b_", |l| l);
        let m = thin(&mut r, m);
        if validate_morphism(&m).valid {
            let out = apply_morphism(&m, &cfg).unwrap();
            prop_assert!(out.validate().is_empty());
            prop_assert!(epsilon(&out) <= cfg.tuples().len());
            prop_assert!(out.tuples().len() <= cfg.tuples().len());
        }
    }
}

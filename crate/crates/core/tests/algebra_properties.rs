mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::Rng;
use semiosis_core::sign_algebra::*;

fn random_term(r: &mut rand_chacha::ChaCha8Rng, sys: &SignSystem, depth: u32) -> SignTerm {
    let pick = r.random_range(0..10);
    if depth == 0 || pick < 2 {
        return match pick % 3 {
            0 => SignTerm::Int(r.random_range(-2..3)),
            1 => SignTerm::Real(1.5),
            _ => SignTerm::Str("s".into()),
        };
    }
    let name = if pick == 2 {
        "undeclared".to_string()
    } else {
        sys.constructors().choose(r).unwrap().name.clone()
    };
    let n = r.random_range(0..=2);
    SignTerm::app(name, (0..n).map(|_| random_term(r, sys, depth - 1)).collect())
}

proptest! {
    #[test]
    fn subsort_order_is_reflexive_and_transitive(seed: u64) {
        let sys = random_system(&mut rng(seed), "S", &SMALL);
        let names: Vec<&str> = sys.sorts().iter().map(|s| s.name.as_str()).collect();
        for a in &names {
            prop_assert!(sys.subsort_leq(a, a).unwrap());
            for b in &names {
                for c in &names {
                    if sys.subsort_leq(a, b).unwrap() && sys.subsort_leq(b, c).unwrap() {
                        prop_assert!(sys.subsort_leq(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn well_sorted_terms_use_declared_symbols(seed: u64) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, "S", &SMALL);
        for _ in 0..20 {
            let t = random_term(&mut r, &sys, 3);
            if let Ok(sort) = sys.well_sorted(&t) {
                prop_assert!(sys.sort(&sort).is_some());
                let mut ok = true;
                t.walk(&mut |s| match s {
                    SignTerm::App { ctor, .. } => ok &= sys.constructor(ctor).is_some(),
                    lit => ok &= sys.sort(lit.literal_kind().unwrap().sort_name()).is_some(),
                });
                prop_assert!(ok, "{t}");
            }
        }
    }

    #[test]
    fn forbid_is_monotone_under_deletion(seed: u64) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, "S", &SMALL);
        let cfg = random_config(&mut r, &sys, "c");
        let mut smaller = cfg.clone();
        let tuples: Vec<Tuple> = cfg.tuples().iter().cloned().collect();
        for t in &tuples {
            if r.random_bool(0.5) {
                smaller.remove_tuple(t);
            }
        }
        for c in sys.constraints() {
            if matches!(c.body, ConstraintBody::Forbid { .. }) && evaluate_constraint(c, &cfg) {
                prop_assert!(evaluate_constraint(c, &smaller));
            }
        }
    }

    #[test]
    fn constraint_profile_is_sorted_and_stable(seed: u64) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, "S", &SMALL);
        let cfg = random_config(&mut r, &sys, "c");
        let p = constraint_profile(&cfg);
        prop_assert!(p.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(p, constraint_profile(&cfg.clone()));
    }
}

//! Random small sign systems, configurations and morphisms for property tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiosis_core::morphism::SemioticMorphism;
use semiosis_core::sign_algebra::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Shape {
    pub max_sorts: usize,
    pub max_ctors: usize,
    pub max_rels: usize,
    pub max_axioms: usize,
    pub only_forbid: bool,
}

pub const SMALL: Shape = Shape {
    max_sorts: 4,
    max_ctors: 4,
    max_rels: 3,
    max_axioms: 3,
    only_forbid: false,
};

pub fn random_system(r: &mut ChaCha8Rng, name: &str, shape: &Shape) -> Arc<SignSystem> {
    let n = r.random_range(1..=shape.max_sorts);
    let mut sorts = vec![SortDecl::data("Int"), SortDecl::data("Real")];
    let sign: Vec<String> = (0..n).map(|i| format!("S{i}")).collect();
    for s in &sign {
        sorts.push(if r.random_bool(0.5) {
            SortDecl::product(s.clone())
        } else {
            SortDecl::environment(s.clone())
        });
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if r.random_bool(0.3) {
                edges.push((sign[j].clone(), sign[i].clone()));
            }
        }
    }
    let pick_sort = |r: &mut ChaCha8Rng, allow_data: bool| -> String {
        if allow_data && r.random_bool(0.2) {
            ["Int", "Real"].choose(r).unwrap().to_string()
        } else {
            sign.choose(r).unwrap().clone()
        }
    };
    let ctors: Vec<ConstructorDecl> = (0..r.random_range(1..=shape.max_ctors))
        .map(|i| {
            let arity = r.random_range(0..=2);
            ConstructorDecl {
                name: format!("c{i}"),
                arg_sorts: (0..arity).map(|_| pick_sort(r, true)).collect(),
                result_sort: pick_sort(r, false),
                level: r.random_range(0..=3),
                priority: r.random_range(0..=2),
            }
        })
        .collect();
    let rels: Vec<RelationDecl> = (0..r.random_range(1..=shape.max_rels))
        .map(|i| RelationDecl {
            name: format!("r{i}"),
            arg_sorts: (0..r.random_range(1..=2)).map(|_| pick_sort(r, false)).collect(),
        })
        .collect();
    let axioms: Vec<Constraint> = (0..r.random_range(0..=shape.max_axioms))
        .map(|i| {
            let rel = rels.choose(r).unwrap();
            let pattern: Vec<Atom> = (0..rel.arg_sorts.len())
                .map(|j| {
                    if r.random_bool(0.5) {
                        Atom::Wildcard
                    } else {
                        Atom::Var(format!("x{j}"))
                    }
                })
                .collect();
            let kind = if shape.only_forbid { 0 } else { r.random_range(0..3) };
            let body = match kind {
                0 => ConstraintBody::Forbid {
                    relation: rel.name.clone(),
                    pattern,
                },
                1 => ConstraintBody::Require {
                    relation: rel.name.clone(),
                    pattern,
                },
                _ => ConstraintBody::AtMost {
                    relation: rel.name.clone(),
                    count: r.random_range(0..=2),
                },
            };
            Constraint {
                name: format!("k{i}"),
                rank: r.random_range(0..=2),
                body,
            }
        })
        .collect();
    let sys = SignSystem::new(name, sorts, edges, ctors, rels, axioms);
    let report = validate_system(&sys);
    assert!(report.is_empty(), "generator produced an invalid system: {report:?}");
    Arc::new(sys)
}

fn terms_of_sort<'a>(cfg: &'a Configuration, sort: &str) -> Vec<&'a str> {
    cfg.terms()
        .keys()
        .filter(|n| {
            cfg.term_sort(n)
                .ok()
                .is_some_and(|s| cfg.system().subsort_leq(&s, sort).unwrap_or(false))
        })
        .map(String::as_str)
        .collect()
}

pub fn random_config(r: &mut ChaCha8Rng, sys: &Arc<SignSystem>, name: &str) -> Configuration {
    let mut cfg = Configuration::new(name, sys.clone());
    for attempt in 0..8 {
        let c = sys.constructors().choose(r).unwrap();
        let mut args = Vec::new();
        for a in &c.arg_sorts {
            match a.as_str() {
                "Int" => args.push(SignTerm::Int(r.random_range(0..3))),
                "Real" => args.push(SignTerm::Real(0.5 * r.random_range(0..3) as f64)),
                s => match terms_of_sort(&cfg, s).choose(r) {
                    Some(n) => args.push(cfg.terms()[*n].clone()),
                    None => break,
                },
            }
        }
        if args.len() == c.arg_sorts.len() {
            let _ = cfg.add_term(format!("t{attempt}"), SignTerm::app(c.name.clone(), args));
        }
    }
    for _ in 0..10 {
        let rel = sys.relations().choose(r).unwrap();
        let mut args = Vec::new();
        for s in &rel.arg_sorts {
            match terms_of_sort(&cfg, s).choose(r) {
                Some(n) => args.push(n.to_string()),
                None => break,
            }
        }
        if args.len() == rel.arg_sorts.len() {
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            cfg.add_tuple(Tuple::new(rel.name.clone(), &refs)).unwrap();
        }
    }
    assert!(cfg.validate().is_empty());
    cfg
}

/// Copy of `sys` with every sign-sort, constructor and relation renamed, and
/// optionally with constructor levels transformed.
pub fn renamed_copy(
    sys: &SignSystem,
    name: &str,
    prefix: &str,
    level: impl Fn(i64) -> i64,
) -> (Arc<SignSystem>, SemioticMorphism) {
    let rn = |s: &str| -> String {
        if sys.sort(s).is_some_and(|d| d.is_data()) {
            s.to_string()
        } else {
            format!("{prefix}{s}")
        }
    };
    let sorts = sys
        .sorts()
        .iter()
        .map(|d| SortDecl {
            name: rn(&d.name),
            kind: d.kind,
        })
        .collect();
    let edges = sys.subsort_edges().iter().map(|(a, b)| (rn(a), rn(b))).collect();
    let ctors = sys
        .constructors()
        .iter()
        .map(|c| ConstructorDecl {
            name: format!("{prefix}{}", c.name),
            arg_sorts: c.arg_sorts.iter().map(|s| rn(s)).collect(),
            result_sort: rn(&c.result_sort),
            level: level(c.level),
            priority: c.priority,
        })
        .collect();
    let rels = sys
        .relations()
        .iter()
        .map(|r| RelationDecl {
            name: format!("{prefix}{}", r.name),
            arg_sorts: r.arg_sorts.iter().map(|s| rn(s)).collect(),
        })
        .collect();
    let axioms = sys
        .constraints()
        .iter()
        .map(|c| {
            let body = match &c.body {
                ConstraintBody::Forbid { relation, pattern } => ConstraintBody::Forbid {
                    relation: format!("{prefix}{relation}"),
                    pattern: pattern.clone(),
                },
                ConstraintBody::Require { relation, pattern } => ConstraintBody::Require {
                    relation: format!("{prefix}{relation}"),
                    pattern: pattern.clone(),
                },
                ConstraintBody::AtMost { relation, count } => ConstraintBody::AtMost {
                    relation: format!("{prefix}{relation}"),
                    count: *count,
                },
            };
            Constraint {
                name: c.name.clone(),
                rank: c.rank,
                body,
            }
        })
        .collect();
    let target = Arc::new(SignSystem::new(name, sorts, edges, ctors, rels, axioms));
    let mut m = SemioticMorphism::new(format!("to_{name}"), Arc::new(sys.clone()), target.clone());
    for d in sys.sorts() {
        m = m.map_sort(&d.name, &rn(&d.name));
    }
    for c in sys.constructors() {
        m = m.map_ctor(&c.name, &format!("{prefix}{}", c.name));
    }
    for r in sys.relations() {
        m = m.map_rel(&r.name, &format!("{prefix}{}", r.name));
    }
    (target, m)
}

/// Drops some sign-sort, constructor and relation entries from `m`.
pub fn thin(r: &mut ChaCha8Rng, mut m: SemioticMorphism) -> SemioticMorphism {
    let sorts: Vec<String> = m
        .sort_map()
        .keys()
        .filter(|s| !m.source().sort(s).is_some_and(|d| d.is_data()))
        .cloned()
        .collect();
    for s in sorts {
        if r.random_bool(0.2) {
            m = m.unmap_sort(&s);
        }
    }
    let ctors: Vec<String> = m.ctor_map().keys().cloned().collect();
    for c in ctors {
        if r.random_bool(0.2) {
            m = m.unmap_ctor(&c);
        }
    }
    let rels: Vec<String> = m.rel_map().keys().cloned().collect();
    for x in rels {
        if r.random_bool(0.2) {
            m = m.unmap_rel(&x);
        }
    }
    m
}

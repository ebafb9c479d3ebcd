//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Oracles here are written independently of the library
//! code they judge.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode, Stdio};
use std::sync::Arc;
use std::time::Instant;

use common::{random_config, random_system, renamed_copy, rng, thin, Shape, SMALL};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use semiosis_core::dsl::{parse, serialize, Block};
use semiosis_core::morphism::{
    epsilon, is_natural, validate_morphism, MorphismCode, SemioticMorphism,
};
use semiosis_core::semiosis::{
    check_law_one, collapse_past, make_component, sample_trajectory, selection, BasicComponent,
    Branch, SemiosisError, SemiosisSequence, SemioticStep,
};
use semiosis_core::sign_algebra::{
    validate_system, Boundary, ConstraintBody, Configuration, ConstructorDecl, RelationDecl,
    SignSystem, SignTerm, SortDecl, SortKind, Tuple,
};
use semiosis_core::sim::synthetic::{
    clustered_population, refrigerator_scenario, CELL_SGN, POPULATION_SPREAD, POPULATION_TAU,
    REFRIGERATOR_HORIZON, REFRIGERATOR_SGN, REFRIGERATOR_TREND_WINDOW,
};
use semiosis_core::sim::{cluster_agents, interaction_trend, layer_variability, run, Verdict};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------------------
// 1. Morphism validation against a brute-force checker.

/// Tiny systems: at most three sorts (one may be the data sort `Real`), three
/// constructors and two relations, symbol names drawn from `names`.
fn tiny_system(r: &mut ChaCha8Rng, name: &str, names: [&str; 3], prefix: &str) -> Arc<SignSystem> {
    loop {
        let n_sorts = r.random_range(1..=3);
        let with_data = n_sorts > 1 && r.random_bool(0.4);
        let mut sorts = Vec::new();
        let mut sign = Vec::new();
        for (i, s) in names.iter().take(n_sorts).enumerate() {
            if with_data && i == 0 {
                sorts.push(SortDecl::data("Real"));
            } else {
                sign.push(s.to_string());
                sorts.push(if r.random_bool(0.5) {
                    SortDecl::product(*s)
                } else {
                    SortDecl::environment(*s)
                });
            }
        }
        let all: Vec<String> = sorts.iter().map(|s| s.name.clone()).collect();
        let mut edges = Vec::new();
        for i in 0..sign.len() {
            for j in (i + 1)..sign.len() {
                if r.random_bool(0.4) {
                    edges.push((sign[j].clone(), sign[i].clone()));
                }
            }
        }
        let ctors = (0..r.random_range(0..=3))
            .map(|i| ConstructorDecl {
                name: format!("{prefix}c{i}"),
                arg_sorts: (0..r.random_range(0..=2))
                    .map(|_| all.choose(r).unwrap().clone())
                    .collect(),
                result_sort: sign.choose(r).unwrap().clone(),
                level: r.random_range(0..=2),
                priority: 0,
            })
            .collect();
        let rels = (0..r.random_range(0..=2))
            .map(|i| RelationDecl {
                name: format!("{prefix}r{i}"),
                arg_sorts: (0..r.random_range(1..=2))
                    .map(|_| sign.choose(r).unwrap().clone())
                    .collect(),
            })
            .collect();
        let sys = SignSystem::new(name, sorts, edges, ctors, rels, vec![]);
        if validate_system(&sys).is_empty() {
            return Arc::new(sys);
        }
    }
}

/// Reflexive-transitive closure of the declared edges, by Warshall.
fn order(sys: &SignSystem) -> BTreeSet<(String, String)> {
    let names: Vec<&str> = sys.sorts().iter().map(|s| s.name.as_str()).collect();
    let n = names.len();
    let ix = |s: &str| names.iter().position(|x| *x == s).unwrap();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in sys.subsort_edges() {
        reach[ix(a)][ix(b)] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if reach[i][j] {
                out.insert((names[i].to_string(), names[j].to_string()));
            }
        }
    }
    out
}

/// Which preservation conditions fail: (data sorts, order, signatures).
#[derive(Debug, PartialEq, Eq, Default)]
struct Failures {
    data: bool,
    order: bool,
    signature: bool,
}

impl Failures {
    fn any(&self) -> bool {
        self.data || self.order || self.signature
    }
}

fn oracle_failures(m: &SemioticMorphism) -> Failures {
    let (src, tgt) = (m.source(), m.target());
    let (src_le, tgt_le) = (order(src), order(tgt));
    let is_data = |sys: &SignSystem, s: &str| sys.sorts().iter().any(|d| d.name == s && d.is_data());
    let mut f = Failures::default();

    // A data sort maps to itself; a sign sort never lands on a data sort.
    for (s, t) in m.sort_map() {
        let ok = if is_data(src, s) {
            s == t && is_data(tgt, t)
        } else {
            !is_data(tgt, t)
        };
        f.data |= !ok;
    }
    for (s1, t1) in m.sort_map() {
        for (s2, t2) in m.sort_map() {
            if src_le.contains(&(s1.clone(), s2.clone())) && !tgt_le.contains(&(t1.clone(), t2.clone())) {
                f.order = true;
            }
        }
    }
    let args_agree = |from: &[String], to: &[String]| {
        from.len() == to.len()
            && from
                .iter()
                .zip(to)
                .all(|(a, b)| m.sort_map().get(a).is_none_or(|x| x == b))
    };
    for (c, image) in m.ctor_map() {
        let a = src.constructors().iter().find(|x| &x.name == c).unwrap();
        let b = tgt.constructors().iter().find(|x| &x.name == image).unwrap();
        let result_ok = m.sort_map().get(&a.result_sort).is_none_or(|x| *x == b.result_sort);
        f.signature |= !(args_agree(&a.arg_sorts, &b.arg_sorts) && result_ok);
    }
    for (rel, image) in m.rel_map() {
        let a = src.relations().iter().find(|x| &x.name == rel).unwrap();
        let b = tgt.relations().iter().find(|x| &x.name == image).unwrap();
        f.signature |= !args_agree(&a.arg_sorts, &b.arg_sorts);
    }
    f
}

fn library_failures(m: &SemioticMorphism) -> Option<Failures> {
    let mut f = Failures::default();
    for d in validate_morphism(m).diagnostics {
        match d.code {
            MorphismCode::DataSortChanged | MorphismCode::SortKindChanged => f.data = true,
            MorphismCode::OrderBroken => f.order = true,
            MorphismCode::ArityMismatch | MorphismCode::ResultSortMismatch | MorphismCode::ArgSortMismatch => {
                f.signature = true
            }
            // Every symbol used below is declared, so these must never appear.
            MorphismCode::UnknownSourceSymbol | MorphismCode::UnknownTargetSymbol => return None,
        }
    }
    Some(f)
}

/// All partial maps from `from` into `to`, each as a list of pairs.
fn partial_maps(from: &[String], to: &[String]) -> Vec<Vec<(String, String)>> {
    let mut out = vec![vec![]];
    for s in from {
        let mut next = Vec::new();
        for m in &out {
            next.push(m.clone());
            for t in to {
                let mut m = m.clone();
                m.push((s.clone(), t.clone()));
                next.push(m);
            }
        }
        out = next;
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let (mut cases, mut disagreements, mut valid) = (0usize, 0usize, 0usize);
    let mut pairs = 0;
    while cases < 100_000 {
        pairs += 1;
        let src = tiny_system(&mut r, "Src", ["A", "B", "C"], "s");
        let tgt = tiny_system(&mut r, "Tgt", ["X", "Y", "Z"], "t");
        let names = |v: Vec<&str>| v.into_iter().map(String::from).collect::<Vec<_>>();
        let sort_maps = partial_maps(
            &names(src.sorts().iter().map(|s| s.name.as_str()).collect()),
            &names(tgt.sorts().iter().map(|s| s.name.as_str()).collect()),
        );
        let ctor_maps = partial_maps(
            &names(src.constructors().iter().map(|c| c.name.as_str()).collect()),
            &names(tgt.constructors().iter().map(|c| c.name.as_str()).collect()),
        );
        let rel_maps = partial_maps(
            &names(src.relations().iter().map(|x| x.name.as_str()).collect()),
            &names(tgt.relations().iter().map(|x| x.name.as_str()).collect()),
        );
        for sm in &sort_maps {
            for cm in &ctor_maps {
                for rm in &rel_maps {
                    let mut m = SemioticMorphism::new("m", src.clone(), tgt.clone());
                    for (a, b) in sm {
                        m = m.map_sort(a, b);
                    }
                    for (a, b) in cm {
                        m = m.map_ctor(a, b);
                    }
                    for (a, b) in rm {
                        m = m.map_rel(a, b);
                    }
                    cases += 1;
                    let oracle = oracle_failures(&m);
                    let lib = library_failures(&m);
                    let report = validate_morphism(&m);
                    if lib.as_ref() != Some(&oracle) || report.valid == oracle.any() {
                        disagreements += 1;
                    }
                    valid += usize::from(report.valid);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        disagreements == 0 && secs < 60.0,
        format!(
            "{cases} maps over {pairs} system pairs ({valid} valid), {disagreements} disagreements, {secs:.1} s"
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. Law I against a direct re-evaluation.

fn levels(sys: &SignSystem) -> BTreeMap<&str, i64> {
    sys.constructors().iter().map(|c| (c.name.as_str(), c.level)).collect()
}

fn oracle_level_preserving(m: &SemioticMorphism) -> bool {
    let (ls, lt) = (levels(m.source()), levels(m.target()));
    let pairs: Vec<(i64, i64)> = m.ctor_map().iter().map(|(a, b)| (ls[a.as_str()], lt[b.as_str()])).collect();
    pairs
        .iter()
        .all(|&(a1, b1)| pairs.iter().all(|&(a2, b2)| a1 > a2 || b1 <= b2))
}

fn total_bijection(map: &BTreeMap<String, String>, from: Vec<&str>, to: Vec<&str>) -> bool {
    let keys: BTreeSet<&str> = map.keys().map(String::as_str).collect();
    let image: BTreeSet<&str> = map.values().map(String::as_str).collect();
    keys == from.into_iter().collect() && image == to.into_iter().collect() && image.len() == map.len()
}

fn oracle_isomorphism(m: &SemioticMorphism) -> bool {
    let (s, t) = (m.source(), m.target());
    if oracle_failures(m).any() {
        return false;
    }
    let bij = total_bijection(
        m.sort_map(),
        s.sorts().iter().map(|x| x.name.as_str()).collect(),
        t.sorts().iter().map(|x| x.name.as_str()).collect(),
    ) && total_bijection(
        m.ctor_map(),
        s.constructors().iter().map(|x| x.name.as_str()).collect(),
        t.constructors().iter().map(|x| x.name.as_str()).collect(),
    ) && total_bijection(
        m.rel_map(),
        s.relations().iter().map(|x| x.name.as_str()).collect(),
        t.relations().iter().map(|x| x.name.as_str()).collect(),
    );
    if !bij {
        return false;
    }
    let mut inv = SemioticMorphism::new("inv", t.clone(), s.clone());
    for (a, b) in m.sort_map() {
        inv = inv.map_sort(b, a);
    }
    for (a, b) in m.ctor_map() {
        inv = inv.map_ctor(b, a);
    }
    for (a, b) in m.rel_map() {
        inv = inv.map_rel(b, a);
    }
    !oracle_failures(&inv).any() && oracle_level_preserving(m) && oracle_level_preserving(&inv)
}

/// A selection step changes a configuration over a FORBID-only system exactly
/// when some tuple falls under a forbidden relation: the generated patterns
/// never repeat a variable, so every tuple of that relation matches.
fn oracle_selection_changes(cfg: &Configuration) -> bool {
    let forbidden: BTreeSet<&str> = cfg
        .system()
        .constraints()
        .iter()
        .filter_map(|c| match &c.body {
            ConstraintBody::Forbid { relation, .. } => Some(relation.as_str()),
            _ => None,
        })
        .collect();
    cfg.tuples().iter().any(|t| forbidden.contains(t.relation.as_str()))
}

fn oracle_law_one(seq: &SemiosisSequence) -> bool {
    let well_defined = seq.components().iter().any(|c| {
        c.branches().iter().any(|b| !oracle_isomorphism(&b.morphism))
            || c.steps().iter().any(|s| match s {
                SemioticStep::Morphism(m) => !oracle_isomorphism(m),
                // Generated sequences only put selection first.
                SemioticStep::Selection { .. } => oracle_selection_changes(c.source()),
                SemioticStep::Variation { .. } => unreachable!("not generated"),
            })
    });
    let level_break = seq
        .components()
        .iter()
        .any(|c| c.branches().iter().any(|b| !oracle_level_preserving(&b.morphism)));
    well_defined && level_break
}

const FORBID_ONLY: Shape = Shape {
    only_forbid: true,
    ..SMALL
};

fn even(morphisms: Vec<SemioticMorphism>) -> Vec<Branch> {
    let k = morphisms.len();
    morphisms
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let p = if i + 1 == k { 1.0 - (k - 1) as f64 / k as f64 } else { 1.0 / k as f64 };
            Branch::new(Arc::new(m), p)
        })
        .collect()
}

fn has_two_levels(sys: &SignSystem) -> bool {
    levels(sys).values().collect::<BTreeSet<_>>().len() >= 2
}

/// One randomized sequence. With `iso_only` every branch and step is an
/// isomorphism.
fn random_sequence(r: &mut ChaCha8Rng, iso_only: bool) -> SemiosisSequence {
    let base = loop {
        let s = random_system(r, "V0", &FORBID_ONLY);
        if has_two_levels(&s) {
            break s;
        }
    };
    let n = r.random_range(1..=3);
    let mut systems = vec![base];
    let mut links = Vec::new();
    for i in 0..n {
        let transform: fn(i64) -> i64 = if iso_only {
            |l| l
        } else {
            *[(|l| l) as fn(i64) -> i64, |l| -l, |l| l / 2, |_| 0].choose(r).unwrap()
        };
        let (next, m) = renamed_copy(&systems[i], &format!("V{}", i + 1), "v", transform);
        systems.push(next);
        links.push(m);
    }
    let mut components = Vec::new();
    for (i, link) in links.into_iter().enumerate() {
        let sys = &systems[i];
        let source = random_config(r, sys, &format!("c{i}"));
        let mut steps = Vec::new();
        if !iso_only && r.random_bool(0.3) {
            steps.push(SemioticStep::Selection {
                minimality: r.random_bool(0.5),
            });
        }
        if r.random_bool(0.3) {
            let id = SemioticMorphism::identity(sys.clone());
            let m = if iso_only { id } else { thin(r, id) };
            steps.push(SemioticStep::Morphism(Arc::new(m)));
        }
        let branches: Vec<SemioticMorphism> = (0..r.random_range(1..=3))
            .map(|_| {
                if iso_only || r.random_bool(0.5) {
                    link.clone()
                } else {
                    thin(r, link.clone())
                }
            })
            .collect();
        let c = make_component(source, steps, even(branches), i as i64, i as i64 + 1)
            .expect("generated components are valid");
        components.push(c);
    }
    SemiosisSequence::new("gen", components).expect("generated sequences chain")
}

/// Adds a level-inverting branch and a non-total branch to the last
/// component; their targets are free because nothing follows.
fn inject(seq: &SemiosisSequence) -> SemiosisSequence {
    let mut comps: Vec<BasicComponent> = seq.components().to_vec();
    let last = comps.pop().unwrap();
    let sys = last.system().clone();
    let (_, inverting) = renamed_copy(&sys, "Inv", "i", |l| -l);
    let (_, full) = renamed_copy(&sys, "Part", "q", |l| l);
    let dropped = sys.constructors()[0].name.clone();
    let partial = full.unmap_ctor(&dropped);
    let mut morphisms: Vec<SemioticMorphism> =
        last.branches().iter().map(|b| (*b.morphism).clone()).collect();
    morphisms.push(inverting);
    morphisms.push(partial);
    let c = make_component(
        last.source().clone(),
        last.steps().to_vec(),
        even(morphisms),
        last.t1(),
        last.t2(),
    )
    .expect("injected component is valid");
    comps.push(c);
    SemiosisSequence::new("injected", comps).expect("still chains")
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let (mut iso_wrong, mut inject_wrong) = (0, 0);
    for _ in 0..200 {
        let seq = random_sequence(&mut r, true);
        iso_wrong += usize::from(check_law_one(&seq).holds);
        inject_wrong += usize::from(!check_law_one(&inject(&seq)).holds);
    }
    let (mut wrong, mut holding) = (0, 0);
    for _ in 0..1000 {
        let seq = random_sequence(&mut r, false);
        let expected = oracle_law_one(&seq);
        wrong += usize::from(check_law_one(&seq).holds != expected);
        holding += usize::from(expected);
    }
    outcome(
        iso_wrong == 0 && inject_wrong == 0 && wrong == 0,
        format!(
            "all-isomorphism: {iso_wrong}/200 wrongly hold; injected: {inject_wrong}/200 wrongly fail; \
             randomized: {wrong}/1000 misclassified ({holding} hold)"
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. Law II and boundary crossings.

fn oracle_epsilon(cfg: &Configuration) -> usize {
    let sys = cfg.system();
    let side = |term: &str| -> Option<Boundary> {
        let SignTerm::App { ctor, .. } = &cfg.terms()[term] else {
            return None;
        };
        let result = &sys.constructors().iter().find(|c| &c.name == ctor)?.result_sort;
        match sys.sorts().iter().find(|s| &s.name == result)?.kind {
            SortKind::Sign(b) => Some(b),
            SortKind::Data => None,
        }
    };
    cfg.tuples()
        .iter()
        .filter(|t| {
            let sides: Vec<Option<Boundary>> = t.args.iter().map(|a| side(a)).collect();
            sides.contains(&Some(Boundary::Product)) && sides.contains(&Some(Boundary::Environment))
        })
        .count()
}

fn crossing(n: usize) -> Configuration {
    let sys = Arc::new(SignSystem::new(
        "B",
        vec![SortDecl::data("Int"), SortDecl::product("P"), SortDecl::environment("E")],
        vec![],
        vec![
            ConstructorDecl::new("p", &[], "P", 0),
            ConstructorDecl::new("e", &["Int"], "E", 0),
        ],
        vec![RelationDecl::new("r", &["P", "E"])],
        vec![],
    ));
    let mut c = Configuration::new("c", sys).with_term("x", SignTerm::app("p", vec![])).unwrap();
    for i in 0..n {
        let name = format!("e{i}");
        c.add_term(&name, SignTerm::app("e", vec![SignTerm::Int(i as i64)])).unwrap();
        c.add_tuple(Tuple::new("r", &["x", &name])).unwrap();
    }
    c
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let (mut raised, mut miscounted) = (0, 0);
    for i in 0..10_000 {
        let sys = random_system(&mut r, "S", &SMALL);
        let cfg = random_config(&mut r, &sys, "c");
        let out = selection(&cfg, (i % 2 == 0).then_some(&cfg)).config;
        raised += usize::from(epsilon(&out) > epsilon(&cfg));
        miscounted += usize::from(epsilon(&cfg) != oracle_epsilon(&cfg));
    }
    let boundary = [(5, 3, true), (4, 4, false), (3, 5, false), (0, 0, false), (1, 0, true)];
    let bad_natural = boundary
        .iter()
        .filter(|&&(a, b, want)| {
            let (ca, cb) = (crossing(a), crossing(b));
            epsilon(&ca) != a || epsilon(&cb) != b || is_natural(&ca, &cb) != want
        })
        .count();
    outcome(
        raised == 0 && miscounted == 0 && bad_natural == 0,
        format!(
            "10000 configurations: {raised} raised epsilon, {miscounted} miscounted; \
             {bad_natural}/{} boundary cases wrong",
            boundary.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 4. Probability machinery.

fn criterion_4() -> Outcome {
    let sys = crossing(1).system().clone();
    let id = Arc::new(SemioticMorphism::identity(sys));
    let comp = |ps: &[f64]| {
        make_component(
            crossing(1),
            vec![],
            ps.iter().map(|&p| Branch::new(id.clone(), p)).collect(),
            0,
            1,
        )
    };
    let rejects = |ps: &[f64]| matches!(comp(ps), Err(SemiosisError::ProbSum { .. }));
    let sums_ok = rejects(&[0.5, 0.5 + 2e-9])
        && rejects(&[0.5, 0.5 - 2e-9])
        && rejects(&[0.6, 0.5])
        && comp(&[0.5, 0.5 + 5e-10]).is_ok()
        && comp(&[1.0]).is_ok();

    let seq = SemiosisSequence::new("s", vec![comp(&[0.25, 0.75]).unwrap()]).unwrap();
    let n = 10_000;
    let mut second = 0;
    let mut collapsed_ok = true;
    for seed in 0..n {
        let t = sample_trajectory(&seq, seed).unwrap();
        second += usize::from(t.indices[0] == 1);
        if seed < 200 {
            let c = collapse_past(&seq, &t.indices).unwrap();
            collapsed_ok &= c
                .components()
                .iter()
                .all(|c| c.branches().len() == 1 && c.branches()[0].probability == 1.0);
        }
    }
    let freq = second as f64 / n as f64;
    outcome(
        sums_ok && (0.73..=0.77).contains(&freq) && collapsed_ok,
        format!(
            "sum tolerance {}, P(branch 1) = {freq:.4} over {n} seeds, collapse {}",
            if sums_ok { "ok" } else { "wrong" },
            if collapsed_ok { "ok" } else { "wrong" }
        ),
    )
}

// ---------------------------------------------------------------------------
// 5. Interaction trend of the refrigerator.

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let slopes = |adapt: bool| -> Vec<(f64, Verdict)> {
        let s = refrigerator_scenario(adapt);
        (0..20)
            .map(|seed| {
                let trace = run(&s, REFRIGERATOR_HORIZON, seed).unwrap();
                let t = interaction_trend(&trace, "fridge", REFRIGERATOR_TREND_WINDOW).unwrap();
                (t.slope, t.verdict)
            })
            .collect()
    };
    let on = slopes(true);
    let off = slopes(false);
    let on_ok = on
        .iter()
        .filter(|(s, v)| *s < 0.0 && *v == Verdict::Successful)
        .count();
    let off_ok = off.iter().filter(|(s, _)| *s >= 0.0 || s.abs() < 0.01).count();
    let mean = |xs: &[(f64, Verdict)]| xs.iter().map(|x| x.0).sum::<f64>() / xs.len() as f64;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        on_ok >= 18 && off_ok >= 18 && secs < 30.0,
        format!(
            "adaptation on: {on_ok}/20 decreasing (mean slope {:.4}); off: {off_ok}/20 flat or rising \
             (mean slope {:.4}); {secs:.1} s",
            mean(&on),
            mean(&off)
        ),
    )
}

// ---------------------------------------------------------------------------
// 6 and 7. Clustering and buffering on the three-center population.

fn majority_purity(assign: &BTreeMap<String, usize>, truth: &BTreeMap<String, usize>) -> f64 {
    let mut hits = 0;
    let clusters: BTreeSet<usize> = assign.values().copied().collect();
    for c in clusters {
        let mut labels: BTreeMap<usize, usize> = BTreeMap::new();
        for (id, k) in assign {
            if *k == c {
                *labels.entry(truth[id]).or_default() += 1;
            }
        }
        hits += labels.values().max().unwrap();
    }
    hits as f64 / assign.len() as f64
}

fn criterion_6() -> Outcome {
    let mut good = 0;
    let mut worst = 1.0f64;
    for seed in 0..20 {
        let pop = clustered_population(seed, POPULATION_SPREAD);
        let trace = run(&pop.scenario, 2, seed).unwrap();
        let snap = &trace.cluster_history.last().unwrap().assignments;
        let count = snap.values().collect::<BTreeSet<_>>().len();
        let purity = majority_purity(snap, &pop.truth);
        worst = worst.min(purity);
        good += usize::from(count == 3 && purity >= 0.95 && snap.len() == 60);
    }
    outcome(good == 20, format!("{good}/20 seeds with exactly 3 clusters at purity >= 0.95 (worst purity {worst:.3})"))
}

fn criterion_7() -> Outcome {
    let mut good = 0;
    let mut sums = [0.0; 3];
    for seed in 0..20 {
        let pop = clustered_population(seed, POPULATION_SPREAD);
        let trace = run(&pop.scenario, 200, seed).unwrap();
        let features: Vec<(String, Vec<f64>)> = pop
            .scenario
            .products
            .iter()
            .map(|p| (p.id.clone(), pop.scenario.environment(&p.environment).unwrap().features.clone()))
            .collect();
        let clusters = cluster_agents(&features, POPULATION_TAU).unwrap();
        let v = layer_variability(&trace, &clusters, &pop.scenario.manufacturers());
        good += usize::from(v.family_mean_cv <= v.cluster_mean_cv && v.cluster_mean_cv <= v.product_mean_cv);
        sums[0] += v.family_mean_cv / 20.0;
        sums[1] += v.cluster_mean_cv / 20.0;
        sums[2] += v.product_mean_cv / 20.0;
    }
    outcome(
        good >= 18,
        format!(
            "{good}/20 seeds ordered; mean CV family {:.3}, cluster {:.3}, product {:.3}",
            sums[0], sums[1], sums[2]
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. DSL round trip and mutation robustness.

fn generated_file(r: &mut ChaCha8Rng, i: usize) -> Vec<Block> {
    let sys = random_system(r, &format!("G{i}"), &SMALL);
    let mut blocks = vec![Block::System(sys.clone())];
    for k in 0..r.random_range(0..=2) {
        blocks.push(Block::Config(Arc::new(random_config(r, &sys, &format!("cfg{k}")))));
    }
    if r.random_bool(0.5) {
        let (copy, m) = renamed_copy(&sys, &format!("H{i}"), "h", |l| l + 1);
        blocks.push(Block::System(copy));
        blocks.push(Block::Morphism(Arc::new(thin(r, m).with_name("m"))));
    }
    blocks
}

fn mutate(r: &mut ChaCha8Rng, base: &[u8]) -> Vec<u8> {
    let mut bytes = base.to_vec();
    for _ in 0..r.random_range(1..=8) {
        let at = r.random_range(0..=bytes.len());
        match r.random_range(0..4) {
            0 if at < bytes.len() => bytes[at] = r.random(),
            1 if at < bytes.len() => {
                bytes.remove(at);
            }
            2 => bytes.insert(at, *b"{}();,[]<->@*..\"\\ \n".choose(r).unwrap()),
            _ => {
                let end = (at + r.random_range(0..40)).min(bytes.len());
                bytes.drain(at..end);
            }
        }
    }
    bytes
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut mismatched = 0;
    for i in 0..1000 {
        let blocks = generated_file(&mut r, i);
        let (again, diags) = parse(&serialize(&blocks));
        mismatched += usize::from(!diags.is_empty() || again != blocks);
    }
    let (mut pop_blocks, _) = parse(CELL_SGN);
    pop_blocks.push(Block::Scenario(Arc::new(clustered_population(0, 0.5).scenario)));
    let (fridge, _) = parse(REFRIGERATOR_SGN);
    for blocks in [pop_blocks, fridge] {
        let (again, diags) = parse(&serialize(&blocks));
        mismatched += usize::from(!diags.is_empty() || again != blocks);
    }

    let corpus = [
        REFRIGERATOR_SGN.as_bytes(),
        include_bytes!("../../core/data/lifecycle.sgn").as_slice(),
    ];
    let hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut crashes = 0;
    let mut diagnosed = 0;
    let n = 100_000;
    for i in 0..n {
        let text = String::from_utf8_lossy(&mutate(&mut r, corpus[i % 2])).into_owned();
        match std::panic::catch_unwind(|| parse(&text)) {
            Ok((_, d)) => diagnosed += usize::from(!d.is_empty()),
            Err(_) => crashes += 1,
        }
    }
    std::panic::set_hook(hook);
    outcome(
        mismatched == 0 && crashes == 0,
        format!("1002 files: {mismatched} round-trip mismatches; {n} mutations: {crashes} crashes, {diagnosed} diagnosed"),
    )
}

// ---------------------------------------------------------------------------
// 9. Byte-identical traces from the binary.

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/refrigerator.sgn");
    let run_once = |name: &str, seed: &str| -> Option<Vec<u8>> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_semiosis"))
            .args(["simulate", file, "--seed", seed, "--horizon", "128", "--out"])
            .arg(&out)
            .stdout(Stdio::null())
            .status()
            .ok()?;
        status.success().then(|| std::fs::read(&out).ok()).flatten()
    };
    let (a, b) = (run_once("a.jsonl", "7"), run_once("b.jsonl", "7"));
    let c = run_once("c.jsonl", "8");
    let same = a.is_some() && a == b;
    let differs = c.is_some() && c != a;
    outcome(
        same && differs,
        format!(
            "same seed identical: {same}; other seed differs: {differs}; {} bytes",
            a.map_or(0, |x| x.len())
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("morphism oracle equivalence", criterion_1),
        ("law I suite", criterion_2),
        ("law II and epsilon", criterion_3),
        ("probability machinery", criterion_4),
        ("refrigerator interaction trend", criterion_5),
        ("typogenic emergence", criterion_6),
        ("buffering", criterion_7),
        ("DSL round trip and mutation", criterion_8),
        ("trace determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("{} {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

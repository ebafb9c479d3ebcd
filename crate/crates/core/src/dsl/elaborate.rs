use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::parser::*;
use super::{Block, Diagnostic, Pos, Severity};
use crate::morphism::{validate_morphism, SemioticMorphism};
use crate::semiosis::{make_component, Branch, SemiosisSequence, SemioticStep};
use crate::sign_algebra::{
    validate_system, Atom, Configuration, Constraint, ConstraintBody, ConstructorDecl,
    RelationDecl, SignSystem, SignTerm, SortDecl, SortKind, Subject, Tuple,
};
use crate::sim::scenario::{
    validate_scenario, AgentSpec, EnvironmentProfile, EventKind, Expectation, ProductSpec,
    Scenario, DEFAULT_WINDOW,
};

/// One parsed file, with the name used in its diagnostics.
pub(crate) struct Unit {
    pub items: Vec<Item>,
    pub file: Option<String>,
}

struct Ctx<'a> {
    diags: &'a mut Vec<Diagnostic>,
    file: Option<String>,
    systems: BTreeMap<String, Arc<SignSystem>>,
    morphisms: BTreeMap<String, Arc<SemioticMorphism>>,
    configs: BTreeMap<String, Arc<Configuration>>,
    sequence_names: BTreeSet<String>,
    scenario_names: BTreeSet<String>,
}

impl Ctx<'_> {
    fn error(&mut self, code: &str, message: impl Into<String>, pos: Pos) {
        let mut d = Diagnostic::error(code, message, pos);
        d.file = self.file.clone();
        self.diags.push(d);
    }

    fn warning(&mut self, code: &str, message: impl Into<String>, pos: Pos) {
        let mut d = Diagnostic::error(code, message, pos);
        d.severity = Severity::Warning;
        d.file = self.file.clone();
        self.diags.push(d);
    }

    fn fresh(&mut self, taken: bool, kind: &str, id: &Ident) -> bool {
        if taken {
            self.error(
                "DUPLICATE_NAME",
                format!("{kind} `{}` is already defined", id.name),
                id.pos,
            );
            false
        } else {
            true
        }
    }

    fn lookup<T: Clone>(&mut self, table: &BTreeMap<String, T>, code: &str, kind: &str, id: &Ident) -> Option<T> {
        let found = table.get(&id.name).cloned();
        if found.is_none() {
            self.error(code, format!("unknown {kind} `{}`", id.name), id.pos);
        }
        found
    }
}

/// Elaborates every unit, kind by kind, so blocks may refer to blocks of
/// other kinds regardless of their order in the file. Blocks come back in
/// source order.
pub(crate) fn elaborate(units: &[Unit], diags: &mut Vec<Diagnostic>) -> Vec<Block> {
    let mut ctx = Ctx {
        diags,
        file: None,
        systems: BTreeMap::new(),
        morphisms: BTreeMap::new(),
        configs: BTreeMap::new(),
        sequence_names: BTreeSet::new(),
        scenario_names: BTreeSet::new(),
    };
    let mut out: Vec<((usize, usize), Block)> = Vec::new();
    for pass in 0..5 {
        for (u, unit) in units.iter().enumerate() {
            ctx.file = unit.file.clone();
            for (i, item) in unit.items.iter().enumerate() {
                let block = match (pass, item) {
                    (0, Item::System(s)) => system(&mut ctx, s).map(Block::System),
                    (1, Item::Morphism(m)) => morphism(&mut ctx, m).map(Block::Morphism),
                    (2, Item::Config(c)) => config(&mut ctx, c).map(Block::Config),
                    (3, Item::Sequence(s)) => sequence(&mut ctx, s).map(Block::Sequence),
                    (4, Item::Scenario(s)) => scenario(&mut ctx, s).map(Block::Scenario),
                    _ => None,
                };
                if let Some(b) = block {
                    out.push(((u, i), b));
                }
            }
        }
    }
    out.sort_by_key(|(k, _)| *k);
    out.into_iter().map(|(_, b)| b).collect()
}

fn ground_term(ctx: &mut Ctx<'_>, t: &RawTerm, env: Option<&BTreeMap<String, SignTerm>>) -> Option<SignTerm> {
    Some(match &t.kind {
        TermKind::Int(i) => SignTerm::Int(*i),
        TermKind::Real(r) => SignTerm::Real(*r),
        TermKind::Str(s) => SignTerm::Str(s.clone()),
        TermKind::App { ctor, args } => {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                out.push(ground_term(ctx, a, env)?);
            }
            SignTerm::app(ctor.name.clone(), out)
        }
        TermKind::Ref(name) => match env.and_then(|e| e.get(name)) {
            Some(t) => t.clone(),
            None => {
                let msg = if env.is_some() {
                    format!("unknown term `{name}`; nullary constructors are written `{name}()`")
                } else {
                    format!("`{name}` cannot appear inside an axiom term; terms there must be ground")
                };
                ctx.error("UNKNOWN_TERM", msg, t.pos);
                return None;
            }
        },
    })
}

struct SystemSpans {
    sorts: Vec<Pos>,
    edges: Vec<(Pos, Pos)>,
    ctors: Vec<(Pos, Vec<Pos>, Pos)>,
    rels: Vec<(Pos, Vec<Pos>)>,
    axioms: Vec<(Pos, Pos, Vec<Pos>)>,
}

fn system(ctx: &mut Ctx<'_>, raw: &RawSystem) -> Option<Arc<SignSystem>> {
    let taken = ctx.systems.contains_key(&raw.name.name);
    let fresh = ctx.fresh(taken, "system", &raw.name);
    if !fresh {
        return None;
    }
    let mut spans = SystemSpans {
        sorts: vec![],
        edges: vec![],
        ctors: vec![],
        rels: vec![],
        axioms: vec![],
    };
    let (mut sorts, mut edges, mut ctors, mut rels, mut axioms) = (vec![], vec![], vec![], vec![], vec![]);
    let mut ok = true;
    for d in &raw.decls {
        match d {
            RawDecl::Data(id) => {
                sorts.push(SortDecl::data(id.name.clone()));
                spans.sorts.push(id.pos);
            }
            RawDecl::Sort {
                name,
                boundary,
                parents,
            } => {
                sorts.push(SortDecl {
                    name: name.name.clone(),
                    kind: SortKind::Sign(*boundary),
                });
                spans.sorts.push(name.pos);
                for p in parents {
                    edges.push((name.name.clone(), p.name.clone()));
                    spans.edges.push((name.pos, p.pos));
                }
            }
            RawDecl::Ctor {
                name,
                args,
                result,
                level,
                prio,
            } => {
                ctors.push(ConstructorDecl {
                    name: name.name.clone(),
                    arg_sorts: args.iter().map(|a| a.name.clone()).collect(),
                    result_sort: result.name.clone(),
                    level: *level,
                    priority: *prio,
                });
                spans
                    .ctors
                    .push((name.pos, args.iter().map(|a| a.pos).collect(), result.pos));
            }
            RawDecl::Rel { name, args } => {
                rels.push(RelationDecl {
                    name: name.name.clone(),
                    arg_sorts: args.iter().map(|a| a.name.clone()).collect(),
                });
                spans.rels.push((name.pos, args.iter().map(|a| a.pos).collect()));
            }
            RawDecl::Axiom {
                name,
                rank,
                kind,
                relation,
                atoms,
                count,
            } => {
                let mut pattern = Vec::new();
                for a in atoms {
                    pattern.push(match &a.kind {
                        AtomKind::Wildcard => Atom::Wildcard,
                        AtomKind::Name(n) => Atom::Var(n.clone()),
                        AtomKind::Term(t) => match ground_term(ctx, t, None) {
                            Some(t) => Atom::Term(t),
                            None => {
                                ok = false;
                                Atom::Wildcard
                            }
                        },
                    });
                }
                let relation_name = relation.name.clone();
                let body = match kind {
                    BodyKind::Forbid => ConstraintBody::Forbid {
                        relation: relation_name,
                        pattern,
                    },
                    BodyKind::Require => ConstraintBody::Require {
                        relation: relation_name,
                        pattern,
                    },
                    BodyKind::AtMost => ConstraintBody::AtMost {
                        relation: relation_name,
                        count: *count,
                    },
                };
                axioms.push(Constraint {
                    name: name.name.clone(),
                    rank: *rank,
                    body,
                });
                spans
                    .axioms
                    .push((name.pos, relation.pos, atoms.iter().map(|a| a.pos).collect()));
            }
        }
    }
    let sys = SignSystem::new(raw.name.name.clone(), sorts, edges, ctors, rels, axioms);
    for d in validate_system(&sys) {
        let pos = match d.subject {
            Subject::Sort(i) => spans.sorts[i],
            Subject::Edge { index, side } => {
                let (a, b) = spans.edges[index];
                if side == 0 {
                    a
                } else {
                    b
                }
            }
            Subject::Constructor { index, arg } => {
                let (name, args, result) = &spans.ctors[index];
                match arg {
                    Some(i) => args.get(i).copied().unwrap_or(*name),
                    None => *result,
                }
            }
            Subject::Relation { index, arg } => {
                let (name, args) = &spans.rels[index];
                args.get(arg).copied().unwrap_or(*name)
            }
            Subject::Constraint { index, atom } => {
                let (_, rel, atoms) = &spans.axioms[index];
                match atom {
                    Some(i) => atoms.get(i).copied().unwrap_or(*rel),
                    None => *rel,
                }
            }
        };
        ctx.error(d.code.as_str(), d.message, pos);
        ok = false;
    }
    if !ok {
        return None;
    }
    let sys = Arc::new(sys);
    ctx.systems.insert(raw.name.name.clone(), sys.clone());
    Some(sys)
}

fn morphism(ctx: &mut Ctx<'_>, raw: &RawMorphism) -> Option<Arc<SemioticMorphism>> {
    let taken = ctx.morphisms.contains_key(&raw.name.name);
    let fresh = ctx.fresh(taken, "morphism", &raw.name);
    let systems = ctx.systems.clone();
    let source = ctx.lookup(&systems, "UNKNOWN_SYSTEM", "system", &raw.source);
    let target = ctx.lookup(&systems, "UNKNOWN_SYSTEM", "system", &raw.target);
    let (source, target) = (source?, target?);
    if !fresh {
        return None;
    }
    let mut m = SemioticMorphism::new(raw.name.name.clone(), source, target);
    let mut seen: BTreeMap<(u8, &str), ()> = BTreeMap::new();
    let mut ok = true;
    for (kind, from, to) in &raw.maps {
        let key = (*kind as u8, from.name.as_str());
        if seen.insert(key, ()).is_some() {
            ctx.error("DUPLICATE_MAP", format!("`{}` is mapped twice", from.name), from.pos);
            ok = false;
            continue;
        }
        m = match kind {
            MapKind::Sort => m.map_sort(&from.name, &to.name),
            MapKind::Ctor => m.map_ctor(&from.name, &to.name),
            MapKind::Rel => m.map_rel(&from.name, &to.name),
        };
    }
    if !ok {
        return None;
    }
    // An invalid morphism is still a well-formed block; its defects are
    // reported as warnings so `morph-check` can classify it.
    for d in validate_morphism(&m).diagnostics {
        ctx.warning(d.code.as_str(), d.message, raw.name.pos);
    }
    let m = Arc::new(m);
    ctx.morphisms.insert(raw.name.name.clone(), m.clone());
    Some(m)
}

fn config(ctx: &mut Ctx<'_>, raw: &RawConfig) -> Option<Arc<Configuration>> {
    let taken = ctx.configs.contains_key(&raw.name.name);
    let fresh = ctx.fresh(taken, "config", &raw.name);
    let systems = ctx.systems.clone();
    let sys = ctx.lookup(&systems, "UNKNOWN_SYSTEM", "system", &raw.system)?;
    if !fresh {
        return None;
    }
    let mut cfg = Configuration::new(raw.name.name.clone(), sys);
    let mut ok = true;
    for e in &raw.entries {
        match e {
            ConfigEntry::Term(id, t) => {
                let Some(term) = ground_term(ctx, t, Some(cfg.terms())) else {
                    ok = false;
                    continue;
                };
                if let Err(err) = cfg.add_term(id.name.clone(), term) {
                    let pos = if err.code() == "DUPLICATE_TERM" { id.pos } else { t.pos };
                    ctx.error(err.code(), err.to_string(), pos);
                    ok = false;
                }
            }
            ConfigEntry::Tuple(rel, args) => {
                let names: Vec<&str> = args.iter().map(|a| a.name.as_str()).collect();
                match cfg.add_tuple(Tuple::new(rel.name.clone(), &names)) {
                    Ok(true) => {}
                    Ok(false) => {
                        ctx.error("DUPLICATE_TUPLE", format!("tuple `{}` listed twice", rel.name), rel.pos);
                        ok = false;
                    }
                    Err(err) => {
                        let pos = match &err {
                            crate::sign_algebra::ConfigError::UnknownTerm(n) => {
                                args.iter().find(|a| &a.name == n).map(|a| a.pos).unwrap_or(rel.pos)
                            }
                            crate::sign_algebra::ConfigError::TupleSort { position, .. } => {
                                args.get(*position).map(|a| a.pos).unwrap_or(rel.pos)
                            }
                            _ => rel.pos,
                        };
                        ctx.error(err.code(), err.to_string(), pos);
                        ok = false;
                    }
                }
            }
        }
    }
    if !ok {
        return None;
    }
    let cfg = Arc::new(cfg);
    ctx.configs.insert(raw.name.name.clone(), cfg.clone());
    Some(cfg)
}

fn sequence(ctx: &mut Ctx<'_>, raw: &RawSequence) -> Option<Arc<SemiosisSequence>> {
    let taken = ctx.sequence_names.contains(&raw.name.name);
    let fresh = ctx.fresh(taken, "sequence", &raw.name);
    if !fresh {
        return None;
    }
    ctx.sequence_names.insert(raw.name.name.clone());
    let configs = ctx.configs.clone();
    let morphisms = ctx.morphisms.clone();
    let mut components = Vec::new();
    let mut ok = true;
    for c in &raw.components {
        let source = ctx.lookup(&configs, "UNKNOWN_CONFIG", "config", &c.from);
        let mut steps = Vec::new();
        for s in &c.steps {
            steps.push(match s {
                RawStep::Vary { depth, budget } => SemioticStep::Variation {
                    depth_bound: *depth,
                    relation_budget: *budget,
                },
                RawStep::Select { min } => SemioticStep::Selection { minimality: *min },
                RawStep::Apply(id) => match ctx.lookup(&morphisms, "UNKNOWN_MORPHISM", "morphism", id) {
                    Some(m) => SemioticStep::Morphism(m),
                    None => {
                        ok = false;
                        continue;
                    }
                },
            });
        }
        let mut branches = Vec::new();
        for b in &c.branches {
            let Some(m) = ctx.lookup(&morphisms, "UNKNOWN_MORPHISM", "morphism", &b.morphism) else {
                ok = false;
                continue;
            };
            if m.target().name() != b.target.name {
                ctx.error(
                    "BRANCH_TARGET_MISMATCH",
                    format!(
                        "morphism `{}` maps into `{}`, not `{}`",
                        b.morphism.name,
                        m.target().name(),
                        b.target.name
                    ),
                    b.target.pos,
                );
                ok = false;
            }
            branches.push(Branch::new(m, b.p));
        }
        let Some(source) = source else {
            ok = false;
            continue;
        };
        if !ok {
            continue;
        }
        match make_component((*source).clone(), steps, branches, c.t1, c.t2) {
            Ok(comp) => components.push(comp),
            Err(e) => {
                ctx.error(e.code(), e.to_string(), c.pos);
                ok = false;
            }
        }
    }
    if !ok {
        return None;
    }
    match SemiosisSequence::new(raw.name.name.clone(), components) {
        Ok(s) => Some(Arc::new(s)),
        Err(e) => {
            ctx.error(e.code(), e.to_string(), raw.name.pos);
            None
        }
    }
}

fn scenario(ctx: &mut Ctx<'_>, raw: &RawScenario) -> Option<Arc<Scenario>> {
    let taken = ctx.scenario_names.contains(&raw.name.name);
    let fresh = ctx.fresh(taken, "scenario", &raw.name);
    if !fresh {
        return None;
    }
    ctx.scenario_names.insert(raw.name.name.clone());
    let configs = ctx.configs.clone();
    let mut s = Scenario::new(raw.name.name.clone());
    let mut ok = true;
    for e in &raw.entries {
        match e {
            ScenarioEntry::Env { id, features, rates } => {
                let mut base_rates = BTreeMap::new();
                for (k, r) in rates {
                    if base_rates.insert(EventKind::from_name(&k.name), *r).is_some() {
                        ctx.error("DUPLICATE_NAME", format!("rate for `{}` given twice", k.name), k.pos);
                        ok = false;
                    }
                }
                s.environments.push(EnvironmentProfile {
                    id: id.name.clone(),
                    features: features.clone(),
                    base_rates,
                });
            }
            ScenarioEntry::Product {
                id,
                config,
                env,
                manufacturer,
                params,
            } => {
                let Some(cfg) = ctx.lookup(&configs, "UNKNOWN_CONFIG", "config", config) else {
                    ok = false;
                    continue;
                };
                let mut map = BTreeMap::new();
                for (n, v) in params {
                    if map.insert(n.name.clone(), *v).is_some() {
                        ctx.error("DUPLICATE_NAME", format!("parameter `{}` given twice", n.name), n.pos);
                        ok = false;
                    }
                }
                s.products.push(ProductSpec {
                    id: id.name.clone(),
                    config: cfg,
                    environment: env.name.clone(),
                    manufacturer: manufacturer.name.clone(),
                    params: map,
                });
            }
            ScenarioEntry::Agent {
                product,
                at,
                weber,
                window,
                expects,
            } => {
                s.agents.push(AgentSpec {
                    product: product.name.clone(),
                    from_tick: *at,
                    weber_k: *weber,
                    window: window.unwrap_or(DEFAULT_WINDOW),
                    expectations: expects
                        .iter()
                        .map(|x| match x {
                            RawExpect::Functional { param, low, high } => Expectation::Functional {
                                param: param.name.clone(),
                                low: *low,
                                high: *high,
                            },
                            RawExpect::Env { kind, low, high } => Expectation::Environmental {
                                kind: EventKind::from_name(&kind.name),
                                low: *low,
                                high: *high,
                            },
                        })
                        .collect(),
                });
            }
            ScenarioEntry::Adapt(on) => s.adapt = *on,
            ScenarioEntry::Tau(t) => s.tau = *t,
        }
    }
    if !ok {
        return None;
    }
    let problems = validate_scenario(&s);
    if !problems.is_empty() {
        for p in problems {
            ctx.error("INVALID_SCENARIO", p, raw.name.pos);
        }
        return None;
    }
    Some(Arc::new(s))
}

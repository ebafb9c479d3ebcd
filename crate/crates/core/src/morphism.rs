//! Semiotic morphisms: partial, structure-preserving translations between sign
//! systems, and the boundary statistic ε they are judged by.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::sign_algebra::{Boundary, Configuration, SignSystem, SignTerm, SortKind, Tuple};

#[derive(Clone, Debug, PartialEq)]
pub struct SemioticMorphism {
    name: String,
    source: Arc<SignSystem>,
    target: Arc<SignSystem>,
    sort_map: BTreeMap<String, String>,
    ctor_map: BTreeMap<String, String>,
    rel_map: BTreeMap<String, String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("morphism `{0}` is not valid")]
    InvalidMorphism(String),
    #[error("system mismatch: expected `{expected}`, found `{found}`")]
    SystemMismatch { expected: String, found: String },
}

impl MorphismError {
    pub fn code(&self) -> &'static str {
        match self {
            MorphismError::InvalidMorphism(_) => "INVALID_MORPHISM",
            MorphismError::SystemMismatch { .. } => "SYSTEM_MISMATCH",
        }
    }
}

pub(crate) fn same_system(a: &Arc<SignSystem>, b: &Arc<SignSystem>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl SemioticMorphism {
    pub fn new(name: impl Into<String>, source: Arc<SignSystem>, target: Arc<SignSystem>) -> Self {
        Self {
            name: name.into(),
            source,
            target,
            sort_map: BTreeMap::new(),
            ctor_map: BTreeMap::new(),
            rel_map: BTreeMap::new(),
        }
    }

    /// Maps every symbol of `sys` to itself.
    pub fn identity(sys: Arc<SignSystem>) -> Self {
        let mut m = Self::new(format!("id_{}", sys.name()), sys.clone(), sys.clone());
        for s in sys.sorts() {
            m.sort_map.insert(s.name.clone(), s.name.clone());
        }
        for c in sys.constructors() {
            m.ctor_map.insert(c.name.clone(), c.name.clone());
        }
        for r in sys.relations() {
            m.rel_map.insert(r.name.clone(), r.name.clone());
        }
        m
    }

    pub fn map_sort(mut self, from: &str, to: &str) -> Self {
        self.sort_map.insert(from.into(), to.into());
        self
    }
    pub fn map_ctor(mut self, from: &str, to: &str) -> Self {
        self.ctor_map.insert(from.into(), to.into());
        self
    }
    pub fn map_rel(mut self, from: &str, to: &str) -> Self {
        self.rel_map.insert(from.into(), to.into());
        self
    }
    pub fn unmap_sort(mut self, from: &str) -> Self {
        self.sort_map.remove(from);
        self
    }
    pub fn unmap_ctor(mut self, from: &str) -> Self {
        self.ctor_map.remove(from);
        self
    }
    pub fn unmap_rel(mut self, from: &str) -> Self {
        self.rel_map.remove(from);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn source(&self) -> &Arc<SignSystem> {
        &self.source
    }
    pub fn target(&self) -> &Arc<SignSystem> {
        &self.target
    }
    pub fn sort_map(&self) -> &BTreeMap<String, String> {
        &self.sort_map
    }
    pub fn ctor_map(&self) -> &BTreeMap<String, String> {
        &self.ctor_map
    }
    pub fn rel_map(&self) -> &BTreeMap<String, String> {
        &self.rel_map
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Swaps source and target and inverts every map; `None` unless all
    /// three maps are injective.
    pub fn inverse(&self) -> Option<SemioticMorphism> {
        fn invert(map: &BTreeMap<String, String>) -> Option<BTreeMap<String, String>> {
            let mut inv = BTreeMap::new();
            for (k, v) in map {
                if inv.insert(v.clone(), k.clone()).is_some() {
                    return None;
                }
            }
            Some(inv)
        }
        Some(SemioticMorphism {
            name: format!("{}_inv", self.name),
            source: self.target.clone(),
            target: self.source.clone(),
            sort_map: invert(&self.sort_map)?,
            ctor_map: invert(&self.ctor_map)?,
            rel_map: invert(&self.rel_map)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MorphismCode {
    UnknownSourceSymbol,
    UnknownTargetSymbol,
    DataSortChanged,
    SortKindChanged,
    OrderBroken,
    ArityMismatch,
    ResultSortMismatch,
    ArgSortMismatch,
}

impl MorphismCode {
    pub fn as_str(self) -> &'static str {
        match self {
            MorphismCode::UnknownSourceSymbol => "UNKNOWN_SOURCE_SYMBOL",
            MorphismCode::UnknownTargetSymbol => "UNKNOWN_TARGET_SYMBOL",
            MorphismCode::DataSortChanged => "DATA_SORT_CHANGED",
            MorphismCode::SortKindChanged => "SORT_KIND_CHANGED",
            MorphismCode::OrderBroken => "ORDER_BROKEN",
            MorphismCode::ArityMismatch => "ARITY_MISMATCH",
            MorphismCode::ResultSortMismatch => "RESULT_SORT_MISMATCH",
            MorphismCode::ArgSortMismatch => "ARG_SORT_MISMATCH",
        }
    }
}

impl fmt::Display for MorphismCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDiagnostic {
    pub code: MorphismCode,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismReport {
    pub valid: bool,
    pub diagnostics: Vec<MorphismDiagnostic>,
    pub is_isomorphism: bool,
    pub is_level_preserving: bool,
}

fn preservation_diagnostics(m: &SemioticMorphism) -> Vec<MorphismDiagnostic> {
    let (src, tgt) = (&*m.source, &*m.target);
    let mut out = Vec::new();
    let mut push = |code, message: String| out.push(MorphismDiagnostic { code, message });

    let mut symbols_ok = true;
    for (kind, map, in_src, in_tgt) in [
        (
            "sort",
            &m.sort_map,
            &(|s: &str| src.sort(s).is_some()) as &dyn Fn(&str) -> bool,
            &(|s: &str| tgt.sort(s).is_some()) as &dyn Fn(&str) -> bool,
        ),
        (
            "constructor",
            &m.ctor_map,
            &|s: &str| src.constructor(s).is_some(),
            &|s: &str| tgt.constructor(s).is_some(),
        ),
        (
            "relation",
            &m.rel_map,
            &|s: &str| src.relation(s).is_some(),
            &|s: &str| tgt.relation(s).is_some(),
        ),
    ] {
        for (k, v) in map {
            if !in_src(k) {
                symbols_ok = false;
                push(
                    MorphismCode::UnknownSourceSymbol,
                    format!("{kind} `{k}` is not declared in `{}`", src.name()),
                );
            }
            if !in_tgt(v) {
                symbols_ok = false;
                push(
                    MorphismCode::UnknownTargetSymbol,
                    format!("{kind} `{v}` is not declared in `{}`", tgt.name()),
                );
            }
        }
    }
    if !symbols_ok {
        return out;
    }

    // Data sorts are fixed points; sign sorts stay sign sorts.
    for (s, t) in &m.sort_map {
        let from = src.sort(s).expect("checked");
        let to = tgt.sort(t).expect("checked");
        match (from.kind, to.kind) {
            (SortKind::Data, SortKind::Data) if s == t => {}
            (SortKind::Data, _) => push(
                MorphismCode::DataSortChanged,
                format!("data sort `{s}` is mapped to `{t}`"),
            ),
            (SortKind::Sign(_), SortKind::Data) => push(
                MorphismCode::SortKindChanged,
                format!("sign sort `{s}` is mapped to data sort `{t}`"),
            ),
            (SortKind::Sign(_), SortKind::Sign(_)) => {}
        }
    }

    for (s1, t1) in &m.sort_map {
        for (s2, t2) in &m.sort_map {
            if s1 != s2 && src.leq(s1, s2) && !tgt.leq(t1, t2) {
                push(
                    MorphismCode::OrderBroken,
                    format!("`{s1} ≤ {s2}` holds but `{t1} ≤ {t2}` does not"),
                );
            }
        }
    }

    let check_signature = |out: &mut Vec<MorphismDiagnostic>,
                           kind: &str,
                           name: &str,
                           image: &str,
                           src_args: &[String],
                           tgt_args: &[String]| {
        if src_args.len() != tgt_args.len() {
            out.push(MorphismDiagnostic {
                code: MorphismCode::ArityMismatch,
                message: format!(
                    "{kind} `{name}` has arity {}, its image `{image}` has {}",
                    src_args.len(),
                    tgt_args.len()
                ),
            });
            return;
        }
        for (i, (a, b)) in src_args.iter().zip(tgt_args).enumerate() {
            if let Some(mapped) = m.sort_map.get(a) {
                if mapped != b {
                    out.push(MorphismDiagnostic {
                        code: MorphismCode::ArgSortMismatch,
                        message: format!(
                            "argument {i} of {kind} `{name}` maps to `{mapped}`, `{image}` expects `{b}`"
                        ),
                    });
                }
            }
        }
    };

    for (c, image) in &m.ctor_map {
        let from = src.constructor(c).expect("checked");
        let to = tgt.constructor(image).expect("checked");
        check_signature(&mut out, "constructor", c, image, &from.arg_sorts, &to.arg_sorts);
        if let Some(mapped) = m.sort_map.get(&from.result_sort) {
            if mapped != &to.result_sort {
                out.push(MorphismDiagnostic {
                    code: MorphismCode::ResultSortMismatch,
                    message: format!(
                        "result of `{c}` maps to `{mapped}`, `{image}` builds `{}`",
                        to.result_sort
                    ),
                });
            }
        }
    }
    for (r, image) in &m.rel_map {
        let from = src.relation(r).expect("checked");
        let to = tgt.relation(image).expect("checked");
        check_signature(&mut out, "relation", r, image, &from.arg_sorts, &to.arg_sorts);
    }
    out
}

/// Checks the preservation conditions and classifies the morphism.
pub fn validate_morphism(m: &SemioticMorphism) -> MorphismReport {
    let diagnostics = preservation_diagnostics(m);
    let valid = diagnostics.is_empty();
    MorphismReport {
        valid,
        is_isomorphism: valid && iso_unchecked(m),
        is_level_preserving: valid && level_preserving_unchecked(m),
        diagnostics,
    }
}

fn require_valid(m: &SemioticMorphism) -> Result<(), MorphismError> {
    if preservation_diagnostics(m).is_empty() {
        Ok(())
    } else {
        Err(MorphismError::InvalidMorphism(m.name.clone()))
    }
}

fn bijective<'a>(
    map: &BTreeMap<String, String>,
    domain: impl Iterator<Item = &'a str>,
    codomain: impl Iterator<Item = &'a str>,
) -> bool {
    let domain: BTreeSet<&str> = domain.collect();
    let codomain: BTreeSet<&str> = codomain.collect();
    let keys: BTreeSet<&str> = map.keys().map(String::as_str).collect();
    let image: BTreeSet<&str> = map.values().map(String::as_str).collect();
    keys == domain && image == codomain && image.len() == map.len()
}

fn iso_unchecked(m: &SemioticMorphism) -> bool {
    let (src, tgt) = (&m.source, &m.target);
    let total_bijective = bijective(
        &m.sort_map,
        src.sorts().iter().map(|s| s.name.as_str()),
        tgt.sorts().iter().map(|s| s.name.as_str()),
    ) && bijective(
        &m.ctor_map,
        src.constructors().iter().map(|c| c.name.as_str()),
        tgt.constructors().iter().map(|c| c.name.as_str()),
    ) && bijective(
        &m.rel_map,
        src.relations().iter().map(|r| r.name.as_str()),
        tgt.relations().iter().map(|r| r.name.as_str()),
    );
    if !total_bijective {
        return false;
    }
    let Some(inv) = m.inverse() else {
        return false;
    };
    preservation_diagnostics(&inv).is_empty()
        && level_preserving_unchecked(m)
        && level_preserving_unchecked(&inv)
}

/// Total, bijective on every symbol class, with a valid inverse, and an order
/// isomorphism on constructor levels.
pub fn is_isomorphism(m: &SemioticMorphism) -> Result<bool, MorphismError> {
    require_valid(m)?;
    Ok(iso_unchecked(m))
}

fn level_preserving_unchecked(m: &SemioticMorphism) -> bool {
    let levels: Vec<(i64, i64)> = m
        .ctor_map
        .iter()
        .filter_map(|(c, image)| {
            Some((
                m.source.constructor(c)?.level,
                m.target.constructor(image)?.level,
            ))
        })
        .collect();
    levels.iter().all(|&(a1, b1)| {
        levels
            .iter()
            .all(|&(a2, b2)| a1 > a2 || b1 <= b2)
    })
}

/// Monotone on constructor levels: `level(c1) ≤ level(c2)` implies the same
/// for the images. Collapsing levels is allowed, inverting them is not.
pub fn is_level_preserving(m: &SemioticMorphism) -> Result<bool, MorphismError> {
    require_valid(m)?;
    Ok(level_preserving_unchecked(m))
}

/// `m2 ∘ m1`: apply `m1` first. Each map is defined where both parts are.
pub fn compose(
    m2: &SemioticMorphism,
    m1: &SemioticMorphism,
) -> Result<SemioticMorphism, MorphismError> {
    if !same_system(&m1.target, &m2.source) {
        return Err(MorphismError::SystemMismatch {
            expected: m1.target.name().to_string(),
            found: m2.source.name().to_string(),
        });
    }
    fn chain(
        first: &BTreeMap<String, String>,
        second: &BTreeMap<String, String>,
    ) -> BTreeMap<String, String> {
        first
            .iter()
            .filter_map(|(k, mid)| second.get(mid).map(|v| (k.clone(), v.clone())))
            .collect()
    }
    Ok(SemioticMorphism {
        name: format!("{}_then_{}", m1.name, m2.name),
        source: m1.source.clone(),
        target: m2.target.clone(),
        sort_map: chain(&m1.sort_map, &m2.sort_map),
        ctor_map: chain(&m1.ctor_map, &m2.ctor_map),
        rel_map: chain(&m1.rel_map, &m2.rel_map),
    })
}

fn translate_term(m: &SemioticMorphism, term: &SignTerm) -> Option<SignTerm> {
    match term {
        SignTerm::App { ctor, args } => {
            let image = m.ctor_map.get(ctor)?;
            let args = args
                .iter()
                .map(|a| translate_term(m, a))
                .collect::<Option<Vec<_>>>()?;
            Some(SignTerm::App {
                ctor: image.clone(),
                args,
            })
        }
        lit => {
            let sort = lit.literal_kind()?.sort_name();
            m.sort_map.contains_key(sort).then(|| lit.clone())
        }
    }
}

/// Translates a configuration along `m`. Terms using any unmapped symbol are
/// dropped, and so are tuples whose relation is unmapped or whose arguments
/// did not survive. Anything that would be ill-sorted in the target is
/// dropped as well, so the result is always a valid target configuration.
pub fn apply_morphism(
    m: &SemioticMorphism,
    cfg: &Configuration,
) -> Result<Configuration, MorphismError> {
    require_valid(m)?;
    if !same_system(cfg.system(), &m.source) {
        return Err(MorphismError::SystemMismatch {
            expected: m.source.name().to_string(),
            found: cfg.system().name().to_string(),
        });
    }
    let mut out = Configuration::new(cfg.name(), m.target.clone());
    for (name, term) in cfg.terms() {
        if let Some(t) = translate_term(m, term) {
            if m.target.well_sorted(&t).is_ok() {
                out.insert_term_unchecked(name.clone(), t);
            }
        }
    }
    for tuple in cfg.tuples() {
        let Some(rel) = m.rel_map.get(&tuple.relation) else {
            continue;
        };
        let translated = Tuple {
            relation: rel.clone(),
            args: tuple.args.clone(),
        };
        // add_tuple re-checks arity and argument sorts in the target.
        let _ = out.add_tuple(translated);
    }
    Ok(out)
}

fn tuple_sides(cfg: &Configuration) -> impl Iterator<Item = (&Tuple, bool, bool, bool)> {
    let boundaries = cfg.term_boundaries();
    cfg.tuples().iter().map(move |t| {
        let mut product = false;
        let mut env = false;
        let mut all_product = true;
        for a in &t.args {
            match boundaries.get(a.as_str()).copied().flatten() {
                Some(Boundary::Product) => product = true,
                Some(Boundary::Environment) => {
                    env = true;
                    all_product = false;
                }
                None => all_product = false,
            }
        }
        (t, product, env, all_product)
    })
}

/// ε: number of tuples with at least one product-side and at least one
/// environment-side argument.
pub fn epsilon(cfg: &Configuration) -> usize {
    tuple_sides(cfg).filter(|&(_, p, e, _)| p && e).count()
}

/// Number of distinct relations among the cross-boundary tuples.
pub fn epsilon_relation_types(cfg: &Configuration) -> usize {
    tuple_sides(cfg)
        .filter(|&(_, p, e, _)| p && e)
        .map(|(t, ..)| t.relation.as_str())
        .collect::<BTreeSet<_>>()
        .len()
}

/// Tuples whose arguments are all product-side.
pub fn synchronic_variety(cfg: &Configuration) -> usize {
    tuple_sides(cfg).filter(|&(.., all)| all).count()
}

/// Strict decrease of ε from `before` to `after`.
pub fn is_natural(before: &Configuration, after: &Configuration) -> bool {
    epsilon(before) > epsilon(after)
}

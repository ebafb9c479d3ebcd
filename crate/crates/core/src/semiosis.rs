//! Basic semiotic components and the two life-cycle semiosis laws.
//!
//! A component takes a source configuration through an internal step list
//! (variation, selection and endomorphic translations) and then branches into
//! one of several probability-weighted morphisms. Sequences of components are
//! checked for Law I (some component is not purely isomorphic and some branch
//! breaks the level order) and Law II (a branch is natural when it strictly
//! lowers ε).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::morphism::{
    apply_morphism, epsilon, is_isomorphism, is_level_preserving, same_system, validate_morphism,
    MorphismError, SemioticMorphism,
};
use crate::sign_algebra::{
    constraints_by_rank, tuple_matches, Atom, Configuration, ConstraintBody, SignSystem, SignTerm,
    Tuple,
};

pub use crate::morphism::synchronic_variety;

/// Absolute tolerance on the branch probability sum.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Seed used when a component's steps are run to probe their effect.
pub const PROBE_SEED: u64 = 0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemiosisError {
    #[error("branch probabilities sum to {sum}, not 1")]
    ProbSum { sum: f64 },
    #[error("branch {index} has non-positive probability {p}")]
    NonpositiveProb { index: usize, p: f64 },
    #[error("t2 = {t2} must be later than t1 = {t1}")]
    TimeOrder { t1: i64, t2: i64 },
    #[error("step {step} leaves the component's sign system")]
    ClosureViolation { step: usize },
    #[error("step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },
    #[error("a component needs at least one branch")]
    NoBranches,
    #[error("branch {index}: {reason}")]
    InvalidBranch { index: usize, reason: String },
    #[error("branch {branch} of component {component} does not lead to the next component's system")]
    ChainMismatch { component: usize, branch: usize },
    #[error("component {component} starts before its predecessor ends")]
    SequenceTimeOrder { component: usize },
    #[error("component {component} has {branches} branch(es); index {index} is out of range")]
    IndexOutOfRange {
        component: usize,
        index: usize,
        branches: usize,
    },
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

impl SemiosisError {
    pub fn code(&self) -> &'static str {
        match self {
            SemiosisError::ProbSum { .. } => "PROB_SUM",
            SemiosisError::NonpositiveProb { .. } => "NONPOSITIVE_PROB",
            SemiosisError::TimeOrder { .. } => "TIME_ORDER",
            SemiosisError::ClosureViolation { .. } => "CLOSURE_VIOLATION",
            SemiosisError::InvalidStep { .. } => "INVALID_STEP",
            SemiosisError::NoBranches => "NO_BRANCHES",
            SemiosisError::InvalidBranch { .. } => "INVALID_BRANCH",
            SemiosisError::ChainMismatch { .. } => "CHAIN_MISMATCH",
            SemiosisError::SequenceTimeOrder { .. } => "TIME_ORDER",
            SemiosisError::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            SemiosisError::LengthMismatch { .. } => "LENGTH_MISMATCH",
            SemiosisError::Morphism(e) => e.code(),
        }
    }
}

fn sort_of(cfg: &Configuration, name: &str) -> Option<String> {
    cfg.term_sort(name).ok()
}

fn fresh_name(taken: &BTreeSet<String>, base: &str, counter: &mut BTreeMap<String, usize>) -> String {
    let n = counter.entry(base.to_string()).or_insert(0);
    loop {
        *n += 1;
        let candidate = format!("{base}_{n}");
        if !taken.contains(&candidate) {
            return candidate;
        }
    }
}

/// Upper bound on the terms one variation call may add. Constructors that
/// take their own result sort make the term space grow doubly exponentially
/// with depth; enumeration stops, deterministically, at this many new terms.
pub const MAX_VARIATION_TERMS: usize = 4096;

/// Lazily walks the Cartesian product of `sizes`, first position varying
/// slowest.
struct MixedRadix {
    sizes: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MixedRadix {
    fn new(sizes: Vec<usize>) -> Self {
        let next = (!sizes.contains(&0)).then(|| vec![0; sizes.len()]);
        Self { sizes, next }
    }
}

impl Iterator for MixedRadix {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.sizes[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(cur)
    }
}

/// Decodes position `index` of the Cartesian product of `sizes`.
fn decode(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        out[i] = index % sizes[i];
        index /= sizes[i];
    }
    out
}

/// Generates variety without leaving the sign system.
///
/// Adds every well-sorted ground term buildable in `depth_bound` rounds from
/// the existing terms, the literals occurring in them and the declared
/// constructors (at most [`MAX_VARIATION_TERMS`] of them), then adds up to
/// `relation_budget` new tuples drawn uniformly from all well-sorted
/// candidates by a generator seeded with `seed`.
pub fn variation(
    cfg: &Configuration,
    depth_bound: u32,
    relation_budget: u32,
    seed: u64,
) -> Configuration {
    let sys = cfg.system().clone();
    let mut out = cfg.clone();

    let mut literals: BTreeMap<&str, BTreeMap<String, SignTerm>> = BTreeMap::new();
    for term in cfg.terms().values() {
        term.walk(&mut |t| {
            if let Some(kind) = t.literal_kind() {
                literals
                    .entry(kind.sort_name())
                    .or_default()
                    .insert(t.to_string(), t.clone());
            }
        });
    }

    let mut ctors: Vec<_> = sys.constructors().iter().collect();
    ctors.sort_by(|a, b| (a.level, a.priority, &a.name).cmp(&(b.level, b.priority, &b.name)));

    let mut seen: BTreeSet<String> = out.terms().values().map(|t| t.to_string()).collect();
    let mut taken: BTreeSet<String> = out.terms().keys().cloned().collect();
    let mut counters = BTreeMap::new();

    let mut generated = 0usize;
    'rounds: for _ in 0..depth_bound {
        let available: Vec<(String, String, SignTerm)> = out
            .terms()
            .iter()
            .filter_map(|(n, t)| Some((n.clone(), sort_of(&out, n)?, t.clone())))
            .collect();
        let mut added = Vec::new();
        for ctor in &ctors {
            let choices: Vec<Vec<SignTerm>> = ctor
                .arg_sorts
                .iter()
                .map(|arg| match sys.sort(arg) {
                    Some(d) if d.is_data() => literals
                        .get(arg.as_str())
                        .map(|m| m.values().cloned().collect())
                        .unwrap_or_default(),
                    _ => available
                        .iter()
                        .filter(|(_, s, _)| sys.leq(s, arg))
                        .map(|(_, _, t)| t.clone())
                        .collect(),
                })
                .collect();
            for pick in MixedRadix::new(choices.iter().map(Vec::len).collect()) {
                let args = pick.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
                let term = SignTerm::app(ctor.name.clone(), args);
                if sys.well_sorted(&term).is_err() || !seen.insert(term.to_string()) {
                    continue;
                }
                let name = fresh_name(&taken, &ctor.name, &mut counters);
                taken.insert(name.clone());
                added.push((name, term));
                generated += 1;
                if generated == MAX_VARIATION_TERMS {
                    break;
                }
            }
            if generated == MAX_VARIATION_TERMS {
                break;
            }
        }
        let exhausted = added.is_empty() || generated == MAX_VARIATION_TERMS;
        for (n, t) in added {
            out.insert_term_unchecked(n, t);
        }
        if exhausted {
            break 'rounds;
        }
    }

    if relation_budget > 0 {
        let sorted_terms: Vec<(String, String)> = out
            .terms()
            .keys()
            .filter_map(|n| Some((n.clone(), sort_of(&out, n)?)))
            .collect();
        // Candidate space: every relation's argument product, relations by
        // name, concatenated. Indices are sampled instead of materialised.
        let mut rels: Vec<_> = sys.relations().iter().collect();
        rels.sort_by(|a, b| a.name.cmp(&b.name));
        let mut spaces: Vec<(String, Vec<Vec<String>>, usize)> = Vec::new();
        let mut total = 0usize;
        for rel in rels {
            let choices: Vec<Vec<String>> = rel
                .arg_sorts
                .iter()
                .map(|arg| {
                    sorted_terms
                        .iter()
                        .filter(|(_, s)| sys.leq(s, arg))
                        .map(|(n, _)| n.clone())
                        .collect()
                })
                .collect();
            let size = choices
                .iter()
                .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
                .unwrap_or(usize::MAX / 2);
            total = total.saturating_add(size);
            spaces.push((rel.name.clone(), choices, size));
        }
        let tuple_at = |mut i: usize| -> Tuple {
            for (name, choices, size) in &spaces {
                if i < *size {
                    let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
                    let args = decode(i, &sizes)
                        .iter()
                        .zip(choices)
                        .map(|(&k, c)| c[k].clone())
                        .collect();
                    return Tuple {
                        relation: name.clone(),
                        args,
                    };
                }
                i -= size;
            }
            unreachable!("index below the candidate total")
        };
        // Drawing budget + |existing| distinct indices in random order and
        // keeping the first `budget` new tuples gives a uniform subset of the
        // new candidates.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let want = (relation_budget as usize)
            .saturating_add(out.tuples().len())
            .min(total);
        let picked: Vec<Tuple> = rand::seq::index::sample(&mut rng, total, want)
            .iter()
            .map(tuple_at)
            .filter(|t| !out.tuples().contains(t))
            .take(relation_budget as usize)
            .collect();
        for t in picked {
            out.insert_tuple_unchecked(t);
        }
    }
    out
}

/// Result of selection: the repaired configuration plus the REQUIRE
/// constraints that deletion could not satisfy.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionOutcome {
    pub config: Configuration,
    pub unrepairable: Vec<String>,
}

impl SelectionOutcome {
    pub fn is_unrepairable(&self) -> bool {
        !self.unrepairable.is_empty()
    }
}

/// Rank-lexicographic repair by deletion.
///
/// Constraints are visited by ascending rank (ties by name). A violated
/// FORBID loses its matching tuples, a violated AT_MOST loses its
/// lexicographically greatest tuples until within bound. Deletions that would
/// break a REQUIRE already satisfied at a more important position are
/// skipped. Violated REQUIREs are reported, never repaired.
///
/// With `minimal_against`, terms that no tuple references and that are not in
/// the given baseline are removed afterwards.
pub fn selection(cfg: &Configuration, minimal_against: Option<&Configuration>) -> SelectionOutcome {
    let sys = cfg.system().clone();
    let mut out = cfg.clone();
    let mut protected: Vec<(&str, &[Atom])> = Vec::new();
    let mut unrepairable = Vec::new();

    let breaks_protected = |cfg: &Configuration, victim: &Tuple, protected: &[(&str, &[Atom])]| {
        protected.iter().any(|(rel, pattern)| {
            *rel == victim.relation
                && tuple_matches(victim, pattern, cfg)
                && cfg
                    .tuples()
                    .iter()
                    .filter(|t| t.relation == *rel && tuple_matches(t, pattern, cfg))
                    .count()
                    <= 1
        })
    };

    for c in constraints_by_rank(&sys) {
        match &c.body {
            ConstraintBody::Forbid { relation, pattern } => {
                let matches: Vec<Tuple> = out
                    .tuples()
                    .iter()
                    .filter(|t| &t.relation == relation && tuple_matches(t, pattern, &out))
                    .cloned()
                    .collect();
                for t in matches {
                    if !breaks_protected(&out, &t, &protected) {
                        out.remove_tuple(&t);
                    }
                }
            }
            ConstraintBody::AtMost { relation, count } => {
                let mut members: Vec<(String, Tuple)> = out
                    .tuples()
                    .iter()
                    .filter(|t| &t.relation == relation)
                    .map(|t| (t.to_string(), t.clone()))
                    .collect();
                members.sort_by(|a, b| b.0.cmp(&a.0));
                let mut remaining = members.len();
                for (_, t) in members {
                    if remaining <= *count {
                        break;
                    }
                    if !breaks_protected(&out, &t, &protected) {
                        out.remove_tuple(&t);
                        remaining -= 1;
                    }
                }
            }
            ConstraintBody::Require { relation, pattern } => {
                let satisfied = out
                    .tuples()
                    .iter()
                    .any(|t| &t.relation == relation && tuple_matches(t, pattern, &out));
                if satisfied {
                    protected.push((relation.as_str(), pattern.as_slice()));
                } else {
                    unrepairable.push(c.name.clone());
                }
            }
        }
    }

    if let Some(baseline) = minimal_against {
        let referenced: BTreeSet<String> = out
            .tuples()
            .iter()
            .flat_map(|t| t.args.iter().cloned())
            .collect();
        out.retain_terms(|name, _| referenced.contains(name) || baseline.terms().contains_key(name));
    }

    SelectionOutcome {
        config: out,
        unrepairable,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SemioticStep {
    Variation {
        depth_bound: u32,
        relation_budget: u32,
    },
    Selection {
        minimality: bool,
    },
    Morphism(Arc<SemioticMorphism>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub morphism: Arc<SemioticMorphism>,
    pub probability: f64,
}

impl Branch {
    pub fn new(morphism: Arc<SemioticMorphism>, probability: f64) -> Self {
        Self {
            morphism,
            probability,
        }
    }

    pub fn target_system(&self) -> &Arc<SignSystem> {
        self.morphism.target()
    }
}

/// `P_k(M_k : f[Ξ] → Ξ')`: internal steps `f` on a source configuration,
/// followed by one of several probability-weighted branch morphisms.
#[derive(Clone, Debug, PartialEq)]
pub struct BasicComponent {
    source: Configuration,
    steps: Vec<SemioticStep>,
    branches: Vec<Branch>,
    t1: i64,
    t2: i64,
}

/// Configuration after the internal steps, and whether a variation or
/// selection step changed anything along the way.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRun {
    pub config: Configuration,
    pub generative_change: bool,
}

fn step_seed(seed: u64, step: usize) -> u64 {
    seed ^ (step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

impl BasicComponent {
    pub fn source(&self) -> &Configuration {
        &self.source
    }
    pub fn system(&self) -> &Arc<SignSystem> {
        self.source.system()
    }
    pub fn steps(&self) -> &[SemioticStep] {
        &self.steps
    }
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }
    pub fn t1(&self) -> i64 {
        self.t1
    }
    pub fn t2(&self) -> i64 {
        self.t2
    }

    /// Runs the internal steps on `cfg`, which must be over this component's
    /// system.
    pub fn run_steps_on(&self, cfg: &Configuration, seed: u64) -> Result<StepRun, SemiosisError> {
        let mut current = cfg.clone();
        let mut generative_change = false;
        for (i, step) in self.steps.iter().enumerate() {
            let next = match step {
                SemioticStep::Variation {
                    depth_bound,
                    relation_budget,
                } => {
                    let v = variation(&current, *depth_bound, *relation_budget, step_seed(seed, i));
                    generative_change |= v != current;
                    v
                }
                SemioticStep::Selection { minimality } => {
                    let s = selection(&current, minimality.then_some(cfg)).config;
                    generative_change |= s != current;
                    s
                }
                SemioticStep::Morphism(m) => apply_morphism(m, &current)?,
            };
            current = next;
        }
        Ok(StepRun {
            config: current,
            generative_change,
        })
    }

    pub fn run_steps(&self, seed: u64) -> Result<StepRun, SemiosisError> {
        self.run_steps_on(&self.source, seed)
    }
}

/// Builds a component after checking every field invariant.
pub fn make_component(
    source: Configuration,
    steps: Vec<SemioticStep>,
    branches: Vec<Branch>,
    t1: i64,
    t2: i64,
) -> Result<BasicComponent, SemiosisError> {
    if t2 <= t1 {
        return Err(SemiosisError::TimeOrder { t1, t2 });
    }
    if branches.is_empty() {
        return Err(SemiosisError::NoBranches);
    }
    for (index, b) in branches.iter().enumerate() {
        if !(b.probability > 0.0) {
            return Err(SemiosisError::NonpositiveProb {
                index,
                p: b.probability,
            });
        }
    }
    let sum: f64 = branches.iter().map(|b| b.probability).sum();
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(SemiosisError::ProbSum { sum });
    }
    let system = source.system().clone();
    for (step, s) in steps.iter().enumerate() {
        match s {
            SemioticStep::Variation { depth_bound, .. } if *depth_bound < 1 => {
                return Err(SemiosisError::InvalidStep {
                    step,
                    reason: "depth bound must be at least 1".into(),
                });
            }
            SemioticStep::Morphism(m) => {
                if !same_system(m.source(), &system) || !same_system(m.target(), &system) {
                    return Err(SemiosisError::ClosureViolation { step });
                }
                if !validate_morphism(m).valid {
                    return Err(SemiosisError::InvalidStep {
                        step,
                        reason: format!("morphism `{}` is not valid", m.name()),
                    });
                }
            }
            _ => {}
        }
    }
    for (index, b) in branches.iter().enumerate() {
        if !same_system(b.morphism.source(), &system) {
            return Err(SemiosisError::InvalidBranch {
                index,
                reason: format!(
                    "morphism `{}` does not start from `{}`",
                    b.morphism.name(),
                    system.name()
                ),
            });
        }
        if !validate_morphism(&b.morphism).valid {
            return Err(SemiosisError::InvalidBranch {
                index,
                reason: format!("morphism `{}` is not valid", b.morphism.name()),
            });
        }
    }
    Ok(BasicComponent {
        source,
        steps,
        branches,
        t1,
        t2,
    })
}

/// Not every transformation of the component is an isomorphism.
///
/// Variation and selection steps count as non-isomorphic when they change the
/// component's own source configuration during a probe run.
pub fn is_well_defined(c: &BasicComponent) -> bool {
    let non_iso = |m: &SemioticMorphism| !matches!(is_isomorphism(m), Ok(true));
    if c.branches.iter().any(|b| non_iso(&b.morphism)) {
        return true;
    }
    if c.steps.iter().any(|s| matches!(s, SemioticStep::Morphism(m) if non_iso(m))) {
        return true;
    }
    c.run_steps(PROBE_SEED)
        .map(|run| run.generative_change)
        .unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemiosisSequence {
    name: String,
    components: Vec<BasicComponent>,
}

impl SemiosisSequence {
    pub fn new(
        name: impl Into<String>,
        components: Vec<BasicComponent>,
    ) -> Result<Self, SemiosisError> {
        for (n, pair) in components.windows(2).enumerate() {
            let (cur, next) = (&pair[0], &pair[1]);
            for (branch, b) in cur.branches.iter().enumerate() {
                if !same_system(b.target_system(), next.system()) {
                    return Err(SemiosisError::ChainMismatch {
                        component: n,
                        branch,
                    });
                }
            }
            if next.t1 < cur.t2 {
                return Err(SemiosisError::SequenceTimeOrder { component: n + 1 });
            }
        }
        Ok(Self {
            name: name.into(),
            components,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn components(&self) -> &[BasicComponent] {
        &self.components
    }
    pub fn len(&self) -> usize {
        self.components.len()
    }
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The per-stage configurations Law II is judged on by default.
    pub fn designated_configs(&self) -> Vec<Configuration> {
        self.components.iter().map(|c| c.source.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchVerdict {
    pub component: usize,
    pub branch: usize,
    pub epsilon_before: usize,
    pub epsilon_after: usize,
    pub natural: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawOne {
    pub holds: bool,
    pub well_defined_witness: Option<usize>,
    pub level_break_witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub law1_holds: bool,
    pub well_defined_witness: Option<usize>,
    pub level_break_witness: Option<(usize, usize)>,
    pub law2_verdicts: Vec<BranchVerdict>,
}

impl LawReport {
    pub fn all_natural(&self) -> bool {
        self.law2_verdicts.iter().all(|v| v.natural)
    }
}

pub fn check_law_one(seq: &SemiosisSequence) -> LawOne {
    let well_defined_witness = seq.components.iter().position(is_well_defined);
    let level_break_witness = seq.components.iter().enumerate().find_map(|(n, c)| {
        c.branches
            .iter()
            .position(|b| matches!(is_level_preserving(&b.morphism), Ok(false)))
            .map(|k| (n, k))
    });
    LawOne {
        holds: well_defined_witness.is_some() && level_break_witness.is_some(),
        well_defined_witness,
        level_break_witness,
    }
}

/// Naturalness of every branch: ε after the internal steps against ε after
/// the branch morphism, starting from one designated configuration per stage.
pub fn check_law_two(
    seq: &SemiosisSequence,
    designated: &[Configuration],
) -> Result<Vec<BranchVerdict>, SemiosisError> {
    if designated.len() != seq.len() {
        return Err(SemiosisError::LengthMismatch {
            expected: seq.len(),
            found: designated.len(),
        });
    }
    let mut out = Vec::new();
    for (n, (c, cfg)) in seq.components.iter().zip(designated).enumerate() {
        let post_f = c.run_steps_on(cfg, PROBE_SEED)?.config;
        let before = epsilon(&post_f);
        for (k, b) in c.branches.iter().enumerate() {
            let after = epsilon(&apply_morphism(&b.morphism, &post_f)?);
            out.push(BranchVerdict {
                component: n,
                branch: k,
                epsilon_before: before,
                epsilon_after: after,
                natural: before > after,
            });
        }
    }
    Ok(out)
}

pub fn check_laws(
    seq: &SemiosisSequence,
    designated: &[Configuration],
) -> Result<LawReport, SemiosisError> {
    let one = check_law_one(seq);
    Ok(LawReport {
        law1_holds: one.holds,
        well_defined_witness: one.well_defined_witness,
        level_break_witness: one.level_break_witness,
        law2_verdicts: check_law_two(seq, designated)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub indices: Vec<usize>,
    pub configs: Vec<Configuration>,
}

/// Picks one branch per component with probability `P_k`, and realises the
/// configuration each choice produces from the component's source.
pub fn sample_trajectory(seq: &SemiosisSequence, seed: u64) -> Result<Trajectory, SemiosisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = Vec::with_capacity(seq.len());
    let mut configs = Vec::with_capacity(seq.len());
    for c in &seq.components {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = c.branches.len() - 1;
        for (k, b) in c.branches.iter().enumerate() {
            acc += b.probability;
            if u < acc {
                chosen = k;
                break;
            }
        }
        let post_f = c.run_steps(seed)?.config;
        configs.push(apply_morphism(&c.branches[chosen].morphism, &post_f)?);
        indices.push(chosen);
    }
    Ok(Trajectory { indices, configs })
}

/// Retrospective view: each component keeps only its observed branch, with
/// probability 1.
pub fn collapse_past(
    seq: &SemiosisSequence,
    observed: &[usize],
) -> Result<SemiosisSequence, SemiosisError> {
    if observed.len() != seq.len() {
        return Err(SemiosisError::LengthMismatch {
            expected: seq.len(),
            found: observed.len(),
        });
    }
    let components = seq
        .components
        .iter()
        .zip(observed)
        .enumerate()
        .map(|(n, (c, &k))| {
            let b = c.branches.get(k).ok_or(SemiosisError::IndexOutOfRange {
                component: n,
                index: k,
                branches: c.branches.len(),
            })?;
            Ok(BasicComponent {
                branches: vec![Branch::new(b.morphism.clone(), 1.0)],
                ..c.clone()
            })
        })
        .collect::<Result<Vec<_>, SemiosisError>>()?;
    SemiosisSequence::new(seq.name.clone(), components)
}

/// Number of structurally distinct configurations in a history.
pub fn diachronic_variety(trace: &[Configuration]) -> usize {
    trace
        .iter()
        .map(|c| (c.system().name().to_string(), c.canonical()))
        .collect::<BTreeSet<_>>()
        .len()
}

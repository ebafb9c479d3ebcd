use super::agent::Violation;
use crate::morphism::{epsilon, synchronic_variety};
use crate::semiosis::{selection, variation};
use crate::sign_algebra::{constraint_profile, Configuration};

fn admissible(c: &Configuration, eps_limit: usize) -> bool {
    constraint_profile(c)
        .iter()
        .filter(|e| e.rank == 0)
        .all(|e| e.satisfied)
        && epsilon(c) <= eps_limit
}

/// The product's response to environmental violations: a designer-side
/// variation and selection pass that keeps every rank-0 axiom and does not
/// increase cross-boundary interaction. Among admissible candidates the one
/// with the fewest product-side interactions wins, then fewest boundary
/// crossings, then canonical text. Without an environmental violation, or
/// without an admissible candidate, the configuration is returned unchanged.
pub fn adjust_configuration(cfg: &Configuration, violations: &[Violation], seed: u64) -> Configuration {
    if !violations.iter().any(|v| v.expectation.is_environmental()) {
        return cfg.clone();
    }
    let budget = cfg.tuples().len() as u32;
    let varied = variation(cfg, 2, budget, seed);
    let limit = epsilon(cfg);
    let mut candidates = Vec::new();
    for outcome in [selection(&varied, Some(cfg)), selection(cfg, Some(cfg))] {
        if !outcome.is_unrepairable() {
            candidates.push(outcome.config);
        }
    }
    candidates.push(cfg.clone());
    candidates
        .into_iter()
        .filter(|c| admissible(c, limit))
        .min_by(|a, b| {
            (synchronic_variety(a), epsilon(a), a.canonical())
                .cmp(&(synchronic_variety(b), epsilon(b), b.canonical()))
        })
        .unwrap_or_else(|| cfg.clone())
        .renamed(cfg.name())
}

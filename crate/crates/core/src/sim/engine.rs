use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use thiserror::Error;

use super::adjust::adjust_configuration;
use super::agent::ExpectationAgent;
use super::cluster::cluster_agents;
use super::scenario::{validate_scenario, Scenario};
use super::trace::{ClusterRecord, EventRecord, SimTrace, ViolationRecord};
use crate::morphism::{epsilon, synchronic_variety};
use crate::sign_algebra::Configuration;

/// Relative standard deviation of functional parameter readings.
pub const PARAM_NOISE: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
}

impl SimError {
    pub fn code(&self) -> &'static str {
        match self {
            SimError::InvalidScenario(_) => "INVALID_SCENARIO",
        }
    }
}

struct ProductState {
    config: Arc<Configuration>,
    eps0: usize,
    eps: usize,
    agent: Option<(usize, ExpectationAgent)>,
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(d) => {
            let x: f64 = d.sample(rng);
            x as u64
        }
        Err(_) => 0,
    }
}

fn snapshot(scenario: &Scenario, states: &BTreeMap<&str, ProductState>, t: u64) -> ClusterRecord {
    let agents: Vec<(String, Vec<f64>)> = scenario
        .products
        .iter()
        .filter(|p| states[p.id.as_str()].agent.is_some())
        .filter_map(|p| {
            scenario
                .environment(&p.environment)
                .map(|e| (p.id.clone(), e.features.clone()))
        })
        .collect();
    // Scenario validation guarantees uniform dimensions and a positive tau.
    let assignments = cluster_agents(&agents, scenario.tau)
        .map(|c| c.assignments)
        .unwrap_or_default();
    ClusterRecord { t, assignments }
}

/// Runs the scenario for `horizon` ticks from a single seeded generator.
///
/// Each tick, every product in id order draws a Poisson event count per kind
/// with mean `base_rate * (1 + eps / max(1, eps0))`, where `eps` is the
/// product's current boundary-crossing count and `eps0` its initial one.
/// Functional parameters are read as `nominal * (1 + 0.02 z)`. The active
/// agent then judges the observations; with `adapt` on, the start of an
/// environmental violation episode triggers a configuration adjustment.
pub fn run(scenario: &Scenario, horizon: u64, seed: u64) -> Result<SimTrace, SimError> {
    let problems = validate_scenario(scenario);
    if !problems.is_empty() {
        return Err(SimError::InvalidScenario(problems));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut products: Vec<_> = scenario.products.iter().collect();
    products.sort_by(|a, b| a.id.cmp(&b.id));

    let mut states: BTreeMap<&str, ProductState> = products
        .iter()
        .map(|p| {
            let e = epsilon(&p.config);
            (
                p.id.as_str(),
                ProductState {
                    config: p.config.clone(),
                    eps0: e,
                    eps: e,
                    agent: None,
                },
            )
        })
        .collect();

    let mut trace = SimTrace {
        seed: Some(seed),
        horizon,
        ..SimTrace::default()
    };

    for t in 0..horizon {
        for p in &products {
            let st = states.get_mut(p.id.as_str()).unwrap();
            let active = scenario
                .agents
                .iter()
                .enumerate()
                .filter(|(_, a)| a.product == p.id && a.from_tick.unwrap_or(0) <= t)
                .max_by_key(|(i, a)| (a.from_tick.unwrap_or(0), *i))
                .map(|(i, _)| i);
            match (active, &st.agent) {
                (Some(i), Some((j, _))) if i == *j => {}
                (Some(i), _) => st.agent = Some((i, ExpectationAgent::new(scenario.agents[i].clone()))),
                (None, _) => st.agent = None,
            }
        }
        if t == 0 {
            trace.cluster_history.push(snapshot(scenario, &states, 0));
        }

        for p in &products {
            let env = scenario.environment(&p.environment).expect("validated");
            let st = states.get_mut(p.id.as_str()).unwrap();
            let factor = 1.0 + st.eps as f64 / st.eps0.max(1) as f64;
            let mut counts = BTreeMap::new();
            for (kind, base) in &env.base_rates {
                let n = poisson(&mut rng, base * factor);
                counts.insert(kind.clone(), n as f64);
                if n > 0 {
                    trace.events.push(EventRecord {
                        t,
                        product: p.id.clone(),
                        kind: kind.clone(),
                        mag: n as f64,
                    });
                }
            }
            let mut readings = BTreeMap::new();
            for (param, nominal) in &p.params {
                let z: f64 = rng.sample(StandardNormal);
                readings.insert(param.clone(), nominal * (1.0 + PARAM_NOISE * z));
            }

            if let Some((_, agent)) = st.agent.as_mut() {
                let fresh = agent.observe(t, &counts, &readings);
                for v in &fresh {
                    trace.violations.push(ViolationRecord {
                        t,
                        product: p.id.clone(),
                        expectation: v.expectation.to_string(),
                        observed: v.observed,
                    });
                }
                if scenario.adapt && fresh.iter().any(|v| v.expectation.is_environmental()) {
                    let adjust_seed: u64 = rng.random();
                    let next = adjust_configuration(&st.config, &fresh, adjust_seed);
                    st.eps = epsilon(&next);
                    st.config = Arc::new(next);
                }
            }
            trace
                .epsilon_series
                .entry(p.id.clone())
                .or_default()
                .push(st.eps);
        }

        if t + 1 == horizon && horizon > 1 {
            trace.cluster_history.push(snapshot(scenario, &states, t));
        }
    }

    for (id, st) in &states {
        trace.final_synchronic.insert(id.to_string(), synchronic_variety(&st.config));
        if let Some((_, a)) = &st.agent {
            trace.distinctions.insert(id.to_string(), a.distinctions().len());
        }
    }
    Ok(trace)
}

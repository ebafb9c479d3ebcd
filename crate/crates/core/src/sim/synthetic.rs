//! Ready-made scenarios: the bundled refrigerator and a clustered population
//! of simple products for grouping experiments.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::scenario::{AgentSpec, EnvironmentProfile, EventKind, Expectation, ProductSpec, Scenario};
use crate::dsl::{self, BlockList};

pub const REFRIGERATOR_SGN: &str = include_str!("../../data/refrigerator.sgn");
pub const REFRIGERATOR_HORIZON: u64 = 256;
pub const REFRIGERATOR_TREND_WINDOW: usize = 16;

/// The refrigerator scenario with adaptation switched on or off.
pub fn refrigerator_scenario(adapt: bool) -> Scenario {
    let (blocks, diags) = dsl::parse(REFRIGERATOR_SGN);
    assert!(diags.is_empty(), "bundled scenario is valid: {diags:?}");
    let mut s = (**blocks.scenario("kitchen_life").expect("bundled scenario")).clone();
    s.adapt = adapt;
    s
}

pub const CELL_SGN: &str = "
system Cell {
  sort Unit;
  sort Site [env];
  ctor unit() -> Unit @level 0;
  ctor site() -> Site @level 0;
  rel sits(Unit, Site);
}
config cell of Cell { u = unit(); s = site(); sits(u, s); }
";

pub const POPULATION_CENTERS: [[f64; 2]; 3] = [[0.0, 0.0], [20.0, 0.0], [0.0, 20.0]];
pub const POPULATION_SIZE: usize = 60;
pub const POPULATION_SPREAD: f64 = 0.1;
pub const POPULATION_TAU: f64 = 1.0;

/// A population together with the center each product was drawn around.
#[derive(Clone, Debug)]
pub struct ClusteredPopulation {
    pub scenario: Scenario,
    pub truth: BTreeMap<String, usize>,
}

/// 60 products split evenly over three environment centers at pairwise
/// distance 20 (ten times the default `tau` of 1), features jittered with
/// Gaussian noise of standard deviation `spread`. In each group 80% of the
/// products come from the group's majority manufacturer: `acme` for the first
/// two groups, `boreal` for the third.
pub fn clustered_population(seed: u64, spread: f64) -> ClusteredPopulation {
    let (blocks, diags) = dsl::parse(CELL_SGN);
    debug_assert!(diags.is_empty());
    let cfg = blocks.config("cell").expect("cell config").clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Scenario::new("population");
    s.tau = POPULATION_TAU;
    let mut truth = BTreeMap::new();
    let per_group = POPULATION_SIZE / POPULATION_CENTERS.len();
    for i in 0..POPULATION_SIZE {
        let group = i % POPULATION_CENTERS.len();
        let rank_in_group = i / POPULATION_CENTERS.len();
        let features: Vec<f64> = POPULATION_CENTERS[group]
            .iter()
            .map(|c| c + spread * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let majority = if group == 2 { "boreal" } else { "acme" };
        let minority = if group == 2 { "acme" } else { "boreal" };
        let manufacturer = if rank_in_group * 5 < per_group * 4 { majority } else { minority };
        let id = format!("p{i:02}");
        let env = format!("e{i:02}");
        s.environments.push(EnvironmentProfile {
            id: env.clone(),
            features,
            base_rates: BTreeMap::from([(EventKind::PartMovement, 2.0)]),
        });
        s.products.push(ProductSpec {
            id: id.clone(),
            config: cfg.clone(),
            environment: env,
            manufacturer: manufacturer.to_string(),
            params: BTreeMap::new(),
        });
        s.agents.push(AgentSpec {
            product: id.clone(),
            from_tick: None,
            weber_k: 0.1,
            window: 8,
            expectations: vec![Expectation::Environmental {
                kind: EventKind::PartMovement,
                low: 0.0,
                high: 100.0,
            }],
        });
        truth.insert(id, group);
    }
    ClusteredPopulation { scenario: s, truth }
}

/// Share of items whose cluster's majority true label matches their own.
pub fn purity(assignments: &BTreeMap<String, usize>, truth: &BTreeMap<String, usize>) -> f64 {
    if assignments.is_empty() {
        return 0.0;
    }
    let mut table: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for (id, c) in assignments {
        if let Some(t) = truth.get(id) {
            *table.entry(*c).or_default().entry(*t).or_default() += 1;
        }
    }
    let hits: usize = table.values().map(|row| row.values().max().copied().unwrap_or(0)).sum();
    hits as f64 / assignments.len() as f64
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::sign_algebra::Configuration;

/// Kind of product-environment interaction an agent can count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    PartMovement,
    ModeSwitch,
    Other(String),
}

impl EventKind {
    pub fn from_name(name: &str) -> Self {
        match name {
            "part_movement" => EventKind::PartMovement,
            "mode_switch" => EventKind::ModeSwitch,
            other => EventKind::Other(other.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            EventKind::PartMovement => "part_movement",
            EventKind::ModeSwitch => "mode_switch",
            EventKind::Other(s) => s,
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentProfile {
    pub id: String,
    pub features: Vec<f64>,
    /// Mean events per tick for each kind.
    pub base_rates: BTreeMap<EventKind, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductSpec {
    pub id: String,
    pub config: Arc<Configuration>,
    pub environment: String,
    pub manufacturer: String,
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expectation {
    Functional { param: String, low: f64, high: f64 },
    Environmental { kind: EventKind, low: f64, high: f64 },
}

impl Expectation {
    pub fn band(&self) -> (f64, f64) {
        match self {
            Expectation::Functional { low, high, .. }
            | Expectation::Environmental { low, high, .. } => (*low, *high),
        }
    }

    pub fn is_environmental(&self) -> bool {
        matches!(self, Expectation::Environmental { .. })
    }

    pub fn admits(&self, observed: f64) -> bool {
        let (lo, hi) = self.band();
        observed >= lo && observed <= hi
    }
}

/// Same text as the scenario syntax, e.g. `functional temp [2.0, 6.0]`.
impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Functional { param, low, high } => {
                write!(f, "functional {param} [{low:?}, {high:?}]")
            }
            Expectation::Environmental { kind, low, high } => {
                write!(f, "env {kind} [{low:?}, {high:?}]")
            }
        }
    }
}

/// Agent program for one product. A spec with `from_tick` replaces the
/// product's earlier program from that tick on (a code update).
#[derive(Clone, Debug, PartialEq)]
pub struct AgentSpec {
    pub product: String,
    pub from_tick: Option<u64>,
    pub weber_k: f64,
    pub window: usize,
    pub expectations: Vec<Expectation>,
}

pub const DEFAULT_WINDOW: usize = 16;
pub const DEFAULT_TAU: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub environments: Vec<EnvironmentProfile>,
    pub products: Vec<ProductSpec>,
    pub agents: Vec<AgentSpec>,
    pub adapt: bool,
    pub tau: f64,
}

impl Scenario {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            environments: vec![],
            products: vec![],
            agents: vec![],
            adapt: false,
            tau: DEFAULT_TAU,
        }
    }

    pub fn environment(&self, id: &str) -> Option<&EnvironmentProfile> {
        self.environments.iter().find(|e| e.id == id)
    }

    pub fn product(&self, id: &str) -> Option<&ProductSpec> {
        self.products.iter().find(|p| p.id == id)
    }

    /// The agent program in force for `product` at `tick`.
    pub fn agent_at(&self, product: &str, tick: u64) -> Option<&AgentSpec> {
        self.agents
            .iter()
            .filter(|a| a.product == product && a.from_tick.unwrap_or(0) <= tick)
            .max_by_key(|a| a.from_tick.unwrap_or(0))
    }

    pub fn manufacturers(&self) -> BTreeMap<String, String> {
        self.products
            .iter()
            .map(|p| (p.id.clone(), p.manufacturer.clone()))
            .collect()
    }
}

/// Every reason the scenario cannot be simulated; empty means valid.
pub fn validate_scenario(s: &Scenario) -> Vec<String> {
    let mut out = Vec::new();
    if !(s.tau > 0.0) {
        out.push(format!("cluster tau must be positive, found {}", s.tau));
    }
    let mut ids = BTreeSet::new();
    let dim = s.environments.first().map(|e| e.features.len());
    for e in &s.environments {
        if !ids.insert(&e.id) {
            out.push(format!("environment `{}` declared twice", e.id));
        }
        if Some(e.features.len()) != dim {
            out.push(format!(
                "environment `{}` has {} feature(s), expected {}",
                e.id,
                e.features.len(),
                dim.unwrap_or(0)
            ));
        }
        if e.features.iter().any(|x| !x.is_finite()) {
            out.push(format!("environment `{}` has a non-finite feature", e.id));
        }
        for (k, r) in &e.base_rates {
            if !(*r >= 0.0) || !r.is_finite() {
                out.push(format!("environment `{}` rate for `{k}` must be finite and ≥ 0", e.id));
            }
        }
    }
    let mut ids = BTreeSet::new();
    for p in &s.products {
        if !ids.insert(&p.id) {
            out.push(format!("product `{}` declared twice", p.id));
        }
        if s.environment(&p.environment).is_none() {
            out.push(format!("product `{}` refers to unknown environment `{}`", p.id, p.environment));
        }
        for e in p.config.validate() {
            out.push(format!("product `{}` configuration: {e}", p.id));
        }
    }
    for a in &s.agents {
        if s.product(&a.product).is_none() {
            out.push(format!("agent refers to unknown product `{}`", a.product));
        }
        if !(a.weber_k > 0.0 && a.weber_k <= 1.0) {
            out.push(format!("agent for `{}`: weber fraction must lie in (0, 1]", a.product));
        }
        if a.window == 0 {
            out.push(format!("agent for `{}`: window must be at least 1", a.product));
        }
        for e in &a.expectations {
            let (lo, hi) = e.band();
            if !(lo <= hi) {
                out.push(format!("agent for `{}`: empty band in `{e}`", a.product));
            }
        }
    }
    out
}

use std::collections::{BTreeMap, VecDeque};

use super::scenario::{AgentSpec, EventKind, Expectation};
use super::signal::detect_distinction;

/// A registered violation: which expectation, and the value that broke it.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub tick: u64,
    pub expectation: Expectation,
    pub observed: f64,
}

/// Product-embedded agent that compares observed signals with its
/// expectations. Environmental expectations are judged on the mean count per
/// tick over the trailing window and only once a full window has been seen.
#[derive(Clone, Debug)]
pub struct ExpectationAgent {
    spec: AgentSpec,
    history: BTreeMap<EventKind, VecDeque<f64>>,
    ticks_seen: usize,
    last_stimulus: BTreeMap<String, f64>,
    in_violation: Vec<bool>,
    violation_log: Vec<Violation>,
    distinction_log: Vec<(u64, String)>,
}

impl ExpectationAgent {
    pub fn new(spec: AgentSpec) -> Self {
        let n = spec.expectations.len();
        Self {
            spec,
            history: BTreeMap::new(),
            ticks_seen: 0,
            last_stimulus: BTreeMap::new(),
            in_violation: vec![false; n],
            violation_log: Vec::new(),
            distinction_log: Vec::new(),
        }
    }

    pub fn spec(&self) -> &AgentSpec {
        &self.spec
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violation_log
    }

    pub fn distinctions(&self) -> &[(u64, String)] {
        &self.distinction_log
    }

    fn window_mean(&self, kind: &EventKind) -> f64 {
        match self.history.get(kind) {
            Some(h) if !h.is_empty() => h.iter().sum::<f64>() / h.len() as f64,
            _ => 0.0,
        }
    }

    fn notice(&mut self, tick: u64, signal: String, value: f64) {
        let k = self.spec.weber_k;
        match self.last_stimulus.get(&signal) {
            Some(&prev) if !detect_distinction(prev, value, k) => {}
            Some(_) => {
                self.distinction_log.push((tick, signal.clone()));
                self.last_stimulus.insert(signal, value);
            }
            None => {
                self.last_stimulus.insert(signal, value);
            }
        }
    }

    /// Feeds one tick of observations and returns the violations whose episode
    /// started at this tick. Kinds absent from `counts` count as zero.
    pub fn observe(
        &mut self,
        tick: u64,
        counts: &BTreeMap<EventKind, f64>,
        params: &BTreeMap<String, f64>,
    ) -> Vec<Violation> {
        let window = self.spec.window.max(1);
        let mut kinds: Vec<EventKind> = counts.keys().cloned().collect();
        for e in &self.spec.expectations {
            if let Expectation::Environmental { kind, .. } = e {
                kinds.push(kind.clone());
            }
        }
        kinds.sort();
        kinds.dedup();
        for kind in kinds {
            let c = counts.get(&kind).copied().unwrap_or(0.0);
            let h = self.history.entry(kind.clone()).or_default();
            h.push_back(c);
            while h.len() > window {
                h.pop_front();
            }
            self.notice(tick, format!("env:{kind}"), c);
        }
        for (p, v) in params {
            self.notice(tick, format!("param:{p}"), *v);
        }
        self.ticks_seen += 1;

        let mut fresh = Vec::new();
        for i in 0..self.spec.expectations.len() {
            let observed = match &self.spec.expectations[i] {
                Expectation::Functional { param, .. } => match params.get(param) {
                    Some(v) => *v,
                    None => continue,
                },
                Expectation::Environmental { kind, .. } => {
                    if self.ticks_seen < window {
                        continue;
                    }
                    self.window_mean(kind)
                }
            };
            let ok = self.spec.expectations[i].admits(observed);
            if !ok && !self.in_violation[i] {
                let v = Violation {
                    tick,
                    expectation: self.spec.expectations[i].clone(),
                    observed,
                };
                self.violation_log.push(v.clone());
                fresh.push(v);
            }
            self.in_violation[i] = !ok;
        }
        fresh
    }
}

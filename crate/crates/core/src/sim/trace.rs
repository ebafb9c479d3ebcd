//! Simulation traces and their JSON-lines form. Each line is one record with
//! the tick first, e.g.
//! `{"t":3,"rec":"event","product":"fridge","kind":"part_movement","mag":4.0}`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::scenario::EventKind;
use super::signal::{trend_of_series, SignalError, Trend};

#[derive(Clone, Debug, PartialEq)]
pub struct EventRecord {
    pub t: u64,
    pub product: String,
    pub kind: EventKind,
    /// Number of events of this kind at this tick.
    pub mag: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViolationRecord {
    pub t: u64,
    pub product: String,
    pub expectation: String,
    pub observed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterRecord {
    pub t: u64,
    pub assignments: BTreeMap<String, usize>,
}

/// Everything a run produced. Traces read back from JSON lines carry only the
/// records; the per-product statistics are empty and `seed` is `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimTrace {
    pub seed: Option<u64>,
    pub horizon: u64,
    pub events: Vec<EventRecord>,
    pub violations: Vec<ViolationRecord>,
    pub cluster_history: Vec<ClusterRecord>,
    pub epsilon_series: BTreeMap<String, Vec<usize>>,
    pub final_synchronic: BTreeMap<String, usize>,
    pub distinctions: BTreeMap<String, usize>,
}

impl SimTrace {
    pub fn final_epsilon(&self, product: &str) -> Option<usize> {
        self.epsilon_series.get(product).and_then(|s| s.last().copied())
    }

    pub fn products(&self) -> BTreeSet<&str> {
        let mut out: BTreeSet<&str> = self.epsilon_series.keys().map(String::as_str).collect();
        out.extend(self.events.iter().map(|e| e.product.as_str()));
        out.extend(self.violations.iter().map(|v| v.product.as_str()));
        for c in &self.cluster_history {
            out.extend(c.assignments.keys().map(String::as_str));
        }
        out
    }

    /// Total event magnitude per tick for one product, over the whole horizon.
    pub fn interaction_series(&self, product: &str) -> Vec<f64> {
        let mut s = vec![0.0; self.horizon as usize];
        for e in self.events.iter().filter(|e| e.product == product) {
            if let Some(x) = s.get_mut(e.t as usize) {
                *x += e.mag;
            }
        }
        s
    }

    /// Mean events per tick for each kind, per product.
    pub fn mean_rates(&self) -> BTreeMap<String, BTreeMap<EventKind, f64>> {
        let mut out: BTreeMap<String, BTreeMap<EventKind, f64>> = BTreeMap::new();
        let kinds: BTreeSet<&EventKind> = self.events.iter().map(|e| &e.kind).collect();
        for p in self.products() {
            let row = out.entry(p.to_string()).or_default();
            for k in &kinds {
                row.insert((*k).clone(), 0.0);
            }
        }
        let h = self.horizon.max(1) as f64;
        for e in &self.events {
            *out.get_mut(&e.product).unwrap().get_mut(&e.kind).unwrap() += e.mag / h;
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no records for product `{0}`")]
    UnknownProduct(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl TraceError {
    pub fn code(&self) -> &'static str {
        match self {
            TraceError::Parse { .. } => "TRACE_PARSE",
            TraceError::UnknownProduct(_) => "UNKNOWN_PRODUCT",
            TraceError::Signal(e) => e.code(),
            TraceError::Io(_) | TraceError::Csv(_) => "IO_ERROR",
        }
    }
}

#[derive(Serialize)]
struct Line<'a, B: Serialize> {
    t: u64,
    rec: &'a str,
    #[serde(flatten)]
    body: B,
}

#[derive(Serialize)]
struct EventBody<'a> {
    product: &'a str,
    kind: &'a str,
    mag: f64,
}

#[derive(Serialize)]
struct ViolationBody<'a> {
    product: &'a str,
    expectation: &'a str,
    observed: f64,
}

#[derive(Serialize)]
struct ClusterBody<'a> {
    assignments: &'a BTreeMap<String, usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    t: u64,
    rec: String,
    product: Option<String>,
    kind: Option<String>,
    mag: Option<f64>,
    expectation: Option<String>,
    observed: Option<f64>,
    assignments: Option<BTreeMap<String, usize>>,
}

/// Writes all records ordered by tick; within a tick, cluster snapshots come
/// first, then events, then violations, each in generation order.
pub fn write_jsonl(trace: &SimTrace, mut out: impl Write) -> std::io::Result<()> {
    let mut lines: Vec<(u64, u8, usize, String)> = Vec::new();
    for (i, c) in trace.cluster_history.iter().enumerate() {
        let l = Line {
            t: c.t,
            rec: "cluster",
            body: ClusterBody {
                assignments: &c.assignments,
            },
        };
        lines.push((c.t, 0, i, json(&l)));
    }
    for (i, e) in trace.events.iter().enumerate() {
        let l = Line {
            t: e.t,
            rec: "event",
            body: EventBody {
                product: &e.product,
                kind: e.kind.name(),
                mag: e.mag,
            },
        };
        lines.push((e.t, 1, i, json(&l)));
    }
    for (i, v) in trace.violations.iter().enumerate() {
        let l = Line {
            t: v.t,
            rec: "violation",
            body: ViolationBody {
                product: &v.product,
                expectation: &v.expectation,
                observed: v.observed,
            },
        };
        lines.push((v.t, 2, i, json(&l)));
    }
    lines.sort_by_key(|a| (a.0, a.1, a.2));
    for (_, _, _, l) in lines {
        writeln!(out, "{l}")?;
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("trace records always serialize")
}

pub fn to_jsonl_string(trace: &SimTrace) -> String {
    let mut buf = Vec::new();
    write_jsonl(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn missing(line: usize, field: &str) -> TraceError {
    TraceError::Parse {
        line,
        message: format!("missing field `{field}`"),
    }
}

/// Reads a JSON-lines trace. Blank lines are skipped; the horizon is one past
/// the last tick seen.
pub fn parse_jsonl(text: &str) -> Result<SimTrace, TraceError> {
    let mut trace = SimTrace::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let r: RawLine = serde_json::from_str(raw).map_err(|e| TraceError::Parse {
            line,
            message: e.to_string(),
        })?;
        trace.horizon = trace.horizon.max(r.t + 1);
        match r.rec.as_str() {
            "event" => trace.events.push(EventRecord {
                t: r.t,
                product: r.product.ok_or_else(|| missing(line, "product"))?,
                kind: EventKind::from_name(&r.kind.ok_or_else(|| missing(line, "kind"))?),
                mag: r.mag.ok_or_else(|| missing(line, "mag"))?,
            }),
            "violation" => trace.violations.push(ViolationRecord {
                t: r.t,
                product: r.product.ok_or_else(|| missing(line, "product"))?,
                expectation: r.expectation.ok_or_else(|| missing(line, "expectation"))?,
                observed: r.observed.ok_or_else(|| missing(line, "observed"))?,
            }),
            "cluster" => trace.cluster_history.push(ClusterRecord {
                t: r.t,
                assignments: r.assignments.ok_or_else(|| missing(line, "assignments"))?,
            }),
            other => {
                return Err(TraceError::Parse {
                    line,
                    message: format!("unknown record type `{other}`"),
                })
            }
        }
    }
    Ok(trace)
}

/// Trend of one product's per-tick interaction count after smoothing.
pub fn interaction_trend(trace: &SimTrace, product: &str, window: usize) -> Result<Trend, TraceError> {
    if !trace.products().contains(product) {
        return Err(TraceError::UnknownProduct(product.to_string()));
    }
    Ok(trend_of_series(&trace.interaction_series(product), window)?)
}

/// One CSV row per product:
/// `product,slope,verdict,final_epsilon,synchronic_variety`. Statistics a
/// trace does not carry are left empty.
pub fn write_summary_csv(trace: &SimTrace, window: usize, out: impl Write) -> Result<(), TraceError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["product", "slope", "verdict", "final_epsilon", "synchronic_variety"])?;
    for p in trace.products() {
        let (slope, verdict) = match interaction_trend(trace, p, window) {
            Ok(t) => (format!("{:?}", t.slope), t.verdict.as_str().to_string()),
            Err(_) => (String::new(), String::new()),
        };
        let eps = trace.final_epsilon(p).map(|e| e.to_string()).unwrap_or_default();
        let syn = trace
            .final_synchronic
            .get(p)
            .map(|e| e.to_string())
            .unwrap_or_default();
        w.write_record([p, &slope, &verdict, &eps, &syn])?;
    }
    w.flush()?;
    Ok(())
}

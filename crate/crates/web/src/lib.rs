//! Browser bindings for the demo page. Every export takes plain numbers or
//! text and returns a JSON string, so the page needs no generated types.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use semiosis_core::dsl::{parse, BlockList};
use semiosis_core::semiosis::check_laws;
use semiosis_core::sim::synthetic::{clustered_population, purity, refrigerator_scenario};
use semiosis_core::sim::{cluster_agents, preprocess_filter, run, trend_of_series};

fn err(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Runs the bundled refrigerator scenario and returns the per-tick
/// interaction counts, their smoothed curve, the fitted trend and the
/// product's boundary-crossing count over time.
#[wasm_bindgen]
pub fn fridge_trend(adapt: bool, seed: u32, horizon: u32, window: u32) -> String {
    let trace = match run(&refrigerator_scenario(adapt), horizon.into(), seed.into()) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    let counts = trace.interaction_series("fridge");
    let (smoothed, trend) = match (
        preprocess_filter(&counts, window as usize),
        trend_of_series(&counts, window as usize),
    ) {
        (Ok(s), Ok(t)) => (s, t),
        (Err(e), _) | (_, Err(e)) => return err(e),
    };
    json!({
        "counts": counts,
        "smoothed": smoothed,
        "slope": trend.slope,
        "verdict": trend.verdict,
        "epsilon": trace.epsilon_series.get("fridge"),
    })
    .to_string()
}

/// Draws the three-center population and clusters its environment features.
#[wasm_bindgen]
pub fn cluster_population(seed: u32, spread: f64, tau: f64) -> String {
    let pop = clustered_population(seed.into(), spread);
    let features: Vec<(String, Vec<f64>)> = pop
        .scenario
        .products
        .iter()
        .filter_map(|p| {
            let env = pop.scenario.environment(&p.environment)?;
            Some((p.id.clone(), env.features.clone()))
        })
        .collect();
    let clusters = match cluster_agents(&features, tau) {
        Ok(c) => c,
        Err(e) => return err(e),
    };
    let points: Vec<Value> = features
        .iter()
        .map(|(id, f)| {
            json!({
                "id": id,
                "x": f[0],
                "y": f[1],
                "truth": pop.truth[id],
                "cluster": clusters.assignments[id],
            })
        })
        .collect();
    json!({
        "count": clusters.len(),
        "purity": purity(&clusters.assignments, &pop.truth),
        "centroids": clusters.centroids,
        "points": points,
    })
    .to_string()
}

/// Parses `text` and checks both laws on the named sequence, or on the only
/// sequence when `sequence` is empty.
#[wasm_bindgen]
pub fn check_laws_text(text: &str, sequence: &str) -> String {
    let (blocks, diags) = parse(text);
    let messages: Vec<String> = diags.iter().map(ToString::to_string).collect();
    if diags.iter().any(|d| d.is_error()) {
        return json!({ "diagnostics": messages }).to_string();
    }
    let seq = if sequence.is_empty() {
        match blocks.sequences().as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    } else {
        blocks.sequence(sequence)
    };
    let Some(seq) = seq else {
        let names: Vec<&str> = blocks.sequences().iter().map(|s| s.name()).collect();
        return json!({
            "diagnostics": messages,
            "error": "name one sequence",
            "sequences": names,
        })
        .to_string();
    };
    match check_laws(seq, &seq.designated_configs()) {
        Ok(report) => json!({
            "diagnostics": messages,
            "sequence": seq.name(),
            "holds": report.law1_holds && report.all_natural(),
            "report": report,
        })
        .to_string(),
        Err(e) => err(e),
    }
}

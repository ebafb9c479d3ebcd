//! Variability of interaction at three levels of aggregation: single
//! products, typogenic clusters and phylogenic families.

use std::collections::BTreeMap;

use super::cluster::{group_families, Clustering};
use super::signal::coefficient_of_variation;
use super::trace::SimTrace;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LayerVariability {
    pub product_mean_cv: f64,
    pub cluster_mean_cv: f64,
    pub family_mean_cv: f64,
}

fn summed(trace: &SimTrace, members: &[&str]) -> Vec<f64> {
    let mut total = vec![0.0; trace.horizon as usize];
    for m in members {
        for (t, x) in trace.interaction_series(m).into_iter().enumerate() {
            total[t] += x;
        }
    }
    total
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Coefficient of variation of the per-tick interaction series, averaged over
/// products, over clusters (member series summed) and over families.
pub fn layer_variability(
    trace: &SimTrace,
    clusters: &Clustering,
    manufacturers: &BTreeMap<String, String>,
) -> LayerVariability {
    let products: Vec<&str> = clusters.assignments.keys().map(String::as_str).collect();
    let product_cvs: Vec<f64> = products
        .iter()
        .map(|p| coefficient_of_variation(&trace.interaction_series(p)))
        .collect();

    let cluster_members: Vec<Vec<&str>> = (0..clusters.len())
        .map(|c| clusters.members(c).collect())
        .collect();
    let cluster_cvs: Vec<f64> = cluster_members
        .iter()
        .map(|m| coefficient_of_variation(&summed(trace, m)))
        .collect();

    let families = group_families(clusters, manufacturers);
    let family_cvs: Vec<f64> = families
        .families
        .values()
        .map(|cs| {
            let members: Vec<&str> = cs.iter().flat_map(|&c| cluster_members[c].iter().copied()).collect();
            coefficient_of_variation(&summed(trace, &members))
        })
        .collect();

    LayerVariability {
        product_mean_cv: mean(&product_cvs),
        cluster_mean_cv: mean(&cluster_cvs),
        family_mean_cv: mean(&family_cvs),
    }
}

//! Typogenic and phylogenic grouping: online leader clustering of agents by
//! environment features, and families by majority manufacturer.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("agent `{id}` has {found} feature(s), expected {expected}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("tau must be positive, found {0}")]
    InvalidTau(f64),
}

impl ClusterError {
    pub fn code(&self) -> &'static str {
        match self {
            ClusterError::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            ClusterError::InvalidTau(_) => "INVALID_TAU",
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Clustering {
    pub assignments: BTreeMap<String, usize>,
    pub centroids: Vec<Vec<f64>>,
    pub sizes: Vec<usize>,
}

impl Clustering {
    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    pub fn members(&self, cluster: usize) -> impl Iterator<Item = &str> {
        self.assignments
            .iter()
            .filter(move |(_, &c)| c == cluster)
            .map(|(id, _)| id.as_str())
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Single pass in id order: join the nearest centroid within `tau`, otherwise
/// found a new cluster. Centroids are running means of their members.
pub fn cluster_agents(agents: &[(String, Vec<f64>)], tau: f64) -> Result<Clustering, ClusterError> {
    if !(tau > 0.0) {
        return Err(ClusterError::InvalidTau(tau));
    }
    let mut order: Vec<&(String, Vec<f64>)> = agents.iter().collect();
    order.sort_by(|a, b| a.0.cmp(&b.0));
    let dim = order.first().map(|a| a.1.len()).unwrap_or(0);

    let mut out = Clustering {
        assignments: BTreeMap::new(),
        centroids: Vec::new(),
        sizes: Vec::new(),
    };
    for (id, features) in order {
        if features.len() != dim {
            return Err(ClusterError::DimensionMismatch {
                id: id.clone(),
                expected: dim,
                found: features.len(),
            });
        }
        let nearest = out
            .centroids
            .iter()
            .enumerate()
            .map(|(i, c)| (i, distance(c, features)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let cluster = match nearest {
            Some((i, d)) if d <= tau => {
                out.sizes[i] += 1;
                let n = out.sizes[i] as f64;
                for (c, x) in out.centroids[i].iter_mut().zip(features) {
                    *c += (x - *c) / n;
                }
                i
            }
            _ => {
                out.centroids.push(features.clone());
                out.sizes.push(1);
                out.centroids.len() - 1
            }
        };
        out.assignments.insert(id.clone(), cluster);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Families {
    /// Family (manufacturer id) of each cluster, indexed by cluster id.
    pub cluster_family: Vec<String>,
    pub families: BTreeMap<String, Vec<usize>>,
}

/// Each cluster joins the family of its majority manufacturer; ties go to the
/// lexicographically least manufacturer id.
pub fn group_families(clusters: &Clustering, manufacturers: &BTreeMap<String, String>) -> Families {
    let mut cluster_family = Vec::with_capacity(clusters.len());
    let mut families: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for c in 0..clusters.len() {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for id in clusters.members(c) {
            if let Some(m) = manufacturers.get(id) {
                *counts.entry(m.as_str()).or_default() += 1;
            }
        }
        // BTreeMap iterates in ascending id order, so the first maximum wins ties.
        let family = counts
            .iter()
            .fold(None, |best: Option<(&str, usize)>, (&m, &n)| match best {
                Some((_, bn)) if bn >= n => best,
                _ => Some((m, n)),
            })
            .map(|(m, _)| m.to_string())
            .unwrap_or_default();
        families.entry(family.clone()).or_default().push(c);
        cluster_family.push(family);
    }
    Families {
        cluster_family,
        families,
    }
}

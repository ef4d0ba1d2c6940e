use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Edge-perspective degree distributions `lambda(x)` (VNs) and `rho(x)` (CNs).
///
/// Keys are node degrees, values the fraction of edges attached to nodes of
/// that degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub lambda: BTreeMap<usize, f64>,
    pub rho: BTreeMap<usize, f64>,
}

impl DegreeDistribution {
    pub fn new(lambda: BTreeMap<usize, f64>, rho: BTreeMap<usize, f64>) -> Result<Self> {
        for (name, map) in [("lambda", &lambda), ("rho", &rho)] {
            if map.is_empty() {
                return Err(Error::Config(format!("{name} is empty")));
            }
            if map.keys().any(|&d| d == 0) || map.values().any(|&f| !(f >= 0.0)) {
                return Err(Error::Config(format!(
                    "{name} needs degrees >= 1 and non-negative fractions"
                )));
            }
            let sum: f64 = map.values().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::Config(format!("{name} fractions sum to {sum}")));
            }
        }
        Ok(DegreeDistribution {
            lambda: normalized(lambda),
            rho: normalized(rho),
        })
    }

    /// `(dv, dc)`-regular ensemble.
    pub fn regular(dv: usize, dc: usize) -> Self {
        DegreeDistribution {
            lambda: BTreeMap::from([(dv, 1.0)]),
            rho: BTreeMap::from([(dc, 1.0)]),
        }
    }

    /// Builds the distribution from per-node degree lists.
    pub fn from_node_degrees(vn: &[usize], cn: &[usize]) -> Self {
        DegreeDistribution {
            lambda: edge_fractions(vn),
            rho: edge_fractions(cn),
        }
    }

    /// Rate-1/2 WiMAX (IEEE 802.16e) ensemble from the exact edge counts of
    /// its base matrix: 76 edges, split 22/24/30 over VN degrees 2/3/6 and
    /// 48/28 over CN degrees 6/7.
    pub fn wimax_half_rate() -> Self {
        Self::new(
            BTreeMap::from([(2, 22.0 / 76.0), (3, 24.0 / 76.0), (6, 30.0 / 76.0)]),
            BTreeMap::from([(6, 48.0 / 76.0), (7, 28.0 / 76.0)]),
        )
        .expect("valid distribution")
    }

    pub fn vn_degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.lambda.keys().copied()
    }

    pub fn cn_degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.rho.keys().copied()
    }

    pub fn max_vn_degree(&self) -> usize {
        *self.lambda.keys().next_back().expect("non-empty")
    }

    pub fn is_regular(&self) -> bool {
        self.lambda.len() == 1 && self.rho.len() == 1
    }

    /// Node-perspective VN fractions: `L_d = (lambda_d / d) / sum_j lambda_j / j`.
    pub fn vn_node_fractions(&self) -> BTreeMap<usize, f64> {
        node_fractions(&self.lambda)
    }

    pub fn cn_node_fractions(&self) -> BTreeMap<usize, f64> {
        node_fractions(&self.rho)
    }

    /// Design rate `1 - (sum rho_d/d) / (sum lambda_d/d)`.
    pub fn design_rate(&self) -> f64 {
        let inv = |m: &BTreeMap<usize, f64>| m.iter().map(|(&d, &f)| f / d as f64).sum::<f64>();
        1.0 - inv(&self.rho) / inv(&self.lambda)
    }
}

fn normalized(map: BTreeMap<usize, f64>) -> BTreeMap<usize, f64> {
    let sum: f64 = map.values().sum();
    map.into_iter()
        .filter(|&(_, f)| f > 0.0)
        .map(|(d, f)| (d, f / sum))
        .collect()
}

fn edge_fractions(degrees: &[usize]) -> BTreeMap<usize, f64> {
    let mut edges: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in degrees.iter().filter(|&&d| d > 0) {
        *edges.entry(d).or_default() += d;
    }
    let total: usize = edges.values().sum();
    edges
        .into_iter()
        .map(|(d, e)| (d, e as f64 / total as f64))
        .collect()
}

fn node_fractions(edge: &BTreeMap<usize, f64>) -> BTreeMap<usize, f64> {
    let norm: f64 = edge.iter().map(|(&d, &f)| f / d as f64).sum();
    edge.iter()
        .map(|(&d, &f)| (d, f / d as f64 / norm))
        .collect()
}

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::quality::Clustering;

/// Average best-match F1 between two clusterings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyReport {
    /// Arithmetic mean of the two directional scores.
    pub f1a: f64,
    /// Harmonic mean of the two directional scores.
    pub f1h: f64,
    /// Mean best-match F1 of candidate clusters against the truth.
    pub candidate_to_truth: f64,
    /// Mean best-match F1 of truth clusters against the candidate.
    pub truth_to_candidate: f64,
}

/// Mean over `from` clusters of the best F1 against any cluster of `to`.
fn mean_best_f1(from: &Clustering, to: &Clustering) -> f64 {
    let mut index: HashMap<NodeId, Vec<usize>> = HashMap::new();
    for (ci, c) in to.clusters().iter().enumerate() {
        for &v in c {
            index.entry(v).or_default().push(ci);
        }
    }
    let mut shared: HashMap<usize, usize> = HashMap::new();
    let total: f64 = from
        .clusters()
        .iter()
        .map(|a| {
            shared.clear();
            for v in a {
                for &ci in index.get(v).map(Vec::as_slice).unwrap_or(&[]) {
                    *shared.entry(ci).or_default() += 1;
                }
            }
            shared
                .iter()
                .map(|(&ci, &common)| {
                    2.0 * common as f64 / (a.len() + to.clusters()[ci].len()) as f64
                })
                .fold(0.0, f64::max)
        })
        .sum();
    total / from.len() as f64
}

/// F1a and F1h of `candidate` against `truth`. Both clusterings are
/// deduplicated on construction, overlaps are allowed.
pub fn f1_scores(candidate: &Clustering, truth: &Clustering) -> Result<AccuracyReport> {
    if candidate.is_empty() || truth.is_empty() {
        return Err(Error::InvalidArgument(
            "F1 needs two non-empty clusterings".into(),
        ));
    }
    let fwd = mean_best_f1(candidate, truth);
    let bwd = mean_best_f1(truth, candidate);
    let f1h = if fwd + bwd > 0.0 {
        2.0 * fwd * bwd / (fwd + bwd)
    } else {
        0.0
    };
    Ok(AccuracyReport {
        f1a: (fwd + bwd) / 2.0,
        f1h,
        candidate_to_truth: fwd,
        truth_to_candidate: bwd,
    })
}

//! Modularity and modularity gain.

use std::collections::BTreeMap;

use crate::decomposition;
use crate::error::{Error, Result};
use crate::graph::{Network, NodeId};

/// Relative tolerance used whenever two gains are compared.
pub const GAIN_EPSILON: f64 = 1e-9;

/// Tolerant comparisons of modularity gains.
///
/// Gains are compared on the `2w * ΔQ` scale, i.e. in link-weight units, so
/// the tolerance does not collapse on large networks where `ΔQ` itself is tiny.
#[derive(Debug, Clone, Copy)]
pub struct GainCmp {
    scale: f64,
}

impl GainCmp {
    pub fn new(net: &Network) -> Self {
        GainCmp {
            scale: 2.0 * net.total_weight(),
        }
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        let (a, b) = (a * self.scale, b * self.scale);
        (a - b).abs() <= GAIN_EPSILON * 1f64.max(a.abs()).max(b.abs())
    }

    /// `a > b` by more than the tolerance.
    pub fn gt(&self, a: f64, b: f64) -> bool {
        a > b && !self.eq(a, b)
    }

    /// `a >= b` up to the tolerance.
    pub fn ge(&self, a: f64, b: f64) -> bool {
        a >= b || self.eq(a, b)
    }
}

/// A flat set of possibly overlapping clusters over node ids.
///
/// Members are sorted and deduplicated, empty and duplicate clusters are
/// dropped and the clusters themselves are kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Clustering {
    clusters: Vec<Vec<NodeId>>,
}

impl Clustering {
    pub fn new(clusters: impl IntoIterator<Item = Vec<NodeId>>) -> Self {
        let mut clusters: Vec<Vec<NodeId>> = clusters
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .filter(|c| !c.is_empty())
            .collect();
        clusters.sort();
        clusters.dedup();
        Clustering { clusters }
    }

    pub fn singletons(n: usize) -> Self {
        Clustering::new((0..n).map(|i| vec![i]))
    }

    pub fn whole(n: usize) -> Self {
        Clustering::new([(0..n).collect()])
    }

    pub fn clusters(&self) -> &[Vec<NodeId>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Node to the indices of the clusters containing it.
    pub fn membership(&self) -> BTreeMap<NodeId, Vec<usize>> {
        let mut index: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
        for (ci, c) in self.clusters.iter().enumerate() {
            for &node in c {
                index.entry(node).or_default().push(ci);
            }
        }
        index
    }

    pub fn is_overlapping(&self) -> bool {
        self.membership().values().any(|m| m.len() > 1)
    }

    /// Dense cluster index per node; requires a complete, non-overlapping cover.
    pub fn assignment(&self, n: usize) -> Result<Vec<usize>> {
        let mut assign = vec![usize::MAX; n];
        for (ci, c) in self.clusters.iter().enumerate() {
            for &node in c {
                if node >= n {
                    return Err(Error::InvalidArgument(format!(
                        "node {node} is outside the network"
                    )));
                }
                if assign[node] != usize::MAX {
                    return Err(Error::OverlappingClustering);
                }
                assign[node] = ci;
            }
        }
        match assign.iter().position(|&a| a == usize::MAX) {
            Some(missing) => Err(Error::IncompleteClustering(missing)),
            None => Ok(assign),
        }
    }
}

/// Modularity of a complete non-overlapping clustering.
pub fn modularity(net: &Network, cl: &Clustering) -> Result<f64> {
    let assign = cl.assignment(net.node_count())?;
    let two_w = 2.0 * net.total_weight();
    let mut inner = vec![0.0; cl.len()];
    let mut volume = vec![0.0; cl.len()];
    for i in 0..net.node_count() {
        let c = assign[i];
        inner[c] += 2.0 * net.self_weight(i);
        volume[c] += net.node_weight(i);
        for (j, w) in net.links(i) {
            // Each ordered pair (i, j), j != i, contributes the link weight once.
            if assign[j] == c {
                inner[c] += w;
            }
        }
    }
    let q = inner
        .iter()
        .zip(&volume)
        .map(|(a, d)| a - d * d / two_w)
        .sum::<f64>();
    Ok(q / two_w)
}

/// Modularity of the network where every node is its own cluster.
pub fn singleton_modularity(net: &Network) -> f64 {
    let two_w = 2.0 * net.total_weight();
    let q: f64 = (0..net.node_count())
        .map(|i| 2.0 * net.self_weight(i) - net.node_weight(i).powi(2) / two_w)
        .sum();
    q / two_w
}

#[inline]
pub(crate) fn pair_gain(net: &Network, i: NodeId, j: NodeId, link: f64) -> f64 {
    let w = net.total_weight();
    (2.0 * link - net.node_weight(i) * net.node_weight(j) / w) / (2.0 * w)
}

/// `ΔQ_{i,j}`: modularity change of merging the singletons `i` and `j`.
pub fn modularity_gain(net: &Network, i: NodeId, j: NodeId) -> Result<f64> {
    if i == j {
        return Err(Error::InvalidArgument(format!(
            "modularity gain needs two distinct nodes, got {i} twice"
        )));
    }
    Ok(pair_gain(net, i, j, net.link_weight(i, j)))
}

/// Gain of grouping `i` together with all of `ccs` into one cluster, starting
/// from singletons: the sum of `ΔQ` over all unordered pairs of the group.
pub fn gain_all(net: &Network, i: NodeId, ccs: &[NodeId]) -> f64 {
    debug_assert!(!ccs.is_empty() && !ccs.contains(&i));
    let mut group: Vec<NodeId> = Vec::with_capacity(ccs.len() + 1);
    group.push(i);
    group.extend_from_slice(ccs);
    group.sort_unstable();
    let mut gain = 0.0;
    for (a_pos, &a) in group.iter().enumerate() {
        for &b in &group[a_pos + 1..] {
            gain += pair_gain(net, a, b, net.link_weight(a, b));
        }
    }
    gain
}

/// Accumulated gain of splitting `i` into one fragment per candidate and
/// grouping each fragment with its candidate.
pub fn gain_each(net: &Network, i: NodeId, ccs: &[NodeId]) -> Result<f64> {
    let fragments = decomposition::decompose_for(net, i, ccs)?;
    let w = net.total_weight();
    Ok(fragments
        .iter()
        .map(|f| {
            let cand = f.candidate.expect("paired fragment");
            (2.0 * f.share_to(cand) - f.node_weight() * net.node_weight(cand) / w) / (2.0 * w)
        })
        .sum())
}

/// Modularity change of replacing `i` by `k` unclustered fragments. The self
/// weight kept inside fragments drops to `s/K`, while the squared degree term
/// shrinks to `w_i²/K`.
pub fn split_gain(net: &Network, i: NodeId, k: usize) -> f64 {
    let w = net.total_weight();
    let kept = (k as f64 - 1.0) / k as f64;
    let wi = net.node_weight(i);
    (-2.0 * net.self_weight(i) * kept + wi * wi * kept / (2.0 * w)) / (2.0 * w)
}

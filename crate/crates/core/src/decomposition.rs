//! Overlap decomposition of a node into virtual fragments.
//!
//! A node with self weight `s` split into `K` fragments gives each fragment
//! self weight `s / K²`, links every pair of fragments with `2s / K²` and
//! shares each external link `v` as `v / K` per fragment. Total weight and the
//! node weight `w_i` are preserved (each fragment carries `w_i / K`), and an
//! isolated node split this way keeps its modularity unchanged.

use crate::candidates::CandidateState;
use crate::error::{Error, Result};
use crate::graph::{Network, NodeId};

/// A virtual node produced by splitting `origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub origin: NodeId,
    /// 1-based fragment index.
    pub index: usize,
    /// Number of fragments the origin was split into.
    pub arity: usize,
    /// Self weight `s / K²`.
    pub weight: f64,
    /// Weight of the link to each sibling fragment, `2s / K²`.
    pub inter_fragment_weight: f64,
    /// Shares `v / K` of the origin's external links, ascending by target.
    pub links: Vec<(NodeId, f64)>,
    /// Candidate this fragment is grouped with, when paired.
    pub candidate: Option<NodeId>,
}

impl Fragment {
    /// Share of the origin's link to `target`.
    pub fn share_to(&self, target: NodeId) -> f64 {
        match self.links.binary_search_by_key(&target, |&(t, _)| t) {
            Ok(pos) => self.links[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Weight from this fragment to the group formed around `cand`, where
    /// `cand` is one of the paired candidates. Groups of other candidates also
    /// hold a sibling fragment, so the inter-fragment link counts toward them.
    pub fn weight_to(&self, cand: NodeId) -> f64 {
        let share = self.share_to(cand);
        if self.candidate == Some(cand) {
            share
        } else {
            share + self.inter_fragment_weight
        }
    }

    /// Accumulated arc weight of the fragment, `w_i / K`.
    pub fn node_weight(&self) -> f64 {
        let links: f64 = self.links.iter().map(|&(_, w)| w).sum();
        2.0 * self.weight + (self.arity - 1) as f64 * self.inter_fragment_weight + links
    }
}

/// Splits `node` into `k` fragments.
pub fn decompose(net: &Network, node: NodeId, k: usize) -> Result<Vec<Fragment>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "decomposition needs at least 2 fragments, got {k}"
        )));
    }
    let kf = k as f64;
    let s = net.self_weight(node);
    let weight = s / (kf * kf);
    let links: Vec<(NodeId, f64)> = net.links(node).map(|(j, w)| (j, w / kf)).collect();
    Ok((1..=k)
        .map(|index| Fragment {
            origin: node,
            index,
            arity: k,
            weight,
            inter_fragment_weight: 2.0 * weight,
            links: links.clone(),
            candidate: None,
        })
        .collect())
}

/// Splits `node` into one fragment per candidate, pairing fragment `k` with
/// the `k`-th candidate in ascending order.
pub fn decompose_for(net: &Network, node: NodeId, ccs: &[NodeId]) -> Result<Vec<Fragment>> {
    let mut sorted = ccs.to_vec();
    sorted.sort_unstable();
    let mut frags = decompose(net, node, sorted.len())?;
    for (f, cand) in frags.iter_mut().zip(sorted) {
        f.candidate = Some(cand);
    }
    Ok(frags)
}

/// Whether splitting a node of structural degree `d` into `k` fragments keeps
/// the link count from growing: `k(d - k) + k(k - 1)/2 <= d` with `2 <= k <= d`.
pub fn od_accept(d: usize, k: usize) -> bool {
    if k < 2 || k > d {
        return false;
    }
    k * (d - k) + k * (k - 1) / 2 <= d
}

fn intersection_size(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Candidates of `i` whose own candidate sets share the most members with
/// `ccs_i`, provided that overlap covers at least half of `ccs_i` (rounded
/// up). Ties are all returned; the result is empty below the threshold.
pub fn max_intersect_orig(states: &[CandidateState], i: NodeId) -> Vec<NodeId> {
    let ccs = &states[i].ccs;
    let sizes: Vec<usize> = ccs
        .iter()
        .map(|&c| intersection_size(ccs, &states[c].ccs))
        .collect();
    let best = sizes.iter().copied().max().unwrap_or(0);
    if best == 0 || best < ccs.len().div_ceil(2) {
        return Vec::new();
    }
    ccs.iter()
        .zip(&sizes)
        .filter(|&(_, &s)| s == best)
        .map(|(&c, _)| c)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::evaluate_candidates;
    use crate::graph::parse_network;

    fn net(text: &str) -> Network {
        parse_network(text.as_bytes(), false, true).unwrap()
    }

    pub(crate) const FIG2: &str =
        "10 10 10\n20 20 10\n30 30 10\n9 9 9\n9 10 12\n9 20 12\n9 30 12\n";

    #[test]
    fn example_fragments() {
        let n = net(FIG2);
        let c = n.node_of(9).unwrap();
        let cands: Vec<NodeId> = [10, 20, 30]
            .iter()
            .map(|&l| n.node_of(l).unwrap())
            .collect();
        let frags = decompose_for(&n, c, &cands).unwrap();
        assert_eq!(frags.len(), 3);
        for f in &frags {
            assert_eq!(f.weight, 1.0);
            assert_eq!(f.inter_fragment_weight, 2.0);
            let own = f.candidate.unwrap();
            assert_eq!(f.weight_to(own), 4.0);
            for &other in cands.iter().filter(|&&o| o != own) {
                assert_eq!(f.weight_to(other), 6.0);
            }
            assert_eq!(f.node_weight(), n.node_weight(c) / 3.0);
        }
    }

    #[test]
    fn zero_self_weight() {
        let n = net("0 1 3\n0 2 5\n");
        let frags = decompose(&n, 0, 2).unwrap();
        for f in &frags {
            assert_eq!(f.weight, 0.0);
            assert_eq!(f.inter_fragment_weight, 0.0);
            assert_eq!(f.links, vec![(1, 1.5), (2, 2.5)]);
        }
        assert!(decompose(&n, 0, 1).is_err());
    }

    #[test]
    fn od_accept_cases() {
        assert!(od_accept(3, 2));
        assert!(od_accept(3, 3));
        assert!(od_accept(2, 2));
        assert!(!od_accept(4, 2));
        assert!(!od_accept(1, 2));
        assert!(!od_accept(4, 3));
    }

    #[test]
    fn max_intersect_clique() {
        let n = net("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
        let st = evaluate_candidates(&n);
        assert_eq!(st[0].ccs, vec![1, 2, 3]);
        assert_eq!(max_intersect_orig(&st, 0), vec![1, 2, 3]);
    }

    fn state(ccs: Vec<NodeId>) -> CandidateState {
        CandidateState {
            gmax: 0.1,
            ccs,
            propagated: false,
        }
    }

    #[test]
    fn max_intersect_pair_hits_threshold() {
        // ccs_0 = {1, 2}, ccs_1 = {0, 2}, ccs_2 = {0, 1}.
        let st = vec![state(vec![1, 2]), state(vec![0, 2]), state(vec![0, 1])];
        assert_eq!(max_intersect_orig(&st, 0), vec![1, 2]);
    }

    #[test]
    fn max_intersect_below_threshold() {
        // ccs_0 = {1, 2, 3, 4}, each candidate only shares one member.
        let mut st = vec![state(vec![1, 2, 3, 4])];
        st.push(state(vec![0, 2]));
        st.push(state(vec![0, 1]));
        st.push(state(vec![0, 4]));
        st.push(state(vec![0, 3]));
        assert!(max_intersect_orig(&st, 0).is_empty());
    }
}

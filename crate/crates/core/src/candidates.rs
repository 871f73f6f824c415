//! Clustering candidates: maximal-gain neighbors reduced to mutual pairs.
//!
//! Both passes only read immutable inputs (the network, then the snapshot of
//! all first-pass states), so the result does not depend on node order.

use crate::graph::{Network, NodeId};
use crate::quality::{pair_gain, GainCmp};

/// Sentinel `gmax` of a node without any non-negative gain.
pub const NO_GAIN: f64 = -1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateState {
    /// Maximal non-negative gain to a neighbor, [`NO_GAIN`] if none.
    pub gmax: f64,
    /// Candidates attaining `gmax`, ascending.
    pub ccs: Vec<NodeId>,
    pub propagated: bool,
}

fn node_candidates(
    net: &Network,
    cmp: &GainCmp,
    i: NodeId,
    gains: &mut Vec<f64>,
) -> CandidateState {
    gains.clear();
    gains.extend(net.links(i).map(|(j, w)| pair_gain(net, i, j, w)));
    let best = gains
        .iter()
        .copied()
        .filter(|&g| cmp.ge(g, 0.0))
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return CandidateState {
            gmax: NO_GAIN,
            ccs: Vec::new(),
            propagated: false,
        };
    }
    let ccs = net
        .neighbors(i)
        .iter()
        .zip(gains.iter())
        .filter(|&(_, &g)| cmp.eq(g, best))
        .map(|(&j, _)| j)
        .collect();
    CandidateState {
        gmax: best.max(0.0),
        ccs,
        propagated: false,
    }
}

/// First pass: maximal-gain neighbors of every node, ties retained.
pub fn identify_candidates(net: &Network) -> Vec<CandidateState> {
    let cmp = GainCmp::new(net);
    let mut gains = Vec::new();
    (0..net.node_count())
        .map(|i| node_candidates(net, &cmp, i, &mut gains))
        .collect()
}

/// Reduces the candidates of `i` to those that also list `i`, marking the
/// node propagated when nothing mutual remains.
pub fn mutual_candidates(states: &[CandidateState], i: NodeId) -> CandidateState {
    let st = &states[i];
    let ccs: Vec<NodeId> = st
        .ccs
        .iter()
        .copied()
        .filter(|&j| states[j].ccs.binary_search(&i).is_ok())
        .collect();
    let propagated = st.gmax < 0.0 || ccs.is_empty();
    CandidateState {
        gmax: st.gmax,
        ccs,
        propagated,
    }
}

/// Both passes: candidate identification followed by mutual reduction.
pub fn evaluate_candidates(net: &Network) -> Vec<CandidateState> {
    let raw = identify_candidates(net);
    (0..raw.len()).map(|i| mutual_candidates(&raw, i)).collect()
}

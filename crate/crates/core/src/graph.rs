//! Weighted network representation and the link-list text format.
//!
//! Weights are stored in link units: a link `i j v` (undirected) holds `v`,
//! a self-loop `i i v` holds `v` as the node's self weight. The derived
//! quantities follow the usual modularity conventions:
//!
//! - pair weight `w_{i,j}` accumulates both directions, so it is `2v` for an
//!   undirected link and the self weight for `i = j`;
//! - node weight `w_i = 2 * self + sum of link weights`;
//! - total weight `w = sum(w_i) / 2`.
//!
//! Nodes are identified by dense ids `0..n` assigned in ascending order of
//! their external labels, and every aggregation runs in ascending id order so
//! that the same multiset of arcs produces a bit-identical [`Network`]
//! regardless of the order in which it was read.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Dense node index inside one [`Network`].
pub type NodeId = usize;

/// External node label as it appears in input and output files.
pub type Label = u64;

/// A raw input arc before canonicalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub src: Label,
    pub dst: Label,
    pub weight: f64,
}

impl Arc {
    pub fn new(src: Label, dst: Label, weight: f64) -> Self {
        Arc { src, dst, weight }
    }
}

/// Immutable weighted network with self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    labels: Vec<Label>,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    self_weights: Vec<f64>,
    node_weights: Vec<f64>,
    total_weight: f64,
}

impl Network {
    /// Builds a network from dense ids and already aggregated link weights.
    ///
    /// `links` must hold `(lo, hi, weight)` with `lo < hi`, sorted and free of
    /// duplicates.
    pub(crate) fn from_dense(
        labels: Vec<Label>,
        self_weights: Vec<f64>,
        links: &[(NodeId, NodeId, f64)],
    ) -> Self {
        let n = labels.len();
        debug_assert_eq!(self_weights.len(), n);
        let mut counts = vec![0usize; n];
        for &(lo, hi, _) in links {
            debug_assert!(lo < hi && hi < n);
            counts[lo] += 1;
            counts[hi] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for c in &counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        // Links sorted by (lo, hi) fill every adjacency list in ascending order.
        for &(lo, hi, w) in links {
            targets[fill[lo]] = hi;
            weights[fill[lo]] = w;
            fill[lo] += 1;
            targets[fill[hi]] = lo;
            weights[fill[hi]] = w;
            fill[hi] += 1;
        }
        let node_weights: Vec<f64> = (0..n)
            .map(|i| {
                weights[offsets[i]..offsets[i + 1]]
                    .iter()
                    .fold(2.0 * self_weights[i], |acc, w| acc + w)
            })
            .collect();
        let total_weight = node_weights.iter().sum::<f64>() / 2.0;
        Network {
            labels,
            offsets,
            targets,
            weights,
            self_weights,
            node_weights,
            total_weight,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct non-self links.
    pub fn link_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn label(&self, node: NodeId) -> Label {
        self.labels[node]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Dense id of an external label. Labels of a parsed network are sorted.
    pub fn node_of(&self, label: Label) -> Option<NodeId> {
        self.labels.binary_search(&label).ok()
    }

    /// Neighbor ids of `node` in ascending order, self-loop excluded.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Link weights parallel to [`Network::neighbors`].
    pub fn neighbor_weights(&self, node: NodeId) -> &[f64] {
        &self.weights[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn links(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.neighbors(node)
            .iter()
            .copied()
            .zip(self.neighbor_weights(node).iter().copied())
    }

    /// Number of distinct non-self neighbors.
    pub fn degree(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Self-loop weight of `node`.
    pub fn self_weight(&self, node: NodeId) -> f64 {
        self.self_weights[node]
    }

    /// Link weight between two distinct nodes, `0` when they are not adjacent.
    pub fn link_weight(&self, a: NodeId, b: NodeId) -> f64 {
        match self.neighbors(a).binary_search(&b) {
            Ok(pos) => self.neighbor_weights(a)[pos],
            Err(_) => 0.0,
        }
    }

    /// `w_{i,j}`: accumulated arc weight between `i` and `j` in both directions.
    pub fn pair_weight(&self, i: NodeId, j: NodeId) -> f64 {
        if i == j {
            self.self_weights[i]
        } else {
            2.0 * self.link_weight(i, j)
        }
    }

    /// `w_i`: accumulated weight of all arcs of `node`.
    pub fn node_weight(&self, node: NodeId) -> f64 {
        self.node_weights[node]
    }

    /// `w`: half of the total accumulated arc weight.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// All links as `(lo, hi, weight)` in ascending order, self-loops excluded.
    pub fn link_list(&self) -> Vec<(NodeId, NodeId, f64)> {
        let mut out = Vec::with_capacity(self.link_count());
        for i in 0..self.node_count() {
            for (j, w) in self.links(i) {
                if i < j {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// Rebuilds the network from its own links; used to check idempotence.
    pub fn canonical_arcs(&self) -> Vec<Arc> {
        let mut arcs = Vec::new();
        for i in 0..self.node_count() {
            if self.self_weights[i] != 0.0 || self.degree(i) == 0 {
                arcs.push(Arc::new(
                    self.labels[i],
                    self.labels[i],
                    self.self_weights[i],
                ));
            }
            for (j, w) in self.links(i) {
                if i < j {
                    arcs.push(Arc::new(self.labels[i], self.labels[j], w));
                }
            }
        }
        arcs
    }

    /// Copy of the network without the given links (dense `(lo, hi)` pairs).
    pub(crate) fn without_links(&self, removed: &[(NodeId, NodeId)]) -> Network {
        let mut removed = removed.to_vec();
        removed.sort_unstable();
        let kept: Vec<_> = self
            .link_list()
            .into_iter()
            .filter(|&(a, b, _)| removed.binary_search(&(a, b)).is_err())
            .collect();
        Network::from_dense(self.labels.clone(), self.self_weights.clone(), &kept)
    }
}

/// Builds the canonical network from arcs given in any order.
///
/// Undirected arcs contribute their full weight to the link; directed arcs are
/// symmetrized and contribute half, so that `a b v` plus `b a v` equals the
/// undirected `a b v`. A self-loop always contributes its full weight.
pub fn canonicalize(arcs: &[Arc], directed: bool) -> Result<Network> {
    if arcs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut labels: Vec<Label> = arcs.iter().flat_map(|a| [a.src, a.dst]).collect();
    labels.sort_unstable();
    labels.dedup();
    let id = |l: Label| labels.binary_search(&l).expect("label collected above");

    let mut contribs: Vec<(NodeId, NodeId, f64)> = arcs
        .iter()
        .map(|a| {
            let (s, d) = (id(a.src), id(a.dst));
            let w = if directed && s != d {
                a.weight / 2.0
            } else {
                a.weight
            };
            (s.min(d), s.max(d), w)
        })
        .collect();
    contribs.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));

    let mut self_weights = vec![0.0; labels.len()];
    let mut links: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(contribs.len());
    for (lo, hi, w) in contribs {
        if lo == hi {
            self_weights[lo] += w;
        } else if let Some(last) = links.last_mut().filter(|l| l.0 == lo && l.1 == hi) {
            last.2 += w;
        } else {
            links.push((lo, hi, w));
        }
    }
    let net = Network::from_dense(labels, self_weights, &links);
    if net.total_weight() <= 0.0 {
        return Err(Error::InvalidArgument(
            "network has zero total weight".into(),
        ));
    }
    Ok(net)
}

/// Parses a link list: `src dst [weight]` per line, `#` starts a comment.
///
/// With `weighted` unset any weight column is validated but ignored.
pub fn parse_network<R: Read>(input: R, directed: bool, weighted: bool) -> Result<Network> {
    let reader = BufReader::new(input);
    let mut arcs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&tokens.len()) {
            return Err(err(format!("expected 2 or 3 fields, got {}", tokens.len())));
        }
        let node = |t: &str| {
            t.parse::<Label>()
                .map_err(|_| err(format!("invalid node id {t:?}")))
        };
        let src = node(tokens[0])?;
        let dst = node(tokens[1])?;
        let mut weight = 1.0;
        if let Some(t) = tokens.get(2) {
            let w: f64 = t
                .parse()
                .map_err(|_| err(format!("invalid weight {t:?}")))?;
            if !w.is_finite() || w < 0.0 {
                return Err(err(format!(
                    "weight must be finite and non-negative, got {t}"
                )));
            }
            if weighted {
                weight = w;
            }
        }
        arcs.push(Arc::new(src, dst, weight));
    }
    canonicalize(&arcs, directed)
}

/// Reads a network file; `.nsa` files are directed, everything else undirected
/// unless `directed` forces it.
pub fn read_network(path: &Path, directed: bool) -> Result<Network> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let directed = directed || path.extension().is_some_and(|e| e == "nsa");
    parse_network(file, directed, true)
}

fn write_line<W: Write>(out: &mut W, a: Label, b: Label, w: f64) -> std::io::Result<()> {
    writeln!(out, "{a} {b} {w}")
}

/// Writes the network as an undirected link list in canonical order.
pub fn write_network<W: Write>(net: &Network, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "# Nodes: {} Links: {} Weighted: 1",
        net.node_count(),
        net.link_count()
    )?;
    for arc in net.canonical_arcs() {
        write_line(&mut out, arc.src, arc.dst, arc.weight)?;
    }
    Ok(())
}

/// Emits every link once in a seeded random order, with the endpoints of each
/// line randomly swapped. Parsing the output as undirected reproduces `net`.
pub fn serialize_shuffled(net: &Network, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = net.canonical_arcs();
    arcs.shuffle(&mut rng);
    let mut out = Vec::new();
    for arc in arcs {
        let (a, b) = if rng.gen::<bool>() {
            (arc.dst, arc.src)
        } else {
            (arc.src, arc.dst)
        };
        write_line(&mut out, a, b, arc.weight).expect("writing to a Vec cannot fail");
    }
    String::from_utf8(out).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Network {
        parse_network(text.as_bytes(), false, true).unwrap()
    }

    #[test]
    fn unit_path() {
        let net = parse("0 1\n1 2\n");
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.total_weight(), 2.0);
        assert_eq!(net.node_weight(0), 1.0);
        assert_eq!(net.node_weight(1), 2.0);
        assert_eq!(net.pair_weight(0, 1), 2.0);
        assert_eq!(net.pair_weight(0, 2), 0.0);
    }

    #[test]
    fn self_loops_count_twice_in_node_weight() {
        // Nodes A=10, B=20, D=30 with self weight 10, C=9 with 9, links of 12.
        let net = parse("10 10 10\n20 20 10\n30 30 10\n9 9 9\n9 10 12\n9 20 12\n9 30 12\n");
        let c = net.node_of(9).unwrap();
        assert_eq!(net.node_weight(c), 9.0 * 2.0 + 36.0);
        assert_eq!(net.pair_weight(c, c), 9.0);
        assert_eq!(net.total_weight(), 75.0);
    }

    #[test]
    fn malformed_lines() {
        let err = parse_network("0 x 1\n".as_bytes(), false, true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_network("# c\n0 1\n0 1 -2\n".as_bytes(), false, true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_network("0 1 2 3\n".as_bytes(), false, true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_network("0\n".as_bytes(), false, true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_network("0 1 abc\n".as_bytes(), false, true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            parse_network("# nothing\n\n".as_bytes(), false, true),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn unweighted_ignores_weights() {
        let net = parse_network("0 1 5\n".as_bytes(), false, false).unwrap();
        assert_eq!(net.link_weight(0, 1), 1.0);
    }

    #[test]
    fn arc_order_does_not_matter() {
        let a = canonicalize(&[Arc::new(1, 0, 1.0), Arc::new(0, 1, 1.0)], false).unwrap();
        let b = canonicalize(&[Arc::new(0, 1, 1.0), Arc::new(1, 0, 1.0)], false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_arcs_are_summed() {
        let net = canonicalize(&[Arc::new(0, 1, 0.5), Arc::new(0, 1, 0.5)], false).unwrap();
        assert_eq!(net.pair_weight(0, 1), 2.0);
        assert_eq!(net.pair_weight(1, 0), 2.0);
        assert_eq!(net.neighbors(0), &[1]);
    }

    #[test]
    fn directed_arcs_are_symmetrized() {
        let dir = parse_network("0 1 1\n1 0 1\n".as_bytes(), true, true).unwrap();
        let undir = parse("0 1 1\n");
        assert_eq!(dir, undir);
        let single = parse_network("0 1 3\n".as_bytes(), true, true).unwrap();
        assert_eq!(single.pair_weight(0, 1), 3.0);
        assert_eq!(single.total_weight(), 1.5);
    }

    #[test]
    fn sparse_labels_are_remapped() {
        let net = parse("1000 7\n7 42\n");
        assert_eq!(net.labels(), &[7, 42, 1000]);
        assert_eq!(net.node_of(1000), Some(2));
        assert_eq!(net.neighbors(0), &[1, 2]);
    }

    #[test]
    fn shuffled_round_trip() {
        let net = parse("0 1 2\n1 2\n2 0 0.25\n3 3 4\n3 1\n");
        let once = serialize_shuffled(&net, 1);
        assert_eq!(once, serialize_shuffled(&net, 1));
        let other = serialize_shuffled(&net, 2);
        assert_ne!(once, other);
        assert_eq!(parse(&once), net);
        assert_eq!(parse(&other), net);
    }

    #[test]
    fn canonical_write_round_trip() {
        let net = parse("5 3 1.5\n3 9\n9 9 2\n");
        let mut buf = Vec::new();
        write_network(&net, &mut buf).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()), net);
    }
}

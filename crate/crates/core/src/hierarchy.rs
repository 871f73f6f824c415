//! Agglomerative construction of the overlapping cluster hierarchy.
//!
//! Every iteration evaluates mutual candidates on the current network, forms
//! clusters from them and coarsens the network: formed clusters and
//! propagated nodes become the nodes of the next iteration. The loop stops
//! once an iteration forms no cluster.
//!
//! Cluster formation works on *units*: a node that is not split is a single
//! unit, a split node contributes one fragment unit per candidate. Merges are
//! unions of units, so the resulting groups do not depend on the order in
//! which nodes are visited.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::candidates::{evaluate_candidates, CandidateState};
use crate::decomposition::{max_intersect_orig, od_accept};
use crate::error::{Error, Result};
use crate::graph::{Label, Network, NodeId};
use crate::quality::{gain_all, gain_each, singleton_modularity, split_gain, Clustering, GainCmp};

/// A node of the current level taking part in a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member {
    pub node: NodeId,
    /// Fragments of `node` inside the cluster.
    pub fragments: usize,
    /// Number of fragments `node` was split into, 1 for a whole node.
    pub arity: usize,
}

impl Member {
    pub fn is_whole(&self) -> bool {
        self.fragments == self.arity
    }
}

/// Cluster as produced by one formation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct FormedCluster {
    /// Node of the coarsened network representing the cluster.
    pub coarse: NodeId,
    pub members: Vec<Member>,
}

/// Outcome of cluster formation on one level.
#[derive(Debug, Clone, PartialEq)]
pub struct Formation {
    /// Coarse node of every unit: `unit_coarse[i][u]` for unit `u` of node `i`.
    pub unit_coarse: Vec<Vec<NodeId>>,
    pub clusters: Vec<FormedCluster>,
    /// Nodes carried to the next level unclustered.
    pub propagated: Vec<NodeId>,
    pub coarse_count: usize,
}

impl Formation {
    pub fn split_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.unit_coarse.len()).filter(|&i| self.unit_coarse[i].len() > 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Action {
    Propagate,
    Merge(Vec<NodeId>),
    Split,
}

fn decide(
    net: &Network,
    states: &[CandidateState],
    cmp: &GainCmp,
    i: NodeId,
    allow_split: bool,
) -> Action {
    let st = &states[i];
    if st.propagated {
        return Action::Propagate;
    }
    if st.ccs.len() == 1 {
        return Action::Merge(st.ccs.clone());
    }
    let all = gain_all(net, i, &st.ccs);
    if allow_split && od_accept(net.degree(i), st.ccs.len()) {
        let each = gain_each(net, i, &st.ccs).expect("at least two candidates")
            + split_gain(net, i, st.ccs.len());
        if cmp.gt(each, all) && cmp.ge(each, 0.0) {
            return Action::Split;
        }
    }
    let rccs = max_intersect_orig(states, i);
    if !rccs.is_empty() {
        let gain = if rccs == st.ccs {
            all
        } else {
            gain_all(net, i, &rccs)
        };
        if cmp.ge(gain, 0.0) {
            return Action::Merge(rccs);
        }
    }
    if cmp.ge(all, 0.0) {
        Action::Merge(st.ccs.clone())
    } else {
        Action::Propagate
    }
}

/// Nodes that stay unclustered are carried to the next level whole, so the
/// merges of their candidates skip them. A node left without targets, or whose
/// remaining targets no longer gain, is propagated as well. Every sweep reads
/// the previous sweep's propagated set and that set only grows.
fn settle(net: &Network, states: &[CandidateState], cmp: &GainCmp, actions: &mut [Action]) {
    let original = actions.to_vec();
    let mut propagated: Vec<bool> = actions.iter().map(|a| *a == Action::Propagate).collect();
    loop {
        let next: Vec<Action> = original
            .iter()
            .enumerate()
            .map(|(i, action)| {
                if propagated[i] {
                    return Action::Propagate;
                }
                let targets = match action {
                    Action::Propagate => unreachable!("propagated above"),
                    Action::Merge(t) => t,
                    Action::Split => &states[i].ccs,
                };
                if targets.iter().all(|&t| !propagated[t]) {
                    return action.clone();
                }
                let kept: Vec<NodeId> = targets
                    .iter()
                    .copied()
                    .filter(|&t| !propagated[t])
                    .collect();
                if kept.len() == 1 || (!kept.is_empty() && cmp.ge(gain_all(net, i, &kept), 0.0)) {
                    Action::Merge(kept)
                } else {
                    Action::Propagate
                }
            })
            .collect();
        let mut changed = false;
        for (i, a) in next.iter().enumerate() {
            if *a == Action::Propagate && !propagated[i] {
                propagated[i] = true;
                changed = true;
            }
        }
        if !changed {
            actions.clone_from_slice(&next);
            return;
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Forms the clusters of one level from reduced candidate states.
pub fn form_clusters(net: &Network, states: &[CandidateState]) -> Formation {
    form(net, states, true)
}

fn form(net: &Network, states: &[CandidateState], allow_split: bool) -> Formation {
    let n = net.node_count();
    let cmp = GainCmp::new(net);
    let mut actions: Vec<Action> = (0..n)
        .map(|i| decide(net, states, &cmp, i, allow_split))
        .collect();
    settle(net, states, &cmp, &mut actions);

    // Split nodes get one unit per candidate, everything else a single unit.
    let mut base = Vec::with_capacity(n + 1);
    base.push(0);
    for (i, a) in actions.iter().enumerate() {
        let units = if *a == Action::Split {
            states[i].ccs.len()
        } else {
            1
        };
        base.push(base[i] + units);
    }
    let unit_of = |node: NodeId, partner: NodeId| -> usize {
        if actions[node] == Action::Split {
            let pos = states[node]
                .ccs
                .binary_search(&partner)
                .expect("split partners are mutual candidates");
            base[node] + pos
        } else {
            base[node]
        }
    };

    let mut uf = UnionFind::new(base[n]);
    let mut touched = vec![false; base[n]];
    let mut link = |a: usize, b: usize| {
        uf.union(a, b);
        touched[a] = true;
        touched[b] = true;
    };
    for (i, action) in actions.iter().enumerate() {
        match action {
            Action::Propagate => {}
            Action::Merge(targets) => {
                for &t in targets {
                    link(unit_of(i, t), unit_of(t, i));
                }
            }
            Action::Split => {
                for &p in &states[i].ccs {
                    link(unit_of(i, p), unit_of(p, i));
                }
            }
        }
    }

    let mut coarse_of_root = vec![usize::MAX; base[n]];
    let mut unit_coarse = Vec::with_capacity(n);
    let mut propagated = Vec::new();
    let mut clusters: Vec<FormedCluster> = Vec::new();
    let mut next = 0;
    for i in 0..n {
        let mut units = Vec::with_capacity(base[i + 1] - base[i]);
        for u in base[i]..base[i + 1] {
            if !touched[u] {
                propagated.push(i);
                units.push(next);
                next += 1;
                continue;
            }
            let root = uf.find(u);
            if coarse_of_root[root] == usize::MAX {
                coarse_of_root[root] = next;
                clusters.push(FormedCluster {
                    coarse: next,
                    members: Vec::new(),
                });
                next += 1;
            }
            units.push(coarse_of_root[root]);
        }
        unit_coarse.push(units);
    }

    // Clusters were created in ascending coarse order; index them directly.
    let slot: Vec<usize> = {
        let mut slot = vec![usize::MAX; next];
        for (k, c) in clusters.iter().enumerate() {
            slot[c.coarse] = k;
        }
        slot
    };
    for (i, units) in unit_coarse.iter().enumerate() {
        if units.len() == 1 && propagated.binary_search(&i).is_ok() {
            continue;
        }
        let arity = units.len();
        let mut seen: Vec<NodeId> = units.clone();
        seen.sort_unstable();
        for chunk in seen.chunk_by(|a, b| a == b) {
            clusters[slot[chunk[0]]].members.push(Member {
                node: i,
                fragments: chunk.len(),
                arity,
            });
        }
    }

    Formation {
        unit_coarse,
        clusters,
        propagated,
        coarse_count: next,
    }
}

/// Builds the next-level network. Fragments carry the decomposed weights of
/// their origin: self weight `s/K²`, sibling links `2s/K²` and link shares
/// `v/(K_i K_j)` between units of two nodes.
pub fn coarsen(net: &Network, formation: &Formation) -> Network {
    let n_c = formation.coarse_count;
    let mut self_w = vec![0.0; n_c];
    let mut contribs: Vec<(NodeId, NodeId, f64)> = Vec::new();
    let mut add = |self_w: &mut Vec<f64>, a: NodeId, b: NodeId, w: f64| {
        if a == b {
            self_w[a] += w;
        } else {
            contribs.push((a.min(b), a.max(b), w));
        }
    };
    for i in 0..net.node_count() {
        let units = &formation.unit_coarse[i];
        let k = units.len() as f64;
        let s = net.self_weight(i);
        if units.len() == 1 {
            self_w[units[0]] += s;
        } else {
            let frag = s / (k * k);
            for (pos, &a) in units.iter().enumerate() {
                self_w[a] += frag;
                for &b in &units[pos + 1..] {
                    add(&mut self_w, a, b, 2.0 * frag);
                }
            }
        }
        for (j, w) in net.links(i) {
            if j < i {
                continue;
            }
            let other = &formation.unit_coarse[j];
            let share = w / (k * other.len() as f64);
            for &a in units {
                for &b in other {
                    add(&mut self_w, a, b, share);
                }
            }
        }
    }
    contribs.sort_by_key(|&(a, b, _)| (a, b));
    let mut links: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(contribs.len());
    for (a, b, w) in contribs {
        match links.last_mut() {
            Some(last) if last.0 == a && last.1 == b => last.2 += w,
            _ => links.push((a, b, w)),
        }
    }
    Network::from_dense((0..n_c as Label).collect(), self_w, &links)
}

/// A cluster of one hierarchy level.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Smallest bottom-level label among the constituents.
    pub id: Label,
    /// Node representing the cluster in the level's coarsened network.
    pub node: NodeId,
    /// Constituents from the previous level.
    pub members: Vec<Member>,
    /// Bottom-level node ids, ascending.
    pub nodes: Vec<NodeId>,
}

/// One iteration of the agglomeration.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    /// Clusters formed on this level, ordered by id then by nodes.
    pub clusters: Vec<Cluster>,
    /// Previous-level nodes carried over unclustered.
    pub propagated: Vec<NodeId>,
    /// Network of formed clusters and propagated nodes.
    pub network: Network,
    /// Bottom-level node ids of every node of `network`.
    pub expansion: Vec<Vec<NodeId>>,
    /// Modularity of `network` with every node on its own.
    pub modularity: f64,
    /// Whether any node was split into fragments on this level.
    pub overlapping: bool,
}

/// The bottom-up hierarchy of overlapping clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    labels: Vec<Label>,
    base_modularity: f64,
    levels: Vec<Level>,
}

impl Hierarchy {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Modularity of the input network with singleton clusters.
    pub fn base_modularity(&self) -> f64 {
        self.base_modularity
    }

    /// Modularity of each level, bottom first.
    pub fn modularities(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.modularity).collect()
    }

    /// Highest level modularity, or the singleton modularity when no level exists.
    pub fn best_modularity(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| l.modularity)
            .fold(None, |acc: Option<f64>, q| {
                Some(acc.map_or(q, |a| a.max(q)))
            })
            .unwrap_or(self.base_modularity)
    }

    /// Index of the middle level, `⌊L/2⌋`.
    pub fn middle_level(&self) -> Option<usize> {
        (!self.levels.is_empty()).then_some(self.levels.len() / 2)
    }

    /// Clusters of a level as bottom-level node ids. The top level also lists
    /// nodes that were never clustered, so it covers the whole network.
    pub fn level_nodes(&self, level: usize) -> Vec<Vec<NodeId>> {
        let lv = &self.levels[level];
        let mut out: Vec<Vec<NodeId>> = lv.clusters.iter().map(|c| c.nodes.clone()).collect();
        if level + 1 == self.levels.len() {
            let clustered: Vec<NodeId> = {
                let mut v: Vec<NodeId> = lv.clusters.iter().map(|c| c.node).collect();
                v.sort_unstable();
                v
            };
            for (node, exp) in lv.expansion.iter().enumerate() {
                if clustered.binary_search(&node).is_err() {
                    out.push(exp.clone());
                }
            }
            out.sort_by(|a, b| (a[0], a).cmp(&(b[0], b)));
        }
        out
    }

    pub fn level_clustering(&self, level: usize) -> Clustering {
        Clustering::new(self.level_nodes(level))
    }

    /// Clusters of a level as external labels, ordered for output: within a
    /// line, nodes exclusive to the cluster come first, then nodes shared with
    /// other clusters of the level, each part ascending.
    pub fn level_labels(&self, level: usize) -> Vec<Vec<Label>> {
        let clusters = self.level_nodes(level);
        let mut count = vec![0u32; self.labels.len()];
        for c in &clusters {
            for &v in c {
                count[v] += 1;
            }
        }
        clusters
            .iter()
            .map(|c| {
                let (mut line, shared): (Vec<NodeId>, Vec<NodeId>) =
                    c.iter().partition(|&&v| count[v] == 1);
                line.extend(shared);
                line.into_iter().map(|v| self.labels[v]).collect()
            })
            .collect()
    }
}

/// Runs the agglomeration to completion.
pub fn cluster(net: &Network) -> Hierarchy {
    let labels = net.labels().to_vec();
    let base_modularity = singleton_modularity(net);
    let mut levels: Vec<Level> = Vec::new();
    let mut expansion: Vec<Vec<NodeId>> = (0..net.node_count()).map(|i| vec![i]).collect();
    let mut owned: Option<Network> = None;

    loop {
        let current = owned.as_ref().unwrap_or(net);
        let states = evaluate_candidates(current);
        let mut formation = form_clusters(current, &states);
        if formation.clusters.is_empty() {
            break;
        }
        // Splitting must not stall the reduction of the node count.
        if formation.coarse_count >= current.node_count() {
            formation = form(current, &states, false);
        }
        let overlapping = formation.split_nodes().next().is_some();
        let next = coarsen(current, &formation);

        let mut next_exp: Vec<Vec<NodeId>> = vec![Vec::new(); formation.coarse_count];
        for (i, units) in formation.unit_coarse.iter().enumerate() {
            for &c in units {
                next_exp[c].extend_from_slice(&expansion[i]);
            }
        }
        for e in &mut next_exp {
            e.sort_unstable();
            e.dedup();
        }

        let mut clusters: Vec<Cluster> = formation
            .clusters
            .into_iter()
            .map(|fc| Cluster {
                id: labels[next_exp[fc.coarse][0]],
                node: fc.coarse,
                members: fc.members,
                nodes: next_exp[fc.coarse].clone(),
            })
            .collect();
        clusters.sort_by(|a, b| (a.id, &a.nodes).cmp(&(b.id, &b.nodes)));

        levels.push(Level {
            clusters,
            propagated: formation.propagated,
            modularity: singleton_modularity(&next),
            network: next.clone(),
            expansion: next_exp.clone(),
            overlapping,
        });
        expansion = next_exp;
        owned = Some(next);
    }

    Hierarchy {
        labels,
        base_modularity,
        levels,
    }
}

/// Name of the manifest written by [`write_hierarchy`].
pub const MANIFEST: &str = "manifest.txt";

pub fn level_file_name(level: usize) -> String {
    format!("level_{}.cnl", level + 1)
}

/// Writes one cluster file per level plus a manifest listing the levels
/// bottom to top. Returns the written paths.
pub fn write_hierarchy(h: &Hierarchy, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut manifest = format!("# levels: {}\n", h.level_count());
    for level in 0..h.level_count() {
        let name = level_file_name(level);
        let path = dir.join(&name);
        let lines = h.level_labels(level);
        write_lines(&path, |out| {
            for line in &lines {
                let text: Vec<String> = line.iter().map(|l| l.to_string()).collect();
                writeln!(out, "{}", text.join(" "))?;
            }
            Ok(())
        })?;
        manifest.push_str(&format!("{} {} {}\n", level + 1, name, lines.len()));
        written.push(path);
    }
    let path = dir.join(MANIFEST);
    write_lines(&path, |out| out.write_all(manifest.as_bytes()))?;
    written.push(path);
    Ok(written)
}

fn write_lines(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_network;

    fn net(text: &str) -> Network {
        parse_network(text.as_bytes(), false, true).unwrap()
    }

    const FIG2: &str = "10 10 10\n20 20 10\n30 30 10\n9 9 9\n9 10 12\n9 20 12\n9 30 12\n";
    const TWO_TRIANGLES: &str = "0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n2 3\n";

    #[test]
    fn propagated_node_is_not_absorbed() {
        // Node 1 ties between 0 and 4, which are not linked; grouping all three
        // loses modularity, so 1 stays out and 0 and 4 have nobody left.
        let n = net("0 0 1\n1 1 3\n2 2 10\n3 3 1\n4 4 1\n0 1\n0 2\n1 2 3\n1 3\n1 4\n2 3 2\n2 4\n");
        let states = evaluate_candidates(&n);
        assert_eq!(states[1].ccs, vec![0, 4]);
        assert!(gain_all(&n, 1, &[0, 4]) < 0.0);
        let f = form_clusters(&n, &states);
        assert!(f.clusters.is_empty());
        assert_eq!(f.propagated, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn weighted_path_forms_one_pair() {
        let n = net("0 1 2\n1 2 1\n");
        let f = form_clusters(&n, &evaluate_candidates(&n));
        assert_eq!(f.clusters.len(), 1);
        let members: Vec<NodeId> = f.clusters[0].members.iter().map(|m| m.node).collect();
        assert_eq!(members, vec![0, 1]);
        assert_eq!(f.propagated, vec![2]);
    }

    #[test]
    fn triangle_merges_whole() {
        let n = net("0 1\n1 2\n2 0\n");
        let h = cluster(&n);
        assert_eq!(h.level_count(), 1);
        assert_eq!(h.level_nodes(0), vec![vec![0, 1, 2]]);
        assert!(h.levels()[0].modularity.abs() < 1e-12);
    }

    #[test]
    fn example_overlap() {
        let n = net(FIG2);
        let f = form_clusters(&n, &evaluate_candidates(&n));
        assert_eq!(f.clusters.len(), 3);
        let c = n.node_of(9).unwrap();
        assert_eq!(f.unit_coarse[c].len(), 3);
        let coarse = coarsen(&n, &f);
        assert_eq!(coarse.node_count(), 3);
        for a in 0..3 {
            assert_eq!(coarse.self_weight(a), 15.0);
            for b in 0..3 {
                if a != b {
                    assert_eq!(coarse.link_weight(a, b), 10.0);
                }
            }
        }
        assert_eq!(coarse.total_weight(), n.total_weight());

        let h = cluster(&n);
        assert_eq!(h.level_count(), 1);
        assert_eq!(
            h.level_labels(0),
            vec![vec![10, 9], vec![20, 9], vec![30, 9]]
        );
    }

    #[test]
    fn disjoint_pairs_stay_disconnected() {
        let n = net("0 1\n2 3\n");
        let f = form_clusters(&n, &evaluate_candidates(&n));
        let coarse = coarsen(&n, &f);
        assert_eq!(coarse.node_count(), 2);
        assert_eq!(coarse.link_count(), 0);
    }

    #[test]
    fn nothing_to_merge() {
        let n = net("0 0 5\n");
        let h = cluster(&n);
        assert!(h.is_empty());
        assert_eq!(h.middle_level(), None);
        let n = net("0 0 10\n1 1 10\n0 1 1\n");
        let f = form_clusters(&n, &evaluate_candidates(&n));
        assert!(f.clusters.is_empty());
        assert_eq!(coarsen(&n, &f).total_weight(), n.total_weight());
    }

    #[test]
    fn two_triangles() {
        let n = net(TWO_TRIANGLES);
        let h = cluster(&n);
        let top = h.level_count() - 1;
        assert_eq!(h.level_nodes(top), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn write_is_deterministic() {
        let n = net(FIG2);
        let h = cluster(&n);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        write_hierarchy(&h, a.path()).unwrap();
        write_hierarchy(&h, b.path()).unwrap();
        for name in [MANIFEST.to_string(), level_file_name(0)] {
            let x = fs::read(a.path().join(&name)).unwrap();
            let y = fs::read(b.path().join(&name)).unwrap();
            assert_eq!(x, y);
        }
        let level = fs::read_to_string(a.path().join(level_file_name(0))).unwrap();
        assert_eq!(level, "10 9\n20 9\n30 9\n");
    }

    #[test]
    fn empty_hierarchy_manifest() {
        let h = cluster(&net("0 0 5\n"));
        let dir = tempfile::tempdir().unwrap();
        let files = write_hierarchy(&h, dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        let text = fs::read_to_string(dir.path().join(MANIFEST)).unwrap();
        assert_eq!(text, "# levels: 0\n");
    }
}

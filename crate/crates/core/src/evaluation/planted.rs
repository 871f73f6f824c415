use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{canonicalize, Arc, Label, Network};
use crate::quality::Clustering;

/// Calls `emit(k)` for every index `k < total` kept with probability `p`,
/// drawing geometric gaps instead of one coin per index.
fn sample_indices(rng: &mut ChaCha8Rng, total: u64, p: f64, mut emit: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(emit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut idx: u64 = 0;
    loop {
        let u: f64 = rng.gen();
        let gap = ((1.0 - u).ln() / log_q).floor();
        if gap >= (total - idx) as f64 {
            return;
        }
        idx += gap as u64;
        emit(idx);
        idx += 1;
        if idx >= total {
            return;
        }
    }
}

/// Walks the pairs `a < b` of `0..n` in row-major order for increasing indices.
struct PairCursor {
    n: u64,
    row: u64,
    row_start: u64,
}

impl PairCursor {
    fn new(n: u64) -> Self {
        PairCursor {
            n,
            row: 0,
            row_start: 0,
        }
    }

    fn pair(&mut self, idx: u64) -> (u64, u64) {
        while idx >= self.row_start + (self.n - 1 - self.row) {
            self.row_start += self.n - 1 - self.row;
            self.row += 1;
        }
        (self.row, self.row + 1 + idx - self.row_start)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Random graph over contiguous communities given by `bounds` (start offsets
/// plus the final `n`). Each community is patched to be internally connected.
fn generate(bounds: &[usize], p_in: f64, p_out: f64, seed: u64) -> Result<(Network, Clustering)> {
    let n = *bounds.last().unwrap();
    let mut community = vec![0usize; n];
    for c in 0..bounds.len() - 1 {
        community[bounds[c]..bounds[c + 1]].fill(c);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();

    for c in 0..bounds.len() - 1 {
        let (start, size) = (bounds[c], bounds[c + 1] - bounds[c]);
        let mut cursor = PairCursor::new(size as u64);
        let total = (size as u64) * (size as u64).saturating_sub(1) / 2;
        sample_indices(&mut rng, total, p_in, |k| {
            let (a, b) = cursor.pair(k);
            edges.push((start + a as usize, start + b as usize));
        });
    }
    let mut cursor = PairCursor::new(n as u64);
    let total = (n as u64) * (n as u64).saturating_sub(1) / 2;
    sample_indices(&mut rng, total, p_out, |k| {
        let (a, b) = cursor.pair(k);
        let (a, b) = (a as usize, b as usize);
        if community[a] != community[b] {
            edges.push((a, b));
        }
    });

    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in &edges {
        if community[a] == community[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    for c in 0..bounds.len() - 1 {
        // Roots in ascending order are the minimal nodes of each component.
        let roots: Vec<usize> = (bounds[c]..bounds[c + 1])
            .filter(|&v| find(&mut parent, v) == v)
            .collect();
        for pair in roots.windows(2) {
            edges.push((pair[0], pair[1]));
        }
    }

    let arcs: Vec<Arc> = edges
        .iter()
        .map(|&(a, b)| Arc::new(a as Label, b as Label, 1.0))
        .collect();
    let net = canonicalize(&arcs, false)?;
    let truth = Clustering::new(bounds.windows(2).map(|w| (w[0]..w[1]).collect::<Vec<_>>()));
    Ok((net, truth))
}

/// Planted-partition graph: `communities` equal blocks of consecutive node
/// labels, links inside a block with probability `p_in` and across blocks with
/// `p_out`. Returns the network and its ground-truth clustering.
pub fn planted_partition(
    n: usize,
    communities: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Network, Clustering)> {
    if !(0.0 <= p_out && p_out < p_in && p_in <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}"
        )));
    }
    if communities == 0 || !n.is_multiple_of(communities) || n / communities < 2 {
        return Err(Error::InvalidArgument(format!(
            "{communities} communities must evenly divide {n} nodes into blocks of at least 2"
        )));
    }
    let size = n / communities;
    let bounds: Vec<usize> = (0..=communities).map(|c| c * size).collect();
    generate(&bounds, p_in, p_out, seed)
}

/// Sparse planted partition with communities of about `community_size` nodes,
/// expected degree `avg_degree` and a fraction `mixing` of it across blocks.
pub fn planted_sparse(
    n: usize,
    avg_degree: f64,
    community_size: usize,
    mixing: f64,
    seed: u64,
) -> Result<(Network, Clustering)> {
    if community_size < 2 || n < 2 * community_size {
        return Err(Error::InvalidArgument(format!(
            "{n} nodes cannot hold two communities of {community_size}"
        )));
    }
    let k = n / community_size;
    let bounds: Vec<usize> = (0..=k).map(|c| c * n / k).collect();
    let size = (n / k) as f64;
    let p_in = ((1.0 - mixing) * avg_degree / (size - 1.0)).min(1.0);
    let p_out = mixing * avg_degree / (n as f64 - size);
    if p_out >= p_in {
        return Err(Error::InvalidArgument(format!(
            "degree {avg_degree} with mixing {mixing} does not separate communities"
        )));
    }
    generate(&bounds, p_in, p_out, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_cursor_enumerates_rows() {
        let mut c = PairCursor::new(4);
        let pairs: Vec<_> = (0..6).map(|k| c.pair(k)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn full_probability_gives_cliques() {
        let (net, truth) = planted_partition(8, 2, 1.0, 0.0, 1).unwrap();
        assert_eq!(net.link_count(), 12);
        assert_eq!(truth.clusters(), &[vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
    }

    #[test]
    fn seeded() {
        let a = planted_partition(60, 4, 0.5, 0.05, 7).unwrap();
        let b = planted_partition(60, 4, 0.5, 0.05, 7).unwrap();
        assert_eq!(a, b);
        let c = planted_partition(60, 4, 0.5, 0.05, 8).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn communities_are_connected() {
        let (net, _) = planted_partition(40, 4, 0.05, 0.0, 3).unwrap();
        assert_eq!(net.node_count(), 40);
        assert!((0..40).all(|v| net.degree(v) >= 1));
        // With p_out = 0 no link crosses a block.
        for (a, b, _) in net.link_list() {
            assert_eq!(net.label(a) / 10, net.label(b) / 10);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(planted_partition(60, 4, 0.1, 0.2, 1).is_err());
        assert!(planted_partition(61, 4, 0.5, 0.1, 1).is_err());
        assert!(planted_partition(60, 0, 0.5, 0.1, 1).is_err());
    }

    #[test]
    fn sparse_degree_is_close() {
        let (net, truth) = planted_sparse(4000, 10.0, 50, 0.2, 5).unwrap();
        let avg = 2.0 * net.link_count() as f64 / net.node_count() as f64;
        assert!((avg - 10.0).abs() < 0.5, "average degree {avg}");
        assert_eq!(truth.len(), 80);
    }
}

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::quality::Clustering;

/// Largest network the exhaustive search accepts (Bell(10) = 115975 partitions).
pub const MAX_ORACLE_NODES: usize = 10;

/// Advances a restricted growth string to its lexicographic successor.
fn next_partition(rgs: &mut [usize]) -> bool {
    for i in (1..rgs.len()).rev() {
        let prefix_max = rgs[..i].iter().copied().max().unwrap_or(0);
        if rgs[i] <= prefix_max {
            rgs[i] += 1;
            rgs[i + 1..].fill(0);
            return true;
        }
    }
    false
}

/// Exhaustively finds the modularity-maximal partition. Ties keep the
/// lexicographically least restricted growth string.
pub fn brute_force_best_partition(net: &Network) -> Result<(Clustering, f64)> {
    let n = net.node_count();
    if n > MAX_ORACLE_NODES {
        return Err(Error::TooLarge {
            n,
            max: MAX_ORACLE_NODES,
        });
    }
    // Dense symmetric adjacency with the self-loop on the diagonal counted
    // from both arc endpoints.
    let mut adj = vec![vec![0.0; n]; n];
    for i in 0..n {
        adj[i][i] = 2.0 * net.self_weight(i);
        for (j, w) in net.links(i) {
            adj[i][j] = w;
        }
    }
    let deg: Vec<f64> = adj.iter().map(|row| row.iter().sum()).collect();
    let two_w: f64 = deg.iter().sum();

    let evaluate = |rgs: &[usize]| -> f64 {
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if rgs[i] == rgs[j] {
                    q += adj[i][j] - deg[i] * deg[j] / two_w;
                }
            }
        }
        q / two_w
    };

    let mut rgs = vec![0usize; n];
    let mut best = rgs.clone();
    let mut best_q = evaluate(&rgs);
    while next_partition(&mut rgs) {
        let q = evaluate(&rgs);
        if q > best_q + 1e-12 {
            best_q = q;
            best.copy_from_slice(&rgs);
        }
    }
    let blocks = best.iter().copied().max().map_or(0, |m| m + 1);
    let mut clusters = vec![Vec::new(); blocks];
    for (node, &b) in best.iter().enumerate() {
        clusters[b].push(node);
    }
    Ok((Clustering::new(clusters), best_q))
}

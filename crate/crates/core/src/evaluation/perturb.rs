use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Network;

/// Removes `⌊fraction · m⌋` links of `net`, see [`remove_links`].
pub fn perturb(net: &Network, fraction: f64, seed: u64) -> Result<Network> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "removal fraction must be in [0, 1), got {fraction}"
        )));
    }
    let count = (fraction * net.link_count() as f64).floor() as usize;
    remove_links(net, count, seed)
}

/// Removes `count` uniformly chosen links, skipping any link whose removal
/// would leave an endpoint without links. Self-loops and weights are kept.
pub fn remove_links(net: &Network, count: usize, seed: u64) -> Result<Network> {
    if count == 0 {
        return Ok(net.clone());
    }
    let mut links: Vec<(usize, usize)> = net
        .link_list()
        .into_iter()
        .map(|(a, b, _)| (a, b))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    links.shuffle(&mut rng);
    let mut degree: Vec<usize> = (0..net.node_count()).map(|i| net.degree(i)).collect();
    let mut removed = Vec::with_capacity(count);
    for (a, b) in links {
        if removed.len() == count {
            break;
        }
        if degree[a] > 1 && degree[b] > 1 {
            degree[a] -= 1;
            degree[b] -= 1;
            removed.push((a, b));
        }
    }
    if removed.len() < count {
        return Err(Error::InfeasibleRemoval {
            achieved: removed.len(),
            requested: count,
        });
    }
    Ok(net.without_links(&removed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_network;

    fn net(text: &str) -> Network {
        parse_network(text.as_bytes(), false, true).unwrap()
    }

    #[test]
    fn zero_fraction_is_identity() {
        let n = net("0 1\n1 2\n2 0\n");
        assert_eq!(perturb(&n, 0.0, 3).unwrap(), n);
    }

    #[test]
    fn star_cannot_lose_leaves() {
        let n = net("0 1\n0 2\n0 3\n0 4\n");
        let err = perturb(&n, 0.5, 1).unwrap_err();
        assert!(matches!(
            err,
            Error::InfeasibleRemoval {
                achieved: 0,
                requested: 2
            }
        ));
    }

    #[test]
    fn seeded_and_degree_preserving() {
        let mut text = String::new();
        for a in 0..12 {
            for b in (a + 1)..12 {
                if (a * 7 + b * 3) % 4 != 0 {
                    text.push_str(&format!("{a} {b}\n"));
                }
            }
        }
        let n = net(&text);
        let a = perturb(&n, 0.3, 9).unwrap();
        let b = perturb(&n, 0.3, 9).unwrap();
        assert_eq!(a, b);
        let expected = n.link_count() - (0.3 * n.link_count() as f64).floor() as usize;
        assert_eq!(a.link_count(), expected);
        assert!((0..a.node_count()).all(|i| a.degree(i) >= 1));
        assert_ne!(perturb(&n, 0.3, 10).unwrap(), a);
    }

    #[test]
    fn weights_are_kept() {
        let n = net("0 1 2.5\n1 2 1\n2 0 4\n0 0 3\n2 3\n3 0\n");
        let p = perturb(&n, 0.2, 1).unwrap();
        assert_eq!(p.self_weight(0), 3.0);
        for (a, b, w) in p.link_list() {
            assert_eq!(w, n.link_weight(a, b));
        }
    }
}

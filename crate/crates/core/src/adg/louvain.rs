use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::inp::NetworkModel;

/// Undirected weighted graph over nodes `0..n`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        Graph { n, edges }
    }

    /// Every node of the network, each link an edge of weight 1. Node order
    /// follows `NetworkModel::node_names`.
    pub fn from_model(model: &NetworkModel) -> Self {
        let names = model.node_names();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let edges = model
            .adjacency()
            .iter()
            .filter_map(|(a, _, b)| Some((*index.get(a.as_str())?, *index.get(b.as_str())?, 1.0)))
            .collect();
        Graph::new(names.len(), edges)
    }

    /// Modularity of a partition at resolution `gamma`.
    pub fn modularity(&self, community: &[usize], gamma: f64) -> f64 {
        let m: f64 = self.edges.iter().map(|e| e.2).sum();
        if m <= 0.0 {
            return 0.0;
        }
        let k = community.iter().copied().max().map_or(0, |c| c + 1);
        let mut inside = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for &(a, b, w) in &self.edges {
            if community[a] == community[b] {
                inside[community[a]] += w;
            }
            tot[community[a]] += w;
            tot[community[b]] += w;
        }
        inside
            .iter()
            .zip(&tot)
            .map(|(i, t)| i / m - gamma * (t / (2.0 * m)).powi(2))
            .sum()
    }
}

/// Aggregated level: neighbours exclude self loops, which are kept apart.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
}

impl Level {
    fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut maps: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
        let mut self_loop = vec![0.0; n];
        for &(a, b, w) in edges {
            if a == b {
                self_loop[a] += w;
            } else {
                *maps[a].entry(b).or_default() += w;
                *maps[b].entry(a).or_default() += w;
            }
        }
        let adj = maps
            .into_iter()
            .map(|m| {
                let mut v: Vec<(usize, f64)> = m.into_iter().collect();
                v.sort_by_key(|e| e.0);
                v
            })
            .collect();
        Level { adj, self_loop }
    }

    fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|e| e.1).sum::<f64>() + 2.0 * self.self_loop[i]
    }

    /// Local moving phase. Returns the community of each node and whether
    /// anything moved.
    fn move_nodes<R: Rng + ?Sized>(&self, m: f64, gamma: f64, rng: &mut R) -> (Vec<usize>, bool) {
        let n = self.adj.len();
        let mut community: Vec<usize> = (0..n).collect();
        let degree: Vec<f64> = (0..n).map(|i| self.degree(i)).collect();
        let mut tot = degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut any = false;
        loop {
            let mut moved = false;
            for &i in &order {
                let own = community[i];
                let mut links: HashMap<usize, f64> = HashMap::new();
                for &(j, w) in &self.adj[i] {
                    *links.entry(community[j]).or_default() += w;
                }
                tot[own] -= degree[i];
                let gain = |c: usize, k_in: f64| k_in / m - gamma * tot[c] * degree[i] / (2.0 * m * m);
                let mut best = own;
                let mut best_gain = gain(own, links.get(&own).copied().unwrap_or(0.0));
                let mut candidates: Vec<(usize, f64)> = links.into_iter().collect();
                candidates.sort_by_key(|e| e.0);
                for (c, k_in) in candidates {
                    let g = gain(c, k_in);
                    if g > best_gain + 1e-12 {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += degree[i];
                if best != own {
                    community[i] = best;
                    moved = true;
                    any = true;
                }
            }
            if !moved {
                break;
            }
        }
        (renumber(&community), any)
    }
}

fn renumber(community: &[usize]) -> Vec<usize> {
    let mut ids = HashMap::new();
    community
        .iter()
        .map(|c| {
            let next = ids.len();
            *ids.entry(*c).or_insert(next)
        })
        .collect()
}

/// Two-phase Louvain on an undirected graph. Stops when a pass moves no
/// node or improves modularity by less than `threshold`. The visit order of
/// each pass is shuffled with `rng`, so results are reproducible per seed.
/// Community ids are numbered by first appearance in node order.
pub fn louvain_communities<R: Rng + ?Sized>(
    graph: &Graph,
    gamma: f64,
    threshold: f64,
    rng: &mut R,
) -> Vec<usize> {
    let mut membership: Vec<usize> = (0..graph.n).collect();
    let m: f64 = graph.edges.iter().map(|e| e.2).sum();
    if graph.n == 0 || m <= 0.0 {
        return membership;
    }
    let mut edges = graph.edges.clone();
    let mut n = graph.n;
    let mut quality = graph.modularity(&membership, gamma);
    loop {
        let level = Level::from_edges(n, &edges);
        let (community, moved) = level.move_nodes(m, gamma, rng);
        if !moved {
            break;
        }
        let candidate: Vec<usize> = membership.iter().map(|&c| community[c]).collect();
        let q = graph.modularity(&candidate, gamma);
        if q - quality < threshold {
            if q > quality {
                membership = candidate;
            }
            break;
        }
        membership = candidate;
        quality = q;
        n = community.iter().copied().max().map_or(0, |c| c + 1);
        edges = edges.iter().map(|&(a, b, w)| (community[a], community[b], w)).collect();
    }
    renumber(&membership)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isolated_nodes_stay_apart() {
        let g = Graph::new(3, vec![]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(louvain_communities(&g, 1.0, 1e-7, &mut rng), vec![0, 1, 2]);
    }

    #[test]
    fn two_cliques() {
        let mut edges = vec![];
        for base in [0, 3] {
            edges.push((base, base + 1, 1.0));
            edges.push((base, base + 2, 1.0));
            edges.push((base + 1, base + 2, 1.0));
        }
        edges.push((2, 3, 1.0));
        let g = Graph::new(6, edges);
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = louvain_communities(&g, 1.0, 1e-7, &mut rng);
            assert_eq!(c, vec![0, 0, 0, 1, 1, 1]);
        }
    }
}

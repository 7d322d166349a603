use serde::{Deserialize, Serialize};

use crate::config::MassConfiguration;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub length: f64,
}

/// The `N - 1` edges of a Euclidean minimum spanning tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MstEdges {
    pub edges: Vec<Edge>,
}

impl MstEdges {
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Strict total order on edges: length, then lexicographic index pair.
fn edge_less(a: (f64, usize, usize), b: (f64, usize, usize)) -> bool {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).is_lt()
}

/// Dense Prim's algorithm, O(N^2).
///
/// Under the strict `(length, i, j)` order the minimum spanning tree is
/// unique, so ties resolve exactly as in Kruskal with lexicographic tie-breaks.
/// Edges are returned in insertion order with `i < j`.
pub fn euclidean_mst(config: &MassConfiguration) -> MstEdges {
    let n = config.len();
    let mut in_tree = vec![false; n];
    // best[v] = (length, lo, hi) of the cheapest edge from the tree to v.
    let mut best = vec![(f64::INFINITY, usize::MAX, usize::MAX); n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    in_tree[0] = true;
    let mut last = 0;
    for _ in 1..n {
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let cand = (config.separation(last, v), last.min(v), last.max(v));
            if edge_less(cand, best[v]) {
                best[v] = cand;
            }
        }
        let next = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| {
                if edge_less(best[a], best[b]) {
                    std::cmp::Ordering::Less
                } else if edge_less(best[b], best[a]) {
                    std::cmp::Ordering::Greater
                } else {
                    a.cmp(&b)
                }
            })
            .expect("vertices remain");
        let (length, i, j) = best[next];
        edges.push(Edge { i, j, length });
        in_tree[next] = true;
        last = next;
    }
    MstEdges { edges }
}

//! A plain k-uniform-ish hypergraph over dense vertex ids. This is the
//! common input shape for every extremal solver in the crate: a set is
//! "independent" when it contains no edge in full.

/// Edges are stored as sorted, deduplicated vertex lists; the edge list
/// itself is sorted lexicographically so construction order never leaks
/// into solver behavior.
#[derive(Debug, Clone)]
pub struct Hypergraph {
    num_vertices: usize,
    edges: Vec<Vec<u32>>,
    vertex_edges: Vec<Vec<u32>>,
}

impl Hypergraph {
    pub fn new(num_vertices: usize, mut edges: Vec<Vec<u32>>) -> Self {
        for e in &mut edges {
            e.sort_unstable();
            e.dedup();
            assert!(!e.is_empty());
            assert!((*e.last().unwrap() as usize) < num_vertices);
        }
        edges.sort();
        edges.dedup();
        let mut vertex_edges = vec![Vec::new(); num_vertices];
        for (idx, e) in edges.iter().enumerate() {
            for &v in e {
                vertex_edges[v as usize].push(idx as u32);
            }
        }
        Hypergraph {
            num_vertices,
            edges,
            vertex_edges,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &[u32] {
        &self.edges[idx]
    }

    pub fn edges_of(&self, v: u32) -> &[u32] {
        &self.vertex_edges[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.vertex_edges[v as usize].len()
    }

    /// True iff `contains(v)` holds for every vertex of no edge... i.e. the
    /// described set contains no edge in full.
    pub fn is_independent(&self, contains: impl Fn(u32) -> bool) -> bool {
        self.edges
            .iter()
            .all(|e| !e.iter().all(|&v| contains(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_edges() {
        let h = Hypergraph::new(4, vec![vec![2, 1, 0], vec![0, 1, 2], vec![3, 0]]);
        assert_eq!(h.num_edges(), 2);
        assert_eq!(h.edge(0), &[0, 1, 2]);
        assert_eq!(h.edge(1), &[0, 3]);
        assert_eq!(h.degree(0), 2);
    }

    #[test]
    fn independence_check() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]);
        assert!(h.is_independent(|v| v < 2));
        assert!(!h.is_independent(|_| true));
        assert!(h.is_independent(|_| false));
    }
}

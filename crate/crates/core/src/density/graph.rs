use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::Matrix;

/// Undirected multigraph on vertices `0..n` without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;
    fn try_from(r: GraphRepr) -> Result<Self> {
        Graph::new(r.n, r.edges)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges,
        }
    }
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v`, repeated once per parallel edge.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn distinct_neighbors(&self, v: usize) -> Vec<usize> {
        let mut nb = self.adj[v].clone();
        nb.sort_unstable();
        nb.dedup();
        nb
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }

    pub fn is_regular(&self) -> bool {
        self.adj.windows(2).all(|w| w[0].len() == w[1].len())
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicities().values().all(|&m| m == 1)
    }

    /// Edge multiplicities keyed by `(min, max)` endpoint.
    pub fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for &(u, v) in &self.edges {
            *m.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        }
        m
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `A(G)`, counting parallel edges.
    pub fn adjacency_matrix(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n.max(1));
        for &(u, v) in &self.edges {
            a[(u, v)] += 1.0;
            a[(v, u)] += 1.0;
        }
        a
    }

    /// Number of edges with both endpoints in the marked set.
    pub fn induced_edge_count(&self, in_set: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| in_set[u] && in_set[v])
            .count()
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("path")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).expect("cycle")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Graph::new(n, edges).expect("complete graph")
    }

    /// `K_{1,leaves}` with the center at vertex 0.
    pub fn star(leaves: usize) -> Self {
        Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i)).collect()).expect("star")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::new(10, edges).expect("petersen")
    }

    /// Uniform random recursive tree: vertex `i` attaches to a uniform earlier vertex.
    pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let edges = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
        Graph::new(n, edges).expect("random tree")
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn random_gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        Graph::new(n, edges).expect("gnp")
    }

    /// A stacked planar triangulation on `n >= 3` vertices (each new vertex
    /// is placed inside a random face and joined to its three corners), with
    /// every edge then kept independently with probability `keep`.
    pub fn random_planar<R: Rng + ?Sized>(n: usize, keep: f64, rng: &mut R) -> Self {
        assert!(n >= 3, "planar generator needs n >= 3");
        let mut edges = vec![(0, 1), (1, 2), (0, 2)];
        let mut faces = vec![[0, 1, 2], [0, 1, 2]];
        for v in 3..n {
            let f = rng.random_range(0..faces.len());
            let [a, b, c] = faces.swap_remove(f);
            edges.extend([(a, v), (b, v), (c, v)]);
            faces.extend([[a, b, v], [b, c, v], [a, c, v]]);
        }
        let kept = edges.into_iter().filter(|_| rng.random_bool(keep)).collect();
        Graph::new(n, kept).expect("planar")
    }
}

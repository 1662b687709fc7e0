use serde::{Deserialize, Serialize};

use super::flow::{FlowNetwork, INF};
use super::graph::Graph;
use crate::error::{Error, Result};

/// An orientation of every edge; edge `k` points from its tail to `heads[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub heads: Vec<usize>,
    pub indeg: Vec<usize>,
    pub outdeg: Vec<usize>,
}

/// A vertex set on which the in-degree bounds cannot be met:
/// `induced_edges > min(upper_sum, lower_slack)` where `lower_slack` is
/// `sum (d_v - lower_v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub set: Vec<usize>,
    pub induced_edges: i64,
    pub upper_sum: i64,
    pub lower_slack: i64,
}

impl Violation {
    pub fn is_violated(&self) -> bool {
        self.induced_edges > self.upper_sum.min(self.lower_slack)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationOutcome {
    Oriented(Orientation),
    Infeasible(Violation),
}

/// Edge classes `(u, v, multiplicity)` of a multigraph.
pub(crate) struct Bundles<'a> {
    pub n: usize,
    pub pairs: &'a [(usize, usize, i64)],
}

pub(crate) enum BundleOutcome {
    /// Number of copies of each bundle oriented towards its second endpoint.
    Oriented(Vec<i64>),
    Infeasible(Violation),
}

impl Bundles<'_> {
    fn degrees(&self) -> Vec<i64> {
        let mut d = vec![0i64; self.n];
        for &(u, v, m) in self.pairs {
            d[u] += m;
            d[v] += m;
        }
        d
    }

    fn violation(&self, in_set: &[bool], lower: &[i64], upper: &[i64]) -> Violation {
        let d = self.degrees();
        let set: Vec<usize> = (0..self.n).filter(|&v| in_set[v]).collect();
        let induced_edges = self
            .pairs
            .iter()
            .filter(|&&(u, v, _)| in_set[u] && in_set[v])
            .map(|&(_, _, m)| m)
            .sum();
        Violation {
            induced_edges,
            upper_sum: set.iter().map(|&v| upper[v]).sum(),
            lower_slack: set.iter().map(|&v| d[v] - lower[v]).sum(),
            set,
        }
    }

    /// Hakimi's test: can every edge be sent to an endpoint so that `v`
    /// receives at most `cap[v]` edges? On failure returns the source side
    /// of a minimum cut, a set with more induced edges than capacity.
    fn hakimi(&self, cap: &[i64]) -> Option<Vec<bool>> {
        if let Some(v) = (0..self.n).find(|&v| cap[v] < 0) {
            let mut s = vec![false; self.n];
            s[v] = true;
            return Some(s);
        }
        let (src, sink) = (0, 1);
        let base = 2 + self.pairs.len();
        let mut net = FlowNetwork::new(base + self.n);
        let mut total = 0i64;
        for (k, &(u, v, m)) in self.pairs.iter().enumerate() {
            net.add_arc(src, 2 + k, m);
            net.add_arc(2 + k, base + u, INF);
            net.add_arc(2 + k, base + v, INF);
            total += m;
        }
        for (v, &c) in cap.iter().enumerate() {
            net.add_arc(base + v, sink, c.min(INF));
        }
        if net.max_flow(src, sink) == total {
            return None;
        }
        let side = net.source_side(src);
        Some((0..self.n).map(|v| side[base + v]).collect())
    }

    pub fn orient(&self, lower: &[i64], upper: &[i64]) -> Result<BundleOutcome> {
        let d = self.degrees();
        if let Some(s) = self.hakimi(upper) {
            return Ok(BundleOutcome::Infeasible(self.violation(&s, lower, upper)));
        }
        let out_cap: Vec<i64> = (0..self.n).map(|v| d[v] - lower[v]).collect();
        if let Some(s) = self.hakimi(&out_cap) {
            return Ok(BundleOutcome::Infeasible(self.violation(&s, lower, upper)));
        }

        // Both one-sided conditions hold, so a circulation with lower bounds
        // on the vertex -> sink arcs exists.
        let (src, sink, ssrc, ssink) = (0, 1, 2, 3);
        let base = 4 + self.pairs.len();
        let mut net = FlowNetwork::new(base + self.n);
        let mut excess = vec![0i64; base + self.n];
        let mut towards_second = Vec::with_capacity(self.pairs.len());
        for (k, &(u, v, m)) in self.pairs.iter().enumerate() {
            // source -> bundle carries exactly m
            excess[src] -= m;
            excess[4 + k] += m;
            net.add_arc(4 + k, base + u, INF);
            towards_second.push(net.add_arc(4 + k, base + v, INF));
        }
        for v in 0..self.n {
            let lo = lower[v].max(0);
            let hi = upper[v].min(d[v]);
            if lo > hi {
                return Err(Error::PreconditionFailed(format!(
                    "empty in-degree range at vertex {v}"
                )));
            }
            excess[base + v] -= lo;
            excess[sink] += lo;
            net.add_arc(base + v, sink, hi - lo);
        }
        net.add_arc(sink, src, INF);
        let mut need = 0i64;
        for (node, &e) in excess.iter().enumerate() {
            if e > 0 {
                net.add_arc(ssrc, node, e);
                need += e;
            } else if e < 0 {
                net.add_arc(node, ssink, -e);
            }
        }
        if net.max_flow(ssrc, ssink) != need {
            return Err(Error::PreconditionFailed(
                "one-sided orientation conditions hold but the combined flow failed".into(),
            ));
        }
        Ok(BundleOutcome::Oriented(
            towards_second.into_iter().map(|id| net.flow(id)).collect(),
        ))
    }
}

/// Orient every edge so that `lower[v] <= indeg(v) <= upper[v]`, or return a
/// vertex set certifying that no such orientation exists.
pub fn orient_with_bounds(g: &Graph, lower: &[i64], upper: &[i64]) -> Result<OrientationOutcome> {
    let n = g.n();
    for len in [lower.len(), upper.len()] {
        if len != n {
            return Err(Error::BoundsMismatch {
                expected: n,
                found: len,
            });
        }
    }
    if let Some(v) = (0..n).find(|&v| lower[v] > upper[v]) {
        return Err(Error::PreconditionFailed(format!(
            "lower bound exceeds upper bound at vertex {v}"
        )));
    }
    let mult = g.multiplicities();
    let pairs: Vec<(usize, usize, i64)> = mult.iter().map(|(&(u, v), &m)| (u, v, m as i64)).collect();
    let bundles = Bundles { n, pairs: &pairs };
    let counts = match bundles.orient(lower, upper)? {
        BundleOutcome::Infeasible(v) => return Ok(OrientationOutcome::Infeasible(v)),
        BundleOutcome::Oriented(c) => c,
    };

    // hand out the per-bundle counts to the individual parallel edges
    let mut remaining: std::collections::BTreeMap<(usize, usize), i64> = pairs
        .iter()
        .zip(&counts)
        .map(|(&(u, v, _), &c)| ((u, v), c))
        .collect();
    let mut heads = Vec::with_capacity(g.edge_count());
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for &(a, b) in g.edges() {
        let (u, v) = (a.min(b), a.max(b));
        let left = remaining.get_mut(&(u, v)).expect("edge bundle");
        let (tail, head) = if *left > 0 {
            *left -= 1;
            (u, v)
        } else {
            (v, u)
        };
        heads.push(head);
        indeg[head] += 1;
        outdeg[tail] += 1;
    }
    Ok(OrientationOutcome::Oriented(Orientation { heads, indeg, outdeg }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oriented(o: OrientationOutcome) -> Orientation {
        match o {
            OrientationOutcome::Oriented(o) => o,
            OrientationOutcome::Infeasible(v) => panic!("unexpected violation {v:?}"),
        }
    }

    #[test]
    fn cycle_forced_to_be_cyclic() {
        let g = Graph::cycle(4);
        let o = oriented(orient_with_bounds(&g, &[1; 4], &[1; 4]).unwrap());
        assert_eq!(o.indeg, vec![1; 4]);
        assert_eq!(o.outdeg, vec![1; 4]);
    }

    #[test]
    fn triangle_with_unit_caps() {
        let g = Graph::complete(3);
        let o = oriented(orient_with_bounds(&g, &[0; 3], &[1; 3]).unwrap());
        assert_eq!(o.indeg, vec![1; 3]);
    }

    #[test]
    fn star_with_zero_caps_is_infeasible() {
        let g = Graph::star(3);
        match orient_with_bounds(&g, &[0; 4], &[0; 4]).unwrap() {
            OrientationOutcome::Infeasible(v) => {
                assert_eq!(v.set, vec![0, 1, 2, 3]);
                assert_eq!(v.induced_edges, 3);
                assert!(v.is_violated());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn lower_bounds_alone_can_fail() {
        // a path with 2 edges cannot give every vertex in-degree 1
        let g = Graph::path(3);
        match orient_with_bounds(&g, &[1; 3], &[2; 3]).unwrap() {
            OrientationOutcome::Infeasible(v) => assert!(v.is_violated()),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn multigraph_counts_split_across_copies() {
        let g = Graph::new(2, vec![(0, 1), (0, 1), (1, 0)]).unwrap();
        let o = oriented(orient_with_bounds(&g, &[1, 1], &[2, 2]).unwrap());
        assert_eq!(o.indeg.iter().sum::<usize>(), 3);
        assert!(o.indeg.iter().all(|&d| (1..=2).contains(&d)));
    }

    #[test]
    fn length_mismatch() {
        let g = Graph::path(3);
        assert!(matches!(
            orient_with_bounds(&g, &[0; 2], &[1; 3]),
            Err(Error::BoundsMismatch { expected: 3, found: 2 })
        ));
    }
}

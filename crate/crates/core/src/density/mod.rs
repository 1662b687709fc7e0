//! Exact maximum density, bounded-indegree orientations, the `R = B + B^T`
//! decomposition and density bounds for sparse graph classes.
//!
//! All combinatorial quantities are exact: densities are reduced fractions
//! and decompositions of rational matrices are carried as integer numerators
//! over a common denominator.

mod classes;
mod decompose;
mod flow;
mod graph;
mod orient;
mod rational;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

pub use classes::{class_density_bound, class_params, ClassBound, ClassParams, Provenance};
pub use decompose::{decompose, decompose_graph, decompose_rational, Decomposition};
pub use graph::Graph;
pub use orient::{orient_with_bounds, Orientation, OrientationOutcome, Violation};
pub use rational::{ratio_to_f64, snap_rational, RationalMatrix, DENOMINATOR_CAP};

use crate::error::{Error, Result};
use crate::norms::Matrix;
use flow::{FlowNetwork, INF};

/// Exhaustive enumeration is used only below this order.
pub const ENUMERATION_LIMIT: usize = 24;

/// Exact maximum density `num/den` together with a vertex set attaining it.
///
/// The witness is a smallest densest set (ties broken lexicographically),
/// 0-indexed and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Density {
    pub num: i64,
    pub den: i64,
    pub witness: Vec<usize>,
}

impl Density {
    fn from_ratio(r: Rational64, witness: Vec<usize>) -> Self {
        Density {
            num: *r.numer(),
            den: *r.denom(),
            witness,
        }
    }

    pub fn ratio(&self) -> Rational64 {
        Rational64::new(self.num, self.den)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Nonnegative pair weights plus vertex self-weights; the score of a set `S`
/// is `(sum of pair weights inside S + sum of self-weights on S) / |S|`.
#[derive(Debug, Clone)]
pub(crate) struct WeightedInstance {
    pub n: usize,
    pub pairs: Vec<(usize, usize, i64)>,
    pub self_weight: Vec<i64>,
}

impl WeightedInstance {
    fn from_graph(g: &Graph) -> Self {
        let pairs = g
            .multiplicities()
            .into_iter()
            .map(|((u, v), m)| (u, v, m as i64))
            .collect();
        WeightedInstance {
            n: g.n(),
            pairs,
            self_weight: vec![0; g.n()],
        }
    }

    /// Pair weight `2 D r_ij` and self-weight `D r_ii`, so that the score of
    /// `S` is `2D` times the matrix density of `S`.
    fn from_rational(r: &RationalMatrix) -> Result<Self> {
        let n = r.n();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = r.num(i, j);
                if w > 0 {
                    let w = w.checked_mul(2).ok_or(Error::Overflow("pair weight"))?;
                    pairs.push((i, j, w));
                }
            }
        }
        let self_weight = (0..n).map(|i| r.num(i, i)).collect();
        Ok(WeightedInstance { n, pairs, self_weight })
    }

    fn weight(&self, in_set: &[bool]) -> i128 {
        let pairs: i128 = self
            .pairs
            .iter()
            .filter(|&&(u, v, _)| in_set[u] && in_set[v])
            .map(|&(_, _, w)| w as i128)
            .sum();
        let selfs: i128 = (0..self.n)
            .filter(|&v| in_set[v])
            .map(|v| self.self_weight[v] as i128)
            .sum();
        pairs + selfs
    }

    /// Closure network for `max_S  q W(S) - p |S|`; optionally forces
    /// `forced` into the source side. Returns the inclusion-minimal optimal
    /// vertex set.
    fn max_closure(&self, p: i64, q: i64, forced: Option<usize>) -> Result<Vec<bool>> {
        let (src, sink) = (0, 1);
        let base = 2 + self.pairs.len();
        let mut net = FlowNetwork::new(base + self.n);
        let mul = |a: i64, b: i64| a.checked_mul(b).ok_or(Error::Overflow("density flow"));
        let mut total = 0i64;
        for (k, &(u, v, w)) in self.pairs.iter().enumerate() {
            let cap = mul(q, w)?;
            total = total.checked_add(cap).ok_or(Error::Overflow("density flow"))?;
            net.add_arc(src, 2 + k, cap);
            net.add_arc(2 + k, base + u, INF);
            net.add_arc(2 + k, base + v, INF);
        }
        for v in 0..self.n {
            let profit = mul(q, self.self_weight[v])?
                .checked_sub(p)
                .ok_or(Error::Overflow("density flow"))?;
            if profit > 0 {
                total = total.checked_add(profit).ok_or(Error::Overflow("density flow"))?;
                net.add_arc(src, base + v, profit);
            } else if profit < 0 {
                net.add_arc(base + v, sink, -profit);
            }
        }
        if total >= INF {
            return Err(Error::Overflow("density flow"));
        }
        if let Some(v) = forced {
            net.add_arc(src, base + v, INF);
        }
        net.max_flow(src, sink);
        let side = net.source_side(src);
        Ok((0..self.n).map(|v| side[base + v]).collect())
    }

    /// Parametric (Dinkelbach) iteration: start from the whole vertex set and
    /// replace the current ratio by the density of the optimal closure until
    /// no set beats it.
    fn densest(&self) -> Result<(Rational64, Vec<usize>)> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        let all = vec![true; self.n];
        let mut best = ratio_of(self.weight(&all), self.n)?;
        loop {
            let (p, q) = (*best.numer(), *best.denom());
            let set = self.max_closure(p, q, None)?;
            let size = set.iter().filter(|&&b| b).count();
            let gain = q as i128 * self.weight(&set) - p as i128 * size as i128;
            if gain <= 0 {
                break;
            }
            best = ratio_of(self.weight(&set), size)?;
        }
        let witness = self.smallest_witness(best)?;
        Ok((best, witness))
    }

    /// Every smallest densest set is the inclusion-minimal densest set
    /// containing any of its vertices, so scanning those n candidates finds
    /// the smallest one.
    fn smallest_witness(&self, kappa: Rational64) -> Result<Vec<usize>> {
        let (p, q) = (*kappa.numer(), *kappa.denom());
        let mut best: Option<Vec<usize>> = None;
        for v in 0..self.n {
            let set = self.max_closure(p, q, Some(v))?;
            let size = set.iter().filter(|&&b| b).count();
            if q as i128 * self.weight(&set) != p as i128 * size as i128 {
                continue;
            }
            let members: Vec<usize> = (0..self.n).filter(|&u| set[u]).collect();
            let better = match &best {
                None => true,
                Some(b) => (members.len(), &members) < (b.len(), b),
            };
            if better {
                best = Some(members);
            }
        }
        best.ok_or(Error::PreconditionFailed(
            "no densest set recovered at the optimal ratio".into(),
        ))
    }

    /// Exhaustive search over all nonempty subsets, for `n <= ENUMERATION_LIMIT`.
    fn densest_enumerate(&self) -> Result<(Rational64, Vec<usize>)> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        if self.n > ENUMERATION_LIMIT {
            return Err(Error::StateSpaceTooLarge {
                size: 1u128 << self.n,
                cap: 1 << ENUMERATION_LIMIT,
            });
        }
        // (weight, size, members) of the incumbent
        let mut best: Option<(i128, usize, Vec<usize>)> = None;
        let mut in_set = vec![false; self.n];
        for mask in 1u64..(1u64 << self.n) {
            for (v, slot) in in_set.iter_mut().enumerate() {
                *slot = mask >> v & 1 == 1;
            }
            let w = self.weight(&in_set);
            let members: Vec<usize> = (0..self.n).filter(|&v| in_set[v]).collect();
            let s = members.len();
            let better = match &best {
                None => true,
                Some((bw, bs, bm)) => {
                    let (lhs, rhs) = (w * *bs as i128, *bw * s as i128);
                    lhs > rhs || (lhs == rhs && (s, &members) < (*bs, bm))
                }
            };
            if better {
                best = Some((w, s, members));
            }
        }
        let (w, s, members) = best.expect("n >= 1");
        Ok((ratio_of(w, s)?, members))
    }
}

fn ratio_of(weight: i128, size: usize) -> Result<Rational64> {
    let w = i64::try_from(weight).map_err(|_| Error::Overflow("density value"))?;
    Ok(Rational64::new(w, size as i64))
}

/// `max |E_S| / |S|` over nonempty vertex sets, counting parallel edges.
pub fn max_density(g: &Graph) -> Result<Density> {
    let inst = WeightedInstance::from_graph(g);
    let (kappa, witness) = inst.densest()?;
    Ok(Density::from_ratio(kappa, witness))
}

/// The same quantity by enumerating all `2^n - 1` vertex sets.
pub fn max_density_enumerate(g: &Graph) -> Result<Density> {
    let (kappa, witness) = WeightedInstance::from_graph(g).densest_enumerate()?;
    Ok(Density::from_ratio(kappa, witness))
}

/// `kappa(R) = max_I sum_{i,j in I} r_ij / (2|I|)` for a symmetric matrix
/// with rational entries (decimals are snapped, see [`RationalMatrix`]).
pub fn kappa_matrix(r: &Matrix) -> Result<Density> {
    kappa_rational(&RationalMatrix::from_matrix(r)?)
}

pub fn kappa_rational(r: &RationalMatrix) -> Result<Density> {
    if !r.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if !r.is_nonnegative() {
        return Err(Error::InvalidMatrix("density needs nonnegative entries".into()));
    }
    let inst = WeightedInstance::from_rational(r)?;
    let (score, witness) = match inst.densest() {
        Err(Error::Overflow(_)) if r.n() <= ENUMERATION_LIMIT => inst.densest_enumerate()?,
        other => other?,
    };
    let scale = r.den().checked_mul(2).ok_or(Error::Overflow("kappa scale"))?;
    Ok(Density::from_ratio(score / scale, witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_density() {
        let d = max_density(&Graph::complete(4)).unwrap();
        assert_eq!((d.num, d.den), (3, 2));
        assert_eq!(d.witness, vec![0, 1, 2, 3]);
    }

    #[test]
    fn witness_is_smallest_densest_set() {
        // two disjoint K4s: each clique and their union all have density 3/2
        let mut edges = Vec::new();
        for base in [4, 0] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((base + i, base + j));
                }
            }
        }
        let g = Graph::new(8, edges).unwrap();
        let d = max_density(&g).unwrap();
        assert_eq!(d.ratio(), Rational64::new(3, 2));
        assert_eq!(d.witness, vec![0, 1, 2, 3]);
        assert_eq!(d, max_density_enumerate(&g).unwrap());
    }

    #[test]
    fn diagonal_matrix_density() {
        let r = Matrix::from_rows(&[[0.6, 0.0], [0.0, 0.2]]).unwrap();
        let d = kappa_matrix(&r).unwrap();
        assert_eq!((d.num, d.den), (3, 10));
        assert_eq!(d.witness, vec![0]);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let r = Matrix::from_rows(&[[0.0, 0.5], [0.25, 0.0]]).unwrap();
        assert_eq!(kappa_matrix(&r), Err(Error::NotSymmetric));
    }

    #[test]
    fn empty_graph_rejected() {
        let g = Graph::new(0, vec![]).unwrap();
        assert_eq!(max_density(&g), Err(Error::EmptyGraph));
    }

    #[test]
    fn isolated_vertices_only() {
        let g = Graph::new(3, vec![]).unwrap();
        let d = max_density(&g).unwrap();
        assert_eq!((d.num, d.den, d.witness), (0, 1, vec![0]));
    }
}

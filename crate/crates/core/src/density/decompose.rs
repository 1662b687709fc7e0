use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::orient::{BundleOutcome, Bundles};
use super::rational::{ratio_to_f64, RationalMatrix};
use super::kappa_rational;
use crate::error::{Error, Result};
use crate::norms::Matrix;

/// `R = B + B^T` with `||B||_1 <= kappa(R)` and `||B||_inf <= alpha - kappa(R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub b: Matrix,
    /// `B` exactly, as integer numerators over the common scale `N`.
    pub b_exact: RationalMatrix,
    pub kappa: Rational64,
    pub alpha: Rational64,
    pub col_max: f64,
    pub row_max: f64,
    pub col_max_exact: Rational64,
    pub row_max_exact: Rational64,
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow("decomposition scale"))
}

/// Decompose a symmetric nonnegative matrix with rational (or snapped
/// decimal) entries.
pub fn decompose(r: &Matrix) -> Result<Decomposition> {
    decompose_rational(&RationalMatrix::from_matrix(r)?)
}

pub fn decompose_graph(g: &Graph) -> Result<Decomposition> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let n = g.n();
    let mut nums = vec![0i64; n * n];
    for &(u, v) in g.edges() {
        nums[u * n + v] += 1;
        nums[v * n + u] += 1;
    }
    decompose_rational(&RationalMatrix::new(n, 1, nums)?)
}

pub fn decompose_rational(r: &RationalMatrix) -> Result<Decomposition> {
    let kappa = kappa_rational(r)?.ratio();
    let alpha = r.max_col_sum();
    let n = r.n();
    let d = r.den();

    // Work in units of 1/N where N makes R, diag(R)/2 and kappa integral.
    let big_n = mul(2, d)?.lcm(kappa.denom());
    let scale = big_n / d;
    let kappa_n = mul(*kappa.numer(), big_n / kappa.denom())?;
    let alpha_n = mul(*alpha.numer(), big_n / alpha.denom())?;

    let mut pairs = Vec::new();
    let mut degree = vec![0i64; n];
    for i in 0..n {
        for j in i + 1..n {
            let m = mul(r.num(i, j), scale)?;
            if m > 0 {
                pairs.push((i, j, m));
                degree[i] += m;
                degree[j] += m;
            }
        }
    }
    let half_diag: Vec<i64> = (0..n)
        .map(|v| mul(r.num(v, v), scale).map(|x| x / 2))
        .collect::<Result<_>>()?;
    let upper: Vec<i64> = (0..n).map(|v| kappa_n - half_diag[v]).collect();
    let lower: Vec<i64> = (0..n)
        .map(|v| degree[v] + kappa_n - alpha_n + half_diag[v])
        .collect();

    let bundles = Bundles { n, pairs: &pairs };
    let counts = match bundles.orient(&lower, &upper)? {
        BundleOutcome::Oriented(c) => c,
        BundleOutcome::Infeasible(v) => {
            return Err(Error::PreconditionFailed(format!(
                "no orientation meets the density bounds (violating set {:?})",
                v.set
            )))
        }
    };

    let mut nums = vec![0i64; n * n];
    for (&(u, v, m), &towards_v) in pairs.iter().zip(&counts) {
        nums[u * n + v] = towards_v;
        nums[v * n + u] = m - towards_v;
    }
    for v in 0..n {
        nums[v * n + v] = half_diag[v];
    }
    let b_exact = RationalMatrix::new(n, big_n, nums)?;
    let col_max_exact = b_exact.max_col_sum();
    let row_max_exact = b_exact.max_row_sum();
    Ok(Decomposition {
        b: b_exact.to_matrix(),
        b_exact,
        kappa,
        alpha,
        col_max: ratio_to_f64(col_max_exact),
        row_max: ratio_to_f64(row_max_exact),
        col_max_exact,
        row_max_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(dec: &Decomposition, r: &RationalMatrix) {
        let sum = dec.b_exact.add(&dec.b_exact.transpose()).unwrap();
        assert!(sum.value_eq(r));
        assert!(dec.col_max_exact <= dec.kappa);
        assert!(dec.row_max_exact <= dec.alpha - dec.kappa);
    }

    #[test]
    fn single_edge_splits_evenly() {
        let g = Graph::path(2);
        let dec = decompose_graph(&g).unwrap();
        assert_eq!(dec.kappa, Rational64::new(1, 2));
        assert_eq!(dec.col_max_exact, Rational64::new(1, 2));
        assert_eq!(dec.row_max_exact, Rational64::new(1, 2));
        assert_eq!(dec.b.rows(), vec![vec![0.0, 0.5], vec![0.5, 0.0]]);
    }

    #[test]
    fn four_cycle_becomes_directed_cycle() {
        let dec = decompose_graph(&Graph::cycle(4)).unwrap();
        assert_eq!(dec.col_max_exact, Rational64::from_integer(1));
        assert_eq!(dec.row_max_exact, Rational64::from_integer(1));
        for j in 0..4 {
            assert_eq!(dec.b.column(j).iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn diagonal_entries_are_halved() {
        let r = Matrix::from_rows(&[[0.4, 0.2, 0.0], [0.2, 0.0, 0.3], [0.0, 0.3, 0.1]]).unwrap();
        let q = RationalMatrix::from_matrix(&r).unwrap();
        let dec = decompose(&r).unwrap();
        check(&dec, &q);
        assert_eq!(dec.b_exact.get(0, 0), Rational64::new(1, 5));
    }

    #[test]
    fn asymmetric_input_rejected() {
        let r = Matrix::from_rows(&[[0.0, 1.0], [0.5, 0.0]]).unwrap();
        assert_eq!(decompose(&r), Err(Error::NotSymmetric));
    }
}

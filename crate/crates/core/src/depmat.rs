//! Dependency matrices and the update-operator algebra.
//!
//! Site indices are 0-based throughout. `R_j` is the identity with column
//! `j` replaced by column `j` of `R`; the random-update matrix is the
//! average of the `R_j` and the scan matrix their ordered product.

use serde::{Deserialize, Serialize};

use crate::density::Graph;
use crate::error::{Error, Result};
use crate::norms::{left_slack, Matrix};

const PRECONDITION_TOL: f64 = 1e-10;
const CONCLUSION_TOL: f64 = 1e-9;

/// A square matrix with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct DependencyMatrix {
    inner: Matrix,
}

impl TryFrom<Matrix> for DependencyMatrix {
    type Error = Error;
    fn try_from(m: Matrix) -> Result<Self> {
        DependencyMatrix::new(m)
    }
}

impl From<DependencyMatrix> for Matrix {
    fn from(d: DependencyMatrix) -> Matrix {
        d.inner
    }
}

impl DependencyMatrix {
    pub fn new(inner: Matrix) -> Result<Self> {
        if let Some(x) = inner.as_slice().iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidMatrix(format!(
                "dependency entries must lie in [0, 1], found {x}"
            )));
        }
        Ok(DependencyMatrix { inner })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    pub fn into_inner(self) -> Matrix {
        self.inner
    }
}

/// A permutation of the sites giving the sweep order of systematic scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ScanOrder {
    order: Vec<usize>,
}

impl TryFrom<Vec<usize>> for ScanOrder {
    type Error = Error;
    fn try_from(order: Vec<usize>) -> Result<Self> {
        ScanOrder::new(order)
    }
}

impl From<ScanOrder> for Vec<usize> {
    fn from(s: ScanOrder) -> Vec<usize> {
        s.order
    }
}

impl ScanOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &j in &order {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPermutation { n });
            }
        }
        Ok(ScanOrder { order })
    }

    pub fn identity(n: usize) -> Self {
        ScanOrder {
            order: (0..n).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// `R_j`: the identity with column `j` replaced by column `j` of `R`.
pub fn site_update_matrix(r: &DependencyMatrix, j: usize) -> Result<Matrix> {
    let n = r.n();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    let m = r.matrix();
    Ok(Matrix::from_fn(n, |i, k| {
        if k == j {
            m[(i, j)]
        } else if i == k {
            1.0
        } else {
            0.0
        }
    }))
}

/// `R† = ((n - 1) I + R) / n`.
pub fn random_update_matrix(r: &DependencyMatrix) -> Matrix {
    let n = r.n();
    let nf = n as f64;
    let m = r.matrix();
    Matrix::from_fn(n, |i, j| {
        let diag = if i == j { nf - 1.0 } else { 0.0 };
        (diag + m[(i, j)]) / nf
    })
}

/// `R_{o1} R_{o2} ... R_{on}`. Right-multiplying by `R_j` only rewrites
/// column `j` (to `M r_j`), so the product costs `O(n^3)` overall.
pub fn scan_update_matrix(r: &DependencyMatrix, order: &ScanOrder) -> Result<Matrix> {
    let n = r.n();
    if order.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: order.len(),
        });
    }
    let m = r.matrix();
    let mut acc = Matrix::identity(n);
    for &j in order.as_slice() {
        let col = acc.mul_vec(&m.column(j));
        for (i, x) in col.into_iter().enumerate() {
            acc[(i, j)] = x;
        }
    }
    Ok(acc)
}

/// `R^σ`: strict upper triangle scaled by `sigma`.
pub fn sigma_scale(r: &DependencyMatrix, sigma: f64) -> Matrix {
    let m = r.matrix();
    Matrix::from_fn(r.n(), |i, j| if i < j { sigma * m[(i, j)] } else { m[(i, j)] })
}

fn check_q(g: &Graph, q: usize) -> Result<()> {
    if q <= g.max_degree() {
        return Err(Error::QTooSmall {
            q,
            max_degree: g.max_degree(),
        });
    }
    Ok(())
}

/// Heat-bath coloring dependencies: `r_ij = 1/(q - d_j)` for adjacent `i, j`.
pub fn coloring_dependency(g: &Graph, q: usize) -> Result<DependencyMatrix> {
    check_q(g, q)?;
    let n = g.n().max(1);
    let mut m = Matrix::zeros(n);
    for j in 0..g.n() {
        let x = 1.0 / (q - g.degree(j)) as f64;
        for i in g.distinct_neighbors(j) {
            m[(i, j)] = x;
        }
    }
    DependencyMatrix::new(m)
}

/// `Â = D^{1/2} A D^{1/2}` with `D = diag(1/(q - d_j))`; symmetric and
/// similar to the coloring dependency matrix.
pub fn hat_matrix(g: &Graph, q: usize) -> Result<Matrix> {
    check_q(g, q)?;
    let n = g.n().max(1);
    let mut m = Matrix::zeros(n);
    for i in 0..g.n() {
        for j in g.distinct_neighbors(i) {
            // integer product first so that (i, j) and (j, i) agree bitwise
            let prod = ((q - g.degree(i)) * (q - g.degree(j))) as f64;
            m[(i, j)] = 1.0 / prod.sqrt();
        }
    }
    Ok(m)
}

/// The facilitated model: `((1 - delta)/2) M` where row `i` of `M` has ones
/// at columns `i - 1`, `i + 1` and `i + 2` (those that exist).
pub fn facilitated_dependency(n: usize, delta: f64) -> Result<DependencyMatrix> {
    if n <= 3 {
        return Err(Error::PreconditionFailed(format!(
            "facilitated model needs n > 3, got {n}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::PreconditionFailed(format!(
            "delta = {delta} outside (0, 1)"
        )));
    }
    let x = (1.0 - delta) / 2.0;
    DependencyMatrix::new(Matrix::from_fn(n, |i, j| {
        if j + 1 == i || j == i + 1 || j == i + 2 {
            x
        } else {
            0.0
        }
    }))
}

/// A tridiagonal matrix with `||R||_1 = 0.8`, `||R||_inf = 0.9` and
/// `lambda(R) = 0.4`, whose left Perron vector decays like `2^-i`, so that
/// weighted-norm certificates pay a factor `2^n` in `1/w_min`.
pub fn example1_matrix(n: usize) -> Result<DependencyMatrix> {
    if n < 3 {
        return Err(Error::PreconditionFailed(format!(
            "example matrix needs n >= 3, got {n}"
        )));
    }
    let mut m = Matrix::zeros(n);
    for i in 0..n - 2 {
        m[(i, i + 1)] = 0.1;
    }
    for i in 2..n {
        m[(i, i - 1)] = 0.4;
    }
    m[(1, 0)] = 0.8;
    m[(n - 2, n - 1)] = 0.2;
    DependencyMatrix::new(m)
}

/// Outcome of comparing `w R⃗` against `mu w` (and optionally `w R^σ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDomination {
    /// `max_i (w R⃗)_i - mu w_i`.
    pub max_violation: f64,
    pub holds: bool,
    pub sigma: Option<SigmaDomination>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaDomination {
    pub sigma: f64,
    /// Whether `w R^σ <= sigma w` held; the comparison below is only
    /// meaningful when it does.
    pub precondition: bool,
    /// `max_i (w R⃗)_i - (w R^σ)_i`.
    pub max_violation: f64,
    pub holds: bool,
}

/// Checks that `w R <= mu w` carries over to the scan matrix
/// (identity order), and with `sigma` also that `w R^σ <= sigma w`
/// implies `w R⃗ <= w R^σ`.
pub fn check_scan_domination(
    r: &DependencyMatrix,
    w: &[f64],
    mu: f64,
    sigma: Option<f64>,
) -> Result<ScanDomination> {
    let n = r.n();
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.len(),
        });
    }
    if mu > 1.0 {
        return Err(Error::MuOutOfRange {
            mu,
            reason: "scan domination needs mu <= 1".into(),
        });
    }
    let slack = left_slack(r.matrix(), w, mu);
    if slack > PRECONDITION_TOL {
        return Err(Error::PreconditionFailed(format!(
            "w R <= mu w fails by {slack:e}"
        )));
    }
    let scan = scan_update_matrix(r, &ScanOrder::identity(n))?;
    let max_violation = left_slack(&scan, w, mu);
    let sigma = sigma.map(|s| {
        let rs = sigma_scale(r, s);
        let precondition = left_slack(&rs, w, s) <= PRECONDITION_TOL;
        let lhs = scan.vec_mul(w);
        let rhs = rs.vec_mul(w);
        let v = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max);
        SigmaDomination {
            sigma: s,
            precondition,
            max_violation: v,
            holds: !precondition || v <= CONCLUSION_TOL,
        }
    });
    Ok(ScanDomination {
        max_violation,
        holds: max_violation <= CONCLUSION_TOL,
        sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_site() -> DependencyMatrix {
        DependencyMatrix::new(Matrix::from_rows(&[[0.0, 0.5], [0.5, 0.0]]).unwrap()).unwrap()
    }

    #[test]
    fn site_matrix_replaces_one_column() {
        let r2 = site_update_matrix(&two_site(), 1).unwrap();
        assert_eq!(r2.rows(), vec![vec![1.0, 0.5], vec![0.0, 0.0]]);
        assert!(site_update_matrix(&two_site(), 2).is_err());
    }

    #[test]
    fn random_and_scan_on_two_sites() {
        let r = two_site();
        assert_eq!(
            random_update_matrix(&r).rows(),
            vec![vec![0.5, 0.25], vec![0.25, 0.5]]
        );
        let s = scan_update_matrix(&r, &ScanOrder::identity(2)).unwrap();
        assert_eq!(s.rows(), vec![vec![0.0, 0.0], vec![0.5, 0.25]]);
    }

    #[test]
    fn scan_matches_dense_product() {
        let r = example1_matrix(6).unwrap();
        let order = ScanOrder::new(vec![3, 0, 5, 1, 4, 2]).unwrap();
        let mut dense = Matrix::identity(6);
        for &j in order.as_slice() {
            dense = dense.mul(&site_update_matrix(&r, j).unwrap()).unwrap();
        }
        let fast = scan_update_matrix(&r, &order).unwrap();
        assert!(fast.max_abs_diff(&dense) < 1e-15);
    }

    #[test]
    fn permutations_are_validated() {
        assert!(ScanOrder::new(vec![0, 0]).is_err());
        assert!(ScanOrder::new(vec![0, 2]).is_err());
        assert!(ScanOrder::new(vec![1, 0]).is_ok());
    }

    #[test]
    fn sigma_extremes() {
        let r = example1_matrix(5).unwrap();
        assert_eq!(&sigma_scale(&r, 1.0), r.matrix());
        let s0 = sigma_scale(&r, 0.0);
        for i in 0..5 {
            for j in 0..5 {
                let want = if i < j { 0.0 } else { r.matrix()[(i, j)] };
                assert_eq!(s0[(i, j)], want);
            }
        }
    }

    #[test]
    fn coloring_of_short_path() {
        let g = Graph::path(3);
        let r = coloring_dependency(&g, 5).unwrap();
        assert_eq!(r.matrix()[(0, 1)], 1.0 / 3.0);
        assert_eq!(r.matrix()[(2, 1)], 1.0 / 3.0);
        assert_eq!(r.matrix()[(1, 0)], 0.25);
        assert_eq!(r.matrix()[(1, 2)], 0.25);
        let hat = hat_matrix(&g, 5).unwrap();
        assert_eq!(hat[(0, 1)], 1.0 / 12f64.sqrt());
        assert!(hat.is_symmetric());
        assert!(matches!(
            coloring_dependency(&g, 2),
            Err(Error::QTooSmall { q: 2, max_degree: 2 })
        ));
    }

    #[test]
    fn facilitated_band() {
        let r = facilitated_dependency(20, 7.0 / 27.0).unwrap();
        let m = r.matrix();
        for i in 0..20 {
            for j in 0..20 {
                let on = j + 1 == i || j == i + 1 || j == i + 2;
                assert_eq!(m[(i, j)] != 0.0, on, "({i}, {j})");
            }
        }
        assert!(facilitated_dependency(3, 0.5).is_err());
        assert!(facilitated_dependency(6, 1.0).is_err());
    }

    #[test]
    fn example1_domination() {
        let r = example1_matrix(10).unwrap();
        let w: Vec<f64> = (1..=10).map(|i| 0.5f64.powi(i)).collect();
        let rep = check_scan_domination(&r, &w, 0.4, None).unwrap();
        assert!(rep.holds);
        assert!(check_scan_domination(&r, &w, 0.3, None).is_err());
    }
}

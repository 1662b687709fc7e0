//! Perron roots of nonnegative matrices.
//!
//! The spectral radius is computed block by block over the strongly
//! connected components of the digraph `G(R)` (entries `> 0`). A singleton
//! component contributes its diagonal entry; every larger component is
//! irreducible, so power iteration on `B + I` converges geometrically to the
//! Perron root. Each iterate is bracketed by the Collatz–Wielandt bounds
//! `min_i (Bv)_i / v_i <= lambda(B) <= max_i (Bv)_i / v_i`, which is also the
//! stopping rule.

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::{jn_value, matrix_norm, NormKind};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: DEFAULT_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl SpectralOptions {
    pub fn with_tol(tol: f64) -> Self {
        SpectralOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub lambda: f64,
    pub iterations: usize,
    /// `max_i |lambda v_i - (R v)_i| / ||v||_inf` on the dominant block.
    pub residual: f64,
}

/// A positive left vector with `w R <= mu w`, normalized so `max w = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronCertificate {
    pub w: Vec<f64>,
    pub mu: f64,
    pub slack: f64,
}

impl PerronCertificate {
    pub fn w_min(&self) -> f64 {
        self.w.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The weights rescaled to sum to one, as used by the weighted 1-norm.
    pub fn normalized_weights(&self) -> Vec<f64> {
        let s: f64 = self.w.iter().sum();
        self.w.iter().map(|x| x / s).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbResult {
    pub rprime: Matrix,
    pub w: Vec<f64>,
    pub muprime: f64,
    pub eta: f64,
}

impl PerturbResult {
    pub fn w_min(&self) -> f64 {
        self.w.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

struct PerronIterate {
    value: f64,
    vector: Vec<f64>,
    iterations: usize,
}

/// Plain iterations tried before switching to repeated squaring.
const PLAIN_ITERATIONS: usize = 5_000;

/// Collatz–Wielandt bracket of `b + I` at `v`, and the next iterate.
fn bracket(b: &Matrix, v: &[f64]) -> (f64, f64, Vec<f64>) {
    let mut y = b.mul_vec(v);
    for (yi, vi) in y.iter_mut().zip(v) {
        *yi += vi;
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (yi, vi) in y.iter().zip(v) {
        let r = yi / vi;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let top = y.iter().copied().fold(0.0, f64::max);
    for yi in y.iter_mut() {
        *yi /= top;
    }
    (lo, hi, y)
}

/// A start vector from `(b + I)^(2^s) v` for growing `s`, which separates a
/// nearly degenerate second eigenvalue far faster than plain iteration.
fn squared_start(b: &Matrix, v: &[f64], tol: f64) -> Vec<f64> {
    let n = b.n();
    let mut p = b.add(&Matrix::identity(n)).expect("same order");
    let mut best = v.to_vec();
    for _ in 0..64 {
        p = p.mul(&p).expect("same order");
        let top = p.as_slice().iter().copied().fold(0.0, f64::max);
        if !(top > 0.0 && top.is_finite()) {
            break;
        }
        p = p.scale(1.0 / top);
        let cand = p.mul_vec(v);
        if cand.iter().any(|&x| x.is_nan() || x <= 0.0) {
            break;
        }
        let (lo, hi, _) = bracket(b, &cand);
        best = cand;
        if hi - lo <= tol.max(64.0 * f64::EPSILON * hi) {
            break;
        }
    }
    best
}

/// Power iteration on `b + I` for an irreducible nonnegative `b` of order >= 2.
fn perron_iterate(b: &Matrix, opts: SpectralOptions) -> Result<PerronIterate> {
    let n = b.n();
    let mut v = vec![1.0; n];
    let mut width = f64::INFINITY;
    for k in 1..=opts.max_iterations {
        if k == PLAIN_ITERATIONS {
            v = squared_start(b, &v, opts.tol);
        }
        let (lo, hi, y) = bracket(b, &v);
        width = hi - lo;
        v = y;
        // floor at a few ulps of the root so large roots cannot stall
        if width <= opts.tol.max(64.0 * f64::EPSILON * hi) {
            return Ok(PerronIterate {
                value: 0.5 * (lo + hi) - 1.0,
                vector: v,
                iterations: k,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        width,
    })
}

/// Strongly connected components of `G(R)` (edge `i -> j` iff `R[i][j] > 0`),
/// each listed in increasing vertex order.
pub fn strong_components(r: &Matrix) -> Vec<Vec<usize>> {
    let n = r.n();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && r[(i, j)] > 0.0).collect())
        .collect();

    // iterative Tarjan
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0usize;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < succ[v].len() {
                let w = succ[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

pub fn is_irreducible(r: &Matrix) -> bool {
    strong_components(r).len() == 1
}

pub fn spectral_radius(r: &Matrix, tol: f64) -> Result<SpectralResult> {
    spectral_radius_with(r, SpectralOptions::with_tol(tol))
}

pub fn spectral_radius_with(r: &Matrix, opts: SpectralOptions) -> Result<SpectralResult> {
    if !r.is_nonnegative() {
        return Err(Error::InvalidMatrix(
            "spectral radius requires a nonnegative matrix".into(),
        ));
    }
    let mut best = SpectralResult {
        lambda: f64::NEG_INFINITY,
        iterations: 0,
        residual: 0.0,
    };
    let mut iterations = 0;
    for comp in strong_components(r) {
        let (lambda, residual) = if comp.len() == 1 {
            (r[(comp[0], comp[0])], 0.0)
        } else {
            let block = r.principal(&comp);
            let it = perron_iterate(&block, opts)?;
            iterations += it.iterations;
            let bv = block.mul_vec(&it.vector);
            let residual = bv
                .iter()
                .zip(&it.vector)
                .map(|(b, v)| (it.value * v - b).abs())
                .fold(0.0, f64::max);
            (it.value, residual)
        };
        if lambda > best.lambda {
            best.lambda = lambda;
            best.residual = residual;
        }
    }
    best.iterations = iterations;
    Ok(best)
}

/// `nu(R) = max x^T R x` over unit `x`, i.e. the Perron root of `(R + R^T)/2`.
pub fn numerical_radius(r: &Matrix) -> Result<f64> {
    let sym = r.add(&r.transpose())?.scale(0.5);
    Ok(spectral_radius_with(&sym, SpectralOptions::with_tol(1e-12))?.lambda)
}

pub fn perron_left_vector(r: &Matrix, tol: f64) -> Result<PerronCertificate> {
    perron_left_vector_with(r, SpectralOptions::with_tol(tol))
}

pub fn perron_left_vector_with(r: &Matrix, opts: SpectralOptions) -> Result<PerronCertificate> {
    if !r.is_nonnegative() {
        return Err(Error::InvalidMatrix(
            "Perron vector requires a nonnegative matrix".into(),
        ));
    }
    if !is_irreducible(r) {
        return Err(Error::ReducibleMatrix);
    }
    let (w, mu) = if r.n() == 1 {
        (vec![1.0], r[(0, 0)])
    } else {
        let it = perron_iterate(&r.transpose(), opts)?;
        (it.vector, it.value)
    };
    let slack = left_slack(r, &w, mu);
    Ok(PerronCertificate { w, mu, slack })
}

/// `max_i ((w R)_i - mu w_i)`.
pub fn left_slack(r: &Matrix, w: &[f64], mu: f64) -> f64 {
    r.vec_mul(w)
        .iter()
        .zip(w)
        .map(|(a, b)| a - mu * b)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Shift `R` by `(eta / J_n) J` so that it becomes irreducible with a
/// Perron vector bounded away from zero, keeping the root below `mu + eta`.
pub fn perturb(r: &Matrix, mu: f64, eta: f64, kind: &NormKind) -> Result<PerturbResult> {
    let norm = matrix_norm(r, kind)?;
    if mu.is_nan() || mu >= 1.0 || norm > mu + 1e-12 {
        return Err(Error::MuOutOfRange {
            mu,
            reason: format!("need ||R|| = {norm} <= mu < 1"),
        });
    }
    if !(eta > 0.0 && eta < 1.0 - mu) {
        return Err(Error::EtaOutOfRange { eta, max: 1.0 - mu });
    }
    let jn = jn_value(kind, r.n())?;
    let rprime = r.add(&Matrix::ones(r.n()).scale(eta / jn))?;
    let cert = perron_left_vector_with(&rprime, SpectralOptions::with_tol(1e-13))?;
    Ok(PerturbResult {
        rprime,
        w: cert.w,
        muprime: mu + eta,
        eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_has_zero_radius() {
        let r = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(spectral_radius(&r, 1e-10).unwrap().lambda, 0.0);
        assert!((numerical_radius(&r).unwrap() - 0.5).abs() < 1e-10);
        assert_eq!(perron_left_vector(&r, 1e-10), Err(Error::ReducibleMatrix));
    }

    #[test]
    fn components_of_block_matrix() {
        let r = Matrix::from_rows(&[
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let mut comps = strong_components(&r);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn identity_radii() {
        let i3 = Matrix::identity(3);
        assert_eq!(spectral_radius(&i3, 1e-10).unwrap().lambda, 1.0);
        assert!((numerical_radius(&i3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_matrix_perron() {
        let j = Matrix::ones(4).scale(0.25);
        let cert = perron_left_vector(&j, 1e-12).unwrap();
        assert!(cert.w.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert!((cert.mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_radius_is_degree() {
        let n = 6;
        let a = Matrix::from_fn(n, |i, j| {
            if (i + 1) % n == j || (j + 1) % n == i {
                1.0
            } else {
                0.0
            }
        });
        let res = spectral_radius(&a, 1e-10).unwrap();
        assert!((res.lambda - 2.0).abs() < 1e-10);
        assert!(res.residual < 1e-9);
    }

    #[test]
    fn perturb_zero_matrix() {
        let z = Matrix::zeros(3);
        let p = perturb(&z, 0.0, 0.5, &NormKind::One).unwrap();
        assert!(p.rprime.max_abs_diff(&Matrix::ones(3).scale(0.5 / 3.0)) < 1e-15);
        assert!(p.w.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert_eq!(p.muprime, 0.5);
    }

    #[test]
    fn perturb_rejects_bad_eta() {
        let z = Matrix::zeros(3);
        assert!(matches!(
            perturb(&z, 0.5, 0.6, &NormKind::One),
            Err(Error::EtaOutOfRange { .. })
        ));
        assert!(matches!(
            perturb(&z, 0.5, 0.0, &NormKind::One),
            Err(Error::EtaOutOfRange { .. })
        ));
    }
}

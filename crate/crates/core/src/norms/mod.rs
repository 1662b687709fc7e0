//! Dense nonnegative matrices and the matrix-norm toolkit: induced and
//! entrywise norms, duals, spectral and numerical radii, Perron vectors and
//! the irreducibility-restoring perturbation.

mod matrix;
mod spectral;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use matrix::Matrix;
pub use spectral::{
    is_irreducible, left_slack, numerical_radius, perron_left_vector, perron_left_vector_with,
    perturb, spectral_radius, spectral_radius_with, strong_components, PerronCertificate,
    PerturbResult, SpectralOptions, SpectralResult, DEFAULT_MAX_ITERATIONS, DEFAULT_TOL,
};

use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Which matrix norm to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    /// Maximum column sum (operator norm of the vector 1-norm).
    One,
    /// Spectral norm `sqrt(lambda(R^T R))`.
    Two,
    /// Maximum row sum.
    Infinity,
    Frobenius,
    /// `||W R W^-1||_1` with `W = diag(w)`, `w > 0`, `sum w = 1`.
    WeightedOne(Vec<f64>),
    /// `max(||R||_1, ||R||_inf)`; a matrix norm that is not an operator norm.
    MaxOneInf,
}

impl NormKind {
    pub fn weighted(w: Vec<f64>) -> Result<Self> {
        validate_weights(&w)?;
        Ok(NormKind::WeightedOne(w))
    }

    /// Whether the norm is induced by a vector norm.
    pub fn is_operator(&self) -> bool {
        !matches!(self, NormKind::Frobenius | NormKind::MaxOneInf)
    }

    pub fn label(&self) -> &'static str {
        match self {
            NormKind::One => "one",
            NormKind::Two => "two",
            NormKind::Infinity => "infinity",
            NormKind::Frobenius => "frobenius",
            NormKind::WeightedOne(_) => "weighted-one",
            NormKind::MaxOneInf => "max-one-inf",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn validate_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() || w.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::InvalidWeights("weights must be strictly positive".into()));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {s}, not 1")));
    }
    Ok(())
}

fn checked_weights(kind: &NormKind, n: usize) -> Result<Option<&[f64]>> {
    match kind {
        NormKind::WeightedOne(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: w.len(),
                });
            }
            validate_weights(w)?;
            Ok(Some(w))
        }
        _ => Ok(None),
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

pub fn matrix_norm(r: &Matrix, kind: &NormKind) -> Result<f64> {
    let weights = checked_weights(kind, r.n())?;
    let abs = |x: f64| x.abs();
    Ok(match kind {
        NormKind::One => one_norm(r),
        NormKind::Infinity => inf_norm(r),
        NormKind::Frobenius => r.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt(),
        NormKind::MaxOneInf => one_norm(r).max(inf_norm(r)),
        NormKind::Two => two_norm(r)?,
        NormKind::WeightedOne(_) => {
            let w = weights.expect("validated weights");
            let n = r.n();
            max_of((0..n).map(|j| {
                (0..n).map(|i| w[i] * abs(r[(i, j)])).sum::<f64>() / w[j]
            }))
        }
    })
}

fn one_norm(r: &Matrix) -> f64 {
    let n = r.n();
    max_of((0..n).map(|j| (0..n).map(|i| r[(i, j)].abs()).sum::<f64>()))
}

fn inf_norm(r: &Matrix) -> f64 {
    max_of((0..r.n()).map(|i| r.row(i).iter().map(|x| x.abs()).sum::<f64>()))
}

fn two_norm(r: &Matrix) -> Result<f64> {
    // Perron iteration needs a nonnegative Gram matrix; holds for R >= 0 and -R
    let gram = r.transpose().mul(r)?;
    if !gram.is_nonnegative() {
        return Err(Error::InvalidMatrix(
            "two-norm is computed by Perron iteration and needs R^T R >= 0".into(),
        ));
    }
    let res = spectral_radius_with(&gram, SpectralOptions::with_tol(1e-13))?;
    Ok(res.lambda.max(0.0).sqrt())
}

/// `||R||* = ||R^T||`.
pub fn dual_norm(r: &Matrix, kind: &NormKind) -> Result<f64> {
    matrix_norm(&r.transpose(), kind)
}

/// `J_n = ||J||` for the all-ones matrix of order `n`.
pub fn jn_value(kind: &NormKind, n: usize) -> Result<f64> {
    let weights = checked_weights(kind, n)?;
    Ok(match kind {
        NormKind::WeightedOne(_) => {
            1.0 / weights
                .expect("validated weights")
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        }
        _ => n as f64,
    })
}

/// `C_n = ||1|| ||1||*`, equal to `J_n` for operator norms.
pub fn cn_value(kind: &NormKind, n: usize) -> Result<f64> {
    match kind {
        NormKind::MaxOneInf => {
            checked_weights(kind, n)?;
            Ok((n * n) as f64)
        }
        // ||1||_F = ||1^T||_F = sqrt(n)
        NormKind::Frobenius => Ok(n as f64),
        _ => jn_value(kind, n),
    }
}

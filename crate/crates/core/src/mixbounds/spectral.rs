use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::density::{class_density_bound, ratio_to_f64, ClassParams};
use crate::error::{Error, Result};

/// `2 sqrt(kappa (alpha - kappa))`, an upper bound on `lambda(R)` for
/// symmetric `R` with `alpha = ||R||_1` and any `kappa` between the
/// maximum density and `alpha / 2`.
pub fn spectral_density_bound(kappa: f64, alpha: f64) -> Result<f64> {
    if kappa > alpha / 2.0 {
        return Err(Error::KappaExceedsHalfAlpha {
            kappa,
            half_alpha: alpha / 2.0,
        });
    }
    if kappa < 0.0 {
        return Err(Error::PreconditionFailed(format!("kappa = {kappa} is negative")));
    }
    Ok(2.0 * (kappa * (alpha - kappa)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBound {
    /// `sqrt(1 - gamma^2 / n^2)`.
    pub bound: f64,
    /// The weaker `1 - gamma^2 / (2 n^2)`.
    pub linearized: f64,
}

/// Spectral bound for a symmetric irreducible matrix with row sums at most
/// one, smallest positive entry at least `gamma` and some row sum at most
/// `1 - gamma`.
pub fn gap_bound_irreducible(gamma: f64, n: usize) -> Result<GapBound> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let x = gamma * gamma / (n * n) as f64;
    Ok(GapBound {
        bound: (1.0 - x).max(0.0).sqrt(),
        linearized: 1.0 - 0.5 * x,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassLambdaBound {
    /// `2 sqrt(k (Delta - k))` with `k` the class density bound.
    pub bound: f64,
    pub kappa_bound: f64,
    /// The weaker closed form, when the class has `b > 0`.
    pub closed_form: Option<f64>,
    /// `sqrt(k (Delta - k))` without the factor 2, as printed in some
    /// statements for `b <= 0`; reported for comparison only.
    pub printed_form: Option<f64>,
}

/// Largest-eigenvalue bound for graphs with maximum degree `delta` on `n`
/// vertices in the class.
pub fn lambda_bound_class(p: &ClassParams, delta: usize, n: usize) -> Result<ClassLambdaBound> {
    let cb = class_density_bound(p, n);
    let k = cb.kappa_bound;
    let d = delta as f64;
    if d < 2.0 * k {
        return Err(Error::DeltaTooSmall {
            delta,
            required: 2.0 * k,
        });
    }
    let bound = spectral_density_bound(k, d)?;
    let (a, b) = (ratio_to_f64(p.a), ratio_to_f64(p.b));
    let nf = n as f64;
    let closed_form = p.b.is_positive().then(|| {
        if d == 2.0 * a {
            a * (2.0 - b * b / (a * a * nf * nf))
        } else {
            (a * (d - a)).sqrt() * (2.0 - b * (d - 2.0 * a) / (a * (d - a) * nf))
        }
    });
    let printed_form = (!p.b.is_positive()).then(|| (k * (d - k)).sqrt());
    Ok(ClassLambdaBound {
        bound,
        kappa_bound: k,
        closed_form,
        printed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{class_params, Provenance};

    #[test]
    fn balanced_and_complete() {
        assert_eq!(spectral_density_bound(0.5, 1.0).unwrap(), 1.0);
        assert_eq!(spectral_density_bound(1.5, 3.0).unwrap(), 3.0);
        assert!(matches!(
            spectral_density_bound(2.0, 3.0),
            Err(Error::KappaExceedsHalfAlpha { .. })
        ));
    }

    #[test]
    fn gap_bound_values() {
        assert_eq!(gap_bound_irreducible(1.0, 1).unwrap().bound, 0.0);
        let g = gap_bound_irreducible(0.1, 10).unwrap();
        assert!((g.bound - (1.0f64 - 1e-4).sqrt()).abs() < 1e-15);
        assert!(g.bound <= g.linearized);
        assert!(gap_bound_irreducible(0.0, 3).is_err());
    }

    #[test]
    fn corollary_closed_forms() {
        let nonreg = class_params(Provenance::NonregularConnected { max_degree: 2 });
        let b = lambda_bound_class(&nonreg, 2, 10).unwrap();
        assert!((b.bound - 3.96f64.sqrt()).abs() < 1e-12);

        let tree = lambda_bound_class(&class_params(Provenance::Forest), 3, 10).unwrap();
        assert!((tree.bound - 2.0 * 1.89f64.sqrt()).abs() < 1e-12);
        assert!(tree.bound <= tree.closed_form.unwrap());

        let planar = lambda_bound_class(&class_params(Provenance::Planar), 6, 100).unwrap();
        assert!((planar.closed_form.unwrap() - (6.0 - 12.0 / 1e4)).abs() < 1e-12);
        assert!(planar.bound <= 6.0 - 12.0 / 1e4);

        assert!(matches!(
            lambda_bound_class(&class_params(Provenance::Planar), 4, 100),
            Err(Error::DeltaTooSmall { .. })
        ));
    }
}

use serde::{Deserialize, Serialize};

use super::{
    check_eps, optimal_eta, random_update_time, scan_time, Certificate, RandomVariant, ScanVariant,
    Units,
};
use crate::depmat::DependencyMatrix;
use crate::error::{Error, Result};
use crate::norms::{
    is_irreducible, jn_value, matrix_norm, numerical_radius, perron_left_vector_with,
    spectral_radius, Matrix, NormKind, SpectralOptions, DEFAULT_TOL,
};

/// Relative gap below which a scan certificate is preferred over a random
/// one with the same cost in site updates.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSummary {
    pub one: f64,
    pub infinity: f64,
    pub two: f64,
    pub lambda: f64,
    pub numerical_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub norms: NormSummary,
    /// Cheapest certificate measured in site updates; ties go to scan.
    pub best: Certificate,
    pub random: Option<Certificate>,
    pub scan: Option<Certificate>,
    pub candidates: Vec<Certificate>,
}

fn labelled(mut c: Certificate, norm: &str, condition: String) -> Certificate {
    c.norm = norm.into();
    c.condition = condition;
    c
}

/// The Perron weights of `r` (or of `r + tau J / n` when `r` is
/// reducible), normalized to sum to one.
fn perron_weights(r: &Matrix, lambda: f64) -> Result<(Vec<f64>, bool)> {
    let opts = SpectralOptions::with_tol(1e-13);
    if is_irreducible(r) {
        return Ok((perron_left_vector_with(r, opts)?.normalized_weights(), false));
    }
    let n = r.n();
    let mut tau = (1.0 - lambda) / 2.0;
    for _ in 0..60 {
        let shifted = r.add(&Matrix::ones(n).scale(tau / n as f64))?;
        let cert = perron_left_vector_with(&shifted, opts)?;
        if cert.mu < 1.0 {
            return Ok((cert.normalized_weights(), true));
        }
        tau /= 2.0;
    }
    Err(Error::NoCertificate(
        "could not find a perturbation with spectral radius below one".into(),
    ))
}

/// Evaluates the available norms of `R` and returns the cheapest
/// certificate among the random-update and scan formulas.
///
/// The 1-, infinity- and 2-norms are tried first. The weighted 1-norm
/// built from a Perron vector is used only when all three are at least one
/// while `lambda(R) < 1`.
pub fn best_certificate(r: &DependencyMatrix, eps: f64) -> Result<CertificateReport> {
    check_eps(eps)?;
    let m = r.matrix();
    let n = r.n();
    let nf = n as f64;
    let norms = NormSummary {
        one: matrix_norm(m, &NormKind::One)?,
        infinity: matrix_norm(m, &NormKind::Infinity)?,
        two: matrix_norm(m, &NormKind::Two)?,
        lambda: spectral_radius(m, DEFAULT_TOL)?.lambda,
        numerical_radius: numerical_radius(m)?,
    };
    if norms.lambda >= 1.0 {
        return Err(Error::NoCertificate(format!(
            "lambda(R) = {} is not below one",
            norms.lambda
        )));
    }

    let mut candidates = Vec::new();
    for (label, mu) in [("one", norms.one), ("infinity", norms.infinity), ("two", norms.two)] {
        if mu >= 1.0 {
            continue;
        }
        let cond = format!("||R||_{label} = {mu}");
        let c = random_update_time(mu, n, nf, eps, RandomVariant::Lemma17)?;
        candidates.push(labelled(c, label, cond.clone()));
        let s = if label == "one" {
            scan_time(mu, n, nf, eps, ScanVariant::Corollary25)?
        } else {
            let eta = optimal_eta(mu, nf, eps);
            scan_time(mu, n, nf, eps, ScanVariant::Corollary27 { eta })?
        };
        candidates.push(labelled(s, label, cond));
    }

    if candidates.is_empty() {
        let (w, perturbed) = perron_weights(m, norms.lambda)?;
        let kind = NormKind::weighted(w.clone())?;
        let mu = matrix_norm(m, &kind)?;
        if mu >= 1.0 {
            return Err(Error::NoCertificate(format!(
                "weighted norm {mu} from the Perron vector is not below one"
            )));
        }
        let jn = jn_value(&kind, n)?;
        let route = if perturbed { "perturbed Perron" } else { "Perron" };
        let cond = format!("||R||_w = {mu} with {route} weights, 1/w_min = {jn}");
        let c = random_update_time(mu, n, jn, eps, RandomVariant::Lemma17)?;
        candidates.push(labelled(c, "weighted-one", cond.clone()));
        // w R <= mu w with max-normalized w gives the scan bound directly
        let wmax = w.iter().copied().fold(0.0, f64::max);
        let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
        let s = scan_time(mu, n, wmax / wmin, eps, ScanVariant::Corollary26)?;
        candidates.push(labelled(s, "weighted-one", cond.clone()));
        let eta = optimal_eta(mu, jn, eps);
        let c21 = random_update_time(mu, n, jn, eps, RandomVariant::Corollary21 { eta })?;
        candidates.push(labelled(c21, "weighted-one", cond.clone()));
        let c27 = scan_time(mu, n, jn, eps, ScanVariant::Corollary27 { eta })?;
        candidates.push(labelled(c27, "weighted-one", cond));
    }

    let pick = |units: Option<Units>| -> Option<Certificate> {
        let mut best: Option<&Certificate> = None;
        for c in candidates.iter().filter(|c| units.is_none_or(|u| c.units == u)) {
            best = match best {
                None => Some(c),
                Some(b) => {
                    let (cb, bb) = (c.site_updates(), b.site_updates());
                    let tie = (cb - bb).abs() <= TIE_TOL * bb.abs();
                    let scan_wins = tie && c.units == Units::Sweeps && b.units != Units::Sweeps;
                    if (cb < bb && !tie) || scan_wins {
                        Some(c)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best.cloned()
    };
    let best = pick(None).ok_or_else(|| Error::NoCertificate("no finite bound".into()))?;
    Ok(CertificateReport {
        random: pick(Some(Units::SiteUpdates)),
        scan: pick(Some(Units::Sweeps)),
        best,
        norms,
        candidates,
    })
}

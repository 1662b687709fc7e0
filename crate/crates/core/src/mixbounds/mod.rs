//! Mixing-time formulas and certificate assembly.
//!
//! Every bound is produced by [`evaluate`], keyed on the formula and units,
//! so a [`Certificate`] can always be re-derived bit for bit from the
//! parameters it records.

mod best;
mod coloring;
mod spectral;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use best::{best_certificate, CertificateReport, NormSummary};
pub use coloring::{coloring_certificates, ColoringTarget};
pub use spectral::{
    gap_bound_irreducible, lambda_bound_class, spectral_density_bound, ClassLambdaBound, GapBound,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormulaId {
    L17,
    L1,
    C21,
    L22,
    C25,
    C26,
    C27,
    L2,
    L34,
    L3,
    T44,
    T45,
    T47,
    T48,
    T50,
    T51,
    C52,
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    #[serde(rename = "site-updates")]
    SiteUpdates,
    #[serde(rename = "sweeps")]
    Sweeps,
}

/// Parameters a bound depends on besides `mu`, `eta` and the constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateInputs {
    pub n: usize,
    pub eps: f64,
    /// Spectral radius the contraction was derived from, when relevant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Leading factor of a scan bound derived from a spectral estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    /// `sigma = mu / (2 - mu)` for the improved scan analysis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl CertificateInputs {
    pub fn new(n: usize, eps: f64) -> Self {
        CertificateInputs {
            n,
            eps,
            lambda: None,
            factor: None,
            sigma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub formula: FormulaId,
    /// Which quantity established the contraction, e.g. `||R||_1 = 0.8`.
    pub condition: String,
    /// Label of the norm the contraction is measured in.
    pub norm: String,
    pub mu: f64,
    pub eta: Option<f64>,
    pub constant: f64,
    pub bound: f64,
    pub units: Units,
    pub asymptotic: bool,
    pub inputs: CertificateInputs,
}

impl Certificate {
    /// The bound converted to single-site updates.
    pub fn site_updates(&self) -> f64 {
        match self.units {
            Units::SiteUpdates => self.bound,
            Units::Sweeps => self.bound * self.inputs.n as f64,
        }
    }

    /// Re-evaluate the formula from the recorded parameters.
    pub fn recompute(&self) -> f64 {
        evaluate(
            self.formula,
            self.units,
            self.mu,
            self.eta,
            self.constant,
            &self.inputs,
        )
    }
}

/// The single place where bounds are computed.
pub fn evaluate(
    formula: FormulaId,
    units: Units,
    mu: f64,
    eta: Option<f64>,
    constant: f64,
    inputs: &CertificateInputs,
) -> f64 {
    use FormulaId::*;
    let n = inputs.n as f64;
    let eps = inputs.eps;
    let eta = eta.unwrap_or(f64::NAN);
    match formula {
        L17 => n / (1.0 - mu) * (constant / eps).ln(),
        C21 => n / (1.0 - mu - eta) * (constant / (eta * eps)).ln(),
        L1 => n / (1.0 - mu) * (constant / ((1.0 - mu) * eps)).ln(),
        L22 | C25 | C26 => (constant / eps).ln() / (1.0 - mu),
        C27 => (constant / (eta * eps)).ln() / (1.0 - mu - eta),
        L2 => (constant / ((1.0 - mu) * eps)).ln() / (1.0 - mu),
        L34 => (2.0 - mu) / (2.0 - 2.0 * mu) * (constant / (eta * eps)).ln(),
        L3 => (1.0 - 0.5 * mu) / (1.0 - mu) * (constant / ((1.0 - mu) * eps)).ln(),
        T44 | T45 | T47 | T48 | T50 | T51 | C52 => match units {
            Units::SiteUpdates => n / (1.0 - mu) * (constant / eps).ln(),
            Units::Sweeps => inputs.factor.unwrap_or(1.0) / (1.0 - mu) * (constant / eps).ln(),
        },
    }
}

pub(crate) struct Draft {
    pub formula: FormulaId,
    pub units: Units,
    pub condition: String,
    pub norm: String,
    pub mu: f64,
    pub eta: Option<f64>,
    pub constant: f64,
    pub asymptotic: bool,
    pub inputs: CertificateInputs,
}

impl Draft {
    pub fn finish(self) -> Certificate {
        let bound = evaluate(
            self.formula,
            self.units,
            self.mu,
            self.eta,
            self.constant,
            &self.inputs,
        );
        Certificate {
            formula: self.formula,
            condition: self.condition,
            norm: self.norm,
            mu: self.mu,
            eta: self.eta,
            constant: self.constant,
            bound,
            units: self.units,
            asymptotic: self.asymptotic,
            inputs: self.inputs,
        }
    }
}

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..1.0).contains(&mu) {
        return Err(Error::MuOutOfRange {
            mu,
            reason: "need 0 <= mu < 1".into(),
        });
    }
    Ok(())
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::PreconditionFailed(format!("eps = {eps} outside (0, 1)")));
    }
    Ok(())
}

fn check_eta(mu: f64, eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0 - mu) {
        return Err(Error::EtaOutOfRange { eta, max: 1.0 - mu });
    }
    Ok(())
}

fn check_common(mu: f64, n: usize, constant: f64, eps: f64) -> Result<()> {
    check_mu(mu)?;
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::PreconditionFailed(format!(
            "norm constant {constant} must be positive"
        )));
    }
    Ok(())
}

/// The `eta = (1 - mu) / ln n` substitution of the asymptotic forms; absent
/// when `n = 1`.
fn asymptotic_eta(mu: f64, n: usize) -> Option<f64> {
    (n > 1).then(|| (1.0 - mu) / (n as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandomVariant {
    /// `n (1 - mu)^-1 ln(C_n / eps)`.
    Lemma17,
    /// `n (1 - mu - eta)^-1 ln(J_n / (eta eps))`.
    Corollary21 { eta: f64 },
    /// The eta form at `eta = (1 - mu) / ln n`, asymptotic.
    Lemma1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanVariant {
    /// `(1 - mu)^-1 ln(C_n / eps)` given `||R⃗|| <= mu`.
    Lemma22,
    /// `(1 - mu)^-1 ln(n / eps)` under the Dobrushin condition.
    Corollary25,
    /// `(1 - mu)^-1 ln(1 / (w_min eps))`; pass `1 / w_min` as the constant.
    Corollary26,
    /// `(1 - mu - eta)^-1 ln(J_n / (eta eps))`.
    Corollary27 { eta: f64 },
    /// The eta form at `eta = (1 - mu) / ln n`, asymptotic.
    Lemma2,
}

fn draft(formula: FormulaId, units: Units, mu: f64, constant: f64, n: usize, eps: f64) -> Draft {
    Draft {
        formula,
        units,
        condition: format!("||R|| <= {mu}"),
        norm: String::new(),
        mu,
        eta: None,
        constant,
        asymptotic: false,
        inputs: CertificateInputs::new(n, eps),
    }
}

/// Random-update mixing time in single-site updates.
pub fn random_update_time(
    mu: f64,
    n: usize,
    constant: f64,
    eps: f64,
    variant: RandomVariant,
) -> Result<Certificate> {
    check_common(mu, n, constant, eps)?;
    let mut d = draft(FormulaId::L17, Units::SiteUpdates, mu, constant, n, eps);
    match variant {
        RandomVariant::Lemma17 => {}
        RandomVariant::Corollary21 { eta } => {
            check_eta(mu, eta)?;
            d.formula = FormulaId::C21;
            d.eta = Some(eta);
        }
        RandomVariant::Lemma1 => {
            d.formula = FormulaId::L1;
            d.eta = asymptotic_eta(mu, n);
            d.asymptotic = true;
        }
    }
    Ok(d.finish())
}

/// Systematic-scan mixing time in sweeps.
pub fn scan_time(
    mu: f64,
    n: usize,
    constant: f64,
    eps: f64,
    variant: ScanVariant,
) -> Result<Certificate> {
    check_common(mu, n, constant, eps)?;
    let mut d = draft(FormulaId::L22, Units::Sweeps, mu, constant, n, eps);
    match variant {
        ScanVariant::Lemma22 => {}
        ScanVariant::Corollary25 => {
            d.formula = FormulaId::C25;
            d.constant = n as f64;
            d.condition = format!("||R||_1 <= {mu}");
            d.norm = "one".into();
        }
        ScanVariant::Corollary26 => {
            d.formula = FormulaId::C26;
            d.condition = format!("w R <= {mu} w with 1/w_min = {constant}");
        }
        ScanVariant::Corollary27 { eta } => {
            check_eta(mu, eta)?;
            d.formula = FormulaId::C27;
            d.eta = Some(eta);
        }
        ScanVariant::Lemma2 => {
            d.formula = FormulaId::L2;
            d.eta = asymptotic_eta(mu, n);
            d.asymptotic = true;
        }
    }
    Ok(d.finish())
}

/// Scan mixing time for symmetric zero-diagonal `R` with `||R||_2 =
/// lambda`: `(2 - mu)/(2 - 2 mu) ln(n / (eta eps))` sweeps with
/// `mu = lambda + eta`. Without `eta` the asymptotic form with
/// `eta = (1 - lambda) / ln n` is returned.
pub fn improved_scan_time(
    lambda: f64,
    n: usize,
    eps: f64,
    eta: Option<f64>,
) -> Result<Certificate> {
    check_common(lambda, n, n as f64, eps)?;
    let mut d = draft(FormulaId::L34, Units::Sweeps, lambda, n as f64, n, eps);
    d.condition = format!("symmetric zero-diagonal R with ||R||_2 = lambda(R) = {lambda}");
    d.norm = "two".into();
    d.inputs.lambda = Some(lambda);
    match eta {
        Some(eta) => {
            check_eta(lambda, eta)?;
            let mu = lambda + eta;
            d.mu = mu;
            d.eta = Some(eta);
            d.inputs.sigma = Some(mu / (2.0 - mu));
        }
        None => {
            d.formula = FormulaId::L3;
            d.eta = asymptotic_eta(lambda, n);
            d.asymptotic = true;
            d.inputs.sigma = Some(lambda / (2.0 - lambda));
        }
    }
    Ok(d.finish())
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// The `eta` minimizing `ln(J / (eta eps)) / (1 - mu - eta)`, shared by
/// Corollaries 21 and 27.
pub fn optimal_eta(mu: f64, constant: f64, eps: f64) -> f64 {
    let gap = 1.0 - mu;
    golden_min(
        |eta| (constant / (eta * eps)).ln() / (gap - eta),
        gap * 1e-9,
        gap * (1.0 - 1e-9),
    )
}

/// The `eta` minimizing the improved scan bound at spectral radius `lambda`.
pub fn optimal_eta_improved(lambda: f64, n: usize, eps: f64) -> f64 {
    let gap = 1.0 - lambda;
    golden_min(
        |eta| {
            let mu = lambda + eta;
            (2.0 - mu) / (2.0 - 2.0 * mu) * (n as f64 / (eta * eps)).ln()
        },
        gap * 1e-9,
        gap * (1.0 - 1e-9),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma17_arithmetic() {
        let c = random_update_time(2.0 / 3.0, 3, 3.0, 0.05, RandomVariant::Lemma17).unwrap();
        assert!((c.bound - 9.0 * 60f64.ln()).abs() < 1e-9);
        let one = random_update_time(0.0, 1, 1.0, (-1f64).exp(), RandomVariant::Lemma17).unwrap();
        assert!((one.bound - 1.0).abs() < 1e-15);
    }

    #[test]
    fn corollary21_arithmetic() {
        let c = random_update_time(0.8, 10, 10.0, 0.01, RandomVariant::Corollary21 { eta: 0.1 })
            .unwrap();
        assert!((c.bound - 100.0 * 1e4f64.ln()).abs() < 1e-9);
        assert!(matches!(
            random_update_time(0.8, 10, 10.0, 0.01, RandomVariant::Corollary21 { eta: 0.2 }),
            Err(Error::EtaOutOfRange { .. })
        ));
    }

    #[test]
    fn scan_arithmetic() {
        let c = scan_time(2.0 / 3.0, 3, 3.0, 0.05, ScanVariant::Corollary25).unwrap();
        assert!((c.bound - 3.0 * 60f64.ln()).abs() < 1e-9);
        assert_eq!(c.units, Units::Sweeps);
        let imp = improved_scan_time(0.0, 10, 0.1, Some(0.5)).unwrap();
        assert!((imp.bound - 1.5 * 200f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_variants_are_flagged() {
        let l1 = random_update_time(0.5, 100, 100.0, 0.1, RandomVariant::Lemma1).unwrap();
        assert!(l1.asymptotic);
        assert!((l1.eta.unwrap() - 0.5 / 100f64.ln()).abs() < 1e-15);
        let l3 = improved_scan_time(0.5, 100, 0.1, None).unwrap();
        assert!(l3.asymptotic && l3.formula == FormulaId::L3);
    }

    #[test]
    fn mu_out_of_range() {
        assert!(matches!(
            random_update_time(1.0, 3, 3.0, 0.1, RandomVariant::Lemma17),
            Err(Error::MuOutOfRange { .. })
        ));
    }

    #[test]
    fn recompute_is_bitwise() {
        let c = scan_time(0.4, 10, 512.0, 0.01, ScanVariant::Corollary26).unwrap();
        assert_eq!(c.recompute().to_bits(), c.bound.to_bits());
    }

    #[test]
    fn optimal_eta_beats_fixed_choices() {
        let (mu, j, eps) = (0.8, 10.0, 0.01);
        let best = optimal_eta(mu, j, eps);
        let f = |eta: f64| (j / (eta * eps)).ln() / (1.0 - mu - eta);
        for eta in [0.01, 0.05, 0.1, 0.15, 0.19] {
            assert!(f(best) <= f(eta) + 1e-12);
        }
    }
}

use std::cmp::Ordering;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use super::{check_eps, improved_scan_time, optimal_eta, optimal_eta_improved, random_update_time};
use super::{scan_time, Certificate, CertificateInputs, Draft, FormulaId, RandomVariant, ScanVariant, Units};
use crate::density::{class_density_bound, max_density, ratio_to_f64, ClassParams, Graph, Provenance};
use crate::depmat::hat_matrix;
use crate::error::{Error, Result};
use crate::norms::{spectral_radius, DEFAULT_TOL};

/// What the coloring certificates are computed for.
#[derive(Debug, Clone, Copy)]
pub enum ColoringTarget<'a> {
    /// A concrete graph: spectral quantities are computed directly.
    Graph(&'a Graph),
    /// Any graph in the class with the given maximum degree and order.
    Class {
        params: ClassParams,
        max_degree: usize,
        n: usize,
    },
}

/// Mixing-time certificates for heat-bath Glauber dynamics on proper
/// `q`-colorings.
pub fn coloring_certificates(
    target: ColoringTarget<'_>,
    q: usize,
    eps: f64,
) -> Result<Vec<Certificate>> {
    check_eps(eps)?;
    let certs = match target {
        ColoringTarget::Graph(g) => graph_certificates(g, q, eps)?,
        ColoringTarget::Class {
            params,
            max_degree,
            n,
        } => class_certificates(&params, max_degree, n, q, eps)?,
    };
    if certs.is_empty() {
        return Err(Error::NoCertificate(format!(
            "no route gives mu < 1 for q = {q}"
        )));
    }
    Ok(certs)
}

fn check_q(q: usize, delta: usize) -> Result<()> {
    if q <= delta {
        return Err(Error::QTooSmall {
            q,
            max_degree: delta,
        });
    }
    Ok(())
}

/// The three regimes of a class bound `lambda(G) <= psi` against `q - Delta`.
enum Regime {
    Strict { mu: f64 },
    Boundary { mu: f64, factor: f64, label: &'static str },
}

fn class_certificates(
    p: &ClassParams,
    delta: usize,
    n: usize,
    q: usize,
    eps: f64,
) -> Result<Vec<Certificate>> {
    check_q(q, delta)?;
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let d = Rational64::from_integer(delta as i64);
    let gap = Rational64::from_integer((q - delta) as i64);
    let nf = n as f64;
    let (formula_b_pos, formula_b_neg) = match p.provenance {
        Provenance::Custom => (FormulaId::T50, FormulaId::T51),
        _ => (FormulaId::C52, FormulaId::C52),
    };

    let (formula, psi_sq, regime, what) = if p.b.is_positive() {
        let (a, b) = (p.a, p.b);
        if d < a * 2 {
            return Err(Error::DeltaTooSmall {
                delta,
                required: ratio_to_f64(a * 2),
            });
        }
        let psi_sq = a * (d - a) * 4;
        let phi = d - a * 2;
        let psi = ratio_to_f64(psi_sq).sqrt();
        let regime = match (gap * gap).cmp(&psi_sq) {
            Ordering::Greater => Regime::Strict {
                mu: psi / ratio_to_f64(gap),
            },
            Ordering::Equal if phi.is_positive() => Regime::Boundary {
                mu: 1.0 - ratio_to_f64(b * phi * 2 / psi_sq) / nf,
                factor: 1.0,
                label: "q = Delta + psi, phi > 0",
            },
            Ordering::Equal => {
                let (af, bf) = (ratio_to_f64(a), ratio_to_f64(b));
                Regime::Boundary {
                    mu: 1.0 - bf * bf / (2.0 * af * af * nf * nf),
                    factor: 1.5,
                    label: "q = Delta + psi, phi = 0",
                }
            }
            Ordering::Less => return Ok(Vec::new()),
        };
        (formula_b_pos, psi_sq, regime, "psi = 2 sqrt(a (Delta - a))")
    } else {
        let kappa = class_density_bound(p, n).kappa_exact;
        if d <= kappa * 2 {
            return Err(Error::DeltaTooSmall {
                delta,
                required: ratio_to_f64(kappa * 2),
            });
        }
        let psi_sq = kappa * (d - kappa) * 4;
        if gap * gap <= psi_sq {
            return Ok(Vec::new());
        }
        let mu = ratio_to_f64(psi_sq).sqrt() / ratio_to_f64(gap);
        (
            formula_b_neg,
            psi_sq,
            Regime::Strict { mu },
            "psi = 2 sqrt(kappa* (Delta - kappa*))",
        )
    };

    let psi = ratio_to_f64(psi_sq).sqrt();
    let (mu, factor, case) = match regime {
        Regime::Strict { mu } => (mu, 1.0 - 0.5 * mu, "q > Delta + psi"),
        Regime::Boundary { mu, factor, label } => (mu.max(0.0), factor, label),
    };
    let condition = format!(
        "lambda(R) <= lambda(A)/(q - Delta) <= {mu} with {what} = {psi}, {case}"
    );
    let base = |units: Units| {
        let mut inputs = CertificateInputs::new(n, eps);
        if units == Units::Sweeps {
            inputs.factor = Some(factor);
        }
        Draft {
            formula,
            units,
            condition: condition.clone(),
            norm: "two".into(),
            mu,
            eta: None,
            constant: nf,
            asymptotic: units == Units::Sweeps,
            inputs,
        }
        .finish()
    };
    Ok(vec![base(Units::SiteUpdates), base(Units::Sweeps)])
}

fn graph_certificates(g: &Graph, q: usize, eps: f64) -> Result<Vec<Certificate>> {
    let delta = g.max_degree();
    check_q(q, delta)?;
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let nf = n as f64;
    let gap = (q - delta) as f64;
    let mut certs = Vec::new();

    // Exact route: lambda(R) = lambda(Â), and R has norm lambda(R) in the
    // 2-norm weighted by D^{1/2}, whose J_n is sqrt(sum(q - d) sum 1/(q - d)).
    let lambda_r = spectral_radius(&hat_matrix(g, q)?, DEFAULT_TOL)?.lambda;
    if lambda_r < 1.0 {
        let jd = if g.is_regular() {
            nf
        } else {
            let s: f64 = g.degrees().iter().map(|&d| (q - d) as f64).sum();
            let t: f64 = g.degrees().iter().map(|&d| 1.0 / (q - d) as f64).sum();
            (s * t).sqrt()
        };
        let norm = "d-weighted-two";
        let mut c = random_update_time(lambda_r, n, jd, eps, RandomVariant::Lemma17)?;
        c.condition = format!("lambda(R) = lambda(Â) = {lambda_r}");
        c.norm = norm.into();
        c.inputs.lambda = Some(lambda_r);
        certs.push(c);
        let mut s = if g.is_regular() {
            // R is then symmetric with zero diagonal
            let eta = optimal_eta_improved(lambda_r, n, eps);
            improved_scan_time(lambda_r, n, eps, Some(eta))?
        } else {
            let eta = optimal_eta(lambda_r, jd, eps);
            scan_time(lambda_r, n, jd, eps, ScanVariant::Corollary27 { eta })?
        };
        s.condition = format!("lambda(R) = lambda(Â) = {lambda_r}");
        s.norm = norm.into();
        s.inputs.lambda = Some(lambda_r);
        certs.push(s);
    }

    // Majorant routes: R <= A/(q - Delta), a symmetric zero-diagonal
    // dependency matrix whose 2-norm is its spectral radius.
    let mut majorant = |mu: f64, formula: FormulaId, condition: String| -> Result<()> {
        if mu >= 1.0 {
            return Ok(());
        }
        let mut c = random_update_time(mu, n, nf, eps, RandomVariant::Lemma17)?;
        c.formula = formula;
        c.condition = condition.clone();
        c.norm = "two".into();
        c.inputs.lambda = Some(mu);
        c.bound = c.recompute();
        certs.push(c);
        let eta = optimal_eta_improved(mu, n, eps);
        let mut s = improved_scan_time(mu, n, eps, Some(eta))?;
        s.condition = condition;
        certs.push(s);
        Ok(())
    };
    if !g.is_regular() {
        let lambda_g = spectral_radius(&g.adjacency_matrix(), DEFAULT_TOL)?.lambda;
        majorant(
            lambda_g / gap,
            FormulaId::L17,
            format!("lambda(R) <= lambda(G)/(q - Delta) = {lambda_g}/{gap}"),
        )?;
    }
    let kappa = max_density(g)?;
    if !kappa.ratio().is_zero() {
        let k = kappa.value();
        let bound = 2.0 * (k * (delta as f64 - k)).sqrt();
        majorant(
            bound / gap,
            FormulaId::T44,
            format!(
                "lambda(G) <= 2 sqrt(kappa (Delta - kappa)) = {bound} with kappa = {}/{}",
                kappa.num, kappa.den
            ),
        )?;
    }
    Ok(certs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::class_params;

    #[test]
    fn nonregular_at_twice_delta() {
        let p = class_params(Provenance::NonregularConnected { max_degree: 2 });
        let certs = coloring_certificates(
            ColoringTarget::Class {
                params: p,
                max_degree: 2,
                n: 3,
            },
            4,
            0.01,
        )
        .unwrap();
        let r = &certs[0];
        assert_eq!(r.formula, FormulaId::C52);
        assert!((r.bound - 54.0 * 300f64.ln()).abs() < 1e-9);
        let s = &certs[1];
        assert!((s.bound - 27.0 * 300f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn tree_strict_case() {
        let certs = coloring_certificates(
            ColoringTarget::Class {
                params: class_params(Provenance::Forest),
                max_degree: 4,
                n: 20,
            },
            8,
            0.1,
        )
        .unwrap();
        assert!((certs[0].mu - 12f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn regular_graph_exact_route() {
        let g = Graph::cycle(10);
        let certs = coloring_certificates(ColoringTarget::Graph(&g), 5, 0.01).unwrap();
        let r = &certs[0];
        assert!((r.mu - 2.0 / 3.0).abs() < 1e-9);
        assert!((r.bound - 30.0 * 1000f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn too_few_colors() {
        assert!(matches!(
            coloring_certificates(ColoringTarget::Graph(&Graph::star(3)), 3, 0.1),
            Err(Error::QTooSmall { .. })
        ));
    }
}

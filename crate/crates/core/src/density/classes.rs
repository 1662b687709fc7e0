use num_integer::Roots;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::ratio_to_f64;

/// Where a pair `(a, b)` with `|E| <= a n - b` on every subgraph comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    NonregularConnected { max_degree: usize },
    Forest,
    TreeWidth { t: usize },
    Planar,
    Genus { g: usize },
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassParams {
    pub a: Rational64,
    pub b: Rational64,
    pub provenance: Provenance,
}

impl ClassParams {
    pub fn custom(a: Rational64, b: Rational64) -> Self {
        ClassParams {
            a,
            b,
            provenance: Provenance::Custom,
        }
    }
}

pub fn class_params(provenance: Provenance) -> ClassParams {
    let int = |x: i64| Rational64::from_integer(x);
    let (a, b) = match provenance {
        Provenance::NonregularConnected { max_degree } => {
            (Rational64::new(max_degree as i64, 2), int(1))
        }
        Provenance::Forest => (int(1), int(1)),
        Provenance::TreeWidth { t } => {
            let t = t as i64;
            (int(t), int(t * (t + 1) / 2))
        }
        Provenance::Planar => (int(3), int(6)),
        Provenance::Genus { g } => (int(3), int(6 * (1 - g as i64))),
        Provenance::Custom => (int(0), int(0)),
    };
    ClassParams { a, b, provenance }
}

/// Upper bound on the maximum density of any graph in the class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassBound {
    pub kappa_bound: f64,
    pub kappa_exact: Rational64,
    /// `k* = a + 1/2 + sqrt((a + 1/2)^2 - 2b)`, present when `b <= 0`.
    pub kstar: Option<f64>,
    /// The same bound with `floor(k*)` in place of `ceil(k*)` in the second
    /// term, as some restatements print it.
    pub floor_variant: Option<Rational64>,
}

impl ClassBound {
    /// Whether the bound can stand in for the exact density next to
    /// `alpha = ||R||_1`, which requires it to be at most `alpha / 2`.
    pub fn within_half(&self, alpha: f64) -> bool {
        self.kappa_bound <= alpha / 2.0
    }
}

fn exact_sqrt(x: Rational64) -> Option<Rational64> {
    if x.is_negative() {
        return None;
    }
    let (p, q) = (*x.numer(), *x.denom());
    let (rp, rq) = (p.sqrt(), q.sqrt());
    (rp * rp == p && rq * rq == q).then(|| Rational64::new(rp, rq))
}

/// `floor` and `ceil` of `k*`, exact when the discriminant is a square.
fn kstar_floor_ceil(a: Rational64, b: Rational64) -> (f64, i64, i64) {
    let half = Rational64::new(1, 2);
    let disc = (a + half) * (a + half) - b * 2;
    if let Some(root) = exact_sqrt(disc) {
        let k = a + half + root;
        (ratio_to_f64(k), k.floor().to_integer(), k.ceil().to_integer())
    } else {
        let k = ratio_to_f64(a + half) + ratio_to_f64(disc).sqrt();
        (k, k.floor() as i64, k.ceil() as i64)
    }
}

/// `max{(floor(k*) - 1)/2, a - b/k}` for the chosen rounding `k` of `k*`.
fn dense_core_bound(a: Rational64, b: Rational64, floor: i64, k: i64) -> Rational64 {
    let clique = Rational64::new(floor - 1, 2);
    let sparse = a - b / k;
    clique.max(sparse)
}

/// Density bound for graphs on `n` vertices with `|E_S| <= a|S| - b` for
/// all vertex sets `S`.
pub fn class_density_bound(p: &ClassParams, n: usize) -> ClassBound {
    let (a, b) = (p.a, p.b);
    let linear = a - b / n.max(1) as i64;
    if b.is_positive() {
        return ClassBound {
            kappa_bound: ratio_to_f64(linear),
            kappa_exact: linear,
            kstar: None,
            floor_variant: None,
        };
    }
    let (k, lo, hi) = kstar_floor_ceil(a, b);
    let mut exact = dense_core_bound(a, b, lo, hi);
    if b.is_zero() {
        // both forms apply; a - 0/n = a
        exact = exact.min(linear);
    }
    ClassBound {
        kappa_bound: ratio_to_f64(exact),
        kappa_exact: exact,
        kstar: Some(k),
        floor_variant: Some(dense_core_bound(a, b, lo, lo.max(1))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_table() {
        let p = class_params(Provenance::TreeWidth { t: 3 });
        assert_eq!((p.a, p.b), (3.into(), 6.into()));
        let f = class_params(Provenance::Forest);
        assert_eq!((f.a, f.b), (1.into(), 1.into()));
        let g0 = class_params(Provenance::Genus { g: 0 });
        let pl = class_params(Provenance::Planar);
        assert_eq!((g0.a, g0.b), (pl.a, pl.b));
    }

    #[test]
    fn planar_bound() {
        let b = class_density_bound(&class_params(Provenance::Planar), 10);
        assert_eq!(b.kappa_exact, Rational64::new(12, 5));
        assert!(b.kstar.is_none());
    }

    #[test]
    fn torus_bound() {
        let b = class_density_bound(&class_params(Provenance::Genus { g: 1 }), 50);
        assert_eq!(b.kstar, Some(7.0));
        assert_eq!(b.kappa_exact, Rational64::from_integer(3));
    }

    #[test]
    fn genus_two_bound() {
        let b = class_density_bound(&class_params(Provenance::Genus { g: 2 }), 50);
        let k = 3.5 + 24.25f64.sqrt();
        assert!((b.kstar.unwrap() - k).abs() < 1e-12);
        assert_eq!(b.kappa_exact, Rational64::new(11, 3));
        assert_eq!(b.floor_variant, Some(Rational64::new(15, 4)));
    }
}

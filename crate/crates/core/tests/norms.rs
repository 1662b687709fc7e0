use nalgebra::DMatrix;
use proptest::prelude::*;
use spinmix_core::depmat::example1_matrix;
use spinmix_core::norms::{
    cn_value, dual_norm, jn_value, matrix_norm, numerical_radius, perron_left_vector, perturb,
    spectral_radius, NormKind,
};
use spinmix_core::{Error, Matrix};

fn lambda(m: &Matrix) -> f64 {
    spectral_radius(m, 1e-12).unwrap().lambda
}

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.n(), m.n(), m.as_slice())
}

/// Spectral radius from the full complex spectrum.
fn oracle_radius(m: &Matrix) -> f64 {
    to_na(m)
        .complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

fn oracle_two_norm(m: &Matrix) -> f64 {
    to_na(m).singular_values().iter().copied().fold(0.0, f64::max)
}

fn matrix_of(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64], n * n)
        .prop_map(move |v| Matrix::new(n, v).unwrap())
}

fn positive_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..7).prop_flat_map(|n| {
        prop::collection::vec(0.01..1.0f64, n * n).prop_map(move |v| Matrix::new(n, v).unwrap())
    })
}

fn any_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..7).prop_flat_map(matrix_of)
}

fn pair() -> impl Strategy<Value = (Matrix, Matrix, Vec<f64>)> {
    (1usize..7).prop_flat_map(|n| {
        let w = prop::collection::vec(0.05..1.0f64, n).prop_map(|w| {
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        });
        (matrix_of(n), matrix_of(n), w)
    })
}

fn kinds(w: Vec<f64>) -> Vec<NormKind> {
    vec![
        NormKind::One,
        NormKind::Two,
        NormKind::Infinity,
        NormKind::Frobenius,
        NormKind::MaxOneInf,
        NormKind::WeightedOne(w),
    ]
}

#[test]
fn example1_norms() {
    let m = example1_matrix(10).unwrap().into_inner();
    assert_eq!(matrix_norm(&m, &NormKind::One).unwrap(), 0.8);
    assert_eq!(matrix_norm(&m, &NormKind::Infinity).unwrap(), 0.9);
    assert!((lambda(&m) - 0.4).abs() < 1e-8);
    let w = perron_left_vector(&m, 1e-12).unwrap().w;
    for i in 1..8 {
        assert!((w[i] / w[i + 1] - 2.0).abs() < 1e-6);
    }
}

#[test]
fn small_examples() {
    assert_eq!(matrix_norm(&Matrix::identity(5), &NormKind::One).unwrap(), 1.0);
    let eps = Matrix::from_rows(&[[0.1, 0.8], [0.1, 0.1]]).unwrap();
    assert!(matrix_norm(&eps, &NormKind::Two).unwrap() > 0.8);
    let nil = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
    assert_eq!(lambda(&nil), 0.0);
    assert!((numerical_radius(&nil).unwrap() - 0.5).abs() < 1e-12);
    assert!(matches!(perron_left_vector(&nil, 1e-10), Err(Error::ReducibleMatrix)));
    let c6 = Matrix::from_fn(6, |i, j| if (i + 1) % 6 == j || (j + 1) % 6 == i { 1.0 } else { 0.0 });
    assert!((lambda(&c6) - 2.0).abs() < 1e-10);
    assert!((numerical_radius(&Matrix::identity(3)).unwrap() - 1.0).abs() < 1e-12);
    for k in [NormKind::One, NormKind::Two, NormKind::Infinity] {
        assert!((dual_norm(&Matrix::identity(4), &k).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn uniform_matrix_perron_vector() {
    let j = Matrix::ones(4).scale(0.25);
    let cert = perron_left_vector(&j, 1e-12).unwrap();
    assert!(cert.w.iter().all(|&x| (x - 1.0).abs() < 1e-10));
    assert!((cert.mu - 1.0).abs() < 1e-10);
}

#[test]
fn jn_and_cn_values() {
    assert_eq!(jn_value(&NormKind::Two, 7).unwrap(), 7.0);
    let w = NormKind::weighted(vec![0.5, 0.3, 0.2]).unwrap();
    assert!((jn_value(&w, 3).unwrap() - 5.0).abs() < 1e-12);
    assert_eq!(jn_value(&NormKind::MaxOneInf, 4).unwrap(), 4.0);
    assert_eq!(cn_value(&NormKind::MaxOneInf, 4).unwrap(), 16.0);
    assert_eq!(cn_value(&NormKind::One, 4).unwrap(), 4.0);
    assert!(NormKind::weighted(vec![0.5, 0.6]).is_err());
}

#[test]
fn perturbation_examples() {
    let m = example1_matrix(10).unwrap().into_inner();
    let p = perturb(&m, 0.8, 0.1, &NormKind::One).unwrap();
    assert!(p.w.iter().copied().fold(1.0, f64::min) >= 0.01);
    assert!((p.muprime - 0.9).abs() < 1e-15);

    let z = perturb(&Matrix::zeros(3), 0.0, 0.5, &NormKind::One).unwrap();
    assert!(z.rprime.max_abs_diff(&Matrix::ones(3).scale(0.5 / 3.0)) < 1e-15);
    assert!(z.w.iter().all(|&x| (x - 1.0).abs() < 1e-10));
    assert!(matches!(
        perturb(&Matrix::zeros(3), 0.5, 0.6, &NormKind::One),
        Err(Error::EtaOutOfRange { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn norm_axioms((a, b, w) in pair(), c in 0.0..3.0f64) {
        let ab = a.mul(&b).unwrap();
        let sum = a.add(&b).unwrap();
        for k in kinds(w) {
            let na = matrix_norm(&a, &k).unwrap();
            let nb = matrix_norm(&b, &k).unwrap();
            prop_assert!(na >= 0.0);
            prop_assert_eq!(na == 0.0, a.as_slice().iter().all(|&x| x == 0.0));
            let scaled = matrix_norm(&a.scale(c), &k).unwrap();
            prop_assert!((scaled - c * na).abs() <= 1e-9 * (1.0 + c * na));
            prop_assert!(matrix_norm(&sum, &k).unwrap() <= na + nb + 1e-9);
            prop_assert!(matrix_norm(&ab, &k).unwrap() <= na * nb + 1e-9);
        }
    }
}

proptest! {
    #[test]
    fn duality_and_radius_bounds((a, _, w) in pair()) {
        prop_assert_eq!(
            matrix_norm(&a, &NormKind::One).unwrap(),
            dual_norm(&a, &NormKind::Infinity).unwrap()
        );
        let lam = lambda(&a);
        for k in kinds(w) {
            prop_assert!(lam <= matrix_norm(&a, &k).unwrap() + 1e-8);
        }
        let nu = numerical_radius(&a).unwrap();
        let two = matrix_norm(&a, &NormKind::Two).unwrap();
        prop_assert!(lam <= nu + 1e-8 && nu <= two + 1e-8);
        let one = matrix_norm(&a, &NormKind::One).unwrap();
        let inf = matrix_norm(&a, &NormKind::Infinity).unwrap();
        prop_assert!(two * two <= one * inf + 1e-8);
        prop_assert!(two <= (a.n() as f64).sqrt() * one + 1e-8);
    }

    #[test]
    fn matches_dense_eigen_oracle(a in any_matrix(), p in positive_matrix()) {
        // the general eigensolver is unreliable on defective spectra, so the
        // radius is compared only on positive (hence irreducible) matrices
        prop_assert!((lambda(&p) - oracle_radius(&p)).abs() <= 1e-9);
        let two = matrix_norm(&a, &NormKind::Two).unwrap();
        prop_assert!((two - oracle_two_norm(&a)).abs() <= 1e-8);
    }

    #[test]
    fn symmetric_radii_coincide(a in any_matrix()) {
        let s = a.add(&a.transpose()).unwrap();
        let lam = lambda(&s);
        prop_assert!((numerical_radius(&s).unwrap() - lam).abs() <= 1e-8);
        prop_assert!((matrix_norm(&s, &NormKind::Two).unwrap() - lam).abs() <= 1e-8);
    }

    #[test]
    fn monotone_in_entries(a in any_matrix(), bump in 0.0..1.0f64) {
        let bigger = Matrix::from_fn(a.n(), |i, j| a[(i, j)] + if (i + j) % 2 == 0 { bump } else { 0.0 });
        prop_assert!(lambda(&a) <= lambda(&bigger) + 1e-8);
    }

    #[test]
    fn block_diagonal_radius((a, b, _) in pair()) {
        let n = a.n();
        let block = Matrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (false, false) => b[(i - n, j - n)],
            _ => 0.0,
        });
        prop_assert!((lambda(&block) - lambda(&a).max(lambda(&b))).abs() <= 1e-8);
    }

    #[test]
    fn perturbed_vector_certifies(a in matrix_of(6), eta in 0.01..0.1f64) {
        let two = matrix_norm(&a, &NormKind::Two).unwrap();
        let a = if two > 0.7 { a.scale(0.7 / two) } else { a };
        let mu = matrix_norm(&a, &NormKind::Two).unwrap();
        let p = perturb(&a, mu, eta, &NormKind::Two).unwrap();
        let wr = p.rprime.vec_mul(&p.w);
        let slack = wr.iter().zip(&p.w).map(|(x, w)| x - p.muprime * w).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(slack <= 1e-9);
        prop_assert!(p.w.iter().copied().fold(1.0, f64::min) >= eta / 6.0 - 1e-12);
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinmix_core::density::Graph;
use spinmix_core::depmat::ScanOrder;
use spinmix_core::glauber::{
    coupled_run, exact_tv, heatbath_update, is_proper, local_distribution, maximal_coupling, run,
    stationarity_residual, ChainSpec, System, UpdateRule, DEFAULT_CAP,
};
use spinmix_core::mixbounds::{random_update_time, RandomVariant};

/// Pearson statistic of observed counts against probabilities, skipping
/// cells of zero probability (which must then be empty).
fn chi2(counts: &[usize], p: &[f64]) -> f64 {
    let total: usize = counts.iter().sum();
    counts
        .iter()
        .zip(p)
        .map(|(&c, &q)| {
            if q == 0.0 {
                assert_eq!(c, 0);
                return 0.0;
            }
            let e = q * total as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

// upper 1e-4 quantiles of chi-square
const CHI2_DF1: f64 = 15.14;
const CHI2_DF3: f64 = 21.11;

fn coloring(g: Graph, q: usize, update: UpdateRule, seed: u64) -> ChainSpec {
    ChainSpec::new(System::Coloring { graph: g, q }, update, seed).unwrap()
}

#[test]
fn heatbath_matches_local_distribution() {
    let g = Graph::path(3);
    let system = System::Coloring { graph: g.clone(), q: 4 };
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (x, j) in [(vec![0, 1, 2], 1), (vec![0, 1, 0], 1), (vec![3, 0, 1], 0)] {
        let p = local_distribution(&system, &x, j).unwrap();
        let mut counts = vec![0; 4];
        for _ in 0..20_000 {
            let mut y = x.clone();
            heatbath_update(&mut y, &g, 4, j, &mut rng).unwrap();
            assert!(is_proper(&g, &y));
            counts[y[j]] += 1;
        }
        let df = p.iter().filter(|&&w| w > 0.0).count() - 1;
        let crit = if df == 1 { CHI2_DF1 } else { CHI2_DF3 };
        assert!(chi2(&counts, &p) < crit, "{counts:?} vs {p:?}");
    }
}

#[test]
fn facilitated_chain_is_uniform() {
    for update in [UpdateRule::RandomUpdate, UpdateRule::Scan(ScanOrder::identity(6))] {
        let spec = ChainSpec::new(System::Facilitated { n: 6, delta: 0.4 }, update, 5).unwrap();
        assert!(stationarity_residual(&spec, DEFAULT_CAP).unwrap() <= 1e-10);
    }
    let spec = ChainSpec::new(
        System::Facilitated { n: 6, delta: 0.4 },
        UpdateRule::RandomUpdate,
        6,
    )
    .unwrap();
    let traj = run(&spec, &[0; 6], 200_000).unwrap();
    let mut counts = vec![0usize; 64];
    for x in traj.iter().skip(1000).step_by(10) {
        counts[x.iter().fold(0, |acc, &s| 2 * acc + s)] += 1;
    }
    let total: usize = counts.iter().sum();
    for k in 0..6 {
        let ones: usize = (0..64).filter(|s| s >> k & 1 == 1).map(|s| counts[s]).sum();
        assert!((ones as f64 / total as f64 - 0.5).abs() < 0.02);
    }
}

#[test]
fn trajectories_keep_colorings_proper() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..10 {
        let g = Graph::random_gnp(12, 0.3, &mut rng);
        let q = g.max_degree() + 2;
        let start = spinmix_core::glauber::greedy_coloring(&g, q).unwrap();
        let order = ScanOrder::identity(12);
        for update in [UpdateRule::RandomUpdate, UpdateRule::Scan(order.clone())] {
            let spec = coloring(g.clone(), q, update, seed);
            let traj = run(&spec, &start, 200).unwrap();
            assert_eq!(traj.len(), 201);
            assert!(traj.iter().all(|x| is_proper(&g, x)));
            assert_eq!(traj, run(&spec, &start, 200).unwrap());
        }
    }
}

#[test]
fn coupling_is_independent_of_thread_count() {
    let spec = coloring(Graph::cycle(8), 5, UpdateRule::RandomUpdate, 77);
    let x0 = [0, 1, 0, 1, 0, 1, 0, 1];
    let y0 = [2, 3, 2, 3, 2, 3, 2, 4];
    let with = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| coupled_run(&spec, &x0, &y0, 100, 500).unwrap())
    };
    let one = with(1);
    assert_eq!(one, with(3));
    assert_eq!(one, with(8));
}

#[test]
fn coupling_marginals() {
    let p = [0.1, 0.4, 0.2, 0.3];
    let q = [0.25, 0.25, 0.25, 0.25];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut cp, mut cq) = (vec![0; 4], vec![0; 4]);
    let mut agree = 0;
    let trials = 50_000;
    for _ in 0..trials {
        let (a, b) = maximal_coupling(&p, &q, rng.random::<f64>());
        cp[a] += 1;
        cq[b] += 1;
        agree += (a == b) as usize;
    }
    assert!(chi2(&cp, &p) < CHI2_DF3);
    assert!(chi2(&cq, &q) < CHI2_DF3);
    // P(a = b) = 1 - d_TV(p, q) = 0.8
    let rate = agree as f64 / trials as f64;
    assert!((rate - 0.8).abs() < 4.0 * (0.16f64 / trials as f64).sqrt());
}

#[test]
fn two_site_coupling_respects_contraction_bound() {
    // P2 with q = 3 has ||R||_1 = 1/2
    let spec = coloring(Graph::path(2), 3, UpdateRule::RandomUpdate, 17);
    let trials = 10_000;
    let stats = coupled_run(&spec, &[0, 1], &[1, 2], 200, trials).unwrap();
    let mean = stats.mean_coupling_time().expect("every trial coalesced");
    let bound = random_update_time(0.5, 2, 2.0, 0.25, RandomVariant::Lemma17).unwrap().bound;
    // Markov: P(T > t) <= E[T] / t, and the coupling inequality makes the
    // uncoupled fraction at the bound at most eps
    let t = bound.ceil() as usize;
    let uncoupled = 1.0 - stats.steps[t].coalesced_frac;
    assert!(uncoupled <= 0.25 + 3.0 * (0.25f64 * 0.75 / trials as f64).sqrt());
    assert!(uncoupled <= mean / t as f64 + 3.0 * (0.25f64 / trials as f64).sqrt());
    assert!(mean < 2.0 * bound);
}

#[test]
fn exact_tv_is_nonincreasing() {
    let cases = [
        coloring(Graph::path(3), 4, UpdateRule::RandomUpdate, 0),
        coloring(Graph::cycle(4), 4, UpdateRule::Scan(ScanOrder::identity(4)), 0),
        ChainSpec::new(System::Facilitated { n: 5, delta: 0.3 }, UpdateRule::RandomUpdate, 0).unwrap(),
    ];
    for spec in &cases {
        let reports = exact_tv(spec, 60, DEFAULT_CAP).unwrap();
        assert_eq!(reports.len(), 61);
        assert!(reports.windows(2).all(|w| w[1].tv <= w[0].tv + 1e-12));
        assert!(reports.last().unwrap().tv < reports[0].tv);
    }
}

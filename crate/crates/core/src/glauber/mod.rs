//! Heat-bath Glauber dynamics for proper colorings and the facilitated
//! model, maximal couplings, and exact small-instance verification.
//!
//! Configurations are plain `Vec<usize>` spin vectors indexed by site.
//! Randomness comes from ChaCha8 seeded by [`ChainSpec::seed`]; independent
//! trials use the stream selected by the trial index, so results do not
//! depend on the number of worker threads.

mod coupling;
mod exact;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::Graph;
use crate::depmat::ScanOrder;
use crate::error::{Error, Result};

pub use coupling::{
    coupled_run, coupled_run_weighted, maximal_coupling, CouplingStats, RatioEstimate, StepStats,
};
pub use exact::{
    delta_contraction_check, delta_vector, enumerate_configurations, exact_tv,
    influence_matrix_enumerated, influence_matrix_exact, stationarity_residual, tv_csv,
    DeltaReport, StateSpace, TVReport, DEFAULT_CAP,
};

/// Identifier of the generator used for every randomized report.
pub const RNG_ALGORITHM: &str = "ChaCha8";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum System {
    Coloring { graph: Graph, q: usize },
    /// Binary spins; site `j` is blocked when any of `j-2, j-1, j+1` holds a 1.
    Facilitated { n: usize, delta: f64 },
}

impl System {
    pub fn n(&self) -> usize {
        match self {
            System::Coloring { graph, .. } => graph.n(),
            System::Facilitated { n, .. } => *n,
        }
    }

    /// Number of spin values.
    pub fn spins(&self) -> usize {
        match self {
            System::Coloring { q, .. } => *q,
            System::Facilitated { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    RandomUpdate,
    Scan(ScanOrder),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub system: System,
    pub update: UpdateRule,
    pub seed: u64,
}

impl ChainSpec {
    pub fn new(system: System, update: UpdateRule, seed: u64) -> Result<Self> {
        match &system {
            System::Coloring { graph, q } => {
                if graph.n() == 0 {
                    return Err(Error::EmptyGraph);
                }
                if *q <= graph.max_degree() {
                    return Err(Error::QTooSmall {
                        q: *q,
                        max_degree: graph.max_degree(),
                    });
                }
            }
            System::Facilitated { n, delta } => {
                if *n <= 3 {
                    return Err(Error::PreconditionFailed(format!(
                        "facilitated model needs n > 3, got {n}"
                    )));
                }
                if !(0.0..=1.0).contains(delta) {
                    return Err(Error::PreconditionFailed(format!(
                        "delta = {delta} outside [0, 1]"
                    )));
                }
            }
        }
        if let UpdateRule::Scan(order) = &update {
            if order.len() != system.n() {
                return Err(Error::DimensionMismatch {
                    expected: system.n(),
                    found: order.len(),
                });
            }
        }
        Ok(ChainSpec {
            system,
            update,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    /// True when `q < Delta + 2`, where the heat-bath chain on proper
    /// colorings may fail to be connected.
    pub fn connectivity_warning(&self) -> bool {
        match &self.system {
            System::Coloring { graph, q } => *q < graph.max_degree() + 2,
            System::Facilitated { .. } => false,
        }
    }

    /// Sites visited by one sweep, or `None` for random updates.
    pub(crate) fn sweep(&self) -> Option<&[usize]> {
        match &self.update {
            UpdateRule::RandomUpdate => None,
            UpdateRule::Scan(order) => Some(order.as_slice()),
        }
    }

    pub(crate) fn check_state(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.len(),
            });
        }
        let s = self.system.spins();
        if let Some((site, _)) = x.iter().enumerate().find(|&(_, &v)| v >= s) {
            return Err(Error::PreconditionFailed(format!(
                "spin at site {site} is outside 0..{s}"
            )));
        }
        Ok(())
    }
}

pub fn is_proper(g: &Graph, x: &[usize]) -> bool {
    g.edges().iter().all(|&(u, v)| x[u] != x[v])
}

/// First-fit coloring in vertex order; proper whenever `q > Delta`.
pub fn greedy_coloring(g: &Graph, q: usize) -> Result<Vec<usize>> {
    let mut x = vec![usize::MAX; g.n()];
    for v in 0..g.n() {
        let used: Vec<usize> = g.neighbors(v).iter().map(|&u| x[u]).collect();
        x[v] = (0..q)
            .find(|c| !used.contains(c))
            .ok_or(Error::NoLegalColor { site: v })?;
    }
    Ok(x)
}

fn legal_colors(g: &Graph, q: usize, x: &[usize], j: usize) -> Vec<usize> {
    let mut used = vec![false; q];
    for &u in g.neighbors(j) {
        if x[u] < q {
            used[x[u]] = true;
        }
    }
    (0..q).filter(|&c| !used[c]).collect()
}

fn blocked(x: &[usize], j: usize) -> bool {
    let n = x.len();
    [j.wrapping_sub(2), j.wrapping_sub(1), j + 1]
        .into_iter()
        .any(|i| i < n && x[i] == 1)
}

/// The update distribution `mu_j(x, .)` over spin values.
pub fn local_distribution(system: &System, x: &[usize], j: usize) -> Result<Vec<f64>> {
    match system {
        System::Coloring { graph, q } => {
            let legal = legal_colors(graph, *q, x, j);
            if legal.is_empty() {
                return Err(Error::NoLegalColor { site: j });
            }
            let mut p = vec![0.0; *q];
            let w = 1.0 / legal.len() as f64;
            for c in legal {
                p[c] = w;
            }
            Ok(p)
        }
        System::Facilitated { delta, .. } => {
            if blocked(x, j) {
                let mut p = vec![delta / 2.0; 2];
                p[x[j]] += 1.0 - delta;
                Ok(p)
            } else {
                Ok(vec![0.5, 0.5])
            }
        }
    }
}

/// Inverse-CDF sample from `p` with `u` in `[0, 1)`.
pub(crate) fn sample_index(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in p.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Redraws the color at `j` uniformly among colors unused by its neighbors.
pub fn heatbath_update<R: Rng + ?Sized>(
    state: &mut [usize],
    g: &Graph,
    q: usize,
    j: usize,
    rng: &mut R,
) -> Result<()> {
    let legal = legal_colors(g, q, state, j);
    if legal.is_empty() {
        return Err(Error::NoLegalColor { site: j });
    }
    state[j] = legal[rng.random_range(0..legal.len())];
    Ok(())
}

/// Resamples site `j` uniformly from `{0, 1}` when unblocked; when
/// blocked, only with probability `delta`.
pub fn facilitated_step<R: Rng + ?Sized>(state: &mut [usize], delta: f64, j: usize, rng: &mut R) {
    if !blocked(state, j) || rng.random_bool(delta.clamp(0.0, 1.0)) {
        state[j] = rng.random_range(0..2);
    }
}

fn update<R: Rng + ?Sized>(system: &System, x: &mut [usize], j: usize, rng: &mut R) -> Result<()> {
    match system {
        System::Coloring { graph, q } => heatbath_update(x, graph, *q, j, rng),
        System::Facilitated { delta, .. } => {
            facilitated_step(x, *delta, j, rng);
            Ok(())
        }
    }
}

/// Runs the chain from `start`. Each step is one site update for
/// [`UpdateRule::RandomUpdate`] and one full sweep for [`UpdateRule::Scan`].
/// The trajectory has `steps + 1` entries and depends only on the spec.
pub fn run(spec: &ChainSpec, start: &[usize], steps: usize) -> Result<Vec<Vec<usize>>> {
    spec.check_state(start)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n();
    let mut x = start.to_vec();
    let mut traj = Vec::with_capacity(steps + 1);
    traj.push(x.clone());
    for _ in 0..steps {
        match spec.sweep() {
            None => {
                let j = rng.random_range(0..n);
                update(&spec.system, &mut x, j, &mut rng)?;
            }
            Some(order) => {
                for &j in order {
                    update(&spec.system, &mut x, j, &mut rng)?;
                }
            }
        }
        if let System::Coloring { graph, .. } = &spec.system {
            debug_assert!(!is_proper(graph, start) || is_proper(graph, &x));
        }
        traj.push(x.clone());
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coloring(g: Graph, q: usize, seed: u64) -> ChainSpec {
        ChainSpec::new(System::Coloring { graph: g, q }, UpdateRule::RandomUpdate, seed).unwrap()
    }

    #[test]
    fn zero_steps() {
        let spec = coloring(Graph::path(3), 4, 1);
        assert_eq!(run(&spec, &[0, 1, 0], 0).unwrap(), vec![vec![0, 1, 0]]);
    }

    #[test]
    fn deterministic_and_proper() {
        let g = Graph::petersen();
        let spec = coloring(g.clone(), 5, 42);
        let x = greedy_coloring(&g, 5).unwrap();
        let a = run(&spec, &x, 500).unwrap();
        assert_eq!(a, run(&spec, &x, 500).unwrap());
        assert!(a.iter().all(|s| is_proper(&g, s)));
    }

    #[test]
    fn local_distributions() {
        let sys = System::Coloring {
            graph: Graph::path(2),
            q: 3,
        };
        assert_eq!(local_distribution(&sys, &[0, 1], 0).unwrap(), vec![0.5, 0.0, 0.5]);
        let iso = System::Coloring {
            graph: Graph::new(1, vec![]).unwrap(),
            q: 4,
        };
        assert_eq!(local_distribution(&iso, &[2], 0).unwrap(), vec![0.25; 4]);
        let fac = System::Facilitated { n: 5, delta: 0.0 };
        assert_eq!(local_distribution(&fac, &[1, 0, 0, 0, 0], 1).unwrap(), vec![1.0, 0.0]);
        assert_eq!(local_distribution(&fac, &[0, 0, 0, 0, 1], 0).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn blocked_site_frozen_at_zero_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x = vec![0, 1, 1, 0, 0];
        for _ in 0..100 {
            facilitated_step(&mut x, 0.0, 2, &mut rng);
            assert_eq!(x[2], 1);
        }
    }

    #[test]
    fn spec_validation() {
        let star = System::Coloring {
            graph: Graph::star(3),
            q: 3,
        };
        assert!(matches!(
            ChainSpec::new(star, UpdateRule::RandomUpdate, 0),
            Err(Error::QTooSmall { .. })
        ));
        let spec = coloring(Graph::star(3), 4, 0);
        assert!(spec.connectivity_warning());
        let fac = System::Facilitated { n: 3, delta: 0.5 };
        assert!(ChainSpec::new(fac, UpdateRule::RandomUpdate, 0).is_err());
    }
}

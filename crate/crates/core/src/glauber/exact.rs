use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{local_distribution, ChainSpec, System, RNG_ALGORITHM};
use crate::density::Graph;
use crate::depmat::{
    random_update_matrix, scan_update_matrix, site_update_matrix, DependencyMatrix, ScanOrder,
};
use crate::error::{Error, Result};
use crate::norms::Matrix;

/// Default limit on enumerated state spaces.
pub const DEFAULT_CAP: usize = 20_000;

/// Slack allowed when checking that `pi` is invariant.
const STATIONARITY_TOL: f64 = 1e-10;

/// An enumerated set of configurations with an index lookup.
#[derive(Debug, Clone)]
pub struct StateSpace {
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl StateSpace {
    fn from_states(states: Vec<Vec<usize>>) -> Self {
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        StateSpace { states, index }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn index_of(&self, x: &[usize]) -> Option<usize> {
        self.index.get(x).copied()
    }
}

fn full_space(n: usize, spins: usize, cap: usize) -> Result<StateSpace> {
    let size = (spins as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::StateSpaceTooLarge { size, cap });
    }
    let mut states = Vec::with_capacity(size as usize);
    let mut x = vec![0usize; n];
    loop {
        states.push(x.clone());
        // odometer increment, site 0 fastest
        let mut i = 0;
        while i < n {
            x[i] += 1;
            if x[i] < spins {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Ok(StateSpace::from_states(states))
}

fn proper_colorings(g: &Graph, q: usize, cap: usize) -> Result<StateSpace> {
    fn extend(
        g: &Graph,
        q: usize,
        v: usize,
        x: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> bool {
        if v == g.n() {
            out.push(x.clone());
            return out.len() <= cap;
        }
        for c in 0..q {
            if g.neighbors(v).iter().all(|&u| u > v || x[u] != c) {
                x.push(c);
                let ok = extend(g, q, v + 1, x, out, cap);
                x.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut out = Vec::new();
    if !extend(g, q, 0, &mut Vec::with_capacity(g.n()), &mut out, cap) {
        return Err(Error::StateSpaceTooLarge {
            size: out.len() as u128,
            cap,
        });
    }
    Ok(StateSpace::from_states(out))
}

/// All of `Sigma^n` when `full` is set; otherwise the proper colorings for
/// a coloring system and `{0,1}^n` for the facilitated model.
pub fn enumerate_configurations(system: &System, full: bool, cap: usize) -> Result<StateSpace> {
    match system {
        System::Coloring { graph, q } if !full => proper_colorings(graph, *q, cap),
        _ => full_space(system.n(), system.spins(), cap),
    }
}

/// Sparse rows of the single-site kernel `P^[j]` on `space`.
type Kernel = Vec<Vec<(usize, f64)>>;

fn site_kernel(system: &System, space: &StateSpace, j: usize) -> Result<Kernel> {
    space
        .states()
        .iter()
        .map(|x| {
            let p = local_distribution(system, x, j)?;
            let mut y = x.clone();
            let mut row = Vec::new();
            for (s, &w) in p.iter().enumerate() {
                if w > 0.0 {
                    y[j] = s;
                    let b = space.index_of(&y).ok_or_else(|| {
                        Error::PreconditionFailed("kernel leaves the state space".into())
                    })?;
                    row.push((b, w));
                }
            }
            Ok(row)
        })
        .collect()
}

fn kernels(system: &System, space: &StateSpace) -> Result<Vec<Kernel>> {
    (0..system.n()).map(|j| site_kernel(system, space, j)).collect()
}

/// `nu P` for a row distribution `nu`.
fn push_forward(k: &Kernel, nu: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; nu.len()];
    for (a, row) in k.iter().enumerate() {
        if nu[a] != 0.0 {
            for &(b, w) in row {
                out[b] += nu[a] * w;
            }
        }
    }
    out
}

/// `P f` for a function `f` on the state space.
fn apply(k: &Kernel, f: &[f64]) -> Vec<f64> {
    k.iter()
        .map(|row| row.iter().map(|&(b, w)| w * f[b]).sum())
        .collect()
}

fn space_for(spec: &ChainSpec, cap: usize) -> Result<StateSpace> {
    enumerate_configurations(&spec.system, false, cap)
}

/// Largest violation of detailed balance and of `pi P^[j] = pi` over all
/// sites, with `pi` uniform on the enumerated space.
pub fn stationarity_residual(spec: &ChainSpec, cap: usize) -> Result<f64> {
    let space = space_for(spec, cap)?;
    residual(&space, &kernels(&spec.system, &space)?)
}

fn residual(space: &StateSpace, ks: &[Kernel]) -> Result<f64> {
    let m = space.len();
    let pi = vec![1.0 / m as f64; m];
    let mut worst: f64 = 0.0;
    for k in ks {
        let moved = push_forward(k, &pi);
        worst = moved.iter().fold(worst, |acc, &v| acc.max((v - pi[0]).abs()));
        let lookup: HashMap<(usize, usize), f64> = k
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |&(b, w)| ((a, b), w)))
            .collect();
        for (&(a, b), &w) in &lookup {
            let back = lookup.get(&(b, a)).copied().unwrap_or(0.0);
            worst = worst.max(pi[a] * (w - back).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TVReport {
    /// Site updates for random update, sweeps for scan.
    pub t: usize,
    /// Largest total-variation distance to `pi` over start states.
    pub tv: f64,
    pub statespace: usize,
}

pub fn tv_csv(reports: &[TVReport]) -> String {
    let mut s = String::from("t,tv\n");
    for r in reports {
        writeln!(s, "{},{}", r.t, r.tv).unwrap();
    }
    s
}

/// Exact worst-start total variation to the uniform stationary law for
/// `t = 0..=horizon`. Starts range over proper colorings or `{0,1}^n`.
pub fn exact_tv(spec: &ChainSpec, horizon: usize, cap: usize) -> Result<Vec<TVReport>> {
    let space = space_for(spec, cap)?;
    let ks = kernels(&spec.system, &space)?;
    let res = residual(&space, &ks)?;
    if res > STATIONARITY_TOL {
        return Err(Error::PreconditionFailed(format!(
            "uniform law is not stationary (residual {res:e})"
        )));
    }
    let m = space.len();
    let pi = 1.0 / m as f64;
    let n = spec.n();
    let mut worst = vec![0.0f64; horizon + 1];
    for start in 0..m {
        let mut nu = vec![0.0; m];
        nu[start] = 1.0;
        for (t, w) in worst.iter_mut().enumerate() {
            if t > 0 {
                nu = match spec.sweep() {
                    None => {
                        let mut acc = vec![0.0; m];
                        for k in &ks {
                            for (a, v) in acc.iter_mut().zip(push_forward(k, &nu)) {
                                *a += v / n as f64;
                            }
                        }
                        acc
                    }
                    Some(order) => order.iter().fold(nu, |v, &j| push_forward(&ks[j], &v)),
                };
            }
            let tv = 0.5 * nu.iter().map(|v| (v - pi).abs()).sum::<f64>();
            *w = w.max(tv);
        }
    }
    Ok(worst
        .into_iter()
        .enumerate()
        .map(|(t, tv)| TVReport {
            t,
            tv,
            statespace: m,
        })
        .collect())
}

fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Exact heat-bath influences `rho_ij` for proper colorings, taken over all
/// of `[q]^n`. Only the colors on `N(j)` matter, so each column costs
/// `q^(|N(j)| + 1)` evaluations.
pub fn influence_matrix_exact(g: &Graph, q: usize, cap: usize) -> Result<Matrix> {
    let delta = g.max_degree();
    if q <= delta {
        return Err(Error::QTooSmall {
            q,
            max_degree: delta,
        });
    }
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rho = Matrix::zeros(n);
    for j in 0..n {
        let nb = g.distinct_neighbors(j);
        let size = (q as u128).checked_pow(nb.len() as u32 + 1).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::CapExceeded { size, cap });
        }
        let local = full_space(nb.len(), q, cap)?;
        let legal = |colors: &[usize]| {
            let mut used = vec![false; q];
            for &c in colors {
                used[c] = true;
            }
            used
        };
        for (pos, &i) in nb.iter().enumerate() {
            let mut best: f64 = 0.0;
            for a in local.states() {
                let ua = legal(a);
                let free_a = ua.iter().filter(|u| !**u).count();
                let mut b = a.clone();
                for c in (0..q).filter(|&c| c != a[pos]) {
                    b[pos] = c;
                    let ub = legal(&b);
                    let free_b = ub.iter().filter(|u| !**u).count();
                    let shared = ua.iter().zip(&ub).filter(|(x, y)| !**x && !**y).count();
                    best = best.max(1.0 - shared as f64 / free_a.max(free_b) as f64);
                }
            }
            let limit = 1.0 / (q - g.degree(j)) as f64;
            if best > limit + 1e-12 {
                return Err(Error::PreconditionFailed(format!(
                    "influence {best} of {i} on {j} exceeds 1/(q - d_j) = {limit}"
                )));
            }
            rho[(i, j)] = best;
        }
    }
    Ok(rho)
}

/// Influences `rho_ij` of any system by brute force over `Sigma^n`,
/// including the diagonal.
pub fn influence_matrix_enumerated(system: &System, cap: usize) -> Result<Matrix> {
    let n = system.n();
    let space = full_space(n, system.spins(), cap)?;
    let mut rho = Matrix::zeros(n);
    for j in 0..n {
        for x in space.states() {
            let p = local_distribution(system, x, j)?;
            let mut y = x.clone();
            for i in 0..n {
                for s in (x[i] + 1)..system.spins() {
                    y[i] = s;
                    let d = tv(&p, &local_distribution(system, &y, j)?);
                    if d > rho[(i, j)] {
                        rho[(i, j)] = d;
                    }
                }
                y[i] = x[i];
            }
        }
    }
    Ok(rho)
}

/// Oscillations `delta_i(f) = max |f(x) - f(y)|` over pairs in `space`
/// that differ only at site `i`.
pub fn delta_vector(space: &StateSpace, spins: usize, f: &[f64]) -> Vec<f64> {
    let n = space.states().first().map_or(0, Vec::len);
    let mut d = vec![0.0f64; n];
    for (a, x) in space.states().iter().enumerate() {
        let mut y = x.clone();
        for i in 0..n {
            for s in (x[i] + 1)..spins {
                y[i] = s;
                if let Some(b) = space.index_of(&y) {
                    d[i] = d[i].max((f[a] - f[b]).abs());
                }
            }
            y[i] = x[i];
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub seed: u64,
    pub trials: usize,
    pub rng: String,
    pub statespace: usize,
    /// Largest `delta(P^[j] f) - R_j delta(f)` component over all `j`.
    pub max_violation_site: f64,
    pub max_violation_random: f64,
    pub max_violation_scan: f64,
    /// Whether constant functions have zero oscillation before and after.
    pub constants_vanish: bool,
    pub passed: bool,
}

/// Largest violation tolerated by [`delta_contraction_check`].
const DELTA_TOL: f64 = 1e-10;

fn violation(lhs: &[f64], m: &Matrix, d: &[f64]) -> f64 {
    let rhs = m.mul_vec(d);
    lhs.iter()
        .zip(&rhs)
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Checks `delta(P^[j] f) <= R_j delta(f)`, `delta(P† f) <= R† delta(f)`
/// and `delta(P→ f) <= R→ delta(f)` for `trials` random `f` with entries
/// uniform on `[0, 1]`, over all of `Sigma^n`.
///
/// `R` is the exact influence matrix. The scan uses the spec's order, or
/// the identity order under random update.
pub fn delta_contraction_check(spec: &ChainSpec, trials: usize) -> Result<DeltaReport> {
    let system = &spec.system;
    let n = spec.n();
    let spins = system.spins();
    let space = full_space(n, spins, DEFAULT_CAP)?;
    let r = match system {
        System::Coloring { graph, q } => influence_matrix_exact(graph, *q, DEFAULT_CAP)?,
        System::Facilitated { .. } => influence_matrix_enumerated(system, DEFAULT_CAP)?,
    };
    let dep = DependencyMatrix::new(r)?;
    let order = match spec.sweep() {
        Some(o) => ScanOrder::new(o.to_vec())?,
        None => ScanOrder::identity(n),
    };
    let rj: Vec<Matrix> = (0..n).map(|j| site_update_matrix(&dep, j)).collect::<Result<_>>()?;
    let r_random = random_update_matrix(&dep);
    let r_scan = scan_update_matrix(&dep, &order)?;
    let ks = kernels(system, &space)?;

    let constant = vec![0.5; space.len()];
    let constants_vanish = delta_vector(&space, spins, &constant).iter().all(|&d| d == 0.0)
        && ks
            .iter()
            .all(|k| delta_vector(&space, spins, &apply(k, &constant)).iter().all(|&d| d < 1e-15));

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut vs, mut vr, mut vc) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..trials {
        let f: Vec<f64> = (0..space.len()).map(|_| rng.random::<f64>()).collect();
        let d = delta_vector(&space, spins, &f);
        let mut avg = vec![0.0; space.len()];
        for (k, m) in ks.iter().zip(&rj) {
            let pf = apply(k, &f);
            vs = vs.max(violation(&delta_vector(&space, spins, &pf), m, &d));
            for (a, v) in avg.iter_mut().zip(&pf) {
                *a += v / n as f64;
            }
        }
        vr = vr.max(violation(&delta_vector(&space, spins, &avg), &r_random, &d));
        // P→ f = P^[o1](P^[o2](... P^[on] f))
        let scanned = order
            .as_slice()
            .iter()
            .rev()
            .fold(f.clone(), |g, &j| apply(&ks[j], &g));
        vc = vc.max(violation(&delta_vector(&space, spins, &scanned), &r_scan, &d));
    }
    let passed = constants_vanish && vs.max(vr).max(vc) <= DELTA_TOL;
    Ok(DeltaReport {
        seed: spec.seed,
        trials,
        rng: RNG_ALGORITHM.into(),
        statespace: space.len(),
        max_violation_site: vs,
        max_violation_random: vr,
        max_violation_scan: vc,
        constants_vanish,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glauber::{is_proper, UpdateRule};

    fn all_proper(g: &Graph, space: &StateSpace) -> bool {
        space.states().iter().all(|x| is_proper(g, x))
    }

    fn spec(g: Graph, q: usize, update: UpdateRule) -> ChainSpec {
        ChainSpec::new(System::Coloring { graph: g, q }, update, 7).unwrap()
    }

    #[test]
    fn p2_tv_starts_at_five_sixths() {
        let s = spec(Graph::path(2), 3, UpdateRule::RandomUpdate);
        let r = exact_tv(&s, 20, DEFAULT_CAP).unwrap();
        assert_eq!(r[0].statespace, 6);
        assert!((r[0].tv - 5.0 / 6.0).abs() < 1e-15);
        assert!(r.windows(2).all(|w| w[1].tv <= w[0].tv + 1e-12));
        let space = space_for(&s, DEFAULT_CAP).unwrap();
        assert!(all_proper(&Graph::path(2), &space));
    }

    #[test]
    fn p2_and_p3_influences() {
        let r = influence_matrix_exact(&Graph::path(2), 3, DEFAULT_CAP).unwrap();
        assert_eq!(r[(0, 1)], 0.5);
        let r = influence_matrix_exact(&Graph::path(3), 5, DEFAULT_CAP).unwrap();
        assert!((r[(0, 1)] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r[(0, 2)], 0.0);
        let sys = System::Coloring {
            graph: Graph::path(3),
            q: 5,
        };
        assert!(influence_matrix_enumerated(&sys, DEFAULT_CAP).unwrap().max_abs_diff(&r) < 1e-15);
    }

    #[test]
    fn facilitated_influences_match_band() {
        let sys = System::Facilitated { n: 6, delta: 0.25 };
        let r = influence_matrix_enumerated(&sys, DEFAULT_CAP).unwrap();
        assert!((r[(1, 3)] - 0.375).abs() < 1e-15);
        assert!((r[(2, 3)] - 0.375).abs() < 1e-15);
        assert!((r[(4, 3)] - 0.375).abs() < 1e-15);
        assert_eq!(r[(5, 3)], 0.0);
        // a blocked site keeps its own spin with probability 1 - delta
        assert!((r[(3, 3)] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let s = spec(Graph::path(8), 5, UpdateRule::RandomUpdate);
        assert!(matches!(
            exact_tv(&s, 1, 100),
            Err(Error::StateSpaceTooLarge { .. })
        ));
        assert!(matches!(
            influence_matrix_exact(&Graph::star(4), 9, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn delta_check_small() {
        let s = spec(Graph::path(2), 3, UpdateRule::RandomUpdate);
        let rep = delta_contraction_check(&s, 50).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.constants_vanish);
    }
}

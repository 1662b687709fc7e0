use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{local_distribution, sample_index, ChainSpec, RNG_ALGORITHM};
use crate::error::{Error, Result};

/// Maximal coupling of `p` and `q` driven by a single uniform `u`.
///
/// The common part `min(p, q)` is laid out first in ascending spin order;
/// the residuals are then paired by quantile, also in ascending order.
pub fn maximal_coupling(p: &[f64], q: &[f64], u: f64) -> (usize, usize) {
    let common: Vec<f64> = p.iter().zip(q).map(|(a, b)| a.min(*b)).collect();
    let c: f64 = common.iter().sum();
    if u < c {
        let s = sample_index(&common, u);
        return (s, s);
    }
    let v = if c < 1.0 { (u - c) / (1.0 - c) } else { 0.0 };
    let rp: Vec<f64> = p.iter().zip(&common).map(|(a, m)| (a - m) / (1.0 - c)).collect();
    let rq: Vec<f64> = q.iter().zip(&common).map(|(a, m)| (a - m) / (1.0 - c)).collect();
    (sample_index(&rp, v), sample_index(&rq, v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub t: usize,
    pub mean_hamming: f64,
    pub std_hamming: f64,
    pub coalesced_frac: f64,
}

/// Ratio of sums with a delta-method standard error across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingStats {
    pub seed: u64,
    pub trials: usize,
    pub rng: String,
    /// Per-step statistics of the distance, `t = 0..=maxsteps`.
    pub steps: Vec<StepStats>,
    /// First step at which the chains agree, per trial.
    pub coupling_times: Vec<Option<usize>>,
    /// `sum_t d(x_{t+1}, y_{t+1}) / sum_t d(x_t, y_t)` pooled over trials.
    pub contraction: RatioEstimate,
}

impl CouplingStats {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,mean_hamming,std_hamming,coalesced_frac\n");
        for r in &self.steps {
            writeln!(
                s,
                "{},{},{},{}",
                r.t, r.mean_hamming, r.std_hamming, r.coalesced_frac
            )
            .unwrap();
        }
        s
    }

    pub fn mean_coupling_time(&self) -> Option<f64> {
        let times: Option<Vec<usize>> = self.coupling_times.iter().copied().collect();
        times.map(|t| t.iter().sum::<usize>() as f64 / t.len().max(1) as f64)
    }
}

struct Trial {
    distances: Vec<f64>,
    coupled_at: Option<usize>,
}

fn distance(x: &[usize], y: &[usize], w: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(w)
        .filter(|((a, b), _)| a != b)
        .fold(0.0, |acc, (_, w)| acc + w)
}

fn coupled_update(
    spec: &ChainSpec,
    x: &mut [usize],
    y: &mut [usize],
    j: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let p = local_distribution(&spec.system, x, j)?;
    let q = local_distribution(&spec.system, y, j)?;
    let (a, b) = maximal_coupling(&p, &q, rng.random::<f64>());
    x[j] = a;
    y[j] = b;
    Ok(())
}

fn one_trial(
    spec: &ChainSpec,
    x0: &[usize],
    y0: &[usize],
    maxsteps: usize,
    w: &[f64],
    trial: u64,
) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(trial);
    let (mut x, mut y) = (x0.to_vec(), y0.to_vec());
    let mut distances = Vec::with_capacity(maxsteps + 1);
    let mut coupled_at = (x == y).then_some(0);
    distances.push(distance(&x, &y, w));
    for t in 1..=maxsteps {
        if coupled_at.is_some() {
            distances.push(0.0);
            continue;
        }
        match spec.sweep() {
            None => {
                let j = rng.random_range(0..spec.n());
                coupled_update(spec, &mut x, &mut y, j, &mut rng)?;
            }
            Some(order) => {
                for &j in order {
                    coupled_update(spec, &mut x, &mut y, j, &mut rng)?;
                }
            }
        }
        if x == y {
            coupled_at = Some(t);
        }
        distances.push(distance(&x, &y, w));
    }
    Ok(Trial {
        distances,
        coupled_at,
    })
}

/// Coupled chains from `x0` and `y0` measured in Hamming distance.
pub fn coupled_run(
    spec: &ChainSpec,
    x0: &[usize],
    y0: &[usize],
    maxsteps: usize,
    trials: usize,
) -> Result<CouplingStats> {
    coupled_run_weighted(spec, x0, y0, maxsteps, trials, &vec![1.0; spec.n()])
}

/// Coupled chains measured in the weighted distance `sum_i w_i [x_i != y_i]`.
///
/// Both chains share the site choice and couple each update maximally.
/// Trial `k` uses stream `k` of the seeded generator and runs on the
/// current rayon pool; the result does not depend on the pool size.
pub fn coupled_run_weighted(
    spec: &ChainSpec,
    x0: &[usize],
    y0: &[usize],
    maxsteps: usize,
    trials: usize,
    w: &[f64],
) -> Result<CouplingStats> {
    spec.check_state(x0)?;
    spec.check_state(y0)?;
    if w.len() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            found: w.len(),
        });
    }
    if trials == 0 {
        return Err(Error::PreconditionFailed("at least one trial is required".into()));
    }
    let runs: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|k| one_trial(spec, x0, y0, maxsteps, w, k))
        .collect::<Result<_>>()?;

    let k = trials as f64;
    let steps = (0..=maxsteps)
        .map(|t| {
            let mean = runs.iter().map(|r| r.distances[t]).sum::<f64>() / k;
            let var = if trials > 1 {
                runs.iter().map(|r| (r.distances[t] - mean).powi(2)).sum::<f64>() / (k - 1.0)
            } else {
                0.0
            };
            let done = runs.iter().filter(|r| r.coupled_at.is_some_and(|c| c <= t)).count();
            StepStats {
                t,
                mean_hamming: mean,
                std_hamming: var.sqrt(),
                coalesced_frac: done as f64 / k,
            }
        })
        .collect();

    let pairs: Vec<(f64, f64)> = runs
        .iter()
        .map(|r| {
            let after: f64 = r.distances[1..].iter().sum();
            let before: f64 = r.distances[..maxsteps].iter().sum();
            (after, before)
        })
        .collect();
    let (sa, sb) = pairs.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let estimate = if sb > 0.0 { sa / sb } else { 0.0 };
    let std_error = if sb > 0.0 && trials > 1 {
        let mean_b = sb / k;
        let s2 = pairs
            .iter()
            .map(|(a, b)| (a - estimate * b).powi(2))
            .sum::<f64>()
            / (k - 1.0);
        (s2 / k).sqrt() / mean_b
    } else {
        0.0
    };

    Ok(CouplingStats {
        seed: spec.seed,
        trials,
        rng: RNG_ALGORITHM.into(),
        steps,
        coupling_times: runs.iter().map(|r| r.coupled_at).collect(),
        contraction: RatioEstimate {
            estimate,
            std_error,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Graph;
    use crate::glauber::{System, UpdateRule};

    #[test]
    fn coupling_is_maximal() {
        let p = [0.5, 0.0, 0.5];
        let q = [0.0, 0.5, 0.5];
        let mut agree = 0;
        for k in 0..1000 {
            let u = (k as f64 + 0.5) / 1000.0;
            let (a, b) = maximal_coupling(&p, &q, u);
            assert!(p[a] > 0.0 && q[b] > 0.0);
            agree += (a == b) as usize;
        }
        assert_eq!(agree, 500);
    }

    #[test]
    fn equal_starts_couple_immediately() {
        let spec = ChainSpec::new(
            System::Coloring {
                graph: Graph::path(3),
                q: 4,
            },
            UpdateRule::RandomUpdate,
            9,
        )
        .unwrap();
        let s = coupled_run(&spec, &[0, 1, 0], &[0, 1, 0], 5, 3).unwrap();
        assert!(s.coupling_times.iter().all(|&t| t == Some(0)));
        let csv = s.to_csv();
        assert!(csv.starts_with("t,mean_hamming,std_hamming,coalesced_frac\n0,0,0,1\n"), "{csv}");
    }
}

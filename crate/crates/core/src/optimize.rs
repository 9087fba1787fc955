//! Derivative-free local search used by both optimization layers, plus the
//! shared budget/seed configuration.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Budgets, tolerances, and the RNG seed for the nested search.
///
/// Every run is deterministic for a fixed seed, independent of how restarts
/// are scheduled across threads.
#[derive(Debug, Clone)]
pub struct OptimizationConfig {
    /// Multi-start count for the outer measurement search.
    pub restarts: usize,
    /// Random-restart count for the inner product-state minimization
    /// (basis-derived warm starts are always added on top).
    pub inner_restarts: usize,
    /// Iteration cap per simplex descent.
    pub max_iters: usize,
    /// Objective-evaluation budget per outer restart.
    pub outer_evals: usize,
    /// Convergence tolerance on function-value spread.
    pub f_tol: f64,
    /// Angular resolution for brute-force grid oracles.
    pub grid_resolution: f64,
    /// Master RNG seed.
    pub seed: u64,
    /// Largest local dimension accepted by the outer search.
    pub max_dim: usize,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            restarts: 24,
            inner_restarts: 16,
            max_iters: 2000,
            outer_evals: 2600,
            f_tol: 1e-8,
            grid_resolution: std::f64::consts::PI / 60.0,
            seed: 17,
            max_dim: 3,
        }
    }
}

impl OptimizationConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Derive a decorrelated stream seed for a restart index (splitmix64 step).
    pub fn stream_seed(&self, index: u64) -> u64 {
        let mut z = self
            .seed
            .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Result of one local descent.
#[derive(Debug, Clone)]
pub struct LocalMinResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex descent (minimization). Converges when the simplex
/// function-value spread drops below `f_tol` or `max_iters` is reached.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    initial_step: f64,
    max_iters: usize,
    f_tol: f64,
) -> LocalMinResult {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += initial_step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        if values[worst] - values[best] < f_tol {
            converged = true;
            break;
        }

        // Centroid of all but the worst point.
        let mut centroid = vec![0.0; n];
        for &idx in order.iter().take(n) {
            for k in 0..n {
                centroid[k] += simplex[idx][k];
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let reflect: Vec<f64> = (0..n)
            .map(|k| centroid[k] + alpha * (centroid[k] - simplex[worst][k]))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < values[best] {
            let expand: Vec<f64> = (0..n)
                .map(|k| centroid[k] + gamma * (centroid[k] - simplex[worst][k]))
                .collect();
            let f_expand = f(&expand);
            if f_expand < f_reflect {
                simplex[worst] = expand;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
        } else if f_reflect < values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = f_reflect;
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|k| centroid[k] + rho * (simplex[worst][k] - centroid[k]))
                .collect();
            let f_contract = f(&contract);
            if f_contract < values[worst] {
                simplex[worst] = contract;
                values[worst] = f_contract;
            } else {
                // Shrink toward the best vertex.
                let best_point = simplex[best].clone();
                for idx in 0..=n {
                    if idx == best {
                        continue;
                    }
                    for k in 0..n {
                        simplex[idx][k] =
                            best_point[k] + sigma * (simplex[idx][k] - best_point[k]);
                    }
                    values[idx] = f(&simplex[idx]);
                }
            }
        }
    }

    let best_idx = (0..=n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap())
        .unwrap();
    LocalMinResult {
        x: simplex[best_idx].clone(),
        value: values[best_idx],
        iterations,
        converged,
    }
}

/// (1+1) evolution strategy with the 1/5th success rule (minimization).
/// Robust in high dimension where a simplex stalls; used for the outer
/// measurement search before a simplex polish.
pub fn adaptive_random_search<F: FnMut(&[f64]) -> f64, R: Rng>(
    mut f: F,
    x0: &[f64],
    sigma0: f64,
    max_evals: usize,
    rng: &mut R,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut sigma = sigma0;
    let mut proposal = vec![0.0; n];
    for _ in 0..max_evals {
        for k in 0..n {
            let step: f64 = StandardNormal.sample(rng);
            proposal[k] = x[k] + sigma * step;
        }
        let fp = f(&proposal);
        if fp < fx {
            x.copy_from_slice(&proposal);
            fx = fp;
            sigma = (sigma * 1.221_402_758).min(4.0 * sigma0);
        } else {
            sigma = (sigma * 0.951_229_424).max(1e-7);
        }
    }
    (x, fx)
}

/// Staged (1+1) search for high-dimensional landscapes: several rounds of
/// decreasing base step, each with the 1/5th rule, alternating dense Gaussian
/// moves with sparse moves that kick a few coordinates at triple step. The
/// sparse moves cross ridges that stall isotropic proposals.
pub fn staged_mixed_search<F: FnMut(&[f64]) -> f64, R: Rng>(
    mut f: F,
    x0: &[f64],
    stages: &[(f64, usize)],
    rng: &mut R,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut proposal = vec![0.0; n];
    let sparse_count = (n / 9).max(1);
    for &(sigma0, evals) in stages {
        let mut sigma = sigma0;
        for _ in 0..evals {
            proposal.copy_from_slice(&x);
            if rng.gen::<bool>() {
                for k in 0..n {
                    let step: f64 = StandardNormal.sample(rng);
                    proposal[k] += sigma * step;
                }
            } else {
                for _ in 0..sparse_count {
                    let k = rng.gen_range(0..n);
                    let step: f64 = StandardNormal.sample(rng);
                    proposal[k] += 3.0 * sigma * step;
                }
            }
            let fp = f(&proposal);
            if fp < fx {
                x.copy_from_slice(&proposal);
                fx = fp;
                sigma = (sigma * 1.221_402_758).min(4.0 * sigma0);
            } else {
                sigma = (sigma * 0.951_229_424).max(1e-7);
            }
        }
    }
    (x, fx)
}

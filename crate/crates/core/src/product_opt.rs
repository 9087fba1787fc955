//! The inner minimization layer: minimum Klein entropy over product pure
//! states, closed-form capped-entropy minima, the 2-qubit
//! product-state-in-a-plane solver, and brute-force grid oracles.
//!
//! The infimum is taken over product *pure* states only: Klein entropy is
//! concave in the state, so over the convex set of separable states the
//! infimum is attained at extreme points, which are exactly the pure products.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entropy::entropy_unchecked;
use crate::error::{Error, Result};
use crate::measurement::Measurement;
use crate::optimize::{nelder_mead, OptimizationConfig};
use crate::state::{
    haar_random_local, kron_vec, schmidt_decompose, CVector, Dims, PureState, C64,
};

/// A product pure state |l⟩⊗|r⟩, stored by its local factors.
#[derive(Debug, Clone)]
pub struct ProductState {
    left: CVector,
    right: CVector,
}

impl ProductState {
    pub fn new(left: CVector, right: CVector) -> Result<Self> {
        for v in [&left, &right] {
            let norm = v.norm();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::NotNormalized(norm));
            }
        }
        Ok(ProductState { left, right })
    }

    pub fn left(&self) -> &CVector {
        &self.left
    }

    pub fn right(&self) -> &CVector {
        &self.right
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.left.len(), self.right.len())
    }

    /// The joint state |l⟩⊗|r⟩.
    pub fn tensor(&self) -> PureState {
        let amp = kron_vec(&self.left, &self.right);
        PureState::normalized(amp, self.dims()).expect("product of unit vectors")
    }
}

/// Result of the inner minimization. `value` is an upper bound on the true
/// infimum and is attained by `minimizer`.
#[derive(Debug, Clone)]
pub struct InnerMinResult {
    pub value: f64,
    pub minimizer: ProductState,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Square of the greatest Schmidt coefficient: the maximal overlap
/// |⟨σ|ψ⟩|² between ψ and any product state σ.
pub fn max_product_overlap(psi: &PureState) -> Result<f64> {
    Ok(schmidt_decompose(psi)?.max_coefficient_sq())
}

/// Minimum Shannon entropy over n-outcome distributions with every pᵢ ≤ c:
/// k = ⌊1/c⌋ entries equal to c plus one entry 1−kc (dropped when zero),
/// giving H(c,…,c,1−kc).
pub fn min_entropy_capped(c: f64, n: usize) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidArgument(format!("cap c = {c} outside (0, 1]")));
    }
    // ⌊1/c⌋, robust against 1/c landing just below an integer.
    let mut k = (1.0 / c).floor() as usize;
    if (k + 1) as f64 * c <= 1.0 + 1e-12 {
        k += 1;
    }
    let residual = (1.0 - k as f64 * c).max(0.0);
    let needed = k + usize::from(residual > 1e-12);
    if n < needed {
        return Err(Error::InvalidArgument(format!(
            "{n} outcomes cannot host a capped distribution needing {needed}"
        )));
    }
    let mut h = -(k as f64) * c * c.log2();
    if residual > 1e-12 {
        h -= residual * residual.log2();
    }
    Ok(h.max(0.0))
}

/// Minimum entropy over distributions with per-outcome caps pᵢ ≤ capᵢ.
/// The greedy fill in descending cap order majorizes every feasible
/// distribution, so it minimizes the (Schur-concave) entropy.
pub fn min_entropy_with_caps(caps: &[f64]) -> Result<f64> {
    if caps.iter().any(|&c| !(c > 0.0 && c <= 1.0 + 1e-12)) {
        return Err(Error::InvalidArgument("caps must lie in (0, 1]".into()));
    }
    let total: f64 = caps.iter().sum();
    if total < 1.0 - 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "caps sum to {total} < 1; no feasible distribution"
        )));
    }
    let mut sorted = caps.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut remaining = 1.0;
    let mut p = Vec::with_capacity(sorted.len());
    for c in sorted {
        if remaining <= 0.0 {
            break;
        }
        let take = c.min(remaining);
        p.push(take);
        remaining -= take;
    }
    Ok(entropy_unchecked(&p))
}

// ---------------------------------------------------------------------------
// Spherical-coordinate parameterization of local pure states.
//
// A state on C^m maps to m−1 polar angles and m−1 phases, with the first
// amplitude real (global phase gauge-fixed): 2(m−1) real parameters.
// ---------------------------------------------------------------------------

pub(crate) fn local_param_len(m: usize) -> usize {
    2 * (m - 1)
}

/// Fill `out` (length m) from angles [θ₁…θ_{m−1}, φ₁…φ_{m−1}].
pub(crate) fn local_from_angles(x: &[f64], out: &mut [C64]) {
    let m = out.len();
    let (thetas, phis) = x.split_at(m - 1);
    let mut running = 1.0;
    for k in 0..m {
        let mag = if k < m - 1 {
            let (s, c) = thetas[k].sin_cos();
            let v = running * c;
            running *= s;
            v
        } else {
            running
        };
        out[k] = if k == 0 {
            C64::new(mag, 0.0)
        } else {
            C64::from_polar(mag, phis[k - 1])
        };
    }
}

/// Inverse of [`local_from_angles`] after gauge-fixing the global phase so the
/// first amplitude is real nonnegative.
pub(crate) fn angles_from_local(v: &CVector) -> Vec<f64> {
    let m = v.len();
    let phase0 = if v[0].norm() > 1e-14 { v[0].arg() } else { 0.0 };
    let gauge = C64::from_polar(1.0, -phase0);
    let mags: Vec<f64> = (0..m).map(|k| (v[k] * gauge).norm()).collect();
    let mut x = vec![0.0; local_param_len(m)];
    let mut tail_sq: Vec<f64> = vec![0.0; m + 1];
    for k in (0..m).rev() {
        tail_sq[k] = tail_sq[k + 1] + mags[k] * mags[k];
    }
    for k in 0..m - 1 {
        x[k] = tail_sq[k + 1].max(0.0).sqrt().atan2(mags[k]);
    }
    for k in 1..m {
        x[m - 2 + k] = (v[k] * gauge).arg();
    }
    x
}

/// Klein-entropy objective over the product manifold with reusable scratch.
struct ProductEntropy {
    da: usize,
    db: usize,
    /// Per outcome: conjugated amplitudes, row-major dA×dB.
    kmats: Vec<Vec<C64>>,
    left: Vec<C64>,
    right: Vec<C64>,
    bridge: Vec<C64>,
    probs: Vec<f64>,
}

impl ProductEntropy {
    fn new(m: &Measurement) -> Self {
        let Dims { a: da, b: db } = m.dims();
        let kmats = m
            .vectors()
            .iter()
            .map(|v| (0..da * db).map(|idx| v[idx].conj()).collect())
            .collect();
        ProductEntropy {
            da,
            db,
            kmats,
            left: vec![C64::new(0.0, 0.0); da],
            right: vec![C64::new(0.0, 0.0); db],
            bridge: vec![C64::new(0.0, 0.0); db],
            probs: vec![0.0; da * db],
        }
    }

    /// p_i = |Σ_{jk} conj(φ_i[jk]) l_j r_k|² for the product state given by x.
    fn eval(&mut self, x: &[f64]) -> f64 {
        let split = local_param_len(self.da);
        local_from_angles(&x[..split], &mut self.left);
        local_from_angles(&x[split..], &mut self.right);
        self.eval_local()
    }

    fn eval_local(&mut self) -> f64 {
        for (i, km) in self.kmats.iter().enumerate() {
            for k in 0..self.db {
                let mut t = C64::new(0.0, 0.0);
                for j in 0..self.da {
                    t += km[j * self.db + k] * self.left[j];
                }
                self.bridge[k] = t;
            }
            let mut ov = C64::new(0.0, 0.0);
            for k in 0..self.db {
                ov += self.bridge[k] * self.right[k];
            }
            self.probs[i] = ov.norm_sqr();
        }
        entropy_unchecked(&self.probs)
    }
}

/// Multi-start minimization of Klein entropy over product pure states.
///
/// Starts from the best product approximation (top Schmidt pair) of every
/// basis vector, plus `cfg.inner_restarts` sampled starts, each refined by
/// simplex descent. Each sampled start is the best of a fresh batch of
/// Haar-random product states (batch prescans are cheap evaluations), which
/// keeps the start set prefix-stable in the restart count: the returned value
/// upper-bounds the true infimum and is nonincreasing in the restart budget.
pub fn min_klein_entropy_over_products(
    m: &Measurement,
    cfg: &OptimizationConfig,
) -> Result<InnerMinResult> {
    let dims = m.dims();
    let mut objective = ProductEntropy::new(m);
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(m.vectors().len() + cfg.inner_restarts);

    for v in m.vectors() {
        let psi = PureState::new(v.clone(), dims)?;
        let sd = schmidt_decompose(&psi)?;
        let mut x = angles_from_local(&sd.left_basis()[0]);
        x.extend(angles_from_local(&sd.right_basis()[0]));
        starts.push(x);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let batch = if dims.total() <= 4 { 12 } else { 64 };
    for _ in 0..cfg.inner_restarts {
        let mut best_x: Option<Vec<f64>> = None;
        let mut best_v = f64::INFINITY;
        for _ in 0..batch {
            let l = haar_random_local(dims.a, &mut rng);
            let r = haar_random_local(dims.b, &mut rng);
            let mut x = angles_from_local(&l);
            x.extend(angles_from_local(&r));
            let v = objective.eval(&x);
            if v < best_v {
                best_v = v;
                best_x = Some(x);
            }
        }
        starts.push(best_x.expect("nonempty batch"));
    }

    let mut best_x: Option<Vec<f64>> = None;
    let mut best_value = f64::INFINITY;
    let mut best_converged = false;
    let restarts_used = starts.len();
    for x0 in starts {
        let res = nelder_mead(
            |x| objective.eval(x),
            &x0,
            0.25,
            cfg.max_iters,
            cfg.f_tol,
        );
        if res.value < best_value {
            best_value = res.value;
            best_converged = res.converged;
            best_x = Some(res.x);
        }
    }

    let x = best_x.expect("at least one start");
    let value = objective.eval(&x);
    let split = local_param_len(dims.a);
    let mut left = CVector::zeros(dims.a);
    let mut right = CVector::zeros(dims.b);
    {
        let mut l = vec![C64::new(0.0, 0.0); dims.a];
        let mut r = vec![C64::new(0.0, 0.0); dims.b];
        local_from_angles(&x[..split], &mut l);
        local_from_angles(&x[split..], &mut r);
        for (k, z) in l.into_iter().enumerate() {
            left[k] = z;
        }
        for (k, z) in r.into_iter().enumerate() {
            right[k] = z;
        }
    }
    let norm_l = left.norm();
    let norm_r = right.norm();
    let minimizer = ProductState::new(left / C64::new(norm_l, 0.0), right / C64::new(norm_r, 0.0))?;
    Ok(InnerMinResult {
        value,
        minimizer,
        restarts_used,
        converged: best_converged,
    })
}

/// A product state inside span(ψ₁, ψ₂) for orthonormal ψ₁, ψ₂ on C²⊗C².
///
/// With A, B the 2×2 amplitude matrices, det(A + γB) is quadratic in γ:
/// det(B)·γ² + (a₀₀b₁₁ + a₁₁b₀₀ − a₀₁b₁₀ − a₁₀b₀₁)·γ + det(A) = 0.
/// If det B ≈ 0 then ψ₂ itself is a product state and is returned; otherwise
/// the root of smaller |γ| yields ψ₁ + γψ₂, normalized and truncated to its
/// top Schmidt pair (exact Schmidt rank 1).
pub fn product_in_2d_subspace(psi1: &PureState, psi2: &PureState) -> Result<ProductState> {
    let dims = psi1.dims();
    if dims != Dims::new(2, 2) || psi2.dims() != Dims::new(2, 2) {
        return Err(Error::UnsupportedDimension(dims.total()));
    }
    let a = psi1.amplitude_matrix();
    let b = psi2.amplitude_matrix();
    let det_b = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
    if det_b.norm() < 1e-12 {
        return rank1_truncate(psi2);
    }
    let det_a = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let cross = a[(0, 0)] * b[(1, 1)] + a[(1, 1)] * b[(0, 0)]
        - a[(0, 1)] * b[(1, 0)]
        - a[(1, 0)] * b[(0, 1)];
    let disc = (cross * cross - det_b * det_a * 4.0).sqrt();
    // Cancellation-safe quadratic roots.
    let q = if (cross.conj() * disc).re >= 0.0 {
        -(cross + disc) * 0.5
    } else {
        -(cross - disc) * 0.5
    };
    let gamma = if q.norm() < 1e-300 {
        C64::new(0.0, 0.0)
    } else {
        let r1 = q / det_b;
        let r2 = det_a / q;
        if r1.norm() <= r2.norm() {
            r1
        } else {
            r2
        }
    };
    let amp = psi1.amplitudes() + psi2.amplitudes() * gamma;
    let combination = PureState::normalized(amp, dims)?;
    rank1_truncate(&combination)
}

fn rank1_truncate(psi: &PureState) -> Result<ProductState> {
    let sd = schmidt_decompose(psi)?;
    ProductState::new(sd.left_basis()[0].clone(), sd.right_basis()[0].clone())
}

// ---------------------------------------------------------------------------
// Brute-force grid oracles (dA, dB ≤ 3).
// ---------------------------------------------------------------------------

/// All local pure states on C^m sampled at the given angular resolution
/// (polar angles over [0, π/2], phases over [0, 2π)).
fn local_grid(m: usize, resolution: f64) -> Result<Vec<Vec<C64>>> {
    if !(2..=3).contains(&m) {
        return Err(Error::DimensionBudget(m));
    }
    let n_theta = ((std::f64::consts::FRAC_PI_2 / resolution).round() as usize).max(1) + 1;
    let n_phi = ((2.0 * std::f64::consts::PI / resolution).round() as usize).max(1);
    let thetas: Vec<f64> = (0..n_theta)
        .map(|k| std::f64::consts::FRAC_PI_2 * k as f64 / (n_theta - 1) as f64)
        .collect();
    let phis: Vec<f64> = (0..n_phi)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64)
        .collect();

    let mut out = Vec::new();
    match m {
        2 => {
            for &t in &thetas {
                let (s, c) = t.sin_cos();
                let phi_count = if s.abs() < 1e-12 || c.abs() < 1e-12 {
                    1
                } else {
                    n_phi
                };
                for &p in phis.iter().take(phi_count) {
                    out.push(vec![C64::new(c, 0.0), C64::from_polar(s, p)]);
                }
            }
        }
        3 => {
            for &t1 in &thetas {
                let (s1, c1) = t1.sin_cos();
                if s1.abs() < 1e-12 {
                    out.push(vec![
                        C64::new(c1, 0.0),
                        C64::new(0.0, 0.0),
                        C64::new(0.0, 0.0),
                    ]);
                    continue;
                }
                for &t2 in &thetas {
                    let (s2, c2) = t2.sin_cos();
                    let n_phi1 = if (s1 * c2).abs() < 1e-12 { 1 } else { n_phi };
                    let n_phi2 = if (s1 * s2).abs() < 1e-12 { 1 } else { n_phi };
                    for &p1 in phis.iter().take(n_phi1) {
                        for &p2 in phis.iter().take(n_phi2) {
                            out.push(vec![
                                C64::new(c1, 0.0),
                                C64::from_polar(s1 * c2, p1),
                                C64::from_polar(s1 * s2, p2),
                            ]);
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Exhaustive grid minimum of Klein entropy over product states.
/// Exceeds the true infimum by an amount vanishing with the resolution.
pub fn brute_force_min_products(m: &Measurement, resolution: f64) -> Result<f64> {
    let dims = m.dims();
    let left_grid = local_grid(dims.a, resolution)?;
    let right_grid = local_grid(dims.b, resolution)?;
    let Dims { a: da, b: db } = dims;
    let kmats: Vec<Vec<C64>> = m
        .vectors()
        .iter()
        .map(|v| (0..da * db).map(|idx| v[idx].conj()).collect())
        .collect();
    let n_out = kmats.len();

    let result = left_grid
        .par_iter()
        .map(|l| {
            // Bridge vectors t_i[k] = Σ_j conj(φ_i[jk]) l_j, reused over the right grid.
            let mut bridges = vec![C64::new(0.0, 0.0); n_out * db];
            for (i, km) in kmats.iter().enumerate() {
                for k in 0..db {
                    let mut t = C64::new(0.0, 0.0);
                    for (j, lj) in l.iter().enumerate() {
                        t += km[j * db + k] * lj;
                    }
                    bridges[i * db + k] = t;
                }
            }
            let mut probs = vec![0.0; n_out];
            let mut acc = f64::INFINITY;
            for r in &right_grid {
                for i in 0..n_out {
                    let mut ov = C64::new(0.0, 0.0);
                    for (k, rk) in r.iter().enumerate() {
                        ov += bridges[i * db + k] * rk;
                    }
                    probs[i] = ov.norm_sqr();
                }
                acc = acc.min(entropy_unchecked(&probs));
            }
            acc
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(result)
}

/// Largest single-outcome probability max_i Tr P_i σ over the product grid.
pub fn max_outcome_probability_over_grid(m: &Measurement, resolution: f64) -> Result<f64> {
    let dims = m.dims();
    let left_grid = local_grid(dims.a, resolution)?;
    let right_grid = local_grid(dims.b, resolution)?;
    let Dims { a: da, b: db } = dims;
    let kmats: Vec<Vec<C64>> = m
        .vectors()
        .iter()
        .map(|v| (0..da * db).map(|idx| v[idx].conj()).collect())
        .collect();
    let n_out = kmats.len();

    let result = left_grid
        .par_iter()
        .map(|l| {
            let mut bridges = vec![C64::new(0.0, 0.0); n_out * db];
            for (i, km) in kmats.iter().enumerate() {
                for k in 0..db {
                    let mut t = C64::new(0.0, 0.0);
                    for (j, lj) in l.iter().enumerate() {
                        t += km[j * db + k] * lj;
                    }
                    bridges[i * db + k] = t;
                }
            }
            let mut acc = 0.0_f64;
            for r in &right_grid {
                for i in 0..n_out {
                    let mut ov = C64::new(0.0, 0.0);
                    for (k, rk) in r.iter().enumerate() {
                        ov += bridges[i * db + k] * rk;
                    }
                    acc = acc.max(ov.norm_sqr());
                }
            }
            acc
        })
        .reduce(|| 0.0, f64::max);
    Ok(result)
}

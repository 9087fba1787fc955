//! The outer layer: multi-start search over measurement bases for the
//! entanglement-parameter estimate, closed-form upper/lower bounds, exact
//! values for Bell-diagonal 2-qubit states, and admixture-continuity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entropy::{binary_entropy, coherent_information, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::measurement::{
    bell_basis, decode_measurement, eigenbasis_measurement, encode_measurement, klein_entropy,
    schmidt_preserving_eigenbasis, Measurement, MeasurementParams,
};
use crate::optimize::{adaptive_random_search, nelder_mead, staged_mixed_search, OptimizationConfig};
use crate::product_opt::{min_entropy_capped, min_klein_entropy_over_products, InnerMinResult};
use crate::state::{haar_random_unitary, DensityMatrix, Dims};

/// Numerically determined supremum of the product-minimum entropy on C³⊗C³.
/// Only known to two decimals; bounds built from it are flagged as
/// numerically sourced.
pub const QUTRIT_SUP_INF: f64 = 1.71;

/// Closed-form upper bounds applicable to a state on C^d ⊗ C^d.
#[derive(Debug, Clone)]
pub struct UpperBounds {
    /// Information content 2·log₂d − S(ρ).
    pub info_content: f64,
    /// log₂d + (1 − 1/d)·log₂(d+1) − S(ρ).
    pub dim_bound: f64,
    /// 1 − S(ρ), for d = 2 only.
    pub two_qubit_bound: Option<f64>,
    /// 1.71 − S(ρ), for d = 3 only; numerically sourced constant.
    pub qutrit_numeric_bound: Option<f64>,
}

impl UpperBounds {
    pub fn min(&self) -> f64 {
        let mut m = self.info_content.min(self.dim_bound);
        if let Some(b) = self.two_qubit_bound {
            m = m.min(b);
        }
        if let Some(b) = self.qutrit_numeric_bound {
            m = m.min(b);
        }
        m
    }
}

/// Lower bounds; `eigenbasis_lower` applies to every state, the others when
/// their structural condition is detected.
#[derive(Debug, Clone)]
pub struct LowerBounds {
    /// Product-minimum entropy in an eigenbasis of ρ, minus S(ρ).
    pub eigenbasis_lower: f64,
    /// log₂d − S(ρ) when ρ is Bell-diagonal.
    pub bell_diag_lower: Option<f64>,
    /// H(c,…,c,1−kc) for pure states with d ∈ {2,4,8}.
    pub pure_state_lower: Option<f64>,
}

impl LowerBounds {
    pub fn max(&self) -> f64 {
        let mut m = self.eigenbasis_lower;
        if let Some(b) = self.bell_diag_lower {
            m = m.max(b);
        }
        if let Some(b) = self.pure_state_lower {
            m = m.max(b);
        }
        m
    }
}

/// All applicable bounds plus the coherent information, with a consistency
/// flag: every applicable lower must not exceed any applicable upper by more
/// than 1e-9.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub info_content: f64,
    pub dim_bound: f64,
    pub two_qubit_bound: Option<f64>,
    pub qutrit_numeric_bound: Option<f64>,
    pub eigenbasis_lower: f64,
    pub bell_diag_lower: Option<f64>,
    pub pure_state_lower: Option<f64>,
    pub coherent_info: f64,
    pub consistent: bool,
}

impl BoundsReport {
    pub fn min_upper(&self) -> f64 {
        UpperBounds {
            info_content: self.info_content,
            dim_bound: self.dim_bound,
            two_qubit_bound: self.two_qubit_bound,
            qutrit_numeric_bound: self.qutrit_numeric_bound,
        }
        .min()
    }

    pub fn max_lower(&self) -> f64 {
        LowerBounds {
            eigenbasis_lower: self.eigenbasis_lower,
            bell_diag_lower: self.bell_diag_lower,
            pure_state_lower: self.pure_state_lower,
        }
        .max()
    }
}

/// Full estimation report: the estimate, its certifying measurement and inner
/// minimizer, bounds, and consistency flags.
#[derive(Debug, Clone)]
pub struct EParamReport {
    /// Best found value of the objective; a lower-bound-flavored estimate of
    /// the supremum (inner looseness biases it up, outer looseness down).
    pub estimate: f64,
    pub best_measurement: Measurement,
    pub inner_result: InnerMinResult,
    pub bounds: BoundsReport,
    /// Exact value when available (d = 2 Bell-diagonal states): 1 − S(ρ).
    pub analytic_value: Option<f64>,
    pub restarts_used: usize,
    /// estimate ≤ min applicable upper bound + 1e-6.
    pub upper_consistent: bool,
}

impl EParamReport {
    /// Acceptance-grade sandwich: max lower − 5e-2 ≤ estimate ≤ min upper + 5e-2.
    pub fn sandwich_ok(&self) -> bool {
        self.bounds.max_lower() <= self.estimate + 5e-2
            && self.estimate <= self.bounds.min_upper() + 5e-2
    }

    /// Estimate minus coherent information. The sign is recorded per run and
    /// never asserted (conjectural relation).
    pub fn conjecture_gap(&self) -> f64 {
        self.estimate - self.bounds.coherent_info
    }
}

fn require_square(rho: &DensityMatrix) -> Result<usize> {
    let dims = rho.dims();
    if !dims.is_square() {
        return Err(Error::DimensionMismatch {
            expected: dims.a,
            got: dims.b,
        });
    }
    Ok(dims.a)
}

/// True when all Bell-basis off-diagonal matrix elements of ρ vanish within `tol`.
pub fn is_bell_diagonal(rho: &DensityMatrix, tol: f64) -> Result<bool> {
    let d = require_square(rho)?;
    let basis = bell_basis(d)?;
    let m = rho.matrix();
    let n = d * d;
    for i in 0..n {
        let mi = m * basis.vectors()[i].clone();
        for j in 0..n {
            if i == j {
                continue;
            }
            let elem = basis.vectors()[j].dotc(&mi).norm();
            if elem > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact value for d = 2 Bell-diagonal states: 1 − S(ρ). `None` otherwise.
pub fn analytic_eparam(rho: &DensityMatrix) -> Result<Option<f64>> {
    let d = require_square(rho)?;
    if d != 2 {
        return Ok(None);
    }
    if !is_bell_diagonal(rho, 1e-9)? {
        return Ok(None);
    }
    Ok(Some(1.0 - von_neumann_entropy(rho)?))
}

/// Objective at a fixed measurement: product-minimum entropy minus the Klein
/// entropy of ρ.
pub fn eparam_fixed_measurement(
    rho: &DensityMatrix,
    m: &Measurement,
    cfg: &OptimizationConfig,
) -> Result<f64> {
    let inner = min_klein_entropy_over_products(m, cfg)?;
    Ok(inner.value - klein_entropy(rho, m)?)
}

pub fn upper_bounds(rho: &DensityMatrix) -> Result<UpperBounds> {
    let d = require_square(rho)?;
    let s = von_neumann_entropy(rho)?;
    let df = d as f64;
    Ok(UpperBounds {
        info_content: 2.0 * df.log2() - s,
        dim_bound: df.log2() + (1.0 - 1.0 / df) * (df + 1.0).log2() - s,
        two_qubit_bound: (d == 2).then_some(1.0 - s),
        qutrit_numeric_bound: (d == 3).then_some(QUTRIT_SUP_INF - s),
    })
}

pub fn lower_bounds(rho: &DensityMatrix, cfg: &OptimizationConfig) -> Result<LowerBounds> {
    let d = require_square(rho)?;
    let s = von_neumann_entropy(rho)?;
    let eigenbasis = eigenbasis_measurement(rho)?;
    let inner = min_klein_entropy_over_products(&eigenbasis, cfg)?;
    let eigenbasis_lower = inner.value - s;

    let bell_diag_lower = if is_bell_diagonal(rho, 1e-9)? {
        Some((d as f64).log2() - s)
    } else {
        None
    };

    let pure_state_lower = if rho.is_pure(1e-9) && matches!(d, 2 | 4 | 8) {
        rho.as_pure_state()
            .map(|psi| -> Result<f64> {
                let c = crate::product_opt::max_product_overlap(&psi)?;
                min_entropy_capped(c, d * d)
            })
            .transpose()?
    } else {
        None
    };

    Ok(LowerBounds {
        eigenbasis_lower,
        bell_diag_lower,
        pure_state_lower,
    })
}

/// Combined bound report with the 1e-9 cross-consistency flag.
pub fn bounds_report(rho: &DensityMatrix, cfg: &OptimizationConfig) -> Result<BoundsReport> {
    let upper = upper_bounds(rho)?;
    let lower = lower_bounds(rho, cfg)?;
    let coherent_info = coherent_information(rho)?;
    let uppers = [
        Some(upper.info_content),
        Some(upper.dim_bound),
        upper.two_qubit_bound,
        upper.qutrit_numeric_bound,
    ];
    let lowers = [
        Some(lower.eigenbasis_lower),
        lower.bell_diag_lower,
        lower.pure_state_lower,
    ];
    let mut consistent = true;
    for lo in lowers.iter().flatten() {
        for up in uppers.iter().flatten() {
            if *lo > *up + 1e-9 {
                consistent = false;
            }
        }
    }
    Ok(BoundsReport {
        info_content: upper.info_content,
        dim_bound: upper.dim_bound,
        two_qubit_bound: upper.two_qubit_bound,
        qutrit_numeric_bound: upper.qutrit_numeric_bound,
        eigenbasis_lower: lower.eigenbasis_lower,
        bell_diag_lower: lower.bell_diag_lower,
        pure_state_lower: lower.pure_state_lower,
        coherent_info,
        consistent,
    })
}

/// Warm-start bases: computational, eigenbasis of ρ, Bell basis, and (for
/// pure states with d ∈ {2,4,8}) the Schmidt-coefficient-preserving
/// eigenbasis. These are where the exactly solved families attain the optimum.
fn warm_start_params(rho: &DensityMatrix) -> Result<Vec<MeasurementParams>> {
    let dims = rho.dims();
    let mut starts = Vec::with_capacity(4);
    if let Some(psi) = rho.as_pure_state() {
        if matches!(dims.a, 2 | 4 | 8) && dims.is_square() {
            if let Ok(basis) = schmidt_preserving_eigenbasis(&psi) {
                starts.push(encode_measurement(&basis));
            }
        }
    }
    starts.push(encode_measurement(&eigenbasis_measurement(rho)?));
    if dims.is_square() {
        starts.push(encode_measurement(&bell_basis(dims.a)?));
    }
    starts.push(MeasurementParams::identity(dims));
    Ok(starts)
}

/// Cheaper inner budget used while exploring measurement space. Candidates
/// are re-scored with the full budget before selection.
fn search_config(cfg: &OptimizationConfig) -> OptimizationConfig {
    let mut sc = cfg.clone();
    sc.inner_restarts = (cfg.inner_restarts / 4).max(2);
    sc
}

/// Multi-start maximization over measurement bases. Restart i is a
/// deterministic function of (seed, i): warm starts come first, then
/// perturbed warm starts at cycling kick scales interleaved with Haar-random
/// bases. Low-dimensional searches (joint dimension ≤ 4) run adaptive random
/// search plus a simplex polish; larger ones run the staged mixed-move
/// search, where a simplex stalls. Every restart's best basis is re-scored
/// with `final_eval` and the maximum wins (ties to the lower restart index).
fn search_measurements<FS, FF>(
    dims: Dims,
    warm: &[MeasurementParams],
    cfg: &OptimizationConfig,
    search_eval: FS,
    final_eval: FF,
) -> Result<(MeasurementParams, f64, usize)>
where
    FS: Fn(&Measurement) -> f64 + Sync,
    FF: Fn(&Measurement) -> f64 + Sync,
{
    let restarts = cfg.restarts.max(1);
    let objective = |x: &[f64]| -> f64 {
        let params = match MeasurementParams::new(dims, x.to_vec()) {
            Ok(p) => p,
            Err(_) => return f64::INFINITY,
        };
        match decode_measurement(&params) {
            Ok(m) => -search_eval(&m),
            Err(_) => f64::INFINITY,
        }
    };

    let kick_scales = [0.15, 0.3, 0.5];
    let candidates: Vec<Vec<f64>> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.stream_seed(i as u64));
            let x0: Vec<f64> = if i < warm.len() {
                warm[i].angles().to_vec()
            } else if (i - warm.len()) % 4 != 3 {
                // Kicked warm start: optima tend to sit near the structured
                // bases, which exact warm starts cannot leave (flat points).
                let j = i - warm.len();
                let mut x = warm[j % warm.len()].angles().to_vec();
                let scale = kick_scales[(j / warm.len()) % kick_scales.len()];
                for v in x.iter_mut() {
                    *v += scale * (rng.gen::<f64>() - 0.5);
                }
                x
            } else {
                let u = haar_random_unitary(dims.total(), &mut rng);
                let m = Measurement::from_unitary_columns(&u, dims)
                    .expect("Haar unitary columns are orthonormal");
                encode_measurement(&m).angles().to_vec()
            };
            if dims.total() <= 4 {
                let es_evals = (cfg.outer_evals * 3) / 5;
                let (x1, _) = adaptive_random_search(objective, &x0, 0.12, es_evals, &mut rng);
                let polish_iters = cfg.outer_evals.saturating_sub(es_evals).max(50);
                let res = nelder_mead(objective, &x1, 0.04, polish_iters, cfg.f_tol);
                res.x
            } else {
                let b = cfg.outer_evals;
                let stages = [
                    (0.12, b * 2 / 5),
                    (0.04, b * 3 / 10),
                    (0.012, b - b * 2 / 5 - b * 3 / 10),
                ];
                let (x1, _) = staged_mixed_search(objective, &x0, &stages, &mut rng);
                x1
            }
        })
        .collect();

    let scored: Vec<f64> = candidates
        .par_iter()
        .map(|x| {
            let params = MeasurementParams::new(dims, x.clone()).expect("length preserved");
            match decode_measurement(&params) {
                Ok(m) => final_eval(&m),
                Err(_) => f64::NEG_INFINITY,
            }
        })
        .collect();

    let mut best_idx = 0;
    for (i, &v) in scored.iter().enumerate() {
        if v > scored[best_idx] {
            best_idx = i;
        }
    }
    let params = MeasurementParams::new(dims, candidates[best_idx].clone())?;
    Ok((params, scored[best_idx], restarts))
}

/// Core estimator without the bounds report; returns the best value, its
/// measurement, the inner minimization at that measurement, and the restart
/// count. Used by the full estimator, the robustness checker, and the
/// batch property suites.
pub(crate) fn estimate_value(
    rho: &DensityMatrix,
    cfg: &OptimizationConfig,
    extra_warm: &[MeasurementParams],
) -> Result<(f64, Measurement, InnerMinResult, usize)> {
    let d = require_square(rho)?;
    if d > cfg.max_dim {
        return Err(Error::DimensionBudget(d));
    }
    let mut warm = warm_start_params(rho)?;
    warm.extend_from_slice(extra_warm);
    let search_cfg = search_config(cfg);
    let search_eval = |m: &Measurement| -> f64 {
        match (
            min_klein_entropy_over_products(m, &search_cfg),
            klein_entropy(rho, m),
        ) {
            (Ok(inner), Ok(h)) => inner.value - h,
            _ => f64::NEG_INFINITY,
        }
    };
    let final_eval = |m: &Measurement| -> f64 {
        match (
            min_klein_entropy_over_products(m, cfg),
            klein_entropy(rho, m),
        ) {
            (Ok(inner), Ok(h)) => inner.value - h,
            _ => f64::NEG_INFINITY,
        }
    };
    let (params, value, restarts) = search_measurements(
        rho.dims(),
        &warm,
        cfg,
        search_eval,
        final_eval,
    )?;
    let best_measurement = decode_measurement(&params)?;
    let inner = min_klein_entropy_over_products(&best_measurement, cfg)?;
    Ok((value, best_measurement, inner, restarts))
}

/// Full estimator: nested sup/inf search plus bounds, analytic shortcut, and
/// consistency flags. The estimate equals `eparam_fixed_measurement` at the
/// returned measurement by construction (same seed, same budgets).
pub fn estimate_eparam(rho: &DensityMatrix, cfg: &OptimizationConfig) -> Result<EParamReport> {
    estimate_eparam_seeded(rho, cfg, &[])
}

/// [`estimate_eparam`] with caller-supplied extra warm-start bases appended
/// after the built-in ones.
pub fn estimate_eparam_seeded(
    rho: &DensityMatrix,
    cfg: &OptimizationConfig,
    extra_warm: &[MeasurementParams],
) -> Result<EParamReport> {
    let (estimate, best_measurement, inner_result, restarts_used) =
        estimate_value(rho, cfg, extra_warm)?;
    let bounds = bounds_report(rho, cfg)?;
    let analytic_value = analytic_eparam(rho)?;
    let upper_consistent = estimate <= bounds.min_upper() + 1e-6;
    Ok(EParamReport {
        estimate,
        best_measurement,
        inner_result,
        bounds,
        analytic_value,
        restarts_used,
        upper_consistent,
    })
}

/// Result of maximizing the product-minimum entropy alone (no state term).
#[derive(Debug, Clone)]
pub struct SupInfReport {
    pub value: f64,
    pub best_measurement: Measurement,
    pub restarts_used: usize,
}

/// sup over measurements of the product-minimum entropy on C^d ⊗ C^d.
/// Equals 1 for d = 2 (attained by the Bell basis); for d = 3 the accepted
/// numerical value is [`QUTRIT_SUP_INF`].
pub fn max_min_product_entropy(d: usize, cfg: &OptimizationConfig) -> Result<SupInfReport> {
    if d > cfg.max_dim {
        return Err(Error::DimensionBudget(d));
    }
    let dims = Dims::square(d);
    let warm = vec![
        encode_measurement(&bell_basis(d)?),
        MeasurementParams::identity(dims),
    ];
    let search_cfg = search_config(cfg);
    let search_eval = |m: &Measurement| -> f64 {
        min_klein_entropy_over_products(m, &search_cfg)
            .map(|r| r.value)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let final_eval = |m: &Measurement| -> f64 {
        min_klein_entropy_over_products(m, cfg)
            .map(|r| r.value)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (params, value, restarts_used) =
        search_measurements(dims, &warm, cfg, search_eval, final_eval)?;
    let best_measurement = decode_measurement(&params)?;
    Ok(SupInfReport {
        value,
        best_measurement,
        restarts_used,
    })
}

/// Estimator-level admixture continuity check.
#[derive(Debug, Clone)]
pub struct RobustnessReport {
    pub eparam_state: f64,
    pub eparam_mixture: f64,
    pub difference: f64,
    pub bound: f64,
    /// bound − difference; expected ≥ −tol where tol absorbs optimizer noise.
    pub slack: f64,
}

/// Compare estimates for ρ and (1−ε)ρ + εσ against the admixture bound
/// 4ε·log₂d + H(ε). Both searches share warm starts (each state's eigenbasis
/// seeds the other's search).
pub fn robustness_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    cfg: &OptimizationConfig,
) -> Result<RobustnessReport> {
    let d = require_square(rho)?;
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "admixture weight ε = {eps} outside [0, 1/2]"
        )));
    }
    let mixture = rho.mix(sigma, eps)?;
    let warm_rho = warm_start_params(rho)?;
    let warm_mix = warm_start_params(&mixture)?;
    let (m_rho, _, _, _) = estimate_value(rho, cfg, &warm_mix)?;
    let (m_mix, _, _, _) = estimate_value(&mixture, cfg, &warm_rho)?;
    let bound = 4.0 * eps * (d as f64).log2() + binary_entropy(eps);
    let difference = (m_rho - m_mix).abs();
    Ok(RobustnessReport {
        eparam_state: m_rho,
        eparam_mixture: m_mix,
        difference,
        bound,
        slack: bound - difference,
    })
}

/// Fixed-measurement continuity check.
#[derive(Debug, Clone)]
pub struct ContinuityReport {
    pub difference: f64,
    pub bound: f64,
    /// bound − difference; nonnegative with zero tolerance (the shared
    /// product-minimum term cancels, leaving |H(mix,𝒫) − H(ρ,𝒫)| ≤ bound,
    /// which is an exact inequality).
    pub slack: f64,
}

pub fn fixed_measurement_continuity_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    m: &Measurement,
) -> Result<ContinuityReport> {
    let d = require_square(rho)?;
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "admixture weight ε = {eps} outside [0, 1/2]"
        )));
    }
    let mixture = rho.mix(sigma, eps)?;
    let difference = (klein_entropy(&mixture, m)? - klein_entropy(rho, m)?).abs();
    let bound = 4.0 * eps * (d as f64).log2() + binary_entropy(eps);
    Ok(ContinuityReport {
        difference,
        bound,
        slack: bound - difference,
    })
}

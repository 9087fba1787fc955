//! Randomized verification batteries behind the `verify` CLI command, plus
//! the composite operations shared with it: the negative-result search, the
//! oracle cross-check, and the isotropic sweep. All instance seeds are pinned
//! so reruns are reproducible; optimizer seeds come from the config.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{
    bounds_report, estimate_value, fixed_measurement_continuity_check, robustness_check,
};
use crate::entropy::shannon_entropy;
use crate::error::Result;
use crate::families::{isotropic, isotropic_entropy, max_entangled, random_separable};
use crate::measurement::{
    eigenbasis_measurement, klein_entropy, schmidt_preserving_eigenbasis, Measurement,
};
use crate::optimize::OptimizationConfig;
use crate::product_opt::{brute_force_min_products, min_klein_entropy_over_products};
use crate::state::{
    haar_random_pure, haar_random_pure_with, haar_random_unitary, schmidt_decompose, CMatrix,
    DensityMatrix, Dims, PureState, C64,
};

/// One named pass/fail line of a verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl PropertyCheck {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        PropertyCheck {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// A random full-rank-ish mixed state: convex mixture of `terms` Haar pures.
pub fn random_mixed(dims: Dims, terms: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dims.total();
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut m = CMatrix::zeros(n, n);
    for &w in &weights {
        let psi = haar_random_pure_with(dims, &mut rng);
        m += psi.density().matrix() * C64::new(w, 0.0);
    }
    DensityMatrix::new(m, dims).expect("convex mixture of projectors")
}

fn random_basis(dims: Dims, seed: u64) -> Measurement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_random_unitary(dims.total(), &mut rng);
    Measurement::from_unitary_columns(&u, dims).expect("Haar columns")
}

/// The fixed evaluation corpus for bound-sandwich checks.
pub fn test_corpus() -> Vec<(String, DensityMatrix)> {
    let mut corpus: Vec<(String, DensityMatrix)> = Vec::new();
    corpus.push((
        "max_entangled_d2".into(),
        max_entangled(2).unwrap().density(),
    ));
    corpus.push((
        "ket_00".into(),
        PureState::basis_ket(Dims::square(2), 0, 0).density(),
    ));
    for (k, seed) in [201u64, 202].iter().enumerate() {
        corpus.push((
            format!("random_pure_{k}"),
            haar_random_pure(Dims::square(2), *seed).density(),
        ));
    }
    for p in [0.0, 1.0 / 3.0, 0.6, 1.0] {
        corpus.push((format!("isotropic_p{p:.3}"), isotropic(2, p).unwrap()));
    }
    corpus.push((
        "bell_diagonal_07_03".into(),
        crate::families::bell_diagonal(2, &[0.7, 0.3, 0.0, 0.0]).unwrap(),
    ));
    corpus.push((
        "random_separable".into(),
        random_separable(2, 4, 203).unwrap(),
    ));
    corpus.push(("random_mixed".into(), random_mixed(Dims::square(2), 3, 204)));
    corpus
}

/// Nonpositivity on separable states and vanishing on pure products.
pub fn suite_signs(cfg: &OptimizationConfig) -> Result<Vec<PropertyCheck>> {
    let mut checks = Vec::new();

    let mut worst_sep = f64::NEG_INFINITY;
    for i in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let terms = rng.gen_range(1..=4);
        let rho = random_separable(2, terms, 1000 + i)?;
        let (value, _, _, _) = estimate_value(&rho, cfg, &[])?;
        worst_sep = worst_sep.max(value);
    }
    checks.push(PropertyCheck::new(
        "separable_nonpositive",
        worst_sep <= 5e-2,
        format!("max estimate over 20 separable states: {worst_sep:+.4} (tol 5e-2)"),
    ));

    let mut worst_prod = 0.0_f64;
    let mut worst_floor = f64::INFINITY;
    for i in 0..20u64 {
        let psi = crate::families::random_product_pure(2, 2000 + i)?;
        let rho = psi.density();
        let (value, _, _, _) = estimate_value(&rho, cfg, &[])?;
        worst_prod = worst_prod.max(value.abs());
        // The eigenbasis alone already gives a nonnegative value.
        let eig = eigenbasis_measurement(&rho)?;
        let inner = min_klein_entropy_over_products(&eig, cfg)?;
        let floor = inner.value - klein_entropy(&rho, &eig)?;
        worst_floor = worst_floor.min(floor);
    }
    checks.push(PropertyCheck::new(
        "product_zero",
        worst_prod <= 5e-2,
        format!("max |estimate| over 20 product states: {worst_prod:.4} (tol 5e-2)"),
    ));
    checks.push(PropertyCheck::new(
        "product_eigenbasis_floor",
        worst_floor >= -1e-9,
        format!("min eigenbasis value over 20 product states: {worst_floor:+.2e} (≥ -1e-9)"),
    ));

    Ok(checks)
}

/// Bound sandwich on the whole corpus.
pub fn suite_bounds(cfg: &OptimizationConfig) -> Result<Vec<PropertyCheck>> {
    let mut checks = Vec::new();
    for (name, rho) in test_corpus() {
        let (estimate, _, _, _) = estimate_value(&rho, cfg, &[])?;
        let bounds = bounds_report(&rho, cfg)?;
        let lower_ok = bounds.max_lower() <= estimate + 5e-2;
        let upper_ok = estimate + 5e-2 <= bounds.min_upper() + 1e-1;
        checks.push(PropertyCheck::new(
            &format!("sandwich_{name}"),
            lower_ok && upper_ok,
            format!(
                "lower {:+.4} ≤ estimate {estimate:+.4} ≤ upper {:+.4}",
                bounds.max_lower(),
                bounds.min_upper()
            ),
        ));
    }
    Ok(checks)
}

/// Admixture continuity: the fixed-measurement inequality exactly, the
/// full-estimator form with optimizer slack.
pub fn suite_continuity(cfg: &OptimizationConfig) -> Result<Vec<PropertyCheck>> {
    let mut checks = Vec::new();

    let mut worst_fixed = f64::INFINITY;
    for i in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + i);
        let rho = random_mixed(Dims::square(2), rng.gen_range(1..=3), rng.gen());
        let sigma = random_mixed(Dims::square(2), rng.gen_range(1..=3), rng.gen());
        let eps = 0.5 * rng.gen::<f64>();
        let basis = random_basis(Dims::square(2), rng.gen());
        let r = fixed_measurement_continuity_check(&rho, &sigma, eps, &basis)?;
        worst_fixed = worst_fixed.min(r.slack);
    }
    checks.push(PropertyCheck::new(
        "fixed_measurement_continuity",
        worst_fixed >= 0.0,
        format!("min slack over 200 tuples: {worst_fixed:+.3e} (zero tolerance)"),
    ));

    let mut worst_full = f64::INFINITY;
    for i in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + i);
        let rho = random_mixed(Dims::square(2), rng.gen_range(1..=3), rng.gen());
        let sigma = random_mixed(Dims::square(2), rng.gen_range(1..=3), rng.gen());
        let eps = 0.5 * rng.gen::<f64>();
        let r = robustness_check(&rho, &sigma, eps, cfg)?;
        worst_full = worst_full.min(r.slack);
    }
    checks.push(PropertyCheck::new(
        "estimator_admixture_continuity",
        worst_full >= -5e-2,
        format!("min slack over 50 tuples: {worst_full:+.4} (tol -5e-2)"),
    ));

    Ok(checks)
}

/// Schmidt-preserving eigenbases for d ∈ {2, 4, 8}: Gram identity, containment
/// of the input, and the per-vector coefficient cap, over 100 random states each.
pub fn suite_bases(_cfg: &OptimizationConfig) -> Result<Vec<PropertyCheck>> {
    let mut checks = Vec::new();
    for d in [2usize, 4, 8] {
        let mut max_gram_dev = 0.0_f64;
        let mut min_containment = f64::INFINITY;
        let mut max_excess = f64::NEG_INFINITY;
        for i in 0..100u64 {
            let psi = haar_random_pure(Dims::square(d), 5000 + 100 * d as u64 + i);
            let c = schmidt_decompose(&psi)?.max_coefficient_sq();
            let basis = schmidt_preserving_eigenbasis(&psi)?;
            let n = d * d;
            for a in 0..n {
                for b in a..n {
                    let ip = basis.vectors()[a].dotc(&basis.vectors()[b]).norm();
                    let want = if a == b { 1.0 } else { 0.0 };
                    max_gram_dev = max_gram_dev.max((ip - want).abs());
                }
            }
            let contained = basis.vectors()[0].dotc(psi.amplitudes()).norm();
            min_containment = min_containment.min(contained);
            for v in basis.vectors() {
                let sd = schmidt_decompose(&PureState::new(v.clone(), Dims::square(d))?)?;
                max_excess = max_excess.max(sd.max_coefficient_sq() - c);
            }
        }
        checks.push(PropertyCheck::new(
            &format!("schmidt_basis_gram_d{d}"),
            max_gram_dev <= 1e-9,
            format!("max Gram deviation over 100 states: {max_gram_dev:.2e} (≤ 1e-9)"),
        ));
        checks.push(PropertyCheck::new(
            &format!("schmidt_basis_contains_input_d{d}"),
            min_containment >= 1.0 - 1e-9,
            format!("min |⟨element₀|ψ⟩|: {min_containment:.12}"),
        ));
        checks.push(PropertyCheck::new(
            &format!("schmidt_basis_coefficient_cap_d{d}"),
            max_excess <= 1e-9,
            format!("max (vector c − input c): {max_excess:+.2e} (≤ 1e-9)"),
        ));
    }
    Ok(checks)
}

/// Optimizer-vs-grid agreement for the inner minimization on 2-qubit bases.
pub fn suite_oracle(cfg: &OptimizationConfig) -> Result<Vec<PropertyCheck>> {
    let report = oracle_compare(Dims::square(2), 50, cfg)?;
    let mut checks = Vec::new();
    checks.push(PropertyCheck::new(
        "oracle_agreement",
        report.max_abs_diff < 1e-2,
        format!(
            "max |optimizer − grid| over {} bases: {:.4e} (< 1e-2)",
            report.rows.len(),
            report.max_abs_diff
        ),
    ));
    checks.push(PropertyCheck::new(
        "optimizer_below_grid",
        report.max_excess <= 1e-9,
        format!(
            "max (optimizer − grid): {:+.3e} (≤ 1e-9; the optimizer searches a continuum)",
            report.max_excess
        ),
    ));

    let bell = crate::measurement::bell_basis(2)?;
    let opt = min_klein_entropy_over_products(&bell, cfg)?.value;
    let grid = brute_force_min_products(&bell, cfg.grid_resolution)?;
    checks.push(PropertyCheck::new(
        "oracle_bell_value",
        (opt - 1.0).abs() < 5e-3 && (grid - 1.0).abs() < 5e-3,
        format!("Bell basis: optimizer {opt:.5}, grid {grid:.5} (both ≈ 1)"),
    ));
    Ok(checks)
}

/// Per-measurement optimizer/grid comparison rows.
#[derive(Debug, Clone, Serialize)]
pub struct OracleCompareReport {
    pub rows: Vec<OracleRow>,
    pub max_abs_diff: f64,
    /// Largest optimizer − grid value; positive means the optimizer missed
    /// a basin the grid found.
    pub max_excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub seed: u64,
    pub optimizer: f64,
    pub grid: f64,
}

pub fn oracle_compare(
    dims: Dims,
    n_measurements: usize,
    cfg: &OptimizationConfig,
) -> Result<OracleCompareReport> {
    let mut rows = Vec::with_capacity(n_measurements);
    let mut max_abs_diff = 0.0_f64;
    let mut max_excess = f64::NEG_INFINITY;
    for i in 0..n_measurements as u64 {
        let seed = 6000 + i;
        let m = random_basis(dims, seed);
        let optimizer = min_klein_entropy_over_products(&m, cfg)?.value;
        let grid = brute_force_min_products(&m, cfg.grid_resolution)?;
        max_abs_diff = max_abs_diff.max((optimizer - grid).abs());
        max_excess = max_excess.max(optimizer - grid);
        rows.push(OracleRow {
            seed,
            optimizer,
            grid,
        });
    }
    Ok(OracleCompareReport {
        rows,
        max_abs_diff,
        max_excess,
    })
}

/// Haar-sampled pure 2-qubit states whose estimate exceeds the reduced
/// entropy by more than `threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct NegativeSearchReport {
    pub samples: usize,
    pub witnesses: Vec<NegativeWitness>,
    pub witness_fraction: f64,
    /// Samples violating estimate ≥ S_A − 5e-2 (expected none).
    pub floor_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NegativeWitness {
    pub seed: u64,
    pub estimate: f64,
    pub reduced_entropy: f64,
}

pub fn negative_search(
    n_samples: usize,
    threshold: f64,
    cfg: &OptimizationConfig,
) -> Result<NegativeSearchReport> {
    let mut witnesses = Vec::new();
    let mut floor_violations = 0;
    for i in 0..n_samples as u64 {
        let seed = 7000 + i;
        let psi = haar_random_pure(Dims::square(2), seed);
        let rho = psi.density();
        let sd = schmidt_decompose(&psi)?;
        let probs: Vec<f64> = sd.coefficients().iter().map(|c| c * c).collect();
        let s_a = shannon_entropy(&probs)?;
        let (estimate, _, _, _) = estimate_value(&rho, cfg, &[])?;
        if estimate - s_a > threshold {
            witnesses.push(NegativeWitness {
                seed,
                estimate,
                reduced_entropy: s_a,
            });
        }
        if estimate < s_a - 5e-2 {
            floor_violations += 1;
        }
    }
    let witness_fraction = witnesses.len() as f64 / n_samples as f64;
    Ok(NegativeSearchReport {
        samples: n_samples,
        witnesses,
        witness_fraction,
        floor_violations,
    })
}

/// One row of the isotropic sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub entropy: f64,
    /// 1 − S, exact for d = 2.
    pub analytic: Option<f64>,
    pub estimate: f64,
    pub separable: bool,
}

/// Sweep the isotropic family over a p-grid. The separability flag uses the
/// family's standard threshold p ≤ 1/(d+1).
pub fn sweep_isotropic(
    d: usize,
    p_grid: &[f64],
    cfg: &OptimizationConfig,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let rho = isotropic(d, p)?;
        let entropy = isotropic_entropy(d, p)?;
        let (estimate, _, _, _) = estimate_value(&rho, cfg, &[])?;
        rows.push(SweepRow {
            p,
            entropy,
            analytic: (d == 2).then_some(1.0 - entropy),
            estimate,
            separable: p <= 1.0 / (d as f64 + 1.0),
        });
    }
    Ok(rows)
}

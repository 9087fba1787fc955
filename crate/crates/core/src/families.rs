//! Generators for the state families used throughout: isotropic and
//! Bell-diagonal mixtures, maximally entangled states, and seeded random
//! pure/product/separable states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::bell_basis;
use crate::state::{
    haar_random_local, kron_vec, CMatrix, CVector, DensityMatrix, Dims, PureState, C64,
};

/// Declarative description of a generated state, parseable from CLI arguments
/// and from the `family` stanza of a state file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Isotropic { d: usize, p: f64 },
    BellDiagonal { d: usize, weights: Vec<f64> },
    MaxEntangled { d: usize },
    RandomPure { d: usize, seed: u64 },
    RandomSeparable { d: usize, terms: usize, seed: u64 },
    RandomProduct { d: usize, seed: u64 },
}

impl FamilySpec {
    pub fn realize(&self) -> Result<DensityMatrix> {
        match self {
            FamilySpec::Isotropic { d, p } => isotropic(*d, *p),
            FamilySpec::BellDiagonal { d, weights } => bell_diagonal(*d, weights),
            FamilySpec::MaxEntangled { d } => Ok(max_entangled(*d)?.density()),
            FamilySpec::RandomPure { d, seed } => {
                Ok(crate::state::haar_random_pure(Dims::square(*d), *seed).density())
            }
            FamilySpec::RandomSeparable { d, terms, seed } => random_separable(*d, *terms, *seed),
            FamilySpec::RandomProduct { d, seed } => Ok(random_product_pure(*d, *seed)?.density()),
        }
    }

    pub fn local_dim(&self) -> usize {
        match self {
            FamilySpec::Isotropic { d, .. }
            | FamilySpec::BellDiagonal { d, .. }
            | FamilySpec::MaxEntangled { d }
            | FamilySpec::RandomPure { d, .. }
            | FamilySpec::RandomSeparable { d, .. }
            | FamilySpec::RandomProduct { d, .. } => *d,
        }
    }
}

/// The maximally entangled state (1/√d) Σᵢ |ii⟩.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let dims = Dims::square(d);
    let mut amp = CVector::zeros(d * d);
    let inv = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        amp[i * d + i] = C64::new(inv, 0.0);
    }
    PureState::new(amp, dims)
}

/// Isotropic state p·P₊ + (1−p)/d² · I. Eigenvalues are p + (1−p)/d² (once)
/// and (1−p)/d² with multiplicity d²−1; the family is Bell-diagonal.
pub fn isotropic(d: usize, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "isotropic mixing parameter p = {p} outside [0, 1]"
        )));
    }
    let psi = max_entangled(d)?;
    let n = d * d;
    let mut m = psi.density().matrix() * C64::new(p, 0.0);
    let background = (1.0 - p) / n as f64;
    for k in 0..n {
        m[(k, k)] += C64::new(background, 0.0);
    }
    DensityMatrix::new(m, Dims::square(d))
}

/// Mixture Σᵢ wᵢ |Bᵢ⟩⟨Bᵢ| over the generalized Bell basis.
pub fn bell_diagonal(d: usize, weights: &[f64]) -> Result<DensityMatrix> {
    let n = d * d;
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || weights.iter().any(|&w| w < -1e-12) {
        return Err(Error::InvalidDistribution(sum));
    }
    let basis = bell_basis(d)?;
    let mut m = CMatrix::zeros(n, n);
    for (w, v) in weights.iter().zip(basis.vectors()) {
        if *w <= 0.0 {
            continue;
        }
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] += C64::new(*w, 0.0) * v[r] * v[c].conj();
            }
        }
    }
    DensityMatrix::new(m, Dims::square(d))
}

/// Convex mixture of `terms` Haar-random product pure states with
/// Dirichlet(1,…,1) weights. Separable by construction; seeded.
pub fn random_separable(d: usize, terms: usize, seed: u64) -> Result<DensityMatrix> {
    if terms < 1 {
        return Err(Error::InvalidArgument("terms must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..terms)
        .map(|_| -rand::Rng::gen::<f64>(&mut rng).max(1e-300).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    for &w in &weights {
        let a = haar_random_local(d, &mut rng);
        let b = haar_random_local(d, &mut rng);
        let joint = kron_vec(&a, &b);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] += C64::new(w, 0.0) * joint[r] * joint[c].conj();
            }
        }
    }
    DensityMatrix::new(m, Dims::square(d))
}

/// A Haar-random product pure state |a⟩⊗|b⟩.
pub fn random_product_pure(d: usize, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = haar_random_local(d, &mut rng);
    let b = haar_random_local(d, &mut rng);
    PureState::new(kron_vec(&a, &b), Dims::square(d))
}

/// Closed-form von Neumann entropy of the isotropic state: spectrum
/// p + (1−p)/d² (once) and (1−p)/d² with multiplicity d²−1.
pub fn isotropic_entropy(d: usize, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "isotropic mixing parameter p = {p} outside [0, 1]"
        )));
    }
    let n = (d * d) as f64;
    let background = (1.0 - p) / n;
    let mut spectrum = vec![background; d * d];
    spectrum[0] = p + background;
    crate::entropy::shannon_entropy(&spectrum)
}

/// The p at which the isotropic family's entropy crosses `target`, located by
/// bisection to an absolute tolerance of 1e-4 in p. The entropy is strictly
/// decreasing in p, from 2·log₂d at p = 0 to 0 at p = 1.
pub fn isotropic_crossing_p(d: usize, target: f64) -> Result<f64> {
    let f = |p: f64| isotropic_entropy(d, p).map(|s| s - target);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::InvalidArgument(format!(
            "entropy target {target} outside [0, {}]",
            2.0 * (d as f64).log2()
        )));
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

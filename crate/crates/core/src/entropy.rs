//! Entropic functionals, all in bits (base-2 logarithms).

use crate::error::{Error, Result};
use crate::state::{hermitian_eigenvalues, partial_trace, DensityMatrix, Subsystem};

/// Probabilities below this are treated as exactly zero before taking logs.
pub(crate) const PROB_CLAMP: f64 = 1e-15;
/// A distribution whose sum deviates from 1 by more than this is rejected.
const SUM_TOL: f64 = 1e-6;

/// Shannon entropy −Σ pᵢ log₂ pᵢ of a probability vector.
///
/// Tiny negatives (≥ −1e-12) are clamped to zero and the vector is
/// renormalized; sums off by more than 1e-6 are rejected.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &x in p {
        if x < -1e-12 {
            return Err(Error::InvalidDistribution(x));
        }
        sum += x.max(0.0);
    }
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidDistribution(sum));
    }
    let mut h = 0.0;
    for &x in p {
        let q = if x < PROB_CLAMP { 0.0 } else { x / sum };
        if q > 0.0 {
            h -= q * q.log2();
        }
    }
    Ok(h.max(0.0))
}

/// Entropy of an already-normalized distribution; no validation. Hot path.
#[inline]
pub(crate) fn entropy_unchecked(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &q in p {
        if q > PROB_CLAMP {
            h -= q * q.log2();
        }
    }
    h.max(0.0)
}

/// Binary entropy H(ε) = −ε log₂ ε − (1−ε) log₂(1−ε).
pub fn binary_entropy(eps: f64) -> f64 {
    entropy_unchecked(&[eps, 1.0 - eps])
}

/// Shannon entropy of the spectrum. Eigenvalues in [−1e-10, 0) are clamped to
/// zero and the spectrum renormalized before taking logs.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    spectrum_entropy(rho.eigenvalues())
}

pub(crate) fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let clamped: Vec<f64> = eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let sum: f64 = clamped.iter().sum();
    if sum <= 0.0 {
        return Err(Error::InvalidDistribution(sum));
    }
    let mut h = 0.0;
    for &l in &clamped {
        let q = l / sum;
        if q > PROB_CLAMP {
            h -= q * q.log2();
        }
    }
    Ok(h.max(0.0))
}

/// Coherent information S(ρ_B) − S(ρ) with ρ_B = Tr_A ρ. May be negative.
pub fn coherent_information(rho: &DensityMatrix) -> Result<f64> {
    let reduced = partial_trace(rho, Subsystem::B)?;
    Ok(von_neumann_entropy(&reduced)? - von_neumann_entropy(rho)?)
}

/// Trace-norm distance: sum of singular values of ρ₁ − ρ₂
/// (absolute eigenvalues, since the difference is Hermitian).
pub fn trace_norm_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dims() != rho2.dims() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dims().total(),
            got: rho2.dims().total(),
        });
    }
    let diff = rho1.matrix() - rho2.matrix();
    let eigs = hermitian_eigenvalues(&diff)?;
    Ok(eigs.iter().map(|l| l.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{isotropic, max_entangled};
    use crate::state::{haar_random_pure, CMatrix, Dims, PureState, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LOG2_3: f64 = 1.584_962_500_721_156;

    #[test]
    fn entropy_of_point_mass_is_zero() {
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn entropy_of_uniform_four_is_two() {
        let p = [0.25; 4];
        assert!((shannon_entropy(&p).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_isotropic_edge_spectrum() {
        // H(1/2, 1/6, 1/6, 1/6) = 1 + (1/2)·log₂3 by direct evaluation.
        let p = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        let expect = 1.0 + 0.5 * LOG2_3;
        assert!((shannon_entropy(&p).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 1.7924812503605781).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_bad_sums() {
        assert!(shannon_entropy(&[0.7, 0.7]).is_err());
        assert!(shannon_entropy(&[0.5, -0.1, 0.6]).is_err());
    }

    #[test]
    fn entropy_is_permutation_invariant() {
        let p = [0.4, 0.3, 0.2, 0.1];
        let q = [0.1, 0.2, 0.4, 0.3];
        assert!((shannon_entropy(&p).unwrap() - shannon_entropy(&q).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn entropy_is_concave_on_random_mixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let p = random_simplex(&mut rng, n);
            let q = random_simplex(&mut rng, n);
            let lam: f64 = rng.gen();
            let mix: Vec<f64> = p
                .iter()
                .zip(&q)
                .map(|(a, b)| lam * a + (1.0 - lam) * b)
                .collect();
            let lhs = shannon_entropy(&mix).unwrap();
            let rhs = lam * shannon_entropy(&p).unwrap() + (1.0 - lam) * shannon_entropy(&q).unwrap();
            assert!(lhs >= rhs - 1e-10, "concavity violated: {lhs} < {rhs}");
        }
    }

    #[test]
    fn equalization_increases_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let mut p = random_simplex(&mut rng, n);
            p.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let (lo, hi) = (0, n - 1);
            if p[hi] - p[lo] < 1e-6 {
                continue;
            }
            let delta: f64 = rng.gen::<f64>() * (p[hi] - p[lo]) / 2.0;
            if delta <= 0.0 {
                continue;
            }
            let before = shannon_entropy(&p).unwrap();
            p[lo] += delta;
            p[hi] -= delta;
            let after = shannon_entropy(&p).unwrap();
            assert!(after > before - 1e-12, "{after} !> {before}");
        }
    }

    fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    }

    #[test]
    fn von_neumann_of_pure_state_is_zero() {
        let psi = haar_random_pure(Dims::new(2, 2), 1);
        assert!(von_neumann_entropy(&psi.density()).unwrap() < 1e-10);
    }

    #[test]
    fn von_neumann_of_maximally_mixed_is_two_log_d() {
        for d in [2usize, 3] {
            let n = d * d;
            let m = CMatrix::identity(n, n) * C64::new(1.0 / n as f64, 0.0);
            let rho = DensityMatrix::new(m, Dims::square(d)).unwrap();
            let want = 2.0 * (d as f64).log2();
            assert!((von_neumann_entropy(&rho).unwrap() - want).abs() < 1e-10);
        }
    }

    #[test]
    fn von_neumann_matches_spectrum_entropy_of_isotropic_edge() {
        // Spectrum {1/2, 1/6, 1/6, 1/6} by construction of the isotropic family.
        let rho = isotropic(2, 1.0 / 3.0).unwrap();
        let want = 1.0 + 0.5 * LOG2_3;
        assert!((von_neumann_entropy(&rho).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn coherent_information_of_max_entangled_is_log_d() {
        for d in [2usize, 3] {
            let psi = max_entangled(d).unwrap();
            let got = coherent_information(&psi.density()).unwrap();
            assert!((got - (d as f64).log2()).abs() < 1e-9);
        }
    }

    #[test]
    fn coherent_information_of_maximally_mixed_is_minus_log_d() {
        let d = 2usize;
        let n = d * d;
        let m = CMatrix::identity(n, n) * C64::new(1.0 / n as f64, 0.0);
        let rho = DensityMatrix::new(m, Dims::square(d)).unwrap();
        assert!((coherent_information(&rho).unwrap() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_information_of_isotropic_edge() {
        let rho = isotropic(2, 1.0 / 3.0).unwrap();
        let want = 1.0 - (1.0 + 0.5 * LOG2_3);
        assert!((coherent_information(&rho).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn trace_distance_axioms() {
        let a = haar_random_pure(Dims::new(2, 2), 21).density();
        let b = haar_random_pure(Dims::new(2, 2), 22).density();
        assert!(trace_norm_distance(&a, &a).unwrap() < 1e-12);
        let ab = trace_norm_distance(&a, &b).unwrap();
        let ba = trace_norm_distance(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
        let c = haar_random_pure(Dims::new(2, 2), 23).density();
        let ac = trace_norm_distance(&a, &c).unwrap();
        let cb = trace_norm_distance(&c, &b).unwrap();
        assert!(ab <= ac + cb + 1e-12);
    }

    #[test]
    fn trace_distance_of_orthogonal_pures_is_two() {
        let psi0 = PureState::basis_ket(Dims::new(2, 2), 0, 0).density();
        let psi1 = PureState::basis_ket(Dims::new(2, 2), 1, 1).density();
        assert!((trace_norm_distance(&psi0, &psi1).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_of_admixture_bounded_by_two_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let rho = haar_random_pure(Dims::new(2, 2), rng.gen()).density();
            let sigma = haar_random_pure(Dims::new(2, 2), rng.gen()).density();
            let eps: f64 = rng.gen::<f64>() * 0.5;
            let mix = rho.mix(&sigma, eps).unwrap();
            let dist = trace_norm_distance(&rho, &mix).unwrap();
            assert!(dist <= 2.0 * eps + 1e-10, "{dist} > 2·{eps}");
        }
    }
}

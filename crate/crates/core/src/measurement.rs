//! Von Neumann measurements as complete rank-1 orthonormal bases, Klein
//! entropy, and the special basis constructions: generalized Bell bases and
//! Schmidt-coefficient-preserving eigenbases for local dimensions 2, 4, 8.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;

use crate::entropy::{entropy_unchecked, shannon_entropy};
use crate::error::{Error, Result};
use crate::state::{kron_vec, CMatrix, CVector, DensityMatrix, Dims, PureState, C64};

/// Pairwise-orthogonality tolerance for basis vectors.
pub const ORTHO_TOL: f64 = 1e-10;
/// Unit-norm tolerance for basis vectors.
const UNIT_TOL: f64 = 1e-12;

/// A complete rank-1 projective measurement: dA·dB orthonormal vectors on the
/// joint space. Projectors are P_i = |φ_i⟩⟨φ_i|.
#[derive(Debug, Clone)]
pub struct Measurement {
    vectors: Vec<CVector>,
    dims: Dims,
}

impl Measurement {
    pub fn new(vectors: Vec<CVector>, dims: Dims) -> Result<Self> {
        let n = dims.total();
        if vectors.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: vectors.len(),
            });
        }
        for v in &vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotNormalized(norm));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let ip = vectors[i].dotc(&vectors[j]).norm();
                if ip > ORTHO_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "basis vectors {i} and {j} are not orthogonal (|⟨·,·⟩| = {ip:.3e})"
                    )));
                }
            }
        }
        Ok(Measurement { vectors, dims })
    }

    /// Columns of a unitary as basis vectors.
    pub fn from_unitary_columns(u: &CMatrix, dims: Dims) -> Result<Self> {
        let n = dims.total();
        let vectors: Vec<CVector> = (0..n).map(|c| u.column(c).into_owned()).collect();
        Measurement::new(vectors, dims)
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Outcome distribution p_i = Tr ρP_i = ⟨φ_i|ρ|φ_i⟩.
    pub fn outcome_distribution(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.total(),
                got: rho.dims().total(),
            });
        }
        let m = rho.matrix();
        Ok(self
            .vectors
            .iter()
            .map(|v| {
                let mv = m * v;
                v.dotc(&mv).re.max(0.0)
            })
            .collect())
    }

    /// Outcome distribution for a pure state: p_i = |⟨φ_i|ψ⟩|².
    pub fn outcome_distribution_pure(&self, psi: &PureState) -> Result<Vec<f64>> {
        if psi.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.total(),
                got: psi.dims().total(),
            });
        }
        Ok(self
            .vectors
            .iter()
            .map(|v| v.dotc(psi.amplitudes()).norm_sqr())
            .collect())
    }
}

/// Klein entropy H(ρ, 𝒫): Shannon entropy of the outcome distribution.
pub fn klein_entropy(rho: &DensityMatrix, m: &Measurement) -> Result<f64> {
    let p = m.outcome_distribution(rho)?;
    shannon_entropy(&p)
}

/// Klein entropy of a pure state.
pub fn klein_entropy_pure(psi: &PureState, m: &Measurement) -> Result<f64> {
    let p = m.outcome_distribution_pure(psi)?;
    Ok(entropy_unchecked(&p))
}

/// Generalized Bell basis on C^d ⊗ C^d: the d² maximally entangled vectors
/// (X^a Z^b ⊗ I)|ψ₊⟩ with X the cyclic shift and Z = diag(ω^k), ω = e^{2πi/d}.
/// Element 0 is |ψ₊⟩ itself; every element has all Schmidt coefficients 1/√d.
pub fn bell_basis(d: usize) -> Result<Measurement> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let dims = Dims::square(d);
    let norm = 1.0 / (d as f64).sqrt();
    let mut vectors = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut v = CVector::zeros(d * d);
            for k in 0..d {
                let phase = 2.0 * PI * (b * k) as f64 / d as f64;
                v[((k + a) % d) * d + k] = C64::from_polar(norm, phase);
            }
            vectors.push(v);
        }
    }
    Measurement::new(vectors, dims)
}

/// Measurement in an eigenbasis of ρ. For degenerate spectra the eigensolver's
/// basis is taken as-is; any eigenbasis attains the von Neumann entropy.
pub fn eigenbasis_measurement(rho: &DensityMatrix) -> Result<Measurement> {
    let eig = SymmetricEigen::try_new(rho.matrix().clone(), 1.0e-13, 0)
        .ok_or_else(|| Error::Numeric("Hermitian eigendecomposition failed".into()))?;
    let n = rho.dims().total();
    let vectors: Vec<CVector> = (0..n)
        .map(|c| {
            let col = eig.eigenvectors.column(c).into_owned();
            let norm = col.norm();
            col / C64::new(norm, 0.0)
        })
        .collect();
    Measurement::new(vectors, rho.dims())
}

// Sign patterns for the coefficient-preserving eigenbases. Row r places
// sign[r][s]·a[r⊕s] on the product cell (e_s, f_{s⊕g}); the XOR index pattern
// makes every vector's amplitude matrix one-nonzero-per-row-and-column, so its
// Schmidt coefficient multiset is exactly {|a_1|, …, |a_d|}. Rows are pairwise
// orthogonal identically in the a_i.
const SIGNS_2: [[f64; 2]; 2] = [[1.0, 1.0], [-1.0, 1.0]];

const SIGNS_4: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0, -1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
];

const SIGNS_8: [[f64; 8]; 8] = [
    [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0],
    [-1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0],
    [-1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0],
    [-1.0, 1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0],
    [-1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0],
];

fn sign_row(d: usize, r: usize) -> &'static [f64] {
    match d {
        2 => &SIGNS_2[r],
        4 => &SIGNS_4[r],
        8 => &SIGNS_8[r],
        _ => unreachable!(),
    }
}

/// Orthonormal eigenbasis of a pure state on C^d ⊗ C^d (d ∈ {2, 4, 8}) in
/// which every basis vector has the same Schmidt coefficient multiset (up to
/// signs) as the input. In particular each vector's largest squared Schmidt
/// coefficient equals that of ψ.
///
/// The basis splits into d groups with pairwise disjoint support in the
/// Schmidt product basis {e_s ⊗ f_t}: group g occupies the cells (s, s⊕g), and
/// within a group the coefficients follow a fixed orthogonal sign design. The
/// input state is element 0.
pub fn schmidt_preserving_eigenbasis(psi: &PureState) -> Result<Measurement> {
    let dims = psi.dims();
    if !dims.is_square() {
        return Err(Error::DimensionMismatch {
            expected: dims.a,
            got: dims.b,
        });
    }
    let d = dims.a;
    if !matches!(d, 2 | 4 | 8) {
        return Err(Error::UnsupportedDimension(d));
    }
    let sd = crate::state::schmidt_decompose(psi)?;
    let a = sd.coefficients();
    let left = sd.left_basis();
    let right = sd.right_basis();

    let mut vectors = Vec::with_capacity(d * d);
    for g in 0..d {
        // Product kets e_s ⊗ f_{s⊕g} spanning this group's subspace.
        let cells: Vec<CVector> = (0..d).map(|s| kron_vec(&left[s], &right[s ^ g])).collect();
        for r in 0..d {
            let signs = sign_row(d, r);
            let mut v = CVector::zeros(d * d);
            for s in 0..d {
                let coeff = C64::new(signs[s] * a[r ^ s], 0.0);
                v += &cells[s] * coeff;
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::Numeric(format!(
                    "eigenbasis vector ({g},{r}) has norm {norm}"
                )));
            }
            v /= C64::new(norm, 0.0);
            vectors.push(v);
        }
    }
    // Measurement::new re-checks the Gram matrix; the construction is only
    // accepted if that passes.
    Measurement::new(vectors, dims)
}

/// Angle coordinates for a measurement basis: the unitary whose columns form
/// the basis is a fixed-order product of two-level rotations with phases.
/// For joint dimension n this takes n(n−1) angles (θ, φ per rotation), which
/// covers all orthonormal bases up to per-vector phases.
#[derive(Debug, Clone)]
pub struct MeasurementParams {
    dims: Dims,
    angles: Vec<f64>,
}

impl MeasurementParams {
    pub fn new(dims: Dims, angles: Vec<f64>) -> Result<Self> {
        let expected = Self::angle_count(dims);
        if angles.len() != expected {
            return Err(Error::BadParameterCount {
                expected,
                got: angles.len(),
            });
        }
        Ok(MeasurementParams { dims, angles })
    }

    /// n(n−1) for joint dimension n = dA·dB.
    pub fn angle_count(dims: Dims) -> usize {
        let n = dims.total();
        n * (n - 1)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Zero angles decode to the computational basis.
    pub fn identity(dims: Dims) -> Self {
        MeasurementParams {
            dims,
            angles: vec![0.0; Self::angle_count(dims)],
        }
    }
}

/// The fixed (column, row) elimination order shared by decode and encode.
fn rotation_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |c| ((c + 1)..n).map(move |r| (c, r)))
}

/// Build the unitary U = G₁G₂⋯G_m from the angle list and return its columns
/// as a measurement. Orthonormality holds by construction.
pub fn decode_measurement(params: &MeasurementParams) -> Result<Measurement> {
    let n = params.dims.total();
    let mut u = CMatrix::identity(n, n);
    let mut k = 0;
    for (c, r) in rotation_pairs(n) {
        let theta = params.angles[k];
        let phi = params.angles[k + 1];
        k += 2;
        if theta == 0.0 {
            continue;
        }
        let (sin_t, cos_t) = theta.sin_cos();
        let e_pos = C64::from_polar(sin_t, phi);
        let e_neg = C64::from_polar(sin_t, -phi);
        // Right-multiplication by G(c,r,θ,φ) touches columns c and r only.
        for row in 0..n {
            let uc = u[(row, c)];
            let ur = u[(row, r)];
            u[(row, c)] = uc * cos_t + ur * e_pos;
            u[(row, r)] = uc * (-e_neg) + ur * cos_t;
        }
    }
    Measurement::from_unitary_columns(&u, params.dims)
}

/// Invert [`decode_measurement`] up to per-vector phases: Givens elimination
/// of the basis unitary in the decode order. For any measurement M,
/// decode(encode(M)) equals M with each vector rescaled by a unit phase.
pub fn encode_measurement(m: &Measurement) -> MeasurementParams {
    let n = m.dims().total();
    let mut v = CMatrix::zeros(n, n);
    for (c, vec) in m.vectors().iter().enumerate() {
        v.set_column(c, vec);
    }
    let mut angles = Vec::with_capacity(MeasurementParams::angle_count(m.dims()));
    for (c, r) in rotation_pairs(n) {
        let pivot = v[(c, c)];
        let target = v[(r, c)];
        let (theta, phi) = if target.norm() < 1e-300 {
            (0.0, 0.0)
        } else {
            let theta = target.norm().atan2(pivot.norm());
            let phi = target.arg() - if pivot.norm() < 1e-300 { 0.0 } else { pivot.arg() };
            (theta, phi)
        };
        if theta != 0.0 {
            let (sin_t, cos_t) = theta.sin_cos();
            let e_pos = C64::from_polar(sin_t, phi);
            let e_neg = C64::from_polar(sin_t, -phi);
            // Left-multiplication by G† touches rows c and r only; zeroes V[r,c].
            for col in 0..n {
                let vc = v[(c, col)];
                let vr = v[(r, col)];
                v[(c, col)] = vc * cos_t + vr * e_neg;
                v[(r, col)] = vc * (-e_pos) + vr * cos_t;
            }
        }
        angles.push(theta);
        angles.push(phi);
    }
    MeasurementParams {
        dims: m.dims(),
        angles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::max_entangled;
    use crate::state::{haar_random_pure, haar_random_unitary, schmidt_decompose, Subsystem};
    use crate::von_neumann_entropy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_measurement(dims: Dims, seed: u64) -> Measurement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = haar_random_unitary(dims.total(), &mut rng);
        Measurement::from_unitary_columns(&u, dims).unwrap()
    }

    fn random_mixed(dims: Dims, terms: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = dims.total();
        let mut m = CMatrix::zeros(n, n);
        let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
        for &w in &weights {
            let psi = crate::state::haar_random_pure_with(dims, &mut rng);
            m += psi.density().matrix() * C64::new(w, 0.0);
        }
        DensityMatrix::new(m, dims).unwrap()
    }

    #[test]
    fn completeness_of_constructed_bases() {
        for m in [
            bell_basis(2).unwrap(),
            bell_basis(3).unwrap(),
            random_measurement(Dims::new(2, 2), 4),
        ] {
            let n = m.dims().total();
            let mut sum = CMatrix::zeros(n, n);
            for v in m.vectors() {
                for r in 0..n {
                    for c in 0..n {
                        sum[(r, c)] += v[r] * v[c].conj();
                    }
                }
            }
            for r in 0..n {
                for c in 0..n {
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((sum[(r, c)] - C64::new(want, 0.0)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn klein_entropy_of_pure_state_in_its_eigenbasis_is_zero() {
        let psi = max_entangled(2).unwrap();
        let rho = psi.density();
        let bell = bell_basis(2).unwrap();
        assert!(klein_entropy(&rho, &bell).unwrap() < 1e-10);
    }

    #[test]
    fn klein_entropy_of_maximally_mixed_is_max() {
        let m = CMatrix::identity(4, 4) * C64::new(0.25, 0.0);
        let rho = DensityMatrix::new(m, Dims::new(2, 2)).unwrap();
        let basis = random_measurement(Dims::new(2, 2), 8);
        assert!((klein_entropy(&rho, &basis).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn klein_entropy_of_product_ket_in_bell_basis_is_one() {
        let psi = crate::state::PureState::basis_ket(Dims::new(2, 2), 0, 0);
        let bell = bell_basis(2).unwrap();
        let p = bell.outcome_distribution_pure(&psi).unwrap();
        let mut sorted = p.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((sorted[0] - 0.5).abs() < 1e-12);
        assert!((sorted[1] - 0.5).abs() < 1e-12);
        assert!(sorted[2] < 1e-12);
        assert!((klein_entropy(&psi.density(), &bell).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn klein_entropy_dominates_von_neumann() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..25 {
            let rho = random_mixed(Dims::new(2, 2), 3, rng.gen());
            let basis = random_measurement(Dims::new(2, 2), rng.gen());
            let h = klein_entropy(&rho, &basis).unwrap();
            let s = von_neumann_entropy(&rho).unwrap();
            assert!(h >= s - 1e-9, "H = {h} < S = {s}");
        }
    }

    #[test]
    fn klein_entropy_is_concave_in_the_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..25 {
            let r1 = random_mixed(Dims::new(2, 2), 2, rng.gen());
            let r2 = random_mixed(Dims::new(2, 2), 3, rng.gen());
            let basis = random_measurement(Dims::new(2, 2), rng.gen());
            let lam: f64 = rng.gen();
            let mix = r1.mix(&r2, 1.0 - lam).unwrap();
            let lhs = klein_entropy(&mix, &basis).unwrap();
            let rhs = lam * klein_entropy(&r1, &basis).unwrap()
                + (1.0 - lam) * klein_entropy(&r2, &basis).unwrap();
            assert!(lhs >= rhs - 1e-9);
        }
    }

    #[test]
    fn ensemble_mixing_bounds_hold() {
        // Σ p_k H(ρ_k,P) ≤ H(Σ p_k ρ_k, P) ≤ Σ p_k H(ρ_k,P) + H({p_k})
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let k = rng.gen_range(2..5);
            let mut weights: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let s: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= s);
            let states: Vec<DensityMatrix> = (0..k)
                .map(|_| random_mixed(Dims::new(2, 2), 2, rng.gen()))
                .collect();
            let basis = random_measurement(Dims::new(2, 2), rng.gen());
            let mut acc = CMatrix::zeros(4, 4);
            let mut avg_h = 0.0;
            for (w, st) in weights.iter().zip(&states) {
                acc += st.matrix() * C64::new(*w, 0.0);
                avg_h += w * klein_entropy(st, &basis).unwrap();
            }
            let mixed = DensityMatrix::new(acc, Dims::new(2, 2)).unwrap();
            let h_mix = klein_entropy(&mixed, &basis).unwrap();
            let h_weights = shannon_entropy(&weights).unwrap();
            assert!(h_mix >= avg_h - 1e-9);
            assert!(h_mix <= avg_h + h_weights + 1e-9);
        }
    }

    #[test]
    fn bell_basis_d2_matches_the_four_bell_states() {
        let bell = bell_basis(2).unwrap();
        let inv = 1.0 / 2.0_f64.sqrt();
        // (a,b) ordering: (00), (01), (10), (11).
        let expect: [[(usize, f64); 2]; 4] = [
            [(0, inv), (3, inv)],
            [(0, inv), (3, -inv)],
            [(2, inv), (1, inv)],
            [(2, inv), (1, -inv)],
        ];
        for (v, cells) in bell.vectors().iter().zip(expect.iter()) {
            for &(idx, val) in cells {
                assert!((v[idx] - C64::new(val, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bell_vectors_are_maximally_entangled() {
        for d in [2usize, 3] {
            let bell = bell_basis(d).unwrap();
            for v in bell.vectors() {
                let psi = PureState::new(v.clone(), Dims::square(d)).unwrap();
                let reduced =
                    crate::state::partial_trace(&psi.density(), Subsystem::A).unwrap();
                for i in 0..d {
                    for j in 0..d {
                        let want = if i == j { 1.0 / d as f64 } else { 0.0 };
                        assert!((reduced.matrix()[(i, j)] - C64::new(want, 0.0)).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn bell_basis_contains_max_entangled_as_element_zero() {
        for d in [2usize, 3] {
            let bell = bell_basis(d).unwrap();
            let psi = max_entangled(d).unwrap();
            let overlap = PureState::new(bell.vectors()[0].clone(), Dims::square(d))
                .unwrap()
                .overlap(&psi)
                .norm();
            assert!((overlap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenbasis_attains_von_neumann_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..20 {
            let rho = random_mixed(Dims::new(2, 2), 3, rng.gen());
            let basis = eigenbasis_measurement(&rho).unwrap();
            let h = klein_entropy(&rho, &basis).unwrap();
            let s = von_neumann_entropy(&rho).unwrap();
            assert!((h - s).abs() < 1e-9, "H = {h}, S = {s}");
        }
    }

    #[test]
    fn eigenbasis_of_diagonal_state_is_computational() {
        let mut m = CMatrix::zeros(4, 4);
        for (k, w) in [0.4, 0.3, 0.2, 0.1].iter().enumerate() {
            m[(k, k)] = C64::new(*w, 0.0);
        }
        let rho = DensityMatrix::new(m, Dims::new(2, 2)).unwrap();
        let basis = eigenbasis_measurement(&rho).unwrap();
        for v in basis.vectors() {
            let max_comp = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!((max_comp - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenbasis_of_bell_diagonal_is_bell_like() {
        let rho = crate::families::bell_diagonal(2, &[0.4, 0.3, 0.2, 0.1]).unwrap();
        let basis = eigenbasis_measurement(&rho).unwrap();
        let h = klein_entropy(&rho, &basis).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((h - s).abs() < 1e-9);
        // Each eigenvector should be maximally entangled (distinct weights).
        for v in basis.vectors() {
            let psi = PureState::new(v.clone(), Dims::square(2)).unwrap();
            let sd = schmidt_decompose(&psi).unwrap();
            let inv = 1.0 / 2.0_f64.sqrt();
            assert!((sd.coefficients()[0] - inv).abs() < 1e-6);
        }
    }

    #[test]
    fn schmidt_preserving_basis_matches_printed_d2_pattern() {
        // ψ = a₁|00⟩ + a₂|11⟩ with a₁ = √0.7.
        let a1 = 0.7_f64.sqrt();
        let a2 = 0.3_f64.sqrt();
        let dims = Dims::square(2);
        let mut amp = CVector::zeros(4);
        amp[0] = C64::new(a1, 0.0);
        amp[3] = C64::new(a2, 0.0);
        let psi = PureState::new(amp, dims).unwrap();
        let basis = schmidt_preserving_eigenbasis(&psi).unwrap();
        let rows: [[f64; 4]; 4] = [
            [a1, 0.0, 0.0, a2],
            [-a2, 0.0, 0.0, a1],
            [0.0, a1, a2, 0.0],
            [0.0, -a2, a1, 0.0],
        ];
        // The construction may globally flip local basis phases; compare up to
        // an overall sign per vector.
        for (v, row) in basis.vectors().iter().zip(rows.iter()) {
            let mut direct = 0.0;
            let mut flipped = 0.0;
            for k in 0..4 {
                direct += (v[k] - C64::new(row[k], 0.0)).norm_sqr();
                flipped += (v[k] + C64::new(row[k], 0.0)).norm_sqr();
            }
            assert!(direct.min(flipped) < 1e-18, "row mismatch: {v:?} vs {row:?}");
        }
    }

    #[test]
    fn schmidt_preserving_basis_on_product_input_is_product_basis() {
        let psi = PureState::basis_ket(Dims::square(2), 0, 0);
        let basis = schmidt_preserving_eigenbasis(&psi).unwrap();
        for v in basis.vectors() {
            let sd = schmidt_decompose(&PureState::new(v.clone(), Dims::square(2)).unwrap())
                .unwrap();
            assert!((sd.coefficients()[0] - 1.0).abs() < 1e-9);
            assert!(sd.coefficients()[1] < 1e-9);
        }
    }

    #[test]
    fn schmidt_preserving_basis_properties_for_d_2_4_8() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for d in [2usize, 4, 8] {
            for _ in 0..6 {
                let psi = crate::state::haar_random_pure_with(Dims::square(d), &mut rng);
                let c = schmidt_decompose(&psi).unwrap().max_coefficient_sq();
                let basis = schmidt_preserving_eigenbasis(&psi).unwrap();
                // Contains ψ as element 0.
                let v0 = PureState::new(basis.vectors()[0].clone(), Dims::square(d)).unwrap();
                assert!((v0.overlap(&psi).norm() - 1.0).abs() < 1e-9);
                // Schmidt multiset of every vector matches the input's, so the
                // max squared coefficient never exceeds c.
                let input_coeffs = schmidt_decompose(&psi).unwrap().coefficients().to_vec();
                for v in basis.vectors() {
                    let sd =
                        schmidt_decompose(&PureState::new(v.clone(), Dims::square(d)).unwrap())
                            .unwrap();
                    assert!(sd.max_coefficient_sq() <= c + 1e-9);
                    for (x, y) in sd.coefficients().iter().zip(input_coeffs.iter()) {
                        assert!((x - y).abs() < 1e-8, "coefficient multiset changed");
                    }
                }
            }
        }
    }

    #[test]
    fn schmidt_preserving_basis_rejects_unsupported_dims() {
        let psi = haar_random_pure(Dims::square(3), 3);
        assert!(matches!(
            schmidt_preserving_eigenbasis(&psi),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn decode_zero_angles_is_computational_basis() {
        let params = MeasurementParams::identity(Dims::new(2, 2));
        let m = decode_measurement(&params).unwrap();
        for (k, v) in m.vectors().iter().enumerate() {
            assert!((v[k] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn decode_random_angles_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let dims = Dims::new(2, 2);
            let angles: Vec<f64> = (0..MeasurementParams::angle_count(dims))
                .map(|_| rng.gen::<f64>() * 2.0 * PI)
                .collect();
            let params = MeasurementParams::new(dims, angles).unwrap();
            // Measurement::new validates orthonormality at 1e-10.
            decode_measurement(&params).unwrap();
        }
    }

    #[test]
    fn encode_decode_round_trip_up_to_column_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for dims in [Dims::new(2, 2), Dims::new(3, 3)] {
            for _ in 0..5 {
                let u = haar_random_unitary(dims.total(), &mut rng);
                let m = Measurement::from_unitary_columns(&u, dims).unwrap();
                let params = encode_measurement(&m);
                let decoded = decode_measurement(&params).unwrap();
                for (orig, dec) in m.vectors().iter().zip(decoded.vectors()) {
                    let ip = orig.dotc(dec).norm();
                    assert!((ip - 1.0).abs() < 1e-9, "|⟨orig|dec⟩| = {ip}");
                }
            }
        }
    }

    #[test]
    fn bell_basis_is_reachable_from_encoded_angles() {
        let bell = bell_basis(2).unwrap();
        let params = encode_measurement(&bell);
        let decoded = decode_measurement(&params).unwrap();
        for (orig, dec) in bell.vectors().iter().zip(decoded.vectors()) {
            let ip = orig.dotc(dec).norm();
            assert!((ip - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn params_reject_wrong_length() {
        assert!(MeasurementParams::new(Dims::new(2, 2), vec![0.0; 5]).is_err());
    }
}

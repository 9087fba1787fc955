//! Bipartite state types: pure states, density matrices, Schmidt decomposition.
//!
//! Joint indices follow A-major flattening: basis ket |i⟩⊗|j⟩ sits at index
//! `i * dB + j`. All constructors validate their invariants and return
//! [`Error`](crate::Error) on violation, so a held value is always well formed.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Unit-norm tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-12;
/// Entrywise Hermiticity and trace tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated before a matrix is rejected as non-positive.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Local dimensions (dA, dB) of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize) -> Self {
        Dims { a, b }
    }

    /// Equal local dimensions d ⊗ d.
    pub fn square(d: usize) -> Self {
        Dims { a: d, b: d }
    }

    pub fn total(&self) -> usize {
        self.a * self.b
    }

    pub fn is_square(&self) -> bool {
        self.a == self.b
    }
}

/// Which subsystem survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A unit vector on C^dA ⊗ C^dB.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVector,
    dims: Dims,
}

impl PureState {
    pub fn new(amplitudes: CVector, dims: Dims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { amplitudes, dims })
    }

    /// Normalizes the given amplitudes; errors only on the zero vector.
    pub fn normalized(amplitudes: CVector, dims: Dims) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(Error::NotNormalized(norm));
        }
        PureState::new(amplitudes / C64::new(norm, 0.0), dims)
    }

    /// Computational basis ket |i⟩⊗|j⟩.
    pub fn basis_ket(dims: Dims, i: usize, j: usize) -> Self {
        let mut amp = CVector::zeros(dims.total());
        amp[i * dims.b + j] = C64::new(1.0, 0.0);
        PureState {
            amplitudes: amp,
            dims,
        }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// The dA×dB coefficient matrix M with M[i,j] = ⟨ij|ψ⟩.
    pub fn amplitude_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dims.a, self.dims.b);
        for i in 0..self.dims.a {
            for j in 0..self.dims.b {
                m[(i, j)] = self.amplitudes[i * self.dims.b + j];
            }
        }
        m
    }

    /// The rank-1 projector |ψ⟩⟨ψ| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let n = self.dims.total();
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = self.amplitudes[r] * self.amplitudes[c].conj();
            }
        }
        DensityMatrix {
            eigenvalues: {
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                e
            },
            matrix: m,
            dims: self.dims,
        }
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// A positive, unit-trace operator on C^dA ⊗ C^dB.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Dims,
    /// Raw spectrum, descending. Cached at construction; clamping happens in entropy code.
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, dims: Dims) -> Result<Self> {
        let n = dims.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows(),
            });
        }
        let mut herm_dev: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                let dev = (matrix[(r, c)] - matrix[(c, r)].conj()).norm();
                herm_dev = herm_dev.max(dev);
            }
        }
        if herm_dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm_dev));
        }
        let trace: C64 = (0..n).map(|k| matrix[(k, k)]).sum();
        if (trace.re - 1.0).abs() > HERMITIAN_TOL || trace.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidTrace(trace.re));
        }
        let mut eigenvalues = hermitian_eigenvalues(&matrix)?;
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if let Some(&min) = eigenvalues.last() {
            if min < EIGENVALUE_FLOOR {
                return Err(Error::NotPositive(min));
            }
        }
        Ok(DensityMatrix {
            matrix,
            dims,
            eigenvalues,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Cached spectrum in descending order (raw, may contain tiny negatives).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Full eigendecomposition: (eigenvalues, column eigenvectors), unordered.
    pub fn eigen_pairs(&self) -> Result<(Vec<f64>, CMatrix)> {
        let eig = SymmetricEigen::try_new(self.matrix.clone(), 1.0e-13, 0)
            .ok_or_else(|| Error::Numeric("Hermitian eigendecomposition failed".into()))?;
        Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
    }

    /// True when the top eigenvalue is 1 within `tol` (the state is a projector).
    pub fn is_pure(&self, tol: f64) -> bool {
        self.eigenvalues.first().map_or(false, |&l| l >= 1.0 - tol)
    }

    /// For a pure density matrix, the underlying state vector.
    pub fn as_pure_state(&self) -> Option<PureState> {
        if !self.is_pure(1e-9) {
            return None;
        }
        let (vals, vecs) = self.eigen_pairs().ok()?;
        let (k, _) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
        PureState::normalized(vecs.column(k).into_owned(), self.dims).ok()
    }

    /// Convex mixture (1−ε)·self + ε·other.
    pub fn mix(&self, other: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.total(),
                got: other.dims.total(),
            });
        }
        let m = &self.matrix * C64::new(1.0 - eps, 0.0) + &other.matrix * C64::new(eps, 0.0);
        DensityMatrix::new(m, self.dims)
    }
}

/// Eigenvalues of a Hermitian matrix.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(m.clone(), 1.0e-13, 0)
        .ok_or_else(|| Error::Numeric("Hermitian eigendecomposition failed".into()))?;
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Reduced state on the kept subsystem. Trace and positivity are preserved.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let Dims { a: da, b: db } = rho.dims();
    let m = rho.matrix();
    let reduced = match keep {
        Subsystem::A => {
            let mut out = CMatrix::zeros(da, da);
            for i in 0..da {
                for ip in 0..da {
                    let mut s = C64::new(0.0, 0.0);
                    for j in 0..db {
                        s += m[(i * db + j, ip * db + j)];
                    }
                    out[(i, ip)] = s;
                }
            }
            out
        }
        Subsystem::B => {
            let mut out = CMatrix::zeros(db, db);
            for j in 0..db {
                for jp in 0..db {
                    let mut s = C64::new(0.0, 0.0);
                    for i in 0..da {
                        s += m[(i * db + j, i * db + jp)];
                    }
                    out[(j, jp)] = s;
                }
            }
            out
        }
    };
    let local_dim = reduced.nrows();
    DensityMatrix::new(reduced, Dims::new(local_dim, 1))
}

/// Schmidt form of a bipartite pure state: ψ = Σ aᵢ |eᵢ⟩⊗|fᵢ⟩ with aᵢ ≥ 0 nonincreasing.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    coefficients: Vec<f64>,
    left_basis: Vec<CVector>,
    right_basis: Vec<CVector>,
}

impl SchmidtDecomposition {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn left_basis(&self) -> &[CVector] {
        &self.left_basis
    }

    pub fn right_basis(&self) -> &[CVector] {
        &self.right_basis
    }

    /// Square of the greatest Schmidt coefficient.
    pub fn max_coefficient_sq(&self) -> f64 {
        self.coefficients.first().map_or(0.0, |c| c * c)
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    /// Rebuild Σ aᵢ eᵢ⊗fᵢ as a state on the given dims.
    pub fn reconstruct(&self, dims: Dims) -> Result<PureState> {
        let mut amp = CVector::zeros(dims.total());
        for (k, &c) in self.coefficients.iter().enumerate() {
            let e = &self.left_basis[k];
            let f = &self.right_basis[k];
            for i in 0..dims.a {
                for j in 0..dims.b {
                    amp[i * dims.b + j] += C64::new(c, 0.0) * e[i] * f[j];
                }
            }
        }
        PureState::new(amp, dims)
    }
}

/// Schmidt decomposition via SVD of the dA×dB amplitude matrix.
pub fn schmidt_decompose(psi: &PureState) -> Result<SchmidtDecomposition> {
    let m = psi.amplitude_matrix();
    let svd = m.svd(true, true);
    let u = svd
        .u
        .ok_or_else(|| Error::Numeric("SVD did not return left vectors".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD did not return right vectors".into()))?;
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    // nalgebra sorts descending already; keep a stable sort as a guarantee.
    order.sort_by(|&x, &y| {
        svd.singular_values[y]
            .partial_cmp(&svd.singular_values[x])
            .unwrap()
    });
    let mut coefficients = Vec::with_capacity(k);
    let mut left_basis = Vec::with_capacity(k);
    let mut right_basis = Vec::with_capacity(k);
    for &idx in &order {
        coefficients.push(svd.singular_values[idx].max(0.0));
        left_basis.push(u.column(idx).into_owned());
        // ψ = Σ_k σ_k u_k ⊗ f_k with f_k[j] = (V†)[k, j].
        right_basis.push(v_t.row(idx).transpose());
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_basis,
        right_basis,
    })
}

/// Haar-distributed pure state: normalized vector of iid complex Gaussians.
/// Deterministic for a fixed seed.
pub fn haar_random_pure(dims: Dims, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_pure_with(dims, &mut rng)
}

pub fn haar_random_pure_with<R: rand::Rng>(dims: Dims, rng: &mut R) -> PureState {
    let n = dims.total();
    let mut amp = CVector::zeros(n);
    for k in 0..n {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        amp[k] = C64::new(re, im);
    }
    PureState::normalized(amp, dims).expect("Gaussian vector is nonzero almost surely")
}

/// Haar-distributed local vector on C^m.
pub fn haar_random_local<R: rand::Rng>(m: usize, rng: &mut R) -> CVector {
    let mut v = CVector::zeros(m);
    for k in 0..m {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        v[k] = C64::new(re, im);
    }
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Haar-distributed n×n unitary via QR of a complex Ginibre matrix with
/// the standard phase fix on R's diagonal.
pub fn haar_random_unitary<R: rand::Rng>(n: usize, rng: &mut R) -> CMatrix {
    let mut g = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            g[(r, c)] = C64::new(re, im);
        }
    }
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..n {
        let d = r[(c, c)];
        if d.norm() > 0.0 {
            let phase = d / C64::new(d.norm(), 0.0);
            for row in 0..n {
                q[(row, c)] *= phase;
            }
        }
    }
    q
}

/// Kronecker product of two local vectors into a joint vector (A-major).
pub fn kron_vec(left: &CVector, right: &CVector) -> CVector {
    let (da, db) = (left.len(), right.len());
    let mut out = CVector::zeros(da * db);
    for i in 0..da {
        for j in 0..db {
            out[i * db + j] = left[i] * right[j];
        }
    }
    out
}

/// Kronecker product of two square matrices (A-major joint indexing).
pub fn kron_mat(left: &CMatrix, right: &CMatrix) -> CMatrix {
    let (da, db) = (left.nrows(), right.nrows());
    let mut out = CMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for ip in 0..da {
            for j in 0..db {
                for jp in 0..db {
                    out[(i * db + j, ip * db + jp)] = left[(i, ip)] * right[(j, jp)];
                }
            }
        }
    }
    out
}

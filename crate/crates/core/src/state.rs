//! Two-qubit density matrices, the R-matrix picture and local operations.
//!
//! All matrices use the fixed basis order `|HH⟩, |HV⟩, |VH⟩, |VV⟩`; the first
//! tensor factor belongs to Alice, the second to Bob.

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::linalg::{self, c, real, ONE, ZERO};
use crate::math;
use crate::{Error, Mat2, Mat4, Result, C64};

/// Eigenvalues in `[-PSD_CLIP_TOL, 0)` are treated as rounding noise.
pub const PSD_CLIP_TOL: f64 = 1e-10;
/// Tolerance on `A†A = I` for unitary local operations.
pub const UNITARY_TOL: f64 = 1e-12;
/// Slack on the largest singular value of a physical filter.
pub const FILTER_TOL: f64 = 1e-12;
/// Filtering events below this probability are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Pauli matrix `σ_index` with `σ_0 = I` and `σ_2 = [[0, -i], [i, 0]]`.
///
/// # Panics
/// If `index > 3`.
pub fn pauli(index: usize) -> Mat2 {
    match index {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, real(-1.0)),
        _ => panic!("Pauli index {index} out of range"),
    }
}

/// The sixteen products `σ_i ⊗ σ_j`, indexed `[i][j]`.
pub fn pauli_products() -> [[Mat4; 4]; 4] {
    core::array::from_fn(|i| core::array::from_fn(|j| linalg::kron(&pauli(i), &pauli(j))))
}

/// Which party holds a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Alice,
    Bob,
}

/// A validated two-qubit state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    /// Validates `m` with the default clipping tolerance.
    pub fn new(m: Mat4) -> Result<Self> {
        validate_density(&m, PSD_CLIP_TOL)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn from_pure(psi: &Vector4<C64>) -> Result<Self> {
        let norm = psi.norm_squared();
        if norm <= 0.0 {
            return Err(Error::BadTrace { trace: 0.0 });
        }
        Self::new(psi * psi.adjoint() / real(norm))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix4::identity() * real(0.25))
    }

    /// Projects a matrix that is PSD by construction back onto the state
    /// set, absorbing rounding noise of any size.
    pub(crate) fn from_physical(m: Mat4) -> Self {
        let h = linalg::hermitian_part4(&m);
        let (vals, vecs) = linalg::eigh4(&h);
        let m = if vals[0] < 0.0 {
            let clipped = vals.map(|x| real(x.max(0.0)));
            vecs * Matrix4::from_diagonal(&clipped) * vecs.adjoint()
        } else {
            h
        };
        let tr = linalg::trace4(&m).re;
        DensityMatrix(m / real(tr))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let (vals, _) = linalg::eigh4(&self.0);
        [vals[0], vals[1], vals[2], vals[3]]
    }

    pub fn to_rmatrix(&self) -> RMatrix {
        to_rmatrix(self)
    }

    pub fn reduced(&self, side: Side) -> Mat2 {
        reduced_state(self, side)
    }

    /// Largest entrywise deviation from another state.
    pub fn distance_max(&self, other: &DensityMatrix) -> f64 {
        linalg::max_abs_diff4(&self.0, &other.0)
    }
}

/// Checks `m` and returns it as a state.
///
/// Negative eigenvalues no smaller than `-tol` are clipped to zero and the
/// trace renormalized.
pub fn validate_density(m: &Mat4, tol: f64) -> Result<DensityMatrix> {
    let deviation = linalg::max_abs_diff4(m, &m.adjoint());
    if !(deviation <= tol) {
        return Err(Error::NotHermitian { deviation });
    }
    let h = linalg::hermitian_part4(m);
    let trace = linalg::trace4(&h).re;
    if !((trace - 1.0).abs() <= tol) {
        return Err(Error::BadTrace { trace });
    }
    let (vals, vecs) = linalg::eigh4(&h);
    if vals[0] < -tol {
        return Err(Error::NotPsd {
            min_eigenvalue: vals[0],
        });
    }
    let m = if vals[0] < 0.0 {
        let clipped = vals.map(|x| real(x.max(0.0)));
        vecs * Matrix4::from_diagonal(&clipped) * vecs.adjoint()
    } else {
        h
    };
    let trace = linalg::trace4(&m).re;
    Ok(DensityMatrix(m / real(trace)))
}

/// Real correlation matrix `R_ij = Tr(ρ (σ_i ⊗ σ_j))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMatrix(pub Matrix4<f64>);

impl RMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// The 3x3 spin-correlation block `T_ij = R_ij`, `i, j ∈ {1, 2, 3}`.
    pub fn correlation_block(&self) -> nalgebra::Matrix3<f64> {
        self.0.fixed_view::<3, 3>(1, 1).into_owned()
    }
}

pub fn to_rmatrix(rho: &DensityMatrix) -> RMatrix {
    RMatrix(rmatrix_of(rho.matrix()))
}

/// R-matrix of an arbitrary (possibly unnormalized) operator.
pub fn rmatrix_of(m: &Mat4) -> Matrix4<f64> {
    let products = pauli_products();
    Matrix4::from_fn(|i, j| (m * products[i][j]).trace().re)
}

/// Inverts `ρ = ¼ Σ R_ij σ_i ⊗ σ_j`.
pub fn from_rmatrix(r: &RMatrix) -> Result<DensityMatrix> {
    let r00 = r.get(0, 0);
    if (r00 - 1.0).abs() > 1e-12 {
        return Err(Error::BadRMatrix { r00 });
    }
    let products = pauli_products();
    let mut m = Mat4::zeros();
    for (i, row) in products.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            m += p * real(0.25 * r.get(i, j));
        }
    }
    DensityMatrix::new(m)
}

/// Operational kind of a single-qubit operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Unitary,
    /// Largest singular value at most one: implementable as a lossy filter.
    Filter,
    General,
}

/// A single-qubit operator applied by one party.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOp {
    matrix: Mat2,
    kind: OpKind,
}

impl LocalOp {
    pub fn identity() -> Self {
        LocalOp {
            matrix: Mat2::identity(),
            kind: OpKind::Unitary,
        }
    }

    pub fn pauli(index: usize) -> Self {
        LocalOp {
            matrix: pauli(index),
            kind: OpKind::Unitary,
        }
    }

    pub fn unitary(matrix: Mat2) -> Result<Self> {
        let deviation = linalg::max_abs_diff2(&(matrix.adjoint() * matrix), &Mat2::identity());
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(LocalOp {
            matrix,
            kind: OpKind::Unitary,
        })
    }

    pub fn filter(matrix: Mat2) -> Result<Self> {
        let (max_singular_value, _) = linalg::singular_values2(&matrix);
        if max_singular_value > 1.0 + FILTER_TOL {
            return Err(Error::NotAFilter { max_singular_value });
        }
        Ok(LocalOp {
            matrix,
            kind: OpKind::Filter,
        })
    }

    /// Scales `matrix` so its largest singular value is exactly one.
    pub fn normalized_filter(matrix: Mat2) -> Result<Self> {
        let (hi, lo) = linalg::singular_values2(&matrix);
        if !(hi > 0.0) {
            return Err(Error::Singular { smallest: lo });
        }
        Ok(LocalOp {
            matrix: matrix / real(hi),
            kind: OpKind::Filter,
        })
    }

    pub fn general(matrix: Mat2) -> Self {
        LocalOp {
            matrix,
            kind: OpKind::General,
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    /// `(largest, smallest)` singular values.
    pub fn singular_values(&self) -> (f64, f64) {
        linalg::singular_values2(&self.matrix)
    }

    /// The operator `next · self`: first `self`, then `next`.
    pub fn then(&self, next: &LocalOp) -> LocalOp {
        let matrix = next.matrix * self.matrix;
        let kind = match (self.kind, next.kind) {
            (OpKind::Unitary, OpKind::Unitary) => OpKind::Unitary,
            (OpKind::General, _) | (_, OpKind::General) => OpKind::General,
            _ => OpKind::Filter,
        };
        LocalOp { matrix, kind }
    }
}

/// Result of a local filtering event.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredOutcome {
    pub state: DensityMatrix,
    /// `Tr[(A⊗B) ρ (A⊗B)†]`.
    pub probability: f64,
}

/// `(A⊗B) ρ (A⊗B)†` without normalization.
pub fn apply_local_unnormalized(rho: &DensityMatrix, a: &LocalOp, b: &LocalOp) -> Mat4 {
    let k = linalg::kron(a.matrix(), b.matrix());
    k * rho.matrix() * k.adjoint()
}

pub fn apply_local(rho: &DensityMatrix, a: &LocalOp, b: &LocalOp) -> Result<FilteredOutcome> {
    let out = apply_local_unnormalized(rho, a, b);
    let probability = linalg::trace4(&out).re;
    if !(probability > ZERO_PROBABILITY) {
        return Err(Error::ZeroProbability { probability });
    }
    Ok(FilteredOutcome {
        state: DensityMatrix::from_physical(out),
        probability,
    })
}

/// Partial trace over the other party.
pub fn reduced_state(rho: &DensityMatrix, side: Side) -> Mat2 {
    let m = rho.matrix();
    match side {
        Side::Alice => Matrix2::from_fn(|i, k| m[(2 * i, 2 * k)] + m[(2 * i + 1, 2 * k + 1)]),
        Side::Bob => Matrix2::from_fn(|j, l| m[(j, l)] + m[(2 + j, 2 + l)]),
    }
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let root = linalg::psd_sqrt4(rho.matrix());
    let inner = root * sigma.matrix() * root;
    let (vals, _) = linalg::eigh4(&inner);
    let s: f64 = vals.iter().map(|&x| math::sqrt(x.max(0.0))).sum();
    (s * s).clamp(0.0, 1.0)
}

/// Bell states `Φ+, Φ-, Ψ+, Ψ-` as vectors.
pub fn bell_vectors() -> [Vector4<C64>; 4] {
    let h = real(core::f64::consts::FRAC_1_SQRT_2);
    [
        Vector4::new(h, ZERO, ZERO, h),
        Vector4::new(h, ZERO, ZERO, -h),
        Vector4::new(ZERO, h, h, ZERO),
        Vector4::new(ZERO, h, -h, ZERO),
    ]
}

/// The state in the Bell basis `Φ+, Φ-, Ψ+, Ψ-`.
pub fn in_bell_basis(rho: &DensityMatrix) -> Mat4 {
    let v = bell_vectors();
    let basis = Matrix4::from_columns(&v);
    basis.adjoint() * rho.matrix() * basis
}

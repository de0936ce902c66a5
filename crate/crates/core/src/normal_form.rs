//! Filter normal form and optimal local filters.
//!
//! Local operators act on the R-matrix through Lorentz transformations:
//! `R((A⊗B) ρ (A⊗B)†) = L(A) R(ρ) L(B)ᵀ` with `L(A)_ij = ½ Tr[σ_i A σ_j A†]`.
//! The filter normal form is reached by alternately whitening Bob's and
//! Alice's reduced states with `(2ρ_X)^{-1/2}`; at the fixed point both
//! marginals are `I/2`, and one more pair of local unitaries, obtained from a
//! real decomposition of the 3x3 correlation block, makes the state Bell
//! diagonal.

use nalgebra::{Matrix2, Matrix3, Matrix4};

use crate::linalg::{self, c, real};
use crate::math;
use crate::state::{
    apply_local, in_bell_basis, pauli, reduced_state, DensityMatrix, LocalOp, Side,
};
use crate::{Error, Mat2, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Marginal eigenvalue below which a whitening step is impossible.
pub const SINGULAR_MARGINAL: f64 = 1e-12;
/// Running success probability that marks a diverging filter sequence.
pub const QUASI_PROBABILITY: f64 = 1e-8;
/// Required closeness to `I/2` marginals before Bell diagonalization.
pub const MIXED_MARGINAL_TOL: f64 = 1e-8;

/// Minkowski metric `diag(1, -1, -1, -1)`.
pub fn minkowski() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// A proper orthochronous Lorentz transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMatrix(Matrix4<f64>);

impl LorentzMatrix {
    /// Accepts `m` if `mᵀηm = η`, `det m = 1` and `m_00 ≥ 1`, all within `tol`.
    pub fn new(m: Matrix4<f64>, tol: f64) -> Option<Self> {
        is_proper_orthochronous(&m, tol).then_some(LorentzMatrix(m))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }
}

pub fn is_proper_orthochronous(m: &Matrix4<f64>, tol: f64) -> bool {
    let eta = minkowski();
    let metric_ok = (m.transpose() * eta * m - eta).abs().max() <= tol;
    metric_ok && (m.determinant() - 1.0).abs() <= tol && m[(0, 0)] >= 1.0 - tol
}

/// `L(A)_ij = ½ Tr[σ_i A σ_j A†]`.
pub fn lorentz_of(op: &LocalOp) -> Result<Matrix4<f64>> {
    let a = op.matrix();
    let (_, smallest) = linalg::singular_values2(a);
    if !(smallest > 1e-12) {
        return Err(Error::Singular { smallest });
    }
    let sig: [Mat2; 4] = core::array::from_fn(pauli);
    let ad = a.adjoint();
    Ok(Matrix4::from_fn(|i, j| {
        0.5 * linalg::trace2(&(sig[i] * a * sig[j] * ad)).re
    }))
}

/// Outcome of the distillability analysis of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// A Bell-diagonal state is reachable with finite probability.
    BellDiagonalizable,
    /// Only reachable asymptotically, with vanishing success probability.
    QuasiDistillable,
    /// A reduced state is singular (e.g. a pure product component).
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormResult {
    pub state: DensityMatrix,
    pub filter_a: LocalOp,
    pub filter_b: LocalOp,
    /// Success probability of the two filters on the input state.
    pub probability: f64,
    pub iterations: usize,
    pub classification: Classification,
}

impl NormalFormResult {
    fn unfiltered(rho: &DensityMatrix, iterations: usize, classification: Classification) -> Self {
        NormalFormResult {
            state: rho.clone(),
            filter_a: LocalOp::identity(),
            filter_b: LocalOp::identity(),
            probability: 1.0,
            iterations,
            classification,
        }
    }
}

/// Largest entrywise distance of either reduced state from `I/2`.
pub fn marginal_distance(rho: &DensityMatrix) -> f64 {
    let half = Mat2::identity() * real(0.5);
    let a = linalg::max_abs_diff2(&reduced_state(rho, Side::Alice), &half);
    let b = linalg::max_abs_diff2(&reduced_state(rho, Side::Bob), &half);
    a.max(b)
}

/// `(2m)^{-1/2}` for a positive single-qubit marginal.
fn whitening(m: &Mat2, iteration: usize) -> Result<Mat2> {
    let (vals, vecs) = linalg::eigh2(m);
    if !(vals[0] > SINGULAR_MARGINAL) {
        return Err(Error::MarginalSingular { iteration });
    }
    let d = Matrix2::from_diagonal(&vals.map(|x| real(1.0 / math::sqrt(2.0 * x))));
    Ok(vecs * d * vecs.adjoint())
}

/// Iterates marginal whitening until both reduced states are `I/2`.
///
/// Each sweep whitens Bob first, then Alice. The accumulated filters are kept
/// rescaled to unit largest singular value, and the running state is always
/// recomputed from `rho`, so rounding does not accumulate across sweeps.
///
/// Errors: [`Error::MarginalSingular`] if a reduced state is singular
/// (degenerate input); [`Error::NoConvergence`] if the running success
/// probability drops below [`QUASI_PROBABILITY`] or `max_iter` sweeps pass
/// (quasi-distillable input).
pub fn filter_normal_form(
    rho: &DensityMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<NormalFormResult> {
    let mut a = LocalOp::identity();
    let mut b = LocalOp::identity();
    let mut state = rho.clone();
    let mut probability = 1.0;
    let mut distance = marginal_distance(&state);
    for iteration in 0..=max_iter {
        if distance <= tol {
            return Ok(NormalFormResult {
                state,
                filter_a: a,
                filter_b: b,
                probability,
                iterations: iteration,
                classification: Classification::BellDiagonalizable,
            });
        }
        if iteration == max_iter {
            break;
        }
        let fb = whitening(&reduced_state(&state, Side::Bob), iteration)?;
        b = LocalOp::normalized_filter(fb * b.matrix())?;
        state = apply_local(rho, &a, &b)?.state;

        let fa = whitening(&reduced_state(&state, Side::Alice), iteration)?;
        a = LocalOp::normalized_filter(fa * a.matrix())?;
        let outcome = apply_local(rho, &a, &b)?;
        state = outcome.state;
        probability = outcome.probability;
        distance = marginal_distance(&state);

        if probability < QUASI_PROBABILITY && distance > tol {
            return Err(Error::NoConvergence {
                iterations: iteration + 1,
                distance,
                probability,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        distance,
        probability,
    })
}

/// Local unitaries that bring an `I/2`-marginal state to Bell-diagonal form.
#[derive(Debug, Clone, PartialEq)]
pub struct BellDiagonalization {
    pub u_a: LocalOp,
    pub u_b: LocalOp,
    pub state: DensityMatrix,
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// `T = O_A Σ O_Bᵀ` with `O_A, O_B ∈ SO(3)` and signs folded into `Σ`.
///
/// Among the admissible orderings and sign assignments of the singular
/// triplets, the pair closest to the identity is returned, so an already
/// diagonal block yields `O_A = O_B = I`.
fn rotation_decomposition(t: &Matrix3<f64>) -> (Matrix3<f64>, Matrix3<f64>) {
    let off_diagonal = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| t[(i, j)].abs())
        .fold(0.0, f64::max);
    if off_diagonal <= 1e-14 {
        return (Matrix3::identity(), Matrix3::identity());
    }
    let svd = t.svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested Vᵀ").transpose();
    let mut best = (f64::NEG_INFINITY, Matrix3::identity(), Matrix3::identity());
    for perm in PERMUTATIONS {
        let p = Matrix3::from_fn(|r, k| if perm[k] == r { 1.0 } else { 0.0 });
        let up = u * p;
        let vp = v * p;
        for sa in 0..8u8 {
            let sign_a = Matrix3::from_diagonal(&nalgebra::Vector3::from_fn(|k, _| {
                if sa >> k & 1 == 1 {
                    -1.0
                } else {
                    1.0
                }
            }));
            let oa = up * sign_a;
            if oa.determinant() < 0.0 {
                continue;
            }
            for sb in 0..8u8 {
                let sign_b = Matrix3::from_diagonal(&nalgebra::Vector3::from_fn(|k, _| {
                    if sb >> k & 1 == 1 {
                        -1.0
                    } else {
                        1.0
                    }
                }));
                let ob = vp * sign_b;
                if ob.determinant() < 0.0 {
                    continue;
                }
                let score = oa.trace() + ob.trace();
                if score > best.0 {
                    best = (score, oa, ob);
                }
            }
        }
    }
    (best.1, best.2)
}

/// Bell-basis weights `[Φ+, Φ-, Ψ+, Ψ-]`.
pub fn bell_weights(rho: &DensityMatrix) -> [f64; 4] {
    let m = in_bell_basis(rho);
    [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re]
}

/// Largest off-diagonal modulus of the state in the Bell basis.
pub fn bell_offdiagonal(rho: &DensityMatrix) -> f64 {
    let m = in_bell_basis(rho);
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                worst = worst.max(linalg::cabs(m[(i, j)]));
            }
        }
    }
    worst
}

/// Makes an `I/2`-marginal state Bell diagonal with its largest weight on `Φ+`.
pub fn bell_diagonalize(rho: &DensityMatrix) -> Result<BellDiagonalization> {
    let distance = marginal_distance(rho);
    if distance > MIXED_MARGINAL_TOL {
        return Err(Error::MarginalsNotMixed { distance });
    }
    let t = rho.to_rmatrix().correlation_block();
    let (oa, ob) = rotation_decomposition(&t);
    let mut u_a = su2_from_so3(&oa.transpose())?;
    let u_b = su2_from_so3(&ob.transpose())?;

    let diagonal = apply_local(rho, &u_a, &u_b)?.state;
    let weights = bell_weights(&diagonal);
    let largest = (0..4)
        .max_by(|&i, &j| weights[i].total_cmp(&weights[j]))
        .unwrap_or(0);
    // Alice's Pauli that maps Φ-, Ψ+, Ψ- onto Φ+
    let fix = match largest {
        1 => Some(3),
        2 => Some(1),
        3 => Some(2),
        _ => None,
    };
    if let Some(k) = fix {
        u_a = u_a.then(&LocalOp::pauli(k));
    }
    let state = apply_local(rho, &u_a, &u_b)?.state;
    Ok(BellDiagonalization { u_a, u_b, state })
}

/// Lifts a rotation to `U ∈ SU(2)` with `lorentz_of(U)` spatial block `= O`.
pub fn su2_from_so3(o: &Matrix3<f64>) -> Result<LocalOp> {
    let orth = (o.transpose() * o - Matrix3::identity()).abs().max();
    if orth > 1e-9 || (o.determinant() - 1.0).abs() > 1e-9 {
        return Err(Error::NotRotation);
    }
    let tr = o.trace();
    let (w, x, y, z);
    if tr > 0.0 {
        let s = 2.0 * math::sqrt(tr + 1.0);
        w = 0.25 * s;
        x = (o[(2, 1)] - o[(1, 2)]) / s;
        y = (o[(0, 2)] - o[(2, 0)]) / s;
        z = (o[(1, 0)] - o[(0, 1)]) / s;
    } else if o[(0, 0)] > o[(1, 1)] && o[(0, 0)] > o[(2, 2)] {
        let s = 2.0 * math::sqrt(1.0 + o[(0, 0)] - o[(1, 1)] - o[(2, 2)]);
        w = (o[(2, 1)] - o[(1, 2)]) / s;
        x = 0.25 * s;
        y = (o[(0, 1)] + o[(1, 0)]) / s;
        z = (o[(0, 2)] + o[(2, 0)]) / s;
    } else if o[(1, 1)] > o[(2, 2)] {
        let s = 2.0 * math::sqrt(1.0 + o[(1, 1)] - o[(0, 0)] - o[(2, 2)]);
        w = (o[(0, 2)] - o[(2, 0)]) / s;
        x = (o[(0, 1)] + o[(1, 0)]) / s;
        y = 0.25 * s;
        z = (o[(1, 2)] + o[(2, 1)]) / s;
    } else {
        let s = 2.0 * math::sqrt(1.0 + o[(2, 2)] - o[(0, 0)] - o[(1, 1)]);
        w = (o[(1, 0)] - o[(0, 1)]) / s;
        x = (o[(0, 2)] + o[(2, 0)]) / s;
        y = (o[(1, 2)] + o[(2, 1)]) / s;
        z = 0.25 * s;
    }
    let n = math::sqrt(w * w + x * x + y * y + z * z);
    let (w, x, y, z) = (w / n, x / n, y / n, z / n);
    LocalOp::unitary(Matrix2::new(c(w, -z), c(-y, -x), c(y, -x), c(w, z)))
}

/// Optimal local filters: normal form followed by Bell diagonalization.
///
/// Quasi-distillable and degenerate inputs are reported through
/// `classification` with identity filters and the input state.
pub fn optimal_filters(rho: &DensityMatrix) -> Result<NormalFormResult> {
    let nf = match filter_normal_form(rho, DEFAULT_TOL, DEFAULT_MAX_ITER) {
        Ok(nf) => nf,
        Err(Error::MarginalSingular { iteration }) => {
            return Ok(NormalFormResult::unfiltered(
                rho,
                iteration,
                Classification::Degenerate,
            ))
        }
        Err(Error::NoConvergence { iterations, .. }) => {
            return Ok(NormalFormResult::unfiltered(
                rho,
                iterations,
                Classification::QuasiDistillable,
            ))
        }
        Err(e) => return Err(e),
    };
    let bd = bell_diagonalize(&nf.state)?;
    let filter_a = LocalOp::normalized_filter(*nf.filter_a.then(&bd.u_a).matrix())?;
    let filter_b = LocalOp::normalized_filter(*nf.filter_b.then(&bd.u_b).matrix())?;
    let outcome = apply_local(rho, &filter_a, &filter_b)?;
    Ok(NormalFormResult {
        state: outcome.state,
        filter_a,
        filter_b,
        probability: outcome.probability,
        iterations: nf.iterations,
        classification: Classification::BellDiagonalizable,
    })
}

pub fn classify_state(rho: &DensityMatrix) -> Classification {
    match filter_normal_form(rho, DEFAULT_TOL, DEFAULT_MAX_ITER) {
        Ok(_) => Classification::BellDiagonalizable,
        Err(Error::MarginalSingular { .. }) => Classification::Degenerate,
        Err(_) => Classification::QuasiDistillable,
    }
}

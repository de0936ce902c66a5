//! Source model, bilateral dephasing and the filter hardware model.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::linalg::{self, c, real, ZERO};
use crate::math;
use crate::state::{pauli, DensityMatrix, LocalOp};
use crate::{Error, Mat2, Mat4, Result};

/// Amplitudes of the source state `a|HH⟩ + b e^{iφ}|VV⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepParams {
    pub a: f64,
    pub b: f64,
    /// Relative phase φ on the `|VV⟩` amplitude; zero for real amplitudes.
    pub phase: f64,
}

impl PrepParams {
    pub fn new(a: f64, b: f64) -> Self {
        PrepParams { a, b, phase: 0.0 }
    }

    /// `b = √(1 - a²)`.
    pub fn from_a(a: f64) -> Result<Self> {
        check_unit("a", a)?;
        Ok(PrepParams::new(a, math::sqrt(1.0 - a * a)))
    }

    pub fn with_phase(self, phase: f64) -> Self {
        PrepParams { phase, ..self }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value })
    }
}

/// Pure source state `a|HH⟩ + b e^{iφ}|VV⟩`. No silent renormalization.
pub fn prepare_spdc(params: PrepParams) -> Result<DensityMatrix> {
    let PrepParams { a, b, phase } = params;
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::OutOfRange {
            name: if a >= 0.0 { "b" } else { "a" },
            value: if a >= 0.0 { b } else { a },
        });
    }
    let norm = a * a + b * b;
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm });
    }
    let psi = Vector4::new(
        real(a),
        ZERO,
        ZERO,
        c(b * math::cos(phase), b * math::sin(phase)),
    );
    Ok(DensityMatrix::from_physical(psi * psi.adjoint()))
}

/// Dephasing axis of a phase-damping channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephasingBasis {
    /// Dephases in `{H+V, H-V}`; Kraus error operator σ_x.
    X,
    /// Dephases in `{H, V}`; Kraus error operator σ_z.
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelLabel {
    XDephasing,
    ZDephasing,
    Identity,
    Custom,
}

/// A single-qubit channel in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalChannel {
    kraus: Vec<Mat2>,
    label: ChannelLabel,
}

impl LocalChannel {
    pub fn identity() -> Self {
        LocalChannel {
            kraus: vec![Mat2::identity()],
            label: ChannelLabel::Identity,
        }
    }

    /// Checks `Σ K†K = I` within 1e-12.
    pub fn custom(kraus: Vec<Mat2>) -> Result<Self> {
        let sum = kraus
            .iter()
            .fold(Mat2::zeros(), |acc, k| acc + k.adjoint() * k);
        let deviation = linalg::max_abs_diff2(&sum, &Mat2::identity());
        if deviation > 1e-12 {
            return Err(Error::IncompleteKraus { deviation });
        }
        Ok(LocalChannel {
            kraus,
            label: ChannelLabel::Custom,
        })
    }

    pub fn kraus(&self) -> &[Mat2] {
        &self.kraus
    }

    pub fn label(&self) -> ChannelLabel {
        self.label
    }

    /// Applies the channel to a single-qubit operator.
    pub fn apply_single(&self, m: &Mat2) -> Mat2 {
        self.kraus
            .iter()
            .fold(Mat2::zeros(), |acc, k| acc + k * m * k.adjoint())
    }
}

/// Kraus pair `{√(1-p) I, √p σ}`.
pub fn dephasing_channel(basis: DephasingBasis, p: f64) -> Result<LocalChannel> {
    check_unit("p", p)?;
    let (sigma, label) = match basis {
        DephasingBasis::X => (pauli(1), ChannelLabel::XDephasing),
        DephasingBasis::Z => (pauli(3), ChannelLabel::ZDephasing),
    };
    Ok(LocalChannel {
        kraus: vec![
            Mat2::identity() * real(math::sqrt(1.0 - p)),
            sigma * real(math::sqrt(p)),
        ],
        label,
    })
}

/// `Σ_ij (K_i ⊗ L_j) ρ (K_i ⊗ L_j)†`.
pub fn apply_bilateral(
    rho: &DensityMatrix,
    alice: &LocalChannel,
    bob: &LocalChannel,
) -> DensityMatrix {
    let mut out = Mat4::zeros();
    for ka in alice.kraus() {
        for kb in bob.kraus() {
            let k = linalg::kron(ka, kb);
            out += k * rho.matrix() * k.adjoint();
        }
    }
    DensityMatrix::from_physical(out)
}

fn check_form_params(a: f64, b: f64, p: f64) -> Result<()> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    check_unit("p", p)
}

/// Closed form of `a|HH⟩ + b|VV⟩` after X-dephasing with the same `p` on both
/// qubits.
///
/// Entries are evaluated exactly as written; the result is validated as a
/// state but `a² + b² = 1` is not enforced (the trace is one identically).
pub fn rho_form1(a: f64, b: f64, p: f64) -> Result<DensityMatrix> {
    check_form_params(a, b, p)?;
    let q = p - 1.0;
    let b2 = b * b;
    let corner = a * b * (q * q + p * p);
    let center = 2.0 * a * b * p * (1.0 - p);
    let side = p - p * p;
    let m = Matrix4::new(
        q * q + b2 * (2.0 * p - 1.0),
        0.0,
        0.0,
        corner,
        0.0,
        side,
        center,
        0.0,
        0.0,
        center,
        side,
        0.0,
        corner,
        0.0,
        0.0,
        p * p - b2 * (2.0 * p - 1.0),
    );
    DensityMatrix::new(m.map(real))
}

/// Closed form of `a|HH⟩ + b|VV⟩` after Z-dephasing with the same `p` on both
/// qubits.
pub fn rho_form2(a: f64, b: f64, p: f64) -> Result<DensityMatrix> {
    check_form_params(a, b, p)?;
    let k = -1.0 + 2.0 * p;
    let corner = a * b * k * k;
    let m = Matrix4::new(
        a * a,
        0.0,
        0.0,
        corner,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        corner,
        0.0,
        0.0,
        b * b,
    );
    DensityMatrix::new(m.map(real))
}

/// Raw transmission operator `diag(√tH, √tV)` of tilted glass slides.
///
/// Its success probability on a state is the physical transmission.
pub fn slide_transmission(t_h: f64, t_v: f64) -> Result<LocalOp> {
    check_unit("tH", t_h)?;
    check_unit("tV", t_v)?;
    LocalOp::filter(Matrix2::new(
        real(math::sqrt(t_h)),
        ZERO,
        ZERO,
        real(math::sqrt(t_v)),
    ))
}

/// Slide filter rescaled so its largest singular value is one.
pub fn slide_filter(t_h: f64, t_v: f64) -> Result<LocalOp> {
    let raw = slide_transmission(t_h, t_v)?;
    LocalOp::normalized_filter(*raw.matrix())
}

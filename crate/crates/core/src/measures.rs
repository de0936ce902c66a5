//! Entanglement and nonlocality measures: concurrence, entanglement of
//! formation and the CHSH value.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Matrix3, Vector3};

use crate::linalg::{self, real};
use crate::math;
use crate::state::{pauli, DensityMatrix};
use crate::{Error, Mat2, Mat4, Result};

/// Eigenvalues of `ρρ̃` down to this negative value are rounding noise.
pub const NEGATIVE_EIGENVALUE_CLIP: f64 = 1e-9;

/// Measurement directions (Bloch vectors) for a CHSH test.
///
/// Components are ordered `(x, y, z)`, i.e. along `σ_1, σ_2, σ_3`, so `z`
/// is the H/V axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    pub b1: [f64; 3],
    pub b2: [f64; 3],
}

fn norm3(v: &[f64; 3]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

impl ChshSettings {
    pub fn new(a1: [f64; 3], a2: [f64; 3], b1: [f64; 3], b2: [f64; 3]) -> Result<Self> {
        for (name, v) in [("a1", &a1), ("a2", &a2), ("b1", &b1), ("b2", &b2)] {
            let n = norm3(v);
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::OutOfRange { name, value: n });
            }
        }
        Ok(ChshSettings { a1, a2, b1, b2 })
    }

    /// `a1 = z`, `a2 = x`, `b1,2 = (z ± x)/√2`: maximal for `Φ+`.
    pub fn tsirelson() -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        ChshSettings {
            a1: [0.0, 0.0, 1.0],
            a2: [1.0, 0.0, 0.0],
            b1: [s, 0.0, s],
            b2: [-s, 0.0, s],
        }
    }
}

/// Concurrence, entanglement of formation and maximal CHSH value of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSet {
    pub concurrence: f64,
    pub eof: f64,
    pub s_value: f64,
    pub settings: ChshSettings,
}

/// `ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
pub fn spin_flip(rho: &DensityMatrix) -> Mat4 {
    let yy = linalg::kron(&pauli(2), &pauli(2));
    yy * rho.matrix().map(|z| z.conj()) * yy
}

/// Wootters concurrence.
///
/// The `λ_i` are taken from the Hermitian matrix `√ρ ρ̃ √ρ`, which has the same
/// spectrum as `ρρ̃`.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let root = linalg::psd_sqrt4(rho.matrix());
    let m = root * spin_flip(rho) * root;
    let (vals, _) = linalg::eigh4(&m);
    // ascending order; clip rounding noise (and anything else) at zero
    let lambda = vals.map(|x| {
        debug_assert!(x >= -NEGATIVE_EIGENVALUE_CLIP * 10.0);
        math::sqrt(x.max(0.0))
    });
    (lambda[3] - lambda[2] - lambda[1] - lambda[0]).max(0.0)
}

/// Binary entropy in bits with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |t: f64| if t <= 0.0 { 0.0 } else { -t * math::log2(t) };
    term(x) + term(1.0 - x)
}

pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange {
            name: "concurrence",
            value: c,
        });
    }
    Ok(binary_entropy(0.5 * (1.0 + math::sqrt(1.0 - c * c))))
}

fn bloch_operator(n: &[f64; 3]) -> Mat2 {
    pauli(1) * real(n[0]) + pauli(2) * real(n[1]) + pauli(3) * real(n[2])
}

/// `E(a, b) = Tr[ρ (a·σ) ⊗ (b·σ)]`.
pub fn correlation(rho: &DensityMatrix, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let op = linalg::kron(&bloch_operator(a), &bloch_operator(b));
    (rho.matrix() * op).trace().re
}

/// `S = E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)`.
pub fn chsh_value(rho: &DensityMatrix, s: &ChshSettings) -> f64 {
    correlation(rho, &s.a1, &s.b1) + correlation(rho, &s.a1, &s.b2) + correlation(rho, &s.a2, &s.b1)
        - correlation(rho, &s.a2, &s.b2)
}

/// Maximal CHSH value of a state together with settings that reach it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshMax {
    pub s_value: f64,
    pub settings: ChshSettings,
}

fn to_array(v: &Vector3<f64>) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn unit_or(v: Vector3<f64>, fallback: Vector3<f64>) -> Vector3<f64> {
    let n = v.norm();
    if n > 1e-12 {
        v / n
    } else {
        fallback
    }
}

/// Some unit vector orthogonal to `v`.
fn orthogonal_to(v: &Vector3<f64>) -> Vector3<f64> {
    let trial = if v[0].abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    (trial - v * v.dot(&trial)).normalize()
}

/// `S_max = 2√(m1 + m2)` with `m1 ≥ m2` the two largest eigenvalues of `TᵀT`.
pub fn chsh_max(rho: &DensityMatrix) -> Result<ChshMax> {
    let t: Matrix3<f64> = rho.to_rmatrix().correlation_block();
    let eig = SymmetricEigen::new(t.transpose() * t);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let m1 = eig.eigenvalues[order[0]].max(0.0);
    let m2 = eig.eigenvalues[order[1]].max(0.0);
    if m1 + m2 < 1e-14 {
        return Err(Error::DegenerateCorrelation);
    }
    let c1: Vector3<f64> = eig.eigenvectors.column(order[0]).into_owned();
    let c2: Vector3<f64> = eig.eigenvectors.column(order[1]).into_owned();
    let chi = math::atan2(math::sqrt(m2), math::sqrt(m1));
    let b1 = (c1 * math::cos(chi) + c2 * math::sin(chi)).normalize();
    let b2 = (c1 * math::cos(chi) - c2 * math::sin(chi)).normalize();
    let a1 = unit_or(t * (b1 + b2), Vector3::z());
    let a2 = unit_or(t * (b1 - b2), orthogonal_to(&a1));
    Ok(ChshMax {
        s_value: 2.0 * math::sqrt(m1 + m2),
        settings: ChshSettings {
            a1: to_array(&a1),
            a2: to_array(&a2),
            b1: to_array(&b1),
            b2: to_array(&b2),
        },
    })
}

/// `E = (n++ + n-- - n+- - n-+) / N` from four coincidence counts.
pub fn correlation_from_counts(n_pp: u64, n_pm: u64, n_mp: u64, n_mm: u64) -> Result<f64> {
    let total = n_pp + n_pm + n_mp + n_mm;
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    Ok((n_pp as f64 + n_mm as f64 - n_pm as f64 - n_mp as f64) / total as f64)
}

/// Joint outcome probabilities `[P++, P+-, P-+, P--]` for spin measurements
/// along `a` (Alice) and `b` (Bob).
pub fn outcome_probabilities(rho: &DensityMatrix, a: &[f64; 3], b: &[f64; 3]) -> [f64; 4] {
    let proj =
        |n: &[f64; 3], sign: f64| (Mat2::identity() + bloch_operator(n) * real(sign)) * real(0.5);
    let mut out = [0.0; 4];
    for (k, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .into_iter()
        .enumerate()
    {
        let op = linalg::kron(&proj(a, sa), &proj(b, sb));
        out[k] = (rho.matrix() * op).trace().re.max(0.0);
    }
    out
}

/// All three measures. A vanishing correlation block gives `S = 0` with the
/// Tsirelson settings as placeholders.
pub fn measure_state(rho: &DensityMatrix) -> MeasureSet {
    let c = concurrence(rho).min(1.0);
    let eof = eof_from_concurrence(c).unwrap_or(0.0);
    let (s_value, settings) = match chsh_max(rho) {
        Ok(m) => (m.s_value, m.settings),
        Err(_) => {
            let s = ChshSettings::tsirelson();
            (chsh_value(rho, &s).abs(), s)
        }
    };
    MeasureSet {
        concurrence: c,
        eof,
        s_value,
        settings,
    }
}

/// Wave-plate angles `(quarter, half)` in degrees that make a QWP → HWP →
/// PBS analyzer transmit the polarization with Bloch vector `n`.
///
/// Fast-axis angles are measured from horizontal; the PBS transmits H.
pub fn waveplate_angles(n: &[f64; 3]) -> (f64, f64) {
    let len = norm3(n);
    let [x, y, z] = n.map(|v| v / len);
    let orientation = 0.5 * math::atan2(x, z);
    let ellipticity = 0.5 * math::asin(y.clamp(-1.0, 1.0));
    let quarter = orientation;
    let half = 0.5 * (orientation - ellipticity);
    (quarter.to_degrees(), half.to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ZERO};
    use crate::state::bell_vectors;
    use nalgebra::{Matrix2, Vector2, Vector4};

    fn phi_plus() -> DensityMatrix {
        DensityMatrix::from_pure(&bell_vectors()[0]).unwrap()
    }

    #[test]
    fn spin_flip_cases() {
        let phi = phi_plus();
        assert!(linalg::max_abs_diff4(&spin_flip(&phi), phi.matrix()) < 1e-15);
        let hh = DensityMatrix::from_pure(&Vector4::new(real(1.0), ZERO, ZERO, ZERO)).unwrap();
        let vv = DensityMatrix::from_pure(&Vector4::new(ZERO, ZERO, ZERO, real(1.0))).unwrap();
        assert!(linalg::max_abs_diff4(&spin_flip(&hh), vv.matrix()) < 1e-15);
    }

    #[test]
    fn concurrence_cases() {
        assert!((concurrence(&phi_plus()) - 1.0).abs() < 1e-7);
        let hh = DensityMatrix::from_pure(&Vector4::new(real(1.0), ZERO, ZERO, ZERO)).unwrap();
        assert!(concurrence(&hh) < 1e-7);
        assert!(concurrence(&DensityMatrix::maximally_mixed()) < 1e-12);
        let (a, b) = (0.3f64, (1.0f64 - 0.09).sqrt());
        let psi = DensityMatrix::from_pure(&Vector4::new(real(a), ZERO, ZERO, real(b))).unwrap();
        assert!((concurrence(&psi) - 2.0 * a * b).abs() < 1e-7);
    }

    #[test]
    fn eof_values() {
        assert_eq!(eof_from_concurrence(0.0).unwrap(), 0.0);
        assert!((eof_from_concurrence(1.0).unwrap() - 1.0).abs() < 1e-15);
        // x = (1 + √0.75)/2 = 0.9330127018922193; h(x) evaluated separately
        assert!((eof_from_concurrence(0.5).unwrap() - 0.354_578_902_665_27).abs() < 1e-12);
        assert!(eof_from_concurrence(1.2).is_err());
    }

    #[test]
    fn tsirelson_point() {
        let s = chsh_value(&phi_plus(), &ChshSettings::tsirelson());
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let m = chsh_max(&phi_plus()).unwrap();
        assert!((m.s_value - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((chsh_value(&phi_plus(), &m.settings) - m.s_value).abs() < 1e-12);
    }

    #[test]
    fn degenerate_settings_are_local() {
        let rho = phi_plus();
        let a = [0.0, 0.0, 1.0];
        let b = [0.6, 0.0, 0.8];
        let s = ChshSettings::new(a, a, b, b).unwrap();
        let v = chsh_value(&rho, &s);
        assert!((v - 2.0 * correlation(&rho, &a, &b)).abs() < 1e-14);
        assert!(v.abs() <= 2.0);
    }

    #[test]
    fn maximally_mixed_has_no_correlations() {
        assert_eq!(
            chsh_max(&DensityMatrix::maximally_mixed()),
            Err(Error::DegenerateCorrelation)
        );
        let m = measure_state(&DensityMatrix::maximally_mixed());
        assert_eq!(m.s_value, 0.0);
    }

    #[test]
    fn product_state_rank_one_correlations() {
        let hh = DensityMatrix::from_pure(&Vector4::new(real(1.0), ZERO, ZERO, ZERO)).unwrap();
        let m = chsh_max(&hh).unwrap();
        assert!((m.s_value - 2.0).abs() < 1e-12);
        assert!((chsh_value(&hh, &m.settings) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn count_correlations() {
        assert_eq!(correlation_from_counts(100, 0, 0, 100).unwrap(), 1.0);
        assert_eq!(correlation_from_counts(50, 50, 50, 50).unwrap(), 0.0);
        assert_eq!(correlation_from_counts(0, 0, 0, 0), Err(Error::EmptyCounts));
    }

    #[test]
    fn outcome_probabilities_match_correlation() {
        let rho = phi_plus();
        let s = ChshSettings::tsirelson();
        let p = outcome_probabilities(&rho, &s.a1, &s.b1);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let e = p[0] - p[1] - p[2] + p[3];
        assert!((e - correlation(&rho, &s.a1, &s.b1)).abs() < 1e-14);
    }

    fn jones_hwp(t: f64) -> Mat2 {
        let (s, c2) = ((2.0 * t).sin(), (2.0 * t).cos());
        Matrix2::new(real(c2), real(s), real(s), real(-c2))
    }

    fn jones_qwp(t: f64) -> Mat2 {
        let (s, co) = (t.sin(), t.cos());
        Matrix2::new(
            c(co * co, s * s),
            c(s * co, -s * co),
            c(s * co, -s * co),
            c(s * s, co * co),
        )
    }

    #[test]
    fn waveplates_select_requested_polarization() {
        let dirs = [
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.48, 0.6, 0.64],
            [-0.36, -0.48, 0.8],
        ];
        for n in dirs {
            let (q, h) = waveplate_angles(&n);
            let analyzer = jones_hwp(h.to_radians()) * jones_qwp(q.to_radians());
            let psi: Vector2<_> = analyzer.adjoint() * Vector2::new(real(1.0), ZERO);
            let rho = psi * psi.adjoint();
            let bloch = [1, 2, 3].map(|k| (rho * pauli(k)).trace().re);
            for k in 0..3 {
                assert!((bloch[k] - n[k]).abs() < 1e-12, "{n:?} -> {bloch:?}");
            }
        }
    }
}

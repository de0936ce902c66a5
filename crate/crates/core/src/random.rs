//! Seeded generators of random states and operators.
//!
//! Random mixed states are `G G† / Tr(G G†)` with `G` a 4x4 matrix of
//! standard complex Gaussians, which is full rank almost surely.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector4};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, c, real};
use crate::math;
use crate::state::{DensityMatrix, LocalOp};
use crate::{Mat2, C64};

/// The generator used everywhere in this crate.
pub type Generator = ChaCha20Rng;

/// Independent substream `(seed, domain, index)`.
///
/// Each task draws from its own ChaCha stream, so results do not depend on
/// the order (or thread) in which tasks run.
pub fn substream(seed: u64, domain: u32, index: u32) -> Generator {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 32) | index as u64);
    rng
}

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_density<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let g = Matrix4::from_fn(|_, _| gaussian_c(rng));
    DensityMatrix::from_physical(g * g.adjoint())
}

pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector4<C64> {
    let v = Vector4::from_fn(|_, _| gaussian_c(rng));
    let n = v.norm();
    v / real(n)
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let v = random_pure_vector(rng);
    DensityMatrix::from_physical(v * v.adjoint())
}

fn unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = core::array::from_fn(|_| rng.sample(StandardNormal));
        let n = math::sqrt(q.iter().map(|x| x * x).sum());
        if n > 1e-8 {
            return q.map(|x| x / n);
        }
    }
}

/// Haar-random SU(2) element.
pub fn random_su2_matrix<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let [w, x, y, z] = unit_quaternion(rng);
    Matrix2::new(c(w, -z), c(-y, -x), c(y, -x), c(w, z))
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> LocalOp {
    // a random global phase as well, so callers exercise U(2) not only SU(2)
    let phase: f64 = rng.random_range(0.0..core::f64::consts::TAU);
    let m = random_su2_matrix(rng) * c(math::cos(phase), math::sin(phase));
    LocalOp::unitary(m).expect("Haar sample is unitary")
}

/// A physical filter `U diag(1, α) V` with Haar `U, V` and `α ~ U(0, 1)`.
pub fn random_filter<R: Rng + ?Sized>(rng: &mut R) -> LocalOp {
    let alpha: f64 = rng.random_range(0.0..1.0);
    let u = random_su2_matrix(rng);
    let v = random_su2_matrix(rng);
    let d = Matrix2::new(real(1.0), real(0.0), real(0.0), real(alpha));
    LocalOp::normalized_filter(u * d * v).expect("nonzero filter")
}

/// Gaussian 2x2 operator rescaled to determinant one.
pub fn random_sl2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    loop {
        let m = Matrix2::from_fn(|_, _| gaussian_c(rng));
        let det = m.determinant();
        if linalg::cabs(det) > 1e-6 {
            // principal square root of det
            let r = math::sqrt(linalg::cabs(det));
            let half = 0.5 * math::atan2(det.im, det.re);
            let root = c(r * math::cos(half), r * math::sin(half));
            return m / root;
        }
    }
}

/// Uniformly random proper rotation.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let [w, x, y, z] = unit_quaternion(rng);
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

/// Random unit vector in three dimensions.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = core::array::from_fn(|_| rng.sample(StandardNormal));
        let n = math::sqrt(v.iter().map(|x| x * x).sum());
        if n > 1e-8 {
            return v.map(|x| x / n);
        }
    }
}

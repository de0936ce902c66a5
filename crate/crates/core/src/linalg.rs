//! Small dense helpers shared by the physics modules.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use crate::math;
use crate::{Mat2, Mat4, C64};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Modulus of a complex number.
pub fn cabs(z: C64) -> f64 {
    math::sqrt(z.norm_sqr())
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub fn trace4(m: &Mat4) -> C64 {
    m[(0, 0)] + m[(1, 1)] + m[(2, 2)] + m[(3, 3)]
}

pub fn trace2(m: &Mat2) -> C64 {
    m[(0, 0)] + m[(1, 1)]
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff4(a: &Mat4, b: &Mat4) -> f64 {
    math::sqrt((a - b).iter().map(|z| z.norm_sqr()).fold(0.0, f64::max))
}

pub fn max_abs_diff2(a: &Mat2, b: &Mat2) -> f64 {
    math::sqrt((a - b).iter().map(|z| z.norm_sqr()).fold(0.0, f64::max))
}

pub fn hermitian_part4(m: &Mat4) -> Mat4 {
    (m + m.adjoint()) * real(0.5)
}

/// Eigen-decomposition of a Hermitian 4x4 matrix, eigenvalues ascending.
pub fn eigh4(m: &Mat4) -> (Vector4<f64>, Mat4) {
    let eig = SymmetricEigen::new(hermitian_part4(m));
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = Vector4::from_fn(|k, _| eig.eigenvalues[order[k]]);
    let vectors = Matrix4::from_fn(|r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Eigen-decomposition of a Hermitian 2x2 matrix, eigenvalues ascending.
pub fn eigh2(m: &Mat2) -> (Vector2<f64>, Mat2) {
    let h = (m + m.adjoint()) * real(0.5);
    let eig = SymmetricEigen::new(h);
    let (lo, hi) = if eig.eigenvalues[0] <= eig.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let values = Vector2::new(eig.eigenvalues[lo], eig.eigenvalues[hi]);
    let vectors = Matrix2::from_fn(|r, k| eig.eigenvectors[(r, if k == 0 { lo } else { hi })]);
    (values, vectors)
}

/// `V diag(f(λ)) V†` for Hermitian `m`.
pub fn hermitian_map4(m: &Mat4, f: impl Fn(f64) -> f64) -> Mat4 {
    let (vals, vecs) = eigh4(m);
    let d = Matrix4::from_diagonal(&vals.map(|x| real(f(x))));
    vecs * d * vecs.adjoint()
}

/// Principal square root of a PSD matrix (negative rounding noise clipped).
pub fn psd_sqrt4(m: &Mat4) -> Mat4 {
    hermitian_map4(m, |x| math::sqrt(x.max(0.0)))
}

/// Singular values `(largest, smallest)` of a 2x2 matrix.
pub fn singular_values2(m: &Mat2) -> (f64, f64) {
    let g = m.adjoint() * m;
    let a = g[(0, 0)].re;
    let d = g[(1, 1)].re;
    let off = g[(0, 1)].norm_sqr();
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let disc = math::sqrt(half * half + off);
    let hi = mean + disc;
    // product of eigenvalues is |det|^2; avoids cancellation in the small one
    let det2 = m.determinant().norm_sqr();
    let lo = if hi > 0.0 { det2 / hi } else { 0.0 };
    (math::sqrt(hi.max(0.0)), math::sqrt(lo.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_values_of_diagonal() {
        let m = Matrix2::new(real(0.3), ZERO, ZERO, c(0.0, -2.0));
        let (hi, lo) = singular_values2(&m);
        assert!((hi - 2.0).abs() < 1e-15);
        assert!((lo - 0.3).abs() < 1e-15);
    }

    #[test]
    fn eigh4_sorted_and_reconstructs() {
        let m = Matrix4::from_fn(|r, c| {
            let x = (r * 4 + c) as f64;
            C64::new(x.sin(), if r == c { 0.0 } else { (x * 0.7).cos() })
        });
        let h = hermitian_part4(&m);
        let (vals, vecs) = eigh4(&h);
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2] && vals[2] <= vals[3]);
        let back = vecs * Matrix4::from_diagonal(&vals.map(real)) * vecs.adjoint();
        assert!(max_abs_diff4(&back, &h) < 1e-12);
    }
}

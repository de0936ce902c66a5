#![allow(dead_code)]

use bellfilter_core::random::{self, Generator};
use bellfilter_core::{DensityMatrix, C64};
use nalgebra::{Matrix2, Matrix4, Vector4};

pub type Mat4 = Matrix4<C64>;
pub type Mat2 = Matrix2<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> Generator {
    random::substream(seed, 100, 0)
}

pub fn cabs(z: C64) -> f64 {
    z.re.hypot(z.im)
}

pub fn max_diff4(a: &Mat4, b: &Mat4) -> f64 {
    (a - b).iter().map(|z| cabs(*z)).fold(0.0, f64::max)
}

pub fn max_diff2(a: &Mat2, b: &Mat2) -> f64 {
    (a - b).iter().map(|z| cabs(*z)).fold(0.0, f64::max)
}

pub fn ket(amps: [C64; 4]) -> Vector4<C64> {
    Vector4::new(amps[0], amps[1], amps[2], amps[3])
}

pub fn pure(amps: [C64; 4]) -> DensityMatrix {
    DensityMatrix::from_pure(&ket(amps)).unwrap()
}

pub fn diag2(x: f64, y: f64) -> Mat2 {
    Matrix2::new(c(x, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(y, 0.0))
}

pub fn sigma_x() -> Mat2 {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// Smallest singular value of a filter normalized to largest one.
pub fn singular_ratio(m: &Mat2) -> f64 {
    let svd = m.svd(false, false);
    let (hi, lo) = (svd.singular_values.max(), svd.singular_values.min());
    lo / hi
}

pub fn sorted(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

//! Simulated photon-counting state tomography.
//!
//! Sixteen product projectors built from `|H⟩, |V⟩, |D⟩ = (|H⟩+|V⟩)/√2` and
//! `|L⟩ = (|H⟩+i|V⟩)/√2` are counted with Poisson statistics. States are
//! recovered by linear inversion or by maximum likelihood over the
//! parametrization `ρ = T†T / Tr(T†T)` with `T` lower triangular.

use alloc::vec::Vec;

use nalgebra::{Matrix4, SMatrix, SVector, Vector2, Vector4};
use rand_distr::{Distribution, Poisson};

use crate::linalg::{self, c, real, ZERO};
use crate::math;
use crate::measures;
use crate::random::{self, Generator};
use crate::state::{pauli_products, DensityMatrix};
use crate::{Error, Mat4, Result, C64};

pub const SETTINGS: usize = 16;
pub const DEFAULT_BUDGET: f64 = 1e4;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 5000;
pub const DEFAULT_RESAMPLES: usize = 100;
/// Weight of `I/4` mixed into the PSD-projected linear estimate so the
/// likelihood search starts at a full-rank point.
pub const START_MIXING: f64 = 1e-3;

/// RNG substream domains.
pub const DOMAIN_COUNTS: u32 = 1;
pub const DOMAIN_BOOTSTRAP: u32 = 2;
pub const DOMAIN_CORRELATION: u32 = 3;

/// Single-photon analysis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
    /// `(|H⟩ + |V⟩)/√2`
    D,
    /// `(|H⟩ + i|V⟩)/√2`
    L,
}

impl Polarization {
    pub const ALL: [Polarization; 4] = [
        Polarization::H,
        Polarization::V,
        Polarization::D,
        Polarization::L,
    ];

    pub fn label(self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
            Polarization::D => 'D',
            Polarization::L => 'L',
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "H" => Some(Polarization::H),
            "V" => Some(Polarization::V),
            "D" => Some(Polarization::D),
            "L" => Some(Polarization::L),
            _ => None,
        }
    }

    pub fn vector(self) -> Vector2<C64> {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        match self {
            Polarization::H => Vector2::new(real(1.0), ZERO),
            Polarization::V => Vector2::new(ZERO, real(1.0)),
            Polarization::D => Vector2::new(real(s), real(s)),
            Polarization::L => Vector2::new(real(s), c(0.0, s)),
        }
    }
}

/// The sixteen analysis settings, Alice-major: `HH, HV, HD, HL, VH, …, LL`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectorSet {
    entries: [(Polarization, Polarization); SETTINGS],
}

impl Default for ProjectorSet {
    fn default() -> Self {
        tomography_projectors()
    }
}

impl ProjectorSet {
    pub fn entries(&self) -> &[(Polarization, Polarization); SETTINGS] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        SETTINGS
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Two-photon analysis vector `|α⟩ ⊗ |β⟩` for setting `i`.
    pub fn vector(&self, i: usize) -> Vector4<C64> {
        let (a, b) = self.entries[i];
        let (va, vb) = (a.vector(), b.vector());
        Vector4::from_fn(|k, _| va[k / 2] * vb[k % 2])
    }

    pub fn projector(&self, i: usize) -> Mat4 {
        let v = self.vector(i);
        v * v.adjoint()
    }

    /// `Tr(ρ P_i)` for every setting.
    pub fn probabilities(&self, rho: &Mat4) -> [f64; SETTINGS] {
        core::array::from_fn(|i| {
            let v = self.vector(i);
            (v.adjoint() * rho * v)[(0, 0)].re
        })
    }

    /// Gram matrix `G_ij = Tr(P_i P_j)`.
    pub fn gram(&self) -> SMatrix<f64, SETTINGS, SETTINGS> {
        SMatrix::from_fn(|i, j| (self.projector(i) * self.projector(j)).trace().re)
    }
}

pub fn tomography_projectors() -> ProjectorSet {
    let entries = core::array::from_fn(|i| (Polarization::ALL[i / 4], Polarization::ALL[i % 4]));
    ProjectorSet { entries }
}

/// Coincidence counts for the sixteen settings.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub settings: ProjectorSet,
    pub counts: [u64; SETTINGS],
    /// Expected number of pairs analyzed per setting.
    pub budget: f64,
    pub seed: u64,
}

impl MeasurementRecord {
    pub fn new(counts: &[u64], budget: f64, seed: u64) -> Result<Self> {
        if counts.len() != SETTINGS {
            return Err(Error::CountLength {
                expected: SETTINGS,
                got: counts.len(),
            });
        }
        if !(budget > 0.0 && budget.is_finite()) {
            return Err(Error::OutOfRange {
                name: "budget",
                value: budget,
            });
        }
        Ok(MeasurementRecord {
            settings: tomography_projectors(),
            counts: core::array::from_fn(|i| counts[i]),
            budget,
            seed,
        })
    }

    /// Counts equal to the rounded expected values, without shot noise.
    pub fn expected(rho: &DensityMatrix, budget: f64) -> Result<Self> {
        let settings = tomography_projectors();
        let probs = settings.probabilities(rho.matrix());
        let counts = probs.map(|p| math::round(budget * p.max(0.0)) as u64);
        Self::new(&counts, budget, 0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn poisson_draw(mean: f64, rng: &mut Generator) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(dist) => dist.sample(rng) as u64,
        Err(_) => math::round(mean) as u64,
    }
}

/// Poisson counts with means `budget · Tr(ρ P_i)`; setting `i` draws from
/// substream `(seed, DOMAIN_COUNTS, i)`.
pub fn simulate_counts(rho: &DensityMatrix, budget: f64, seed: u64) -> Result<MeasurementRecord> {
    let settings = tomography_projectors();
    let probs = settings.probabilities(rho.matrix());
    let counts: [u64; SETTINGS] = core::array::from_fn(|i| {
        let mut rng = random::substream(seed, DOMAIN_COUNTS, i as u32);
        poisson_draw(budget * probs[i].max(0.0), &mut rng)
    });
    MeasurementRecord::new(&counts, budget, seed)
}

/// Poisson counts `[n++, n+-, n-+, n--]` for one pair of CHSH directions.
pub fn simulate_correlation_counts(
    rho: &DensityMatrix,
    a: &[f64; 3],
    b: &[f64; 3],
    pairs: f64,
    seed: u64,
) -> [u64; 4] {
    let probs = measures::outcome_probabilities(rho, a, b);
    core::array::from_fn(|k| {
        let mut rng = random::substream(seed, DOMAIN_CORRELATION, k as u32);
        poisson_draw(pairs * probs[k], &mut rng)
    })
}

/// Linear-inversion estimate; Hermitian with unit trace but possibly not PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEstimate {
    pub matrix: Mat4,
    pub min_eigenvalue: f64,
    pub is_psd: bool,
}

/// Solves `Tr(ρ̂ P_i) = n_i / budget` over the Pauli expansion of `ρ̂`.
pub fn linear_reconstruct(rec: &MeasurementRecord) -> Result<LinearEstimate> {
    let products = pauli_products();
    let basis: [Mat4; SETTINGS] = core::array::from_fn(|k| products[k / 4][k % 4] * real(0.25));
    let system = SMatrix::<f64, SETTINGS, SETTINGS>::from_fn(|i, k| {
        (rec.settings.projector(i) * basis[k]).trace().re
    });
    let rhs = SVector::<f64, SETTINGS>::from_fn(|i, _| rec.counts[i] as f64 / rec.budget);
    let coeffs = system.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    let mut m = Mat4::zeros();
    for (k, b) in basis.iter().enumerate() {
        m += b * real(coeffs[k]);
    }
    let trace = linalg::trace4(&m).re;
    if !(trace > 0.0) {
        return Err(Error::AllZeroCounts);
    }
    let matrix = linalg::hermitian_part4(&(m / real(trace)));
    let (vals, _) = linalg::eigh4(&matrix);
    Ok(LinearEstimate {
        matrix,
        min_eigenvalue: vals[0],
        is_psd: vals[0] >= 0.0,
    })
}

/// Output of the likelihood maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub state: DensityMatrix,
    /// Poisson negative log-likelihood `Σ [N p_i - n_i ln(N p_i)]` at `state`.
    pub nll: f64,
    /// The same quantity at the (mixed, PSD-projected) linear starting point.
    pub start_nll: f64,
    pub iterations: usize,
    pub converged: bool,
}

type Params = SVector<f64, 16>;
type Hessian = SMatrix<f64, 16, 16>;

/// Lower-triangular `T` from 16 reals: the real diagonal, then real and
/// imaginary parts of the six entries below it.
fn t_from_params(x: &Params) -> Mat4 {
    let mut t = Mat4::zeros();
    for k in 0..4 {
        t[(k, k)] = real(x[k]);
    }
    let mut idx = 4;
    for row in 1..4 {
        for col in 0..row {
            t[(row, col)] = c(x[idx], x[idx + 1]);
            idx += 2;
        }
    }
    t
}

fn params_from_t(t: &Mat4) -> Params {
    let mut x = Params::zeros();
    for k in 0..4 {
        x[k] = t[(k, k)].re;
    }
    let mut idx = 4;
    for row in 1..4 {
        for col in 0..row {
            x[idx] = t[(row, col)].re;
            x[idx + 1] = t[(row, col)].im;
            idx += 2;
        }
    }
    x
}

/// Lower-triangular `T` with `T†T = ρ` for a positive definite `ρ`.
fn lower_factor(rho: &Mat4) -> Option<Mat4> {
    let flip = Matrix4::from_fn(|r, c| if r + c == 3 { real(1.0) } else { ZERO });
    let chol = (flip * rho * flip).cholesky()?;
    let l = chol.l();
    Some(flip * l.adjoint() * flip)
}

struct Likelihood<'a> {
    rec: &'a MeasurementRecord,
    vectors: [Vector4<C64>; SETTINGS],
}

impl<'a> Likelihood<'a> {
    fn new(rec: &'a MeasurementRecord) -> Self {
        Likelihood {
            rec,
            vectors: core::array::from_fn(|i| rec.settings.vector(i)),
        }
    }

    fn probabilities(&self, rho: &Mat4) -> [f64; SETTINGS] {
        core::array::from_fn(|i| {
            let v = &self.vectors[i];
            (v.adjoint() * rho * v)[(0, 0)].re
        })
    }

    fn nll_of_state(&self, rho: &Mat4) -> f64 {
        let n = self.rec.budget;
        let probs = self.probabilities(rho);
        let mut total = 0.0;
        for (p, &count) in probs.iter().zip(self.rec.counts.iter()) {
            let mean = n * p;
            if count > 0 {
                if !(mean > 0.0) {
                    return f64::INFINITY;
                }
                total += mean - count as f64 * math::ln(mean);
            } else {
                total += mean.max(0.0);
            }
        }
        total
    }

    fn state(x: &Params) -> (Mat4, Mat4, f64) {
        let t = t_from_params(x);
        let m = t.adjoint() * t;
        let tau = linalg::trace4(&m).re;
        (t, m / real(tau), tau)
    }

    fn value(&self, x: &Params) -> f64 {
        let (_, rho, tau) = Self::state(x);
        if !(tau > 0.0) {
            return f64::INFINITY;
        }
        self.nll_of_state(&rho)
    }

    fn value_and_gradient(&self, x: &Params) -> (f64, Params) {
        let (t, rho, tau) = Self::state(x);
        let f = self.nll_of_state(&rho);
        let n = self.rec.budget;
        let probs = self.probabilities(&rho);
        // dNLL/dρ = Σ (N - n_i/p_i) P_i
        let mut g = Mat4::zeros();
        for (i, v) in self.vectors.iter().enumerate() {
            let count = self.rec.counts[i] as f64;
            let weight = if count > 0.0 { n - count / probs[i] } else { n };
            g += v * v.adjoint() * real(weight);
        }
        let shift = (g * rho).trace().re;
        let g = (g - Mat4::identity() * real(shift)) / real(tau);
        // dNLL = 2 Re Tr(G T† dT)
        let x_mat = g * t.adjoint();
        let mut grad = Params::zeros();
        for k in 0..4 {
            grad[k] = 2.0 * x_mat[(k, k)].re;
        }
        let mut idx = 4;
        for row in 1..4 {
            for col in 0..row {
                let z = x_mat[(col, row)];
                grad[idx] = 2.0 * z.re;
                grad[idx + 1] = -2.0 * z.im;
                idx += 2;
            }
        }
        (f, grad)
    }
}

/// Start of the likelihood search: linear estimate with negative eigenvalues
/// clipped, mixed with `START_MIXING · I/4`.
fn starting_state(rec: &MeasurementRecord) -> Result<Mat4> {
    let lin = linear_reconstruct(rec)?;
    let clipped = linalg::hermitian_map4(&lin.matrix, |x| x.max(0.0));
    let tr = linalg::trace4(&clipped).re;
    let projected = if tr > 0.0 {
        clipped / real(tr)
    } else {
        Mat4::identity() * real(0.25)
    };
    Ok(projected * real(1.0 - START_MIXING) + Mat4::identity() * real(0.25 * START_MIXING))
}

/// Maximum-likelihood state by quasi-Newton descent (BFGS with Armijo
/// backtracking) on the Cholesky parameters.
///
/// Every accepted step lowers the likelihood objective; iteration stops when
/// an accepted step lowers it by less than `tol` per recorded count.
pub fn mle_reconstruct(
    rec: &MeasurementRecord,
    tol: f64,
    max_iter: usize,
) -> Result<ReconstructionResult> {
    if rec.total() == 0 {
        return Err(Error::AllZeroCounts);
    }
    let lik = Likelihood::new(rec);
    let start = starting_state(rec)?;
    let t0 = lower_factor(&start).ok_or(Error::SingularSystem)?;
    let mut x = params_from_t(&t0);
    let scale = rec.total() as f64;

    let (mut f, mut g) = lik.value_and_gradient(&x);
    let start_nll = f;
    let mut h = Hessian::identity();
    let mut converged = false;
    let mut iterations = 0;
    let mut fresh_h = true;

    while iterations < max_iter {
        iterations += 1;
        let mut d = -(h * g);
        let mut slope = g.dot(&d);
        if !(slope < 0.0) {
            h = Hessian::identity();
            fresh_h = true;
            d = -g;
            slope = -g.norm_squared();
        }
        if slope == 0.0 {
            converged = true;
            break;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = x + d * step;
            let ft = lik.value(&trial);
            if ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, _)) = accepted else {
            if fresh_h {
                // no descent along the gradient: numerical minimum
                converged = true;
                break;
            }
            h = Hessian::identity();
            fresh_h = true;
            continue;
        };
        let (f_new, g_new) = lik.value_and_gradient(&x_new);
        let s = x_new - x;
        let y = g_new - g;
        let decrease = f - f_new;
        x = x_new;
        f = f_new;
        g = g_new;

        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho_k = 1.0 / sy;
            let hy = h * y;
            let yhy = y.dot(&hy);
            h += (s * s.transpose()) * (rho_k * rho_k * yhy + rho_k)
                - (hy * s.transpose() + s * hy.transpose()) * rho_k;
            fresh_h = false;
        }
        if decrease / scale < tol {
            converged = true;
            break;
        }
    }

    let (_, rho, _) = Likelihood::state(&x);
    Ok(ReconstructionResult {
        state: DensityMatrix::from_physical(rho),
        nll: f,
        start_nll,
        iterations,
        converged,
    })
}

/// `mean ± std` (sample standard deviation) over bootstrap resamples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapSummary {
    pub mean: f64,
    pub std: f64,
    pub resamples: usize,
    pub failures: usize,
}

pub fn summarize(values: &[f64], failures: usize) -> BootstrapSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    BootstrapSummary {
        mean,
        std: math::sqrt(var),
        resamples: values.len() + failures,
        failures,
    }
}

/// Reconstructed states of parametric Poisson resamples `n'_i ~ Poisson(n_i)`.
///
/// Resample `r`, setting `i` draws from substream
/// `(seed, DOMAIN_BOOTSTRAP, 16 r + i)`. Failed reconstructions are counted,
/// not returned.
pub fn bootstrap_states(
    rec: &MeasurementRecord,
    resamples: usize,
    seed: u64,
) -> Result<(Vec<DensityMatrix>, usize)> {
    if resamples < 2 {
        return Err(Error::OutOfRange {
            name: "resamples",
            value: resamples as f64,
        });
    }
    let mut states = Vec::with_capacity(resamples);
    let mut failures = 0;
    for r in 0..resamples {
        let counts: [u64; SETTINGS] = core::array::from_fn(|i| {
            let mut rng = random::substream(seed, DOMAIN_BOOTSTRAP, (r * SETTINGS + i) as u32);
            poisson_draw(rec.counts[i] as f64, &mut rng)
        });
        let resampled = MeasurementRecord {
            counts,
            ..rec.clone()
        };
        match mle_reconstruct(&resampled, DEFAULT_TOL, DEFAULT_MAX_ITER) {
            Ok(res) => states.push(res.state),
            Err(_) => failures += 1,
        }
    }
    if states.len() < 2 {
        return Err(Error::BootstrapFailed {
            succeeded: states.len(),
            resamples,
        });
    }
    Ok((states, failures))
}

pub fn bootstrap_measure<F>(
    rec: &MeasurementRecord,
    resamples: usize,
    estimator: F,
    seed: u64,
) -> Result<BootstrapSummary>
where
    F: Fn(&DensityMatrix) -> f64,
{
    let (states, failures) = bootstrap_states(rec, resamples, seed)?;
    let values: Vec<f64> = states.iter().map(estimator).collect();
    Ok(summarize(&values, failures))
}

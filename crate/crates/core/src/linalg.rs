//! Scalar-generic dense kernels: matrix exponential, principal logarithm,
//! principal square root, polar factor, and eigenvalue extraction.
//!
//! All kernels are written once over `ComplexField` so the same code path
//! serves real (`f64`) and complex (`Complex<f64>`) matrices. Sizes here are
//! small (3x3 to 7x7), so clarity wins over blocking tricks.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

/// Failure modes of the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum KernelError {
    /// An iterate became singular (matrix has no principal root/log, or the
    /// input was not invertible).
    Singular,
    /// The iteration did not meet its tolerance within the step budget.
    NoConvergence,
}

fn scalar<T: ComplexField<RealField = f64>>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Maximum absolute column sum, the operator 1-norm.
fn norm_l1<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.clone().modulus()).sum())
        .fold(0.0, f64::max)
}

fn frobenius_distance_from_identity<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    let mut sum = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let d = if i == j {
                a[(i, j)].clone() - T::one()
            } else {
                a[(i, j)].clone()
            };
            sum += d.modulus_squared();
        }
    }
    sum.sqrt()
}

// Scaling-and-squaring matrix exponential with the Pade ladder from
// Higham, "The Scaling and Squaring Method for the Matrix Exponential
// Revisited". Degree is picked from the 1-norm; above the degree-13
// threshold the argument is halved until it fits.
pub(crate) fn expm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> DMatrix<T> {
    let norm = norm_l1(a);
    let (u, v, squarings) = if norm < 1.495_585_217_958_292e-2 {
        let (u, v) = pade_uv(a, &PADE3);
        (u, v, 0)
    } else if norm < 2.539_398_330_063_23e-1 {
        let (u, v) = pade_uv(a, &PADE5);
        (u, v, 0)
    } else if norm < 9.504_178_996_162_932e-1 {
        let (u, v) = pade_uv(a, &PADE7);
        (u, v, 0)
    } else if norm < 2.097_847_961_257_068 {
        let (u, v) = pade_uv(a, &PADE9);
        (u, v, 0)
    } else {
        const THETA13: f64 = 5.371_920_351_148_152;
        let squarings = ((norm / THETA13).log2().ceil() as i32).max(0);
        let scaled = a.map(|x| x * scalar::<T>(2f64.powi(-squarings)));
        let (u, v) = pade13_uv(&scaled);
        (u, v, squarings)
    };

    // Pade approximant is (V + U) / (V - U).
    let numer = &v + &u;
    let denom = &v - &u;
    let mut result = denom
        .lu()
        .solve(&numer)
        .expect("Pade denominator is nonsingular below the scaling threshold");
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1512.0,
    56.0,
    1.0,
];
const PADE9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn pade_uv<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    coeffs: &[f64],
) -> (DMatrix<T>, DMatrix<T>) {
    let n = a.nrows();
    let ident = DMatrix::<T>::identity(n, n);
    // Even powers of A: I, A^2, A^4, ...
    let a2 = a * a;
    let mut powers = vec![ident];
    while powers.len() * 2 < coeffs.len() {
        powers.push(powers.last().unwrap() * &a2);
    }
    let mut odd = DMatrix::<T>::zeros(n, n);
    let mut even = DMatrix::<T>::zeros(n, n);
    for (k, c) in coeffs.iter().enumerate() {
        let term = &powers[k / 2] * scalar::<T>(*c);
        if k % 2 == 1 {
            odd += term;
        } else {
            even += term;
        }
    }
    (a * odd, even)
}

fn pade13_uv<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    let n = a.nrows();
    let ident = DMatrix::<T>::identity(n, n);
    let b = &PADE13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let w = &a6 * scalar::<T>(b[13]) + &a4 * scalar::<T>(b[11]) + &a2 * scalar::<T>(b[9]);
    let u_inner = &a6 * w
        + &a6 * scalar::<T>(b[7])
        + &a4 * scalar::<T>(b[5])
        + &a2 * scalar::<T>(b[3])
        + &ident * scalar::<T>(b[1]);
    let u = a * u_inner;

    let w2 = &a6 * scalar::<T>(b[12]) + &a4 * scalar::<T>(b[10]) + &a2 * scalar::<T>(b[8]);
    let v = &a6 * w2
        + &a6 * scalar::<T>(b[6])
        + &a4 * scalar::<T>(b[4])
        + &a2 * scalar::<T>(b[2])
        + &ident * scalar::<T>(b[0]);
    (u, v)
}

/// Denman-Beavers iteration for the principal matrix square root.
///
/// Converges quadratically for matrices whose spectrum avoids the closed
/// non-positive real axis. The companion iterate tracks the inverse root,
/// so each step needs two inverses; fine at these sizes.
pub(crate) fn sqrtm_denman_beavers<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    tol: f64,
    max_iter: usize,
) -> Result<DMatrix<T>, KernelError> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<T>::identity(n, n);
    let half = scalar::<T>(0.5);
    for _ in 0..max_iter {
        let z_inv = z.clone().try_inverse().ok_or(KernelError::Singular)?;
        let y_inv = y.clone().try_inverse().ok_or(KernelError::Singular)?;
        let y_next = (&y + z_inv) * half.clone();
        let z_next = (&z + y_inv) * half.clone();
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta <= tol * y.norm().max(1.0) {
            return Ok(y);
        }
    }
    Err(KernelError::NoConvergence)
}

/// Convergence tolerance for the square-root iteration.
pub(crate) const SQRT_TOL: f64 = 1e-14;
/// Step budget for the square-root iteration.
pub(crate) const SQRT_MAX_ITER: usize = 50;

/// How close to the identity the argument must be before the log series
/// is evaluated directly.
const LOG_SERIES_RADIUS: f64 = 0.5;
/// Cap on the number of square roots taken while shrinking the argument.
const LOG_MAX_SQRT: usize = 40;

/// Principal matrix logarithm by inverse scaling and squaring: take
/// principal square roots until the argument sits within the series
/// radius, sum the Mercator series, then undo the scaling.
///
/// The caller is responsible for checking that the spectrum avoids the
/// non-positive real axis; this routine only reports iteration failures.
pub(crate) fn logm<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
) -> Result<DMatrix<T>, KernelError> {
    let mut x = a.clone();
    let mut sqrt_count = 0u32;
    while frobenius_distance_from_identity(&x) >= LOG_SERIES_RADIUS {
        if sqrt_count as usize >= LOG_MAX_SQRT {
            return Err(KernelError::NoConvergence);
        }
        x = sqrtm_denman_beavers(&x, SQRT_TOL, SQRT_MAX_ITER)?;
        sqrt_count += 1;
    }
    let series = log_series_to_tolerance(&x);
    Ok(series * scalar::<T>(2f64.powi(sqrt_count as i32)))
}

/// Mercator series for `log(I + E)` summed until the next term falls below
/// the floating-point floor. Only valid inside the convergence radius.
fn log_series_to_tolerance<T: ComplexField<RealField = f64>>(x: &DMatrix<T>) -> DMatrix<T> {
    let n = x.nrows();
    let e = x - DMatrix::<T>::identity(n, n);
    let mut acc = DMatrix::<T>::zeros(n, n);
    let mut power = e.clone();
    for k in 1..=160usize {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = &power * scalar::<T>(sign / k as f64);
        let term_norm = term.norm();
        acc += term;
        if term_norm < 1e-18 * acc.norm().max(1.0) {
            break;
        }
        power = &power * &e;
    }
    acc
}

/// Fixed-length partial sum of the log series, for use as a test oracle.
/// Returns exactly `terms` terms with no early exit.
pub(crate) fn log_series_partial<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    terms: usize,
) -> DMatrix<T> {
    let n = a.nrows();
    let e = a - DMatrix::<T>::identity(n, n);
    let mut acc = DMatrix::<T>::zeros(n, n);
    let mut power = e.clone();
    for k in 1..=terms {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        acc += &power * scalar::<T>(sign / k as f64);
        if k < terms {
            power = &power * &e;
        }
    }
    acc
}

/// Unitary (orthogonal) polar factor via the Newton iteration
/// `Q <- (Q + Q^{-*}) / 2`. Converges globally for invertible input.
pub(crate) fn polar_factor<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
) -> Result<DMatrix<T>, KernelError> {
    let mut q = a.clone();
    let half = scalar::<T>(0.5);
    for _ in 0..40 {
        let q_inv_adj = q
            .clone()
            .try_inverse()
            .ok_or(KernelError::Singular)?
            .adjoint();
        let q_next = (&q + q_inv_adj) * half.clone();
        let delta = (&q_next - &q).norm();
        q = q_next;
        if delta <= 1e-15 * q.norm().max(1.0) {
            return Ok(q);
        }
    }
    Err(KernelError::NoConvergence)
}

const SCHUR_EPS: f64 = 1e-13;
const SCHUR_MAX_ITER: usize = 200;

/// Eigenvalues of a real matrix, as complex numbers.
pub(crate) fn eigenvalues_real(a: &DMatrix<f64>) -> Result<Vec<Complex64>, KernelError> {
    let schur = a
        .clone()
        .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(KernelError::NoConvergence)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Eigenvalues of a complex matrix.
pub(crate) fn eigenvalues_complex(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>, KernelError> {
    let schur = a
        .clone()
        .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(KernelError::NoConvergence)?;
    let vals = schur.eigenvalues().ok_or(KernelError::NoConvergence)?;
    Ok(vals.iter().copied().collect())
}

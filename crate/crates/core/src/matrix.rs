//! A square matrix over the reals or the complex numbers.
//!
//! Real groups (SO, SE, GL0) store real matrices; unitary and complex
//! linear groups store complex ones. The enum keeps the two storage types
//! apart so the real hot path never pays for complex arithmetic, while the
//! numerical kernels in [`crate::linalg`] are shared between both arms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LieError, Result};
use crate::linalg::{self, KernelError};

/// Dense square matrix, real or complex.
#[derive(Debug, Clone, PartialEq)]
pub enum Mat {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl Mat {
    pub fn identity(n: usize, complex: bool) -> Mat {
        if complex {
            Mat::Complex(DMatrix::identity(n, n))
        } else {
            Mat::Real(DMatrix::identity(n, n))
        }
    }

    pub fn zeros(n: usize, complex: bool) -> Mat {
        if complex {
            Mat::Complex(DMatrix::zeros(n, n))
        } else {
            Mat::Real(DMatrix::zeros(n, n))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Mat::Real(m) => m.nrows(),
            Mat::Complex(m) => m.nrows(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Mat::Complex(_))
    }

    /// Borrow the real storage; `None` for complex matrices.
    pub fn as_real(&self) -> Option<&DMatrix<f64>> {
        match self {
            Mat::Real(m) => Some(m),
            Mat::Complex(_) => None,
        }
    }

    /// Borrow the complex storage; `None` for real matrices.
    pub fn as_complex(&self) -> Option<&DMatrix<Complex64>> {
        match self {
            Mat::Complex(m) => Some(m),
            Mat::Real(_) => None,
        }
    }

    /// Entry as a complex number regardless of storage.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match self {
            Mat::Real(m) => Complex64::new(m[(i, j)], 0.0),
            Mat::Complex(m) => m[(i, j)],
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Mat::Real(m) => m.iter().all(|x| x.is_finite()),
            Mat::Complex(m) => m.iter().all(|x| x.re.is_finite() && x.im.is_finite()),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            Mat::Real(m) => m.norm(),
            Mat::Complex(m) => m.norm(),
        }
    }

    /// True iff every entry is zero (either sign).
    pub fn is_exactly_zero(&self) -> bool {
        match self {
            Mat::Real(m) => m.iter().all(|x| *x == 0.0),
            Mat::Complex(m) => m.iter().all(|x| x.re == 0.0 && x.im == 0.0),
        }
    }

    /// Frobenius norm of `self - I`.
    pub fn distance_from_identity(&self) -> f64 {
        let n = self.dim();
        match self {
            Mat::Real(m) => (m - DMatrix::<f64>::identity(n, n)).norm(),
            Mat::Complex(m) => (m - DMatrix::<Complex64>::identity(n, n)).norm(),
        }
    }

    /// Conjugate transpose (plain transpose for real storage).
    pub fn adjoint(&self) -> Mat {
        match self {
            Mat::Real(m) => Mat::Real(m.transpose()),
            Mat::Complex(m) => Mat::Complex(m.adjoint()),
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        match self {
            Mat::Real(m) => Mat::Real(m * s),
            Mat::Complex(m) => Mat::Complex(m * Complex64::new(s, 0.0)),
        }
    }

    pub fn determinant(&self) -> Complex64 {
        match self {
            Mat::Real(m) => Complex64::new(m.determinant(), 0.0),
            Mat::Complex(m) => m.determinant(),
        }
    }

    pub fn try_inverse(&self) -> Option<Mat> {
        match self {
            Mat::Real(m) => m.clone().try_inverse().map(Mat::Real),
            Mat::Complex(m) => m.clone().try_inverse().map(Mat::Complex),
        }
    }

    /// Matrix exponential by scaling and squaring.
    pub fn exp(&self) -> Mat {
        match self {
            Mat::Real(m) => Mat::Real(linalg::expm(m)),
            Mat::Complex(m) => Mat::Complex(linalg::expm(m)),
        }
    }

    /// Principal matrix logarithm by inverse scaling and squaring.
    ///
    /// The caller must have verified the spectrum avoids the non-positive
    /// real axis; see [`Mat::eigenvalues`].
    pub fn log_principal(&self) -> Result<Mat> {
        let kernel = "matrix logarithm";
        match self {
            Mat::Real(m) => linalg::logm(m)
                .map(Mat::Real)
                .map_err(|e| kernel_error(e, kernel)),
            Mat::Complex(m) => linalg::logm(m)
                .map(Mat::Complex)
                .map_err(|e| kernel_error(e, kernel)),
        }
    }

    /// Partial sum of the log power series with exactly `terms` terms.
    pub fn log_series(&self, terms: usize) -> Mat {
        match self {
            Mat::Real(m) => Mat::Real(linalg::log_series_partial(m, terms)),
            Mat::Complex(m) => Mat::Complex(linalg::log_series_partial(m, terms)),
        }
    }

    /// Nearest orthogonal/unitary matrix (the polar factor).
    pub fn polar_factor(&self) -> Result<Mat> {
        let kernel = "polar factor";
        match self {
            Mat::Real(m) => linalg::polar_factor(m)
                .map(Mat::Real)
                .map_err(|e| kernel_error(e, kernel)),
            Mat::Complex(m) => linalg::polar_factor(m)
                .map(Mat::Complex)
                .map_err(|e| kernel_error(e, kernel)),
        }
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let kernel = "Schur eigenvalues";
        match self {
            Mat::Real(m) => linalg::eigenvalues_real(m).map_err(|e| kernel_error(e, kernel)),
            Mat::Complex(m) => linalg::eigenvalues_complex(m).map_err(|e| kernel_error(e, kernel)),
        }
    }

    /// Spectral radius of `self - I`: the deviation metric that defines
    /// the controller's local region.
    pub fn spectral_radius_from_identity(&self) -> Result<f64> {
        let shifted = self.sub_identity();
        Ok(shifted
            .eigenvalues()?
            .iter()
            .map(|l| l.norm())
            .fold(0.0, f64::max))
    }

    pub fn sub_identity(&self) -> Mat {
        let n = self.dim();
        match self {
            Mat::Real(m) => Mat::Real(m - DMatrix::<f64>::identity(n, n)),
            Mat::Complex(m) => Mat::Complex(m - DMatrix::<Complex64>::identity(n, n)),
        }
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        match (self, rhs) {
            (Mat::Real(a), Mat::Real(b)) => Mat::Real(a * b),
            (Mat::Complex(a), Mat::Complex(b)) => Mat::Complex(a * b),
            _ => panic!("mixed real/complex matrix product"),
        }
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        match (self, rhs) {
            (Mat::Real(a), Mat::Real(b)) => Mat::Real(a + b),
            (Mat::Complex(a), Mat::Complex(b)) => Mat::Complex(a + b),
            _ => panic!("mixed real/complex matrix sum"),
        }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        match (self, rhs) {
            (Mat::Real(a), Mat::Real(b)) => Mat::Real(a - b),
            (Mat::Complex(a), Mat::Complex(b)) => Mat::Complex(a - b),
            _ => panic!("mixed real/complex matrix difference"),
        }
    }

    /// Row-major JSON value: real entries as numbers, complex as `[re, im]`.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.dim();
        let rows: Vec<serde_json::Value> = (0..n)
            .map(|i| {
                let row: Vec<serde_json::Value> = (0..n)
                    .map(|j| match self {
                        Mat::Real(m) => serde_json::json!(m[(i, j)]),
                        Mat::Complex(m) => {
                            serde_json::json!([m[(i, j)].re, m[(i, j)].im])
                        }
                    })
                    .collect();
                serde_json::Value::Array(row)
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    /// Parse the JSON layout produced by [`Mat::to_json`]. Scalar entries
    /// yield a real matrix, `[re, im]` pairs a complex one.
    pub fn from_json(value: &serde_json::Value) -> std::result::Result<Mat, String> {
        let rows = value.as_array().ok_or("matrix must be an array of rows")?;
        let n = rows.len();
        if n == 0 {
            return Err("matrix must be non-empty".into());
        }
        let first_entry = rows[0]
            .as_array()
            .ok_or("matrix rows must be arrays")?
            .first()
            .ok_or("matrix rows must be non-empty")?;
        let complex = first_entry.is_array();
        let mut real = DMatrix::<f64>::zeros(n, n);
        let mut cplx = DMatrix::<Complex64>::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or("matrix rows must be arrays")?;
            if row.len() != n {
                return Err(format!("row {i} has {} entries, expected {n}", row.len()));
            }
            for (j, entry) in row.iter().enumerate() {
                match (complex, entry) {
                    (false, serde_json::Value::Number(x)) => {
                        real[(i, j)] = x.as_f64().ok_or("entry is not a finite number")?;
                    }
                    (true, serde_json::Value::Array(pair)) if pair.len() == 2 => {
                        let re = pair[0].as_f64().ok_or("entry re is not a number")?;
                        let im = pair[1].as_f64().ok_or("entry im is not a number")?;
                        cplx[(i, j)] = Complex64::new(re, im);
                    }
                    _ => return Err(format!("entry ({i},{j}) has inconsistent shape")),
                }
            }
        }
        Ok(if complex { Mat::Complex(cplx) } else { Mat::Real(real) })
    }
}

fn kernel_error(e: KernelError, kernel: &'static str) -> LieError {
    match e {
        KernelError::Singular => LieError::NearSingular {
            determinant_modulus: 0.0,
        },
        KernelError::NoConvergence => LieError::IterationFailed { kernel },
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        Mat::from_json(&value).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_real() {
        let m = Mat::Real(DMatrix::from_row_slice(2, 2, &[1.0, 2.5, -3.0, 0.125]));
        let v = m.to_json();
        assert_eq!(v, serde_json::json!([[1.0, 2.5], [-3.0, 0.125]]));
        assert_eq!(Mat::from_json(&v).unwrap(), m);
    }

    #[test]
    fn json_roundtrip_complex() {
        let m = Mat::Complex(DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, -1.0),
                Complex64::new(0.0, 2.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(-0.5, 0.25),
            ],
        ));
        let v = m.to_json();
        assert_eq!(
            v,
            serde_json::json!([[[1.0, -1.0], [0.0, 2.0]], [[3.0, 0.0], [-0.5, 0.25]]])
        );
        assert_eq!(Mat::from_json(&v).unwrap(), m);
    }

    #[test]
    fn spectral_radius_of_doubled_identity() {
        let m = Mat::Real(DMatrix::identity(4, 4) * 2.0);
        assert!((m.spectral_radius_from_identity().unwrap() - 1.0).abs() < 1e-12);
        assert!((m.distance_from_identity() - 2.0) < 1e-12);
    }
}

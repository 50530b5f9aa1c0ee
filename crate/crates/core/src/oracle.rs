//! Dense Hermitian matrices and a cyclic Jacobi eigensolver.
//!
//! Nothing on the main computation path goes through this module; it exists
//! to give the O(dim) closed forms in [`crate::projector`] an independent
//! brute-force cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation `|a_ij − conj(a_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius norm drops below
/// `OFFDIAG_TOL · dim · max(1, ‖A‖_F)`.
pub const OFFDIAG_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 500;

/// Dense row-major self-adjoint matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<RawMatrix> for HermitianMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        let entries = raw
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        HermitianMatrix::new(raw.dim, entries)
    }
}

impl From<HermitianMatrix> for RawMatrix {
    fn from(m: HermitianMatrix) -> Self {
        RawMatrix {
            dim: m.dim,
            entries: m.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl HermitianMatrix {
    /// Validates shape, finiteness and self-adjointness of row-major `entries`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(entries.len(), dim * dim));
        }
        if let Some(i) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        let m = Self { dim, entries };
        let dev = m.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(m)
    }

    pub(crate) fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self::from_fn(values.len(), |i, j| {
            Complex64::new(if i == j { values[i] } else { 0.0 }, 0.0)
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Plain matrix product. The product of two Hermitian matrices need not be
    /// Hermitian, so the result is returned as raw row-major entries.
    pub fn matmul(&self, other: &Self) -> Result<Vec<Complex64>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `A²`, Hermitian whenever `A` is.
    pub fn square(&self) -> Self {
        let entries = self.matmul(self).expect("same dimension");
        let n = self.dim;
        // symmetrize away rounding
        Self::from_fn(n, |i, j| {
            (entries[i * n + j] + entries[j * n + i].conj()) * 0.5
        })
    }

    /// `tr(AB)`.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                t += self.get(i, k) * other.get(k, i);
            }
        }
        Ok(t)
    }

    fn offdiag_norm(a: &[Complex64], n: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

/// Eigenvalues of `m` in descending order, by cyclic complex Jacobi rotations.
pub fn dense_spectrum(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let n = m.dim;
    let mut a = m.entries.clone();
    let threshold = OFFDIAG_TOL * n as f64 * m.frobenius_norm().max(1.0);
    let mut residual = HermitianMatrix::offdiag_norm(&a, n);
    let mut sweeps = 0;
    while residual >= threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps, residual });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
        sweeps += 1;
        residual = HermitianMatrix::offdiag_norm(&a, n);
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

/// Annihilates `a[p][q]` with the unitary `U = D·R`, where `D` moves the
/// phase of `a[p][q]` onto the diagonal and `R` is a real Givens rotation.
fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    // D = diag(1 at p, e^{-iα} at q) with apq = b·e^{iα}
    let d = apq.conj() / b;
    let theta = (aqq - app) / (2.0 * b);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // columns: A ← A·U
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * d * s;
        a[k * n + q] = akp * s + akq * d * c;
    }
    // rows: A ← U†·A
    let dc = d.conj();
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * dc * s;
        a[q * n + k] = apk * s + aqk * dc * c;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
}

/// Norms read off a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralNorms {
    pub spectrum: Vec<f64>,
    pub operator_norm: f64,
    pub trace_norm: f64,
}

pub fn spectral_norms(m: &HermitianMatrix) -> Result<SpectralNorms> {
    let spectrum = dense_spectrum(m)?;
    let operator_norm = spectrum.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let trace_norm = spectrum.iter().map(|x| x.abs()).sum();
    Ok(SpectralNorms {
        spectrum,
        operator_norm,
        trace_norm,
    })
}

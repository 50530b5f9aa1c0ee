//! Finite-dimensional complex Hilbert space primitives.
//!
//! The inner product is conjugate-linear in its first argument:
//! `⟨φ,ψ⟩ = Σ conj(φ_i) ψ_i`. Every quantity used elsewhere in the crate
//! (`|⟨φ,ψ⟩|`, norms, projector distances) is independent of that choice.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::{NORM_TOL, ORTHO_TOL, ZERO_TOL};
use crate::error::{Error, Result};
use crate::seed;

/// A nonempty vector of finite complex amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct StateVector {
    components: Vec<Complex64>,
}

impl StateVector {
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(i) = components
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { components })
    }

    /// Builds a vector from real amplitudes.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut components = vec![Complex64::new(0.0, 0.0); dim];
        components[index] = Complex64::new(1.0, 0.0);
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Complex64> {
        self.components
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `α·φ`. Panics only if the product overflows to a non-finite value.
    pub fn scale(&self, alpha: Complex64) -> Self {
        Self::new(self.components.iter().map(|z| alpha * z).collect())
            .expect("scaling produced a non-finite component")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

impl TryFrom<Vec<Complex64>> for StateVector {
    type Error = Error;

    fn try_from(components: Vec<Complex64>) -> Result<Self> {
        Self::new(components)
    }
}

impl From<StateVector> for Vec<Complex64> {
    fn from(v: StateVector) -> Self {
        v.components
    }
}

/// A [`StateVector`] of norm one (within `norm_tol`).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitVector(StateVector);

impl UnitVector {
    /// Accepts `v` as a unit vector if `| ‖v‖ − 1 | ≤ NORM_TOL`.
    pub fn new(v: StateVector) -> Result<Self> {
        Self::with_tolerance(v, NORM_TOL)
    }

    pub fn with_tolerance(v: StateVector, norm_tol: f64) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > norm_tol {
            return Err(Error::NotUnit(n));
        }
        Ok(Self(v))
    }

    /// Wraps a vector already known to be normalized.
    pub(crate) fn new_unchecked(v: StateVector) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9);
        Self(v)
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        StateVector::basis(dim, index).map(Self)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn components(&self) -> &[Complex64] {
        self.0.components()
    }

    pub fn as_state(&self) -> &StateVector {
        &self.0
    }

    pub fn into_state(self) -> StateVector {
        self.0
    }

    /// Phase multiple `λ·φ` with `|λ| = 1` assumed; the result is renormalized.
    pub fn phase(&self, lambda: Complex64) -> Self {
        let u = lambda / lambda.norm();
        Self(self.0.scale(u))
    }
}

impl AsRef<StateVector> for UnitVector {
    fn as_ref(&self) -> &StateVector {
        &self.0
    }
}

pub(crate) fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// Hermitian inner product `⟨φ,ψ⟩`, conjugate-linear in `φ`.
pub fn inner(phi: &StateVector, psi: &StateVector) -> Result<Complex64> {
    check_dims(phi.dim(), psi.dim())?;
    Ok(inner_unchecked(phi.components(), psi.components()))
}

pub(crate) fn inner_unchecked(phi: &[Complex64], psi: &[Complex64]) -> Complex64 {
    phi.iter().zip(psi).map(|(a, b)| a.conj() * b).sum()
}

/// `φ/‖φ‖`.
pub fn normalize(phi: &StateVector) -> Result<UnitVector> {
    let n = phi.norm();
    if n <= ZERO_TOL || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    let inv = 1.0 / n;
    Ok(UnitVector(StateVector {
        components: phi.components().iter().map(|z| z * inv).collect(),
    }))
}

/// Vector with i.i.d. standard complex Gaussian components.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<StateVector> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let components = (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    StateVector::new(components)
}

/// Unitarily invariant random unit vector drawn from `rng`.
pub fn random_unit_from<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<UnitVector> {
    loop {
        let g = gaussian_vector(rng, dim)?;
        // A Gaussian draw is zero with probability zero; retry rather than fail.
        if let Ok(u) = normalize(&g) {
            return Ok(u);
        }
    }
}

/// Unitarily invariant random unit vector, deterministic in `seed`.
pub fn random_unit(dim: usize, seed: u64) -> Result<UnitVector> {
    let mut rng = seed::rng(seed);
    random_unit_from(&mut rng, dim)
}

/// `count` orthonormal vectors from modified Gram–Schmidt on Gaussian draws.
pub fn orthonormal_system(dim: usize, count: usize, seed: u64) -> Result<Vec<UnitVector>> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if count > dim {
        return Err(Error::CountExceedsDim { count, dim });
    }
    let mut rng = seed::rng(seed);
    let mut basis: Vec<UnitVector> = Vec::with_capacity(count);
    while basis.len() < count {
        let mut v = gaussian_vector(&mut rng, dim)?.into_components();
        // two passes keep the loss of orthogonality at machine precision
        for _ in 0..2 {
            for e in &basis {
                let c = inner_unchecked(e.components(), &v);
                for (vi, ei) in v.iter_mut().zip(e.components()) {
                    *vi -= c * ei;
                }
            }
        }
        let v = StateVector::new(v)?;
        if v.norm() < 1e-8 {
            continue;
        }
        basis.push(normalize(&v)?);
    }
    Ok(basis)
}

/// Largest `|⟨e_i,e_j⟩|` over distinct pairs and largest `| ‖e_i‖ − 1 |`.
pub fn orthonormality_defect(system: &[UnitVector]) -> (f64, f64) {
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    for (i, a) in system.iter().enumerate() {
        diag = diag.max((a.as_state().norm() - 1.0).abs());
        for b in &system[i + 1..] {
            off = off.max(inner_unchecked(a.components(), b.components()).norm());
        }
    }
    (off, diag)
}

/// True if `system` is orthonormal within [`ORTHO_TOL`] and [`NORM_TOL`].
pub fn is_orthonormal(system: &[UnitVector]) -> bool {
    let (off, diag) = orthonormality_defect(system);
    off < ORTHO_TOL && diag <= NORM_TOL
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sv(v: &[(f64, f64)]) -> StateVector {
        StateVector::new(v.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    #[test]
    fn inner_examples() {
        let e1 = sv(&[(1.0, 0.0), (0.0, 0.0)]);
        let e2 = sv(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(inner(&e1, &e2).unwrap(), c(0.0, 0.0));
        assert_eq!(inner(&e1, &e1).unwrap(), c(1.0, 0.0));
        let psi = sv(&[(FRAC_1_SQRT_2, 0.0), (0.0, FRAC_1_SQRT_2)]);
        let z = inner(&e1, &psi).unwrap();
        assert!((z - c(0.707_106_78, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_slot() {
        let phi = sv(&[(0.0, 1.0)]);
        let psi = sv(&[(1.0, 0.0)]);
        // ⟨iφ', ψ⟩ with φ' = 1 gives conj(i) = -i
        assert_eq!(inner(&phi, &psi).unwrap(), c(0.0, -1.0));
        assert_eq!(inner(&psi, &phi).unwrap(), c(0.0, 1.0));
    }

    #[test]
    fn inner_dimension_mismatch() {
        let a = sv(&[(1.0, 0.0)]);
        let b = sv(&[(1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(inner(&a, &b), Err(Error::DimensionMismatch(1, 2)));
    }

    #[test]
    fn state_vector_rejects_bad_input() {
        assert_eq!(StateVector::new(vec![]), Err(Error::InvalidDimension(0)));
        assert_eq!(
            StateVector::new(vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(1))
        );
        assert!(UnitVector::new(sv(&[(2.0, 0.0)])).is_err());
    }

    #[test]
    fn normalize_examples() {
        let u = normalize(&sv(&[(2.0, 0.0), (0.0, 0.0)])).unwrap();
        assert_eq!(u.components(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(
            normalize(&sv(&[(0.0, 0.0), (0.0, 0.0)])),
            Err(Error::ZeroVector)
        );
        let u = normalize(&sv(&[(3.0, 0.0), (0.0, 4.0)])).unwrap();
        assert!((u.components()[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((u.components()[1] - c(0.0, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn random_unit_examples() {
        for seed in 0..20 {
            let u = random_unit(1, seed).unwrap();
            assert!((u.components()[0].norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(random_unit(8, 42).unwrap(), random_unit(8, 42).unwrap());
        assert_ne!(random_unit(8, 42).unwrap(), random_unit(8, 43).unwrap());
        assert_eq!(random_unit(0, 1), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn random_unit_first_overlap_mean() {
        // |⟨e_1,φ⟩|² is Beta(1, d−1) for Haar φ: mean 1/d, variance (d−1)/(d²(d+1)).
        let d = 8.0;
        let n = 1000.0;
        let mean = (1..=1000u64)
            .map(|s| random_unit(8, s).unwrap().components()[0].norm_sqr())
            .sum::<f64>()
            / n;
        let sd = ((d - 1.0) / (d * d * (d + 1.0)) / n).sqrt();
        assert!((mean - 1.0 / d).abs() < 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn orthonormal_system_examples() {
        let sys = orthonormal_system(3, 3, 1).unwrap();
        for (i, a) in sys.iter().enumerate() {
            for (j, b) in sys.iter().enumerate() {
                let g = inner(a.as_state(), b.as_state()).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(want, 0.0)).norm() < 1e-10);
            }
        }
        assert_eq!(
            orthonormal_system(2, 3, 0),
            Err(Error::CountExceedsDim { count: 3, dim: 2 })
        );
        let sys = orthonormal_system(16, 8, 7).unwrap();
        let (off, diag) = orthonormality_defect(&sys);
        assert!(off < 1e-10 && diag <= 1e-12);
        assert!(is_orthonormal(&sys));
    }
}

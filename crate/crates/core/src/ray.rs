//! Rays `[φ]` of nonzero vectors and their canonical unit representatives.

use num_complex::Complex64;

use crate::config::{PHASE_PIVOT_TOL, RAY_EQ_TOL, ZERO_TOL};
use crate::error::{Error, Result};
use crate::hilbert::{check_dims, inner_unchecked, normalize, StateVector, UnitVector};

/// Equivalence class of nonzero vectors under complex scaling.
///
/// The representative is a unit vector whose first component of modulus
/// above [`PHASE_PIVOT_TOL`] is real and strictly positive.
#[derive(Debug, Clone)]
pub struct Ray {
    rep: UnitVector,
}

impl Ray {
    pub fn representative(&self) -> &UnitVector {
        &self.rep
    }

    pub fn into_representative(self) -> UnitVector {
        self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

impl PartialEq for Ray {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .rep
                .components()
                .iter()
                .zip(other.rep.components())
                .all(|(a, b)| (a - b).norm() <= RAY_EQ_TOL)
    }
}

/// Canonical projection `φ ↦ [φ]`.
pub fn ray_of(phi: &StateVector) -> Result<Ray> {
    let u = normalize(phi)?;
    Ok(canonical(&u))
}

fn canonical(u: &UnitVector) -> Ray {
    let pivot = u
        .components()
        .iter()
        .find(|z| z.norm() > PHASE_PIVOT_TOL)
        .copied()
        // a unit vector always has some component above 1/√dim
        .expect("unit vector has no component above the pivot tolerance");
    let lambda = pivot.conj() / pivot.norm();
    let mut rep = u.phase(lambda).into_state().into_components();
    // pin the pivot exactly onto the positive real axis
    if let Some(z) = rep.iter_mut().find(|z| z.norm() > PHASE_PIVOT_TOL) {
        *z = Complex64::new(z.norm(), 0.0);
    }
    let rep = StateVector::new(rep).expect("finite components stay finite");
    Ray {
        rep: UnitVector::new_unchecked(rep),
    }
}

/// True iff `φ` and `ψ` span the same one-dimensional subspace.
///
/// Decided by `‖φ‖‖ψ‖ − |⟨φ,ψ⟩| ≤ RAY_EQ_TOL · ‖φ‖‖ψ‖`, which does not
/// depend on a basis.
pub fn same_ray(phi: &StateVector, psi: &StateVector) -> Result<bool> {
    same_ray_with(phi, psi, RAY_EQ_TOL)
}

pub fn same_ray_with(phi: &StateVector, psi: &StateVector, tol: f64) -> Result<bool> {
    check_dims(phi.dim(), psi.dim())?;
    let a = normalize(phi)?;
    let b = normalize(psi)?;
    let overlap = inner_unchecked(a.components(), b.components()).norm();
    Ok(1.0 - overlap <= tol)
}

/// Phase multiple `λφ` closest to `φ₀`, with `λ = ⟨φ,φ₀⟩/|⟨φ,φ₀⟩|`.
pub fn phase_align(phi: &UnitVector, phi0: &UnitVector) -> Result<UnitVector> {
    check_dims(phi.dim(), phi0.dim())?;
    let z = inner_unchecked(phi.components(), phi0.components());
    if z.norm() <= ZERO_TOL {
        return Err(Error::OrthogonalStates);
    }
    Ok(phi.phase(z / z.norm()))
}

/// Distance achieved by [`phase_align`] together with the triangle bound
/// `‖φ − ⟨φ₀,φ⟩φ₀‖ + ‖ |⟨φ₀,φ⟩|φ₀ − φ₀ ‖`, both evaluated on vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentBound {
    pub distance: f64,
    pub bound: f64,
}

pub fn phase_align_bound(phi: &UnitVector, phi0: &UnitVector) -> Result<AlignmentBound> {
    let aligned = phase_align(phi, phi0)?;
    let distance = aligned.as_state().distance(phi0.as_state())?;
    let overlap = inner_unchecked(phi0.components(), phi.components());
    let projected = phi0.as_state().scale(overlap);
    let orth = phi.as_state().distance(&projected)?;
    let radial = phi0
        .as_state()
        .scale(Complex64::new(overlap.norm(), 0.0))
        .distance(phi0.as_state())?;
    Ok(AlignmentBound {
        distance,
        bound: orth + radial,
    })
}

/// `min_θ ‖e^{iθ}χ − u‖` over `grid` equally spaced phases.
pub fn phase_orbit_distance(chi: &UnitVector, u: &UnitVector, grid: usize) -> Result<f64> {
    check_dims(chi.dim(), u.dim())?;
    if grid == 0 {
        return Err(Error::InvalidParameter(
            "phase grid must be nonempty".into(),
        ));
    }
    let mut best = f64::INFINITY;
    for k in 0..grid {
        let theta = std::f64::consts::TAU * k as f64 / grid as f64;
        let d = chi
            .phase(Complex64::from_polar(1.0, theta))
            .as_state()
            .distance(u.as_state())?;
        best = best.min(d);
    }
    Ok(best)
}

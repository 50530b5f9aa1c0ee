//! Pure states as rank-one projectors `P_φ = |φ⟩⟨φ|`.
//!
//! A [`PureState`] keeps only its unit vector. Transition probabilities and
//! the operator- and trace-norm distances are computed in O(dim) from
//! `|⟨φ,ψ⟩|²`:
//!
//! ```text
//! ρ_n(P_φ, P_ψ)  = ‖P_φ − P_ψ‖    = √(1 − |⟨φ,ψ⟩|²)
//! ρ_tr(P_φ, P_ψ) = ‖P_φ − P_ψ‖_tr = 2·ρ_n(P_φ, P_ψ)
//! ```
//!
//! `P_φ − P_ψ` has exactly two nonzero eigenvalues `±√(1 − |⟨φ,ψ⟩|²)`.
//! The dense route through [`materialize`] and
//! [`dense_spectrum`](crate::oracle::dense_spectrum) is kept only as an
//! oracle for these identities.

use num_complex::Complex64;

use crate::error::Result;
use crate::hilbert::{check_dims, inner_unchecked, StateVector, UnitVector};
use crate::oracle::HermitianMatrix;
use crate::ray::same_ray;

/// Slack for the continuity bound `ρ_n(P_φ, P_ψ) ≤ ‖φ − ψ‖`.
pub const BOUND_SLACK: f64 = 1e-12;

/// The projector onto the ray of a unit vector.
#[derive(Debug, Clone)]
pub struct PureState {
    vec: UnitVector,
}

impl PureState {
    pub fn new(vec: UnitVector) -> Self {
        Self { vec }
    }

    pub fn vector(&self) -> &UnitVector {
        &self.vec
    }

    pub fn dim(&self) -> usize {
        self.vec.dim()
    }

    pub fn components(&self) -> &[Complex64] {
        self.vec.components()
    }

    /// `⟨φ_self, φ_other⟩`.
    pub(crate) fn overlap(&self, other: &Self) -> Complex64 {
        inner_unchecked(self.components(), other.components())
    }

    /// `|⟨φ,ψ⟩|²` without the dimension check, for hot loops that have
    /// already validated dimensions.
    pub(crate) fn h(&self, other: &Self) -> f64 {
        self.overlap(other).norm_sqr().min(1.0)
    }

    /// `√(1 − |⟨φ,ψ⟩|²)` evaluated as `‖φ − ⟨ψ,φ⟩ψ‖`, which stays accurate
    /// when the two rays nearly coincide.
    pub(crate) fn dist(&self, other: &Self) -> f64 {
        let c = other.overlap(self);
        self.components()
            .iter()
            .zip(other.components())
            .map(|(x, y)| (x - c * y).norm_sqr())
            .sum::<f64>()
            .sqrt()
            .min(1.0)
    }
}

impl From<UnitVector> for PureState {
    fn from(vec: UnitVector) -> Self {
        Self::new(vec)
    }
}

impl PartialEq for PureState {
    /// Projector equality is ray equality of the underlying vectors.
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && same_ray(self.vec.as_state(), other.vec.as_state()).unwrap_or(false)
    }
}

/// `h_Q(P) = tr{PQ} = |⟨φ_Q, φ_P⟩|²`, clamped to `[0, 1]`.
pub fn transition_probability(p: &PureState, q: &PureState) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    Ok(q.h(p))
}

/// Operator-norm distance `‖P − Q‖ = √(1 − h)`.
pub fn rho_n(p: &PureState, q: &PureState) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    Ok(p.dist(q))
}

/// Trace-norm distance `‖P − Q‖_tr = 2‖P − Q‖`.
pub fn rho_tr(p: &PureState, q: &PureState) -> Result<f64> {
    Ok(2.0 * rho_n(p, q)?)
}

/// The nonzero eigenvalue pair `(λ₊, λ₋) = (λ, −λ)` of `P − Q`.
/// Returns `(0, 0)` when `P = Q`.
pub fn diff_eigenvalues(p: &PureState, q: &PureState) -> Result<(f64, f64)> {
    let lambda = rho_n(p, q)?;
    Ok((lambda, -lambda))
}

/// Dense matrix `(i, j) ↦ φ_i · conj(φ_j)`.
pub fn materialize(p: &PureState) -> HermitianMatrix {
    let phi = p.components();
    HermitianMatrix::from_fn(phi.len(), |i, j| {
        if i == j {
            Complex64::new(phi[i].norm_sqr(), 0.0)
        } else {
            phi[i] * phi[j].conj()
        }
    })
}

/// Both sides of `‖P_φ − P_ψ‖ ≤ ‖φ − ψ‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn norm_bound_check(phi: &UnitVector, psi: &UnitVector) -> Result<NormBound> {
    check_dims(phi.dim(), psi.dim())?;
    let lhs = rho_n(&PureState::new(phi.clone()), &PureState::new(psi.clone()))?;
    let rhs = phi.as_state().distance(psi.as_state())?;
    Ok(NormBound {
        lhs,
        rhs,
        holds: lhs <= rhs + BOUND_SLACK,
    })
}

/// `‖(P − Q)ψ‖` for an arbitrary vector `ψ`, in O(dim).
pub fn diff_apply_norm(p: &PureState, q: &PureState, psi: &StateVector) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    check_dims(p.dim(), psi.dim())?;
    let a = inner_unchecked(p.components(), psi.components());
    let b = inner_unchecked(q.components(), psi.components());
    Ok(p.components()
        .iter()
        .zip(q.components())
        .map(|(x, y)| (x * a - y * b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

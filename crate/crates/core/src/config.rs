use serde::{Deserialize, Serialize};

/// Norm deviation accepted for a unit vector.
pub const NORM_TOL: f64 = 1e-12;
/// Largest inner-product modulus accepted between orthonormal vectors.
pub const ORTHO_TOL: f64 = 1e-10;
/// Norms at or below this are treated as the zero vector.
pub const ZERO_TOL: f64 = 1e-300;
/// Smallest modulus a component needs to act as the phase pivot of a ray.
pub const PHASE_PIVOT_TOL: f64 = 1e-10;
/// Slack in `|⟨φ,ψ⟩| = ‖φ‖‖ψ‖` when deciding ray equality.
pub const RAY_EQ_TOL: f64 = 1e-10;

/// Named tolerances, overridable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub norm_tol: f64,
    pub ortho_tol: f64,
    pub zero_tol: f64,
    pub phase_pivot_tol: f64,
    pub ray_eq_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm_tol: NORM_TOL,
            ortho_tol: ORTHO_TOL,
            zero_tol: ZERO_TOL,
            phase_pivot_tol: PHASE_PIVOT_TOL,
            ray_eq_tol: RAY_EQ_TOL,
        }
    }
}

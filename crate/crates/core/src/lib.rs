//! Numerical toolkit for the projective Hilbert space `P(H)`.
//!
//! Pure states are handled as rank-one projectors `P = |φ⟩⟨φ|`, stored
//! implicitly through a unit vector. The crate provides
//!
//! - finite-dimensional Hilbert space primitives ([`hilbert`]),
//! - rays and canonical representatives ([`ray`]),
//! - closed-form projector metrics with a dense eigensolver oracle
//!   ([`projector`], [`oracle`]),
//! - membership predicates for metric balls and weak neighborhoods
//!   ([`topology`]),
//! - sequence diagnostics across the weak, strong, norm and trace
//!   topologies ([`convergence`]),
//! - sigma-algebra generation on finite state universes ([`borel`]),
//! - seeded verification suites backing the `phs` command line tool
//!   ([`verify`]).
//!
//! Infinite-dimensional statements are exercised on finite truncations of
//! `ℓ²`; the dimension is always a runtime parameter.

pub mod borel;
pub mod config;
pub mod convergence;
pub mod error;
pub mod formats;
pub mod hilbert;
pub mod oracle;
pub mod projector;
pub mod ray;
pub mod seed;
pub mod topology;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use hilbert::{StateVector, UnitVector};
pub use num_complex::Complex64;
pub use oracle::HermitianMatrix;
pub use projector::PureState;
pub use ray::Ray;

//! Kirchhoff plate bending on rectangles with polynomial Galerkin trial
//! functions, plus design-rule checks.
//!
//! ```
//! use plate_core::model::{uniform_edges, BcKind, LoadSpec, MaterialSpec, PlateProblem, PlateRect};
//! use plate_core::solver::solve_fixed_order;
//!
//! let p = PlateProblem::new(
//!     MaterialSpec::isotropic(210e9, 0.3, 1e-4),
//!     PlateRect::new(0.25, 0.5),
//!     uniform_edges(BcKind::Clamped),
//!     vec![LoadSpec::Uniform { pressure: 0.8 }],
//! );
//! let s = solve_fixed_order(&p, 12).unwrap();
//! assert!((s.omega_max() - 4.12e-4).abs() < 2e-6);
//! ```

pub mod basis;
pub mod config;
pub mod criteria;
pub mod fields;
pub mod model;
pub mod oracle_fdm;
pub mod poly2d;
pub mod solver;

pub use fields::PlateField;
pub use model::PlateProblem;
pub use poly2d::{Poly2D, RectDomain};
pub use solver::Solution;

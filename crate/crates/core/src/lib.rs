//! Weak Marcinkiewicz-Zygmund constants of positive-weight cubature rules,
//! and the polynomial approximation operators they drive.
//!
//! A rule's Gramian in a mu-orthonormal basis carries everything: its extreme
//! eigenvalues are the sharpest MZ constants `A`, `B`, the distance `eta` of
//! the Gramian from the identity bounds the quadrature error on squares of
//! polynomials, and its inverse turns hyperinterpolation into a discrete
//! least-squares projection.
//!
//! ```
//! use mzquad::{mz, rules};
//!
//! // A 4-point Gauss-Legendre rule is exact up to degree 7 ...
//! let rule = rules::gauss_legendre(4).unwrap();
//! assert!(mz::analyze(&rule, 3).unwrap().eta < 1e-12);
//! // ... and loses the MZ property as soon as n reaches the number of nodes.
//! let r = mz::analyze(&rule, 4).unwrap();
//! assert!((r.eta - 1.0).abs() < 1e-10);
//! ```

pub mod approx;
pub mod bases;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod mz;
pub mod poly;
pub mod rules;
pub mod testfns;

pub use bases::{basis_dim, eval_basis, BasisFamily, BasisMatrix, OrthonormalBasis};
pub use domain::{Domain, DomainKind, Measure};
pub use error::{MzError, ParseError, Result};
pub use linalg::{EigDecomposition, Matrix, SymMatrix};
pub use mz::{MzReport, GramianLadder};
pub use rules::{CubatureRule, DataSource, Provenance, RuleFamily};

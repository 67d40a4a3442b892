//! Finite-dimensional structure of moduli spaces of surface-group
//! representations.
//!
//! The crate is organised around the objects one meets when studying
//! `Hom(π, G)/G` for a closed surface group `π` and a compact group `G`:
//!
//! * [`free_words`]: words in a free group, integral group rings and right
//!   Fox derivatives.
//! * [`lie_model`]: numerical models of `U(1)`, `SU(2)`, `SO(3)` and their
//!   products (exp, log, Ad, centralizers, Haar sampling).
//! * [`rep_cohomology`]: the Fox cochain complex `g → gⁿ → gᵐ` evaluated at
//!   a representation, twisted cohomology, orbit types, the quadratic
//!   obstruction map and a Gauss-Newton projector onto the representation
//!   variety.
//! * [`reduction_models`]: linear momentum-map models (`SO(2)` on `ℝ²×ℝ²`,
//!   `SO(3)` on `(ℝ³)⁴`), Hilbert maps and their semialgebraic relations.
//! * [`holonomy`]: path-ordered transport of a trivialised connection and
//!   the derivative of holonomy.

pub mod error;
pub mod free_words;
pub mod holonomy;
pub mod lie_model;
pub mod linalg;
pub mod reduction_models;
pub mod rep_cohomology;

pub use error::{Error, Result};
pub use free_words::{GroupRingElement, Letter, Presentation, Word};
pub use lie_model::{AlgebraVector, GroupElement, LieGroupModel};

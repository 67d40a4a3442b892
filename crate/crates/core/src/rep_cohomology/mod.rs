//! The Fox cochain complex evaluated at a representation.
//!
//! A point of `Hom(F, G) ≅ Gⁿ` acts on `g` through the adjoint
//! representation. `g` is made a right `ℤF`-module by `X · w = Ad(χ(w)⁻¹) X`,
//! so a group-ring element `Σ c_w w` acts by the matrix
//! `M(Σ c_w w) = Σ c_w Ad(χ(w))ᵀ` and `M(ab) = M(b) M(a)`.
//!
//! With this convention the derivative of the word map at `y`, for the
//! variation `y_j ↦ y_j exp(t u_j)` and left-translated back to `g`, is
//!
//! ```text
//! d/dt|₀ r(y)⁻¹ r(y exp(tu)) = Σ_j M(∂r/∂x_j) u_j
//! ```
//!
//! which is what the finite-difference checks confirm.

mod complex;
mod finite_diff;
mod input;
mod newton;
mod obstruction;
mod strata;

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_words::{GroupRingElement, Presentation, Word};
use crate::lie_model::{GroupElement, LieGroupModel};
use crate::linalg::RankTol;

pub use complex::{build_complex, coboundary_operators, CochainData, HDims};
pub use finite_diff::{finite_diff_check_d0, finite_diff_check_d1};
pub use input::{RepDocument, RepSource, ResolvedRep};
pub use newton::{
    newton_project_to_variety, random_solution, sample_cone_directions, ConeSampling,
    NewtonOutcome,
};
pub use obstruction::{cross_product_sum, obstruction_quadratic, ObstructionModel};
pub use strata::{
    classify_orbit_type, conjugation_isomorphism_check, enumerate_central_reps,
    stabilizer_fixed_subspace, stabilizer_generators, OrbitType,
};

/// Numerical thresholds shared by the cohomology operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions.
    pub rank_tol: f64,
    /// A point lies on the representation variety when its relator defect is
    /// below this value.
    pub defect_tol: f64,
    /// Step for finite-difference checks.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_tol: 1e-8,
            defect_tol: 1e-9,
            fd_step: 1e-4,
        }
    }
}

impl Tolerances {
    /// Rank cutoff `rank_tol · max(σ₁, 1)`.
    pub fn rank(&self) -> RankTol {
        RankTol::new(self.rank_tol, 1.0)
    }
}

/// A point `(y_1, …, y_n)` of `Gⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepPoint {
    group: Arc<LieGroupModel>,
    values: Vec<GroupElement>,
}

impl RepPoint {
    /// Checks every value lies in the group to `1e-10`.
    pub fn new(group: Arc<LieGroupModel>, values: Vec<GroupElement>) -> Result<Self> {
        for (j, y) in values.iter().enumerate() {
            let residual = group.membership_residual(y);
            if residual.is_nan() || residual >= 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "value {} is not in {} (residual {residual:.3e})",
                    j + 1,
                    group.name()
                )));
            }
        }
        Ok(Self { group, values })
    }

    pub(crate) fn from_parts(group: Arc<LieGroupModel>, values: Vec<GroupElement>) -> Self {
        Self { group, values }
    }

    pub fn group(&self) -> &LieGroupModel {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<LieGroupModel> {
        &self.group
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `χ(w)`.
    pub fn evaluate_word(&self, word: &Word) -> GroupElement {
        let mut out = self.group.identity().matrix().clone();
        for l in word.letters() {
            let y = self.values[l.generator].matrix();
            out = if l.exponent == 1 {
                out * y
            } else {
                out * y.adjoint()
            };
        }
        GroupElement::from_matrix(out)
    }

    /// `x · χ · x⁻¹`, value by value.
    pub fn conjugate(&self, x: &GroupElement) -> Self {
        Self {
            group: self.group.clone(),
            values: self.values.iter().map(|y| y.conjugate_by(x)).collect(),
        }
    }

    /// `y_j exp(u_j)` for a cochain `u ∈ gⁿ`.
    pub fn right_translate(&self, u: &nalgebra::DVector<f64>) -> Self {
        let d = self.group.dim();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, y)| {
                let step = crate::lie_model::AlgebraVector(u.rows(j * d, d).into_owned());
                y.mul(&self.group.exp(&step))
            })
            .collect();
        Self {
            group: self.group.clone(),
            values,
        }
    }
}

/// The topological class of the bundle, encoded by the central element the
/// relator must evaluate to.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleClass {
    central_element: GroupElement,
}

impl BundleClass {
    pub fn new(group: &LieGroupModel, element: GroupElement) -> Result<Self> {
        let residual = group.centrality_residual(&element);
        if residual.is_nan() || residual >= 1e-10 {
            return Err(Error::NotCentral { residual });
        }
        Ok(Self {
            central_element: element,
        })
    }

    /// The trivial class `c = I`.
    pub fn trivial(group: &LieGroupModel) -> Self {
        Self {
            central_element: group.identity(),
        }
    }

    pub fn named(group: &LieGroupModel, name: &str) -> Result<Self> {
        Self::new(group, group.central_element(name)?)
    }

    pub fn element(&self) -> &GroupElement {
        &self.central_element
    }
}

/// Evaluates words and group-ring elements as operators on `g`.
pub(crate) struct AdjointEvaluator {
    ad: Vec<DMatrix<f64>>,
    ad_inv: Vec<DMatrix<f64>>,
    dim: usize,
}

impl AdjointEvaluator {
    pub(crate) fn new(rep: &RepPoint) -> Self {
        let ad: Vec<DMatrix<f64>> = rep.values.iter().map(|y| rep.group.ad_matrix(y)).collect();
        let ad_inv = ad.iter().map(|a| a.transpose()).collect();
        Self {
            ad,
            ad_inv,
            dim: rep.group.dim(),
        }
    }

    /// `M(w) = Ad(χ(w)⁻¹) = Ad(χ(l_k)⁻¹) ⋯ Ad(χ(l_1)⁻¹)`.
    pub(crate) fn word(&self, word: &Word) -> DMatrix<f64> {
        let mut out = DMatrix::identity(self.dim, self.dim);
        for l in word.letters() {
            let factor = if l.exponent == 1 {
                &self.ad_inv[l.generator]
            } else {
                &self.ad[l.generator]
            };
            out = factor * out;
        }
        out
    }

    pub(crate) fn ring(&self, e: &GroupRingElement) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (w, coef) in e.terms() {
            out += self.word(w) * coef as f64;
        }
        out
    }
}

/// The operator by which `e ∈ ℤF` acts on `g` at `rep` (right-module
/// convention).
pub fn evaluate_group_ring(e: &GroupRingElement, rep: &RepPoint) -> DMatrix<f64> {
    AdjointEvaluator::new(rep).ring(e)
}

/// `max_i ‖r_i(y) - c‖_F`.
pub fn relator_defect(pres: &Presentation, rep: &RepPoint, class: &BundleClass) -> f64 {
    pres.relators()
        .iter()
        .map(|r| rep.evaluate_word(r).distance(class.element()))
        .fold(0.0, f64::max)
}

/// Convenience constructors for common genus-`ℓ` representations.
pub mod constructors {
    use super::*;
    use crate::lie_model::AlgebraVector;

    /// Every generator sent to `±I` according to `signs`.
    pub fn central(group: &Arc<LieGroupModel>, signs: &[bool]) -> Result<RepPoint> {
        let minus = group.central_element("-I");
        let values = signs
            .iter()
            .map(|&plus| {
                if plus {
                    Ok(group.identity())
                } else {
                    minus.clone()
                }
            })
            .collect::<Result<Vec<_>>>()?;
        RepPoint::new(group.clone(), values)
    }

    /// `y_j = exp(θ_j T)` for the standard torus direction `T`.
    pub fn torus(group: &Arc<LieGroupModel>, angles: &[f64]) -> Result<RepPoint> {
        let t = group.torus_direction();
        let values = angles.iter().map(|&a| group.exp(&t.scale(a))).collect();
        RepPoint::new(group.clone(), values)
    }

    /// Elements given directly as algebra vectors: `y_j = exp(v_j)`.
    pub fn from_exponents(group: &Arc<LieGroupModel>, vectors: &[AlgebraVector]) -> RepPoint {
        RepPoint::from_parts(group.clone(), vectors.iter().map(|v| group.exp(v)).collect())
    }
}

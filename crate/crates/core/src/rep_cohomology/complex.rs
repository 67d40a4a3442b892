use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{AdjointEvaluator, RepPoint, Tolerances};
use crate::free_words::{GroupRingElement, Presentation};
use crate::linalg::{column_space, null_space, numerical_rank, RankTol};

/// `(h⁰, h¹, h²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HDims {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
}

impl HDims {
    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.h0, self.h1, self.h2)
    }
}

/// The evaluated complex `g --D0--> gⁿ --D1--> gᵐ` with ranks and bases.
///
/// All bases are orthonormal and stored as columns. `basis_h1` spans the
/// harmonic representatives `Z¹ ∩ (B¹)^⊥`; `basis_h2` spans `(im D1)^⊥`.
#[derive(Debug, Clone)]
pub struct CochainData {
    pub d0: DMatrix<f64>,
    pub d1: DMatrix<f64>,
    pub rank0: usize,
    pub rank1: usize,
    pub h_dims: HDims,
    pub basis_h0: DMatrix<f64>,
    pub basis_z1: DMatrix<f64>,
    pub basis_b1: DMatrix<f64>,
    pub basis_h1: DMatrix<f64>,
    pub basis_h2: DMatrix<f64>,
    pub rank_tol: f64,
    pub algebra_dim: usize,
    pub generator_count: usize,
    pub relator_count: usize,
}

impl CochainData {
    /// `‖D1 · D0‖_F`; vanishes when every relator evaluates to a central
    /// element.
    pub fn cochain_defect(&self) -> f64 {
        (&self.d1 * &self.d0).norm()
    }

    /// `h⁰ - h¹ + h²` against `(1 - n + m) dim g`.
    pub fn euler_characteristic_holds(&self) -> bool {
        let HDims { h0, h1, h2 } = self.h_dims;
        let lhs = h0 as i64 - h1 as i64 + h2 as i64;
        let rhs = (1 - self.generator_count as i64 + self.relator_count as i64)
            * self.algebra_dim as i64;
        lhs == rhs
    }

    /// `h⁰ = h²` and `h¹ = 2h⁰ + (2ℓ - 2) dim g` for a genus-`ℓ` surface.
    pub fn duality_holds(&self, genus: usize) -> bool {
        let HDims { h0, h1, h2 } = self.h_dims;
        h0 == h2 && h1 as i64 == 2 * h0 as i64 + (2 * genus as i64 - 2) * self.algebra_dim as i64
    }

    /// `dim Z¹`.
    pub fn z1_dim(&self) -> usize {
        self.basis_z1.ncols()
    }
}

/// `(D0, D1)` without any rank computations.
pub fn coboundary_operators(pres: &Presentation, rep: &RepPoint) -> (DMatrix<f64>, DMatrix<f64>) {
    let ev = AdjointEvaluator::new(rep);
    let d = rep.group().dim();
    let n = pres.generator_count();
    let m = pres.relator_count();
    assert_eq!(rep.len(), n, "representation has the wrong number of values");

    let mut d0 = DMatrix::zeros(n * d, d);
    for j in 0..n {
        let block = ev.ring(&GroupRingElement::one_minus_generator(j));
        d0.view_mut((j * d, 0), (d, d)).copy_from(&block);
    }
    let mut d1 = DMatrix::zeros(m * d, n * d);
    for (i, row) in pres.fox_matrix().iter().enumerate() {
        for (j, deriv) in row.iter().enumerate() {
            d1.view_mut((i * d, j * d), (d, d)).copy_from(&ev.ring(deriv));
        }
    }
    (d0, d1)
}

pub fn build_complex(pres: &Presentation, rep: &RepPoint, tol: &Tolerances) -> CochainData {
    let (d0, d1) = coboundary_operators(pres, rep);
    from_operators(d0, d1, tol.rank(), rep.group().dim(), pres)
}

fn from_operators(
    d0: DMatrix<f64>,
    d1: DMatrix<f64>,
    rank: RankTol,
    d: usize,
    pres: &Presentation,
) -> CochainData {
    let n = pres.generator_count();
    let m = pres.relator_count();
    let rank0 = numerical_rank(&d0, rank);
    let rank1 = numerical_rank(&d1, rank);
    let basis_h0 = null_space(&d0, rank);
    let basis_z1 = null_space(&d1, rank);
    let basis_b1 = column_space(&d0, rank);
    let mut stacked = DMatrix::zeros(d1.nrows() + basis_b1.ncols(), n * d);
    stacked.view_mut((0, 0), d1.shape()).copy_from(&d1);
    stacked
        .view_mut((d1.nrows(), 0), (basis_b1.ncols(), n * d))
        .copy_from(&basis_b1.transpose());
    let basis_h1 = null_space(&stacked, rank);
    let basis_h2 = null_space(&d1.transpose(), rank);
    let h_dims = HDims {
        h0: d - rank0,
        h1: basis_z1.ncols().saturating_sub(rank0),
        h2: m * d - rank1,
    };
    CochainData {
        d0,
        d1,
        rank0,
        rank1,
        h_dims,
        basis_h0,
        basis_z1,
        basis_b1,
        basis_h1,
        basis_h2,
        rank_tol: rank.rel,
        algebra_dim: d,
        generator_count: n,
        relator_count: m,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lie_model::LieGroupModel;
    use crate::rep_cohomology::{constructors, random_solution, BundleClass};

    fn setup() -> (Arc<LieGroupModel>, Presentation, Tolerances) {
        (
            Arc::new(LieGroupModel::su2()),
            Presentation::surface(2).unwrap(),
            Tolerances::default(),
        )
    }

    #[test]
    fn central_rep_complex() {
        let (g, pres, tol) = setup();
        let rep = constructors::central(&g, &[true, false, false, true]).unwrap();
        let cd = build_complex(&pres, &rep, &tol);
        assert_eq!(cd.h_dims.as_tuple(), (3, 12, 3));
        assert_eq!(cd.d1.norm(), 0.0);
        assert_eq!(cd.basis_h2, DMatrix::identity(3, 3));
        assert!(cd.duality_holds(2));
    }

    #[test]
    fn torus_rep_complex() {
        let (g, pres, tol) = setup();
        let rep = constructors::torus(&g, &[0.7, 1.1, 2.3, 0.4]).unwrap();
        let cd = build_complex(&pres, &rep, &tol);
        assert_eq!(cd.h_dims.as_tuple(), (1, 8, 1));
        assert!(cd.cochain_defect() < 1e-9);
        assert_eq!(cd.basis_h1.ncols(), 8);
        assert!(cd.duality_holds(2));
    }

    #[test]
    fn irreducible_rep_complex() {
        let (g, pres, tol) = setup();
        let rep = random_solution(&pres, &g, &BundleClass::trivial(&g), 42).unwrap();
        let cd = build_complex(&pres, &rep, &tol);
        assert_eq!(cd.h_dims.as_tuple(), (0, 6, 0));
        assert!(cd.cochain_defect() < 1e-9);
        assert!(cd.euler_characteristic_holds());
        // harmonic representatives are cocycles orthogonal to coboundaries
        assert!((&cd.d1 * &cd.basis_h1).norm() < 1e-9);
        assert!((cd.d0.transpose() * &cd.basis_h1).norm() < 1e-9);
    }

    #[test]
    fn euler_count_holds_off_variety() {
        let (g, pres, tol) = setup();
        let rep = RepPoint::new(g.clone(), (10..14).map(|s| g.random_element_seeded(s)).collect())
            .unwrap();
        let cd = build_complex(&pres, &rep, &tol);
        assert!(cd.euler_characteristic_holds());
    }
}

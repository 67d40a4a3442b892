//! Stabilizers, orbit types and the induced action on cohomology.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{build_complex, coboundary_operators, relator_defect, BundleClass, RepPoint, Tolerances};
use crate::error::{Error, Result};
use crate::free_words::Presentation;
use crate::lie_model::{AlgebraVector, GroupElement, LieGroupModel};
use crate::linalg::{block_diagonal, null_space, RankTol};

/// Generic parameters used to turn centralizer directions into group
/// elements; irrational ratios so the generated subgroup is dense.
const GENERATOR_ANGLES: [f64; 2] = [0.731_234_5, 1.618_033_988_7];

/// Conjugacy class of the stabilizer, as far as its dimension determines it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitType {
    pub stabilizer_dim: usize,
    /// `Z`, `(T)` or `G` for SU2; `None` for other groups.
    pub label: Option<String>,
}

/// `dim` of the centralizer of all values, labelled for SU2.
pub fn classify_orbit_type(rep: &RepPoint, tol: RankTol) -> OrbitType {
    let group = rep.group();
    let stabilizer_dim = group.centralizer_algebra(rep.values(), tol).ncols();
    let label = if group.name() == "SU2" {
        match stabilizer_dim {
            0 => Some("Z".to_string()),
            1 => Some("(T)".to_string()),
            3 => Some("G".to_string()),
            _ => None,
        }
    } else {
        None
    };
    OrbitType {
        stabilizer_dim,
        label,
    }
}

/// Elements generating a dense subgroup of the stabilizer: the center
/// together with `exp(s X)` for an orthonormal basis `X` of the centralizer
/// algebra and generic `s`.
pub fn stabilizer_generators(rep: &RepPoint, tol: RankTol) -> Vec<GroupElement> {
    let group = rep.group();
    let mut out = group.center_elements().unwrap_or_default();
    let basis = group.centralizer_algebra(rep.values(), tol);
    for col in basis.column_iter() {
        for s in GENERATOR_ANGLES {
            out.push(group.exp(&AlgebraVector(col.into_owned()).scale(s)));
        }
    }
    out
}

/// Dimension of the subspace of harmonic `H¹` fixed by all `elements`.
///
/// Each element acts on cochains blockwise by `Ad`; the action is checked to
/// preserve `Z¹` and `B¹` before being restricted.
pub fn stabilizer_fixed_subspace(
    pres: &Presentation,
    rep: &RepPoint,
    elements: &[GroupElement],
    tol: &Tolerances,
) -> Result<usize> {
    let group = rep.group();
    for x in elements {
        let residual = rep
            .values()
            .iter()
            .map(|y| x.mul(y).distance(&y.mul(x)))
            .fold(0.0, f64::max);
        if residual.is_nan() || residual >= 1e-9 {
            return Err(Error::NotStabilizing { residual });
        }
    }
    let complex = build_complex(pres, rep, tol);
    let h1 = &complex.basis_h1;
    if h1.ncols() == 0 {
        return Ok(0);
    }
    let n = rep.len();
    let id = DMatrix::<f64>::identity(h1.ncols(), h1.ncols());
    let mut stacked = DMatrix::zeros(h1.ncols() * elements.len(), h1.ncols());
    for (k, x) in elements.iter().enumerate() {
        let action = block_diagonal(&group.ad_matrix(x), n);
        let z1_leak = (&complex.d1 * &action * &complex.basis_z1).norm();
        let moved_b1 = &action * &complex.basis_b1;
        let b1_leak = (&moved_b1 - &complex.basis_b1 * (complex.basis_b1.transpose() * &moved_b1)).norm();
        let residual = z1_leak.max(b1_leak);
        if residual > 1e-8 {
            return Err(Error::NotStabilizing { residual });
        }
        let induced = h1.transpose() * &action * h1;
        stacked
            .view_mut((k * h1.ncols(), 0), (h1.ncols(), h1.ncols()))
            .copy_from(&(induced - &id));
    }
    Ok(null_space(&stacked, tol.rank()).ncols())
}

/// Whether conjugation by `x` identifies the complexes at `rep` and
/// `x·rep·x⁻¹`: equal dimensions and `D' = Ad(x) D Ad(x)ᵀ` blockwise.
pub fn conjugation_isomorphism_check(
    pres: &Presentation,
    rep: &RepPoint,
    x: &GroupElement,
    tol: &Tolerances,
) -> bool {
    let group = rep.group();
    let conj = rep.conjugate(x);
    let (d0, d1) = coboundary_operators(pres, rep);
    let (e0, e1) = coboundary_operators(pres, &conj);
    let ad = group.ad_matrix(x);
    let an = block_diagonal(&ad, pres.generator_count());
    let am = block_diagonal(&ad, pres.relator_count());
    let scale = d1.norm().max(d0.norm()).max(1.0);
    let err0 = (&e0 - &an * &d0 * ad.transpose()).norm();
    let err1 = (&e1 - &am * &d1 * an.transpose()).norm();
    let dims = build_complex(pres, rep, tol).h_dims == build_complex(pres, &conj, tol).h_dims;
    dims && err0.max(err1) < 1e-8 * scale
}

/// All tuples of central elements satisfying the relators.
pub fn enumerate_central_reps(
    pres: &Presentation,
    group: &Arc<LieGroupModel>,
    class: &BundleClass,
) -> Result<Vec<RepPoint>> {
    let center = group.center_elements().ok_or(Error::InfiniteCenter)?;
    let n = pres.generator_count();
    let mut out = Vec::new();
    let mut index = vec![0usize; n];
    loop {
        let values = index.iter().map(|&i| center[i].clone()).collect();
        let rep = RepPoint::from_parts(group.clone(), values);
        if relator_defect(pres, &rep, class) < 1e-12 {
            out.push(rep);
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(out);
            }
            index[pos] += 1;
            if index[pos] < center.len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep_cohomology::{constructors, random_solution};

    fn setup() -> (Arc<LieGroupModel>, Presentation, Tolerances) {
        (
            Arc::new(LieGroupModel::su2()),
            Presentation::surface(2).unwrap(),
            Tolerances::default(),
        )
    }

    fn fixed_dim(pres: &Presentation, rep: &RepPoint, tol: &Tolerances) -> usize {
        let gens = stabilizer_generators(rep, tol.rank());
        stabilizer_fixed_subspace(pres, rep, &gens, tol).unwrap()
    }

    #[test]
    fn orbit_types_of_the_three_strata() {
        let (g, pres, tol) = setup();
        let central = constructors::central(&g, &[true, false, true, true]).unwrap();
        let torus = constructors::torus(&g, &[0.7, 1.1, 2.3, 0.4]).unwrap();
        let irred = random_solution(&pres, &g, &BundleClass::trivial(&g), 42).unwrap();
        let label = |r: &RepPoint| classify_orbit_type(r, tol.rank());
        assert_eq!(label(&central).label.as_deref(), Some("G"));
        assert_eq!(label(&torus).stabilizer_dim, 1);
        assert_eq!(label(&torus).label.as_deref(), Some("(T)"));
        assert_eq!(label(&irred).label.as_deref(), Some("Z"));
    }

    #[test]
    fn fixed_subspace_dims_are_stratum_dims() {
        let (g, pres, tol) = setup();
        let central = constructors::central(&g, &[true; 4]).unwrap();
        let torus = constructors::torus(&g, &[0.7, 1.1, 2.3, 0.4]).unwrap();
        let irred = random_solution(&pres, &g, &BundleClass::trivial(&g), 42).unwrap();
        assert_eq!(fixed_dim(&pres, &central, &tol), 0);
        assert_eq!(fixed_dim(&pres, &torus, &tol), 4);
        assert_eq!(fixed_dim(&pres, &irred, &tol), 6);
        // no elements: everything is fixed
        assert_eq!(stabilizer_fixed_subspace(&pres, &torus, &[], &tol).unwrap(), 8);
    }

    #[test]
    fn non_stabilizing_elements_are_rejected() {
        let (g, pres, tol) = setup();
        let torus = constructors::torus(&g, &[0.7, 1.1, 2.3, 0.4]).unwrap();
        let x = g.random_element_seeded(3);
        assert!(matches!(
            stabilizer_fixed_subspace(&pres, &torus, &[x], &tol),
            Err(Error::NotStabilizing { .. })
        ));
    }

    #[test]
    fn orbit_type_is_conjugation_invariant() {
        let (g, pres, tol) = setup();
        let reps = [
            constructors::torus(&g, &[0.7, 1.1, 2.3, 0.4]).unwrap(),
            random_solution(&pres, &g, &BundleClass::trivial(&g), 7).unwrap(),
        ];
        for (k, rep) in reps.iter().enumerate() {
            let x = g.random_element_seeded(100 + k as u64);
            assert_eq!(
                classify_orbit_type(rep, tol.rank()),
                classify_orbit_type(&rep.conjugate(&x), tol.rank())
            );
        }
    }

    #[test]
    fn conjugation_is_an_isomorphism_of_complexes() {
        let (g, pres, tol) = setup();
        let rep = random_solution(&pres, &g, &BundleClass::trivial(&g), 9).unwrap();
        assert!(conjugation_isomorphism_check(&pres, &rep, &g.identity(), &tol));
        assert!(conjugation_isomorphism_check(&pres, &rep, &g.random_element_seeded(10), &tol));
        let minus = g.central_element("-I").unwrap();
        assert_eq!(
            coboundary_operators(&pres, &rep.conjugate(&minus)),
            coboundary_operators(&pres, &rep)
        );
    }

    #[test]
    fn central_rep_counts() {
        let g = Arc::new(LieGroupModel::su2());
        let class = BundleClass::trivial(&g);
        let count = |genus| {
            enumerate_central_reps(&Presentation::surface(genus).unwrap(), &g, &class)
                .unwrap()
                .len()
        };
        assert_eq!(count(2), 16);
        assert_eq!(count(1), 4);
        let minus = BundleClass::named(&g, "-I").unwrap();
        assert!(enumerate_central_reps(&Presentation::surface(2).unwrap(), &g, &minus)
            .unwrap()
            .is_empty());
        let u1 = Arc::new(LieGroupModel::u1());
        assert_eq!(
            enumerate_central_reps(&Presentation::surface(1).unwrap(), &u1, &BundleClass::trivial(&u1)),
            Err(Error::InfiniteCenter)
        );
    }
}

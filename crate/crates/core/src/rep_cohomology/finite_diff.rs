use nalgebra::DVector;

use super::{coboundary_operators, RepPoint};
use crate::error::Result;
use crate::free_words::Presentation;
use crate::lie_model::{AlgebraVector, GroupElement};

/// Left-translated central difference of the word map against `D1 · u`.
///
/// For each relator, `f(t) = log(r(y)⁻¹ r(y exp(tu)))` is differenced at
/// `t = ±h`; the result is the max-norm discrepancy with `D1 u`, which is
/// `O(h²)`.
pub fn finite_diff_check_d1(
    pres: &Presentation,
    rep: &RepPoint,
    u: &DVector<f64>,
    h: f64,
) -> Result<f64> {
    let group = rep.group();
    let (_, d1) = coboundary_operators(pres, rep);
    let predicted = &d1 * u;
    let plus = rep.right_translate(&(u * h));
    let minus = rep.right_translate(&(u * -h));
    let d = group.dim();
    let mut err: f64 = 0.0;
    for (i, r) in pres.relators().iter().enumerate() {
        let base_inv = rep.evaluate_word(r).inverse();
        let fp = group.log(&base_inv.mul(&plus.evaluate_word(r)))?;
        let fm = group.log(&base_inv.mul(&minus.evaluate_word(r)))?;
        let fd = (fp.0 - fm.0) / (2.0 * h);
        err = err.max((fd - predicted.rows(i * d, d)).amax());
    }
    Ok(err)
}

/// Central difference of the orbit map `t ↦ exp(-tX) y exp(tX)` against
/// `D0 · X`, left-translated per generator.
pub fn finite_diff_check_d0(
    pres: &Presentation,
    rep: &RepPoint,
    x: &AlgebraVector,
    h: f64,
) -> Result<f64> {
    let group = rep.group();
    let (d0, _) = coboundary_operators(pres, rep);
    let predicted = &d0 * &x.0;
    let d = group.dim();
    let orbit = |t: f64| -> GroupElement { group.exp(&x.scale(-t)) };
    let (gp, gm) = (orbit(h), orbit(-h));
    let mut err: f64 = 0.0;
    for (j, y) in rep.values().iter().enumerate() {
        let y_inv = y.inverse();
        let moved_p = gp.mul(y).mul(&gp.inverse());
        let moved_m = gm.mul(y).mul(&gm.inverse());
        let fp = group.log(&y_inv.mul(&moved_p))?;
        let fm = group.log(&y_inv.mul(&moved_m))?;
        let fd = (fp.0 - fm.0) / (2.0 * h);
        err = err.max((fd - predicted.rows(j * d, d)).amax());
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;
    use crate::lie_model::LieGroupModel;
    use crate::rep_cohomology::{build_complex, constructors, random_solution, BundleClass, Tolerances};

    fn irreducible() -> (Presentation, RepPoint) {
        let g = Arc::new(LieGroupModel::su2());
        let pres = Presentation::surface(2).unwrap();
        let rep = random_solution(&pres, &g, &BundleClass::trivial(&g), 7).unwrap();
        (pres, rep)
    }

    fn gaussian(len: usize, seed: u64) -> DVector<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DVector::from_fn(len, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn zero_directions_give_zero_error() {
        let (pres, rep) = irreducible();
        assert_eq!(finite_diff_check_d1(&pres, &rep, &DVector::zeros(12), 1e-4).unwrap(), 0.0);
        assert_eq!(
            finite_diff_check_d0(&pres, &rep, &AlgebraVector::zeros(3), 1e-4).unwrap(),
            0.0
        );
    }

    #[test]
    fn d1_matches_word_map_derivative() {
        let (pres, rep) = irreducible();
        let u = gaussian(12, 1);
        let e1 = finite_diff_check_d1(&pres, &rep, &u, 1e-4).unwrap();
        assert!(e1 < 1e-6, "{e1}");
        let e2 = finite_diff_check_d1(&pres, &rep, &u, 2e-4).unwrap();
        let ratio = e2 / e1;
        assert!((3.0..6.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn d0_matches_orbit_map_derivative() {
        let (pres, rep) = irreducible();
        let x = AlgebraVector(gaussian(3, 2));
        let e1 = finite_diff_check_d0(&pres, &rep, &x, 1e-4).unwrap();
        assert!(e1 < 1e-6, "{e1}");
    }

    #[test]
    fn centralizer_directions_are_fixed() {
        let g = Arc::new(LieGroupModel::su2());
        let pres = Presentation::surface(2).unwrap();
        let rep = constructors::torus(&g, &[0.7, 1.1, 2.3, 0.4]).unwrap();
        let t = g.torus_direction();
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        assert!((&cd.d0 * &t.0).norm() < 1e-14);
        assert!(finite_diff_check_d0(&pres, &rep, &t, 1e-4).unwrap() < 1e-10);
    }

    #[test]
    fn cocycle_directions_are_stationary_to_second_order() {
        let (pres, rep) = irreducible();
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        let u = &cd.basis_z1 * gaussian(cd.basis_z1.ncols(), 3);
        let group = rep.group();
        let r = &pres.relators()[0];
        let base_inv = rep.evaluate_word(r).inverse();
        let displacement = |h: f64| {
            group
                .log(&base_inv.mul(&rep.right_translate(&(&u * h)).evaluate_word(r)))
                .unwrap()
                .norm()
        };
        let (a, b) = (displacement(1e-3), displacement(2e-3));
        // quadratic, not linear, in the step
        assert!((b / a - 4.0).abs() < 0.1, "{}", b / a);
    }
}

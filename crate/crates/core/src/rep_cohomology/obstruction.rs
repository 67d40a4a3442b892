//! Quadratic obstruction map `q : Z¹ → H²` from degree-two jets of the
//! relator word map.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{build_complex, CochainData, RepPoint, Tolerances};
use crate::error::{Error, Result};
use crate::free_words::{Presentation, Word};
use crate::lie_model::{AlgebraVector, CMatrix};

/// Truncated series `c0 + t c1 + t² c2` with matrix coefficients.
#[derive(Debug, Clone)]
struct Jet {
    c0: CMatrix,
    c1: CMatrix,
    c2: CMatrix,
}

impl Jet {
    fn constant(m: CMatrix) -> Self {
        let z = CMatrix::zeros(m.nrows(), m.ncols());
        Self {
            c0: m,
            c1: z.clone(),
            c2: z,
        }
    }

    fn mul(&self, other: &Jet) -> Jet {
        Jet {
            c0: &self.c0 * &other.c0,
            c1: &self.c0 * &other.c1 + &self.c1 * &other.c0,
            c2: &self.c0 * &other.c2 + &self.c1 * &other.c1 + &self.c2 * &other.c0,
        }
    }
}

fn half() -> Complex64 {
    Complex64::new(0.5, 0.0)
}

/// Jets of `y_j exp(t u_j)` and of its inverse `exp(-t u_j) y_j⁻¹`.
fn letter_jets(rep: &RepPoint, u: &DVector<f64>) -> Vec<(Jet, Jet)> {
    let group = rep.group();
    let d = group.dim();
    rep.values()
        .iter()
        .enumerate()
        .map(|(j, y)| {
            let um = group.algebra_matrix(&AlgebraVector(u.rows(j * d, d).into_owned()));
            let u2 = &um * &um * half();
            let y = y.matrix();
            let y_inv = y.adjoint();
            let forward = Jet {
                c0: y.clone(),
                c1: y * &um,
                c2: y * &u2,
            };
            let backward = Jet {
                c0: y_inv.clone(),
                c1: -(&um * &y_inv),
                c2: &u2 * &y_inv,
            };
            (forward, backward)
        })
        .collect()
}

fn word_jet(word: &Word, jets: &[(Jet, Jet)], identity: &CMatrix) -> Jet {
    word.letters().iter().fold(Jet::constant(identity.clone()), |acc, l| {
        let (fwd, bwd) = &jets[l.generator];
        acc.mul(if l.exponent == 1 { fwd } else { bwd })
    })
}

/// Second-order term of the relator word map along `y_j exp(t u_j)`,
/// in left-translated algebra coordinates and stacked over relators.
fn second_order_term(pres: &Presentation, rep: &RepPoint, u: &DVector<f64>) -> DVector<f64> {
    let group = rep.group();
    let d = group.dim();
    let jets = letter_jets(rep, u);
    let identity = group.identity().matrix().clone();
    let mut out = DVector::zeros(pres.relator_count() * d);
    for (i, r) in pres.relators().iter().enumerate() {
        let jet = word_jet(r, &jets, &identity);
        let base_inv = jet.c0.adjoint();
        let l1 = &base_inv * &jet.c1;
        let y = &base_inv * &jet.c2;
        // t² coefficient of log(I + t L1 + t² Y)
        let second = y - &l1 * &l1 * half();
        out.rows_mut(i * d, d).copy_from(&group.coords(&second).0);
    }
    out
}

/// `q(u)` in coordinates of `basis_h2`, for a cocycle `u`.
pub fn obstruction_quadratic(
    pres: &Presentation,
    rep: &RepPoint,
    complex: &CochainData,
    u: &DVector<f64>,
) -> Result<DVector<f64>> {
    let residual = (&complex.d1 * u).norm();
    if residual > 1e-9 * u.norm().max(1.0) {
        return Err(Error::NotCocycle { residual });
    }
    let second = second_order_term(pres, rep, u);
    Ok(complex.basis_h2.transpose() * second)
}

/// The local obstruction model at a representation: the quadratic map and
/// a sample of `H¹` directions on which it can be evaluated.
#[derive(Debug, Clone)]
pub struct ObstructionModel {
    pub rep: RepPoint,
    pub complex: CochainData,
    pub sampled_cone: Vec<DVector<f64>>,
}

impl ObstructionModel {
    pub fn new(pres: &Presentation, rep: RepPoint, tol: &Tolerances) -> Self {
        let complex = build_complex(pres, &rep, tol);
        Self {
            rep,
            complex,
            sampled_cone: Vec::new(),
        }
    }

    /// `q` on a harmonic vector given in coordinates of `basis_h1`.
    pub fn q_on_h1(&self, pres: &Presentation, coords: &DVector<f64>) -> Result<DVector<f64>> {
        let u = &self.complex.basis_h1 * coords;
        obstruction_quadratic(pres, &self.rep, &self.complex, &u)
    }

    /// Draws `count` Gaussian `H¹` vectors (ambient `gⁿ` coordinates) and
    /// keeps those whose obstruction is below `tol · |u|²`.
    pub fn sample_cone(&mut self, pres: &Presentation, count: usize, seed: u64, tol: f64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h1 = self.complex.basis_h1.ncols();
        for _ in 0..count {
            let coords = DVector::from_fn(h1, |_, _| StandardNormal.sample(&mut rng));
            let u = &self.complex.basis_h1 * coords;
            if let Ok(q) = obstruction_quadratic(pres, &self.rep, &self.complex, &u) {
                if q.norm() <= tol * u.norm_squared() {
                    self.sampled_cone.push(u);
                }
            }
        }
        self.sampled_cone.len()
    }

    /// Least-squares constant `c` and max relative error in `q ≈ c · f`.
    pub fn fit_constant(measured: &[DVector<f64>], reference: &[DVector<f64>]) -> (f64, f64) {
        let num: f64 = measured.iter().zip(reference).map(|(a, b)| a.dot(b)).sum();
        let den: f64 = reference.iter().map(|b| b.norm_squared()).sum();
        let c = if den > 0.0 { num / den } else { 0.0 };
        let err = measured
            .iter()
            .zip(reference)
            .map(|(a, b)| (a - b * c).norm() / (b.norm() * c.abs()).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        (c, err)
    }
}

/// Stacks `(a_1, b_1, …, a_ℓ, b_ℓ)` into `Σ_k a_k × b_k` for `dim g = 3`.
pub fn cross_product_sum(u: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(3);
    for k in 0..u.len() / 6 {
        let a = u.fixed_rows::<3>(6 * k);
        let b = u.fixed_rows::<3>(6 * k + 3);
        out += DVector::from_column_slice(a.cross(&b).as_slice());
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lie_model::LieGroupModel;
    use crate::rep_cohomology::{constructors, random_solution, BundleClass};

    fn gaussian(len: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
        DVector::from_fn(len, |_, _| StandardNormal.sample(rng))
    }

    #[test]
    fn central_rep_obstruction_is_a_cross_product_sum() {
        let g = Arc::new(LieGroupModel::su2());
        let pres = Presentation::surface(2).unwrap();
        let rep = constructors::central(&g, &[false, true, true, false]).unwrap();
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut measured, mut reference) = (Vec::new(), Vec::new());
        for _ in 0..100 {
            let u = gaussian(12, &mut rng);
            measured.push(obstruction_quadratic(&pres, &rep, &cd, &u).unwrap());
            reference.push(cross_product_sum(&u));
        }
        let (c, err) = ObstructionModel::fit_constant(&measured, &reference);
        // [E_i, E_j] = -ε_ijk E_k in su(2)
        assert!((c + 1.0).abs() < 1e-12, "{c}");
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn obstruction_is_homogeneous_quadratic() {
        let g = Arc::new(LieGroupModel::su2());
        let pres = Presentation::surface(2).unwrap();
        let rep = constructors::torus(&g, &[0.7, 1.1, 2.3, 0.4]).unwrap();
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = &cd.basis_z1 * gaussian(cd.basis_z1.ncols(), &mut rng);
        let q1 = obstruction_quadratic(&pres, &rep, &cd, &u).unwrap();
        let q2 = obstruction_quadratic(&pres, &rep, &cd, &(&u * 2.0)).unwrap();
        assert_eq!(q1.len(), 1);
        assert!((q2 - &q1 * 4.0).norm() < 1e-9 * q1.norm().max(1.0));
    }

    #[test]
    fn obstruction_vanishes_when_h2_is_zero() {
        let g = Arc::new(LieGroupModel::su2());
        let pres = Presentation::surface(2).unwrap();
        let rep = random_solution(&pres, &g, &BundleClass::trivial(&g), 3).unwrap();
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        let u = &cd.basis_z1 * gaussian(cd.basis_z1.ncols(), &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(obstruction_quadratic(&pres, &rep, &cd, &u).unwrap().len(), 0);
    }

    #[test]
    fn non_cocycles_are_rejected() {
        let g = Arc::new(LieGroupModel::su2());
        let pres = Presentation::surface(2).unwrap();
        let rep = random_solution(&pres, &g, &BundleClass::trivial(&g), 5).unwrap();
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        let u = gaussian(12, &mut ChaCha8Rng::seed_from_u64(6));
        assert!(matches!(
            obstruction_quadratic(&pres, &rep, &cd, &u),
            Err(Error::NotCocycle { .. })
        ));
    }

    #[test]
    fn coboundaries_are_unobstructed() {
        // Gauge directions stay on the orbit, so their obstruction class is zero.
        let g = Arc::new(LieGroupModel::su2());
        let pres = Presentation::surface(2).unwrap();
        let rep = constructors::torus(&g, &[0.7, 1.1, 2.3, 0.4]).unwrap();
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        let x = DVector::from_vec(vec![0.3, -0.8, 0.5]);
        let u = &cd.d0 * x;
        let q = obstruction_quadratic(&pres, &rep, &cd, &u).unwrap();
        assert!(q.norm() < 1e-12, "{q}");
    }

    #[test]
    fn jet_second_order_matches_finite_differences() {
        let g = Arc::new(LieGroupModel::su2());
        let pres = Presentation::surface(2).unwrap();
        let rep = random_solution(&pres, &g, &BundleClass::trivial(&g), 8).unwrap();
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        let u = &cd.basis_z1 * gaussian(cd.basis_z1.ncols(), &mut ChaCha8Rng::seed_from_u64(9));
        let jet = second_order_term(&pres, &rep, &u);
        let r = &pres.relators()[0];
        let base_inv = rep.evaluate_word(r).inverse();
        let f = |t: f64| {
            g.log(&base_inv.mul(&rep.right_translate(&(&u * t)).evaluate_word(r)))
                .unwrap()
                .0
        };
        let h = 1e-3;
        // f(0) = 0, f'(0) = D1 u = 0: second coefficient is (f(h) + f(-h)) / (2h²)
        let fd = (f(h) + f(-h)) / (2.0 * h * h);
        assert!((fd - jet).norm() < 1e-5);
    }
}

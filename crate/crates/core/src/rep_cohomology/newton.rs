//! Gauss-Newton projection onto `Hom_c(π, G) = {y : r_i(y) = c}` and
//! harvesting of tangent directions of the variety.

use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    build_complex, coboundary_operators, relator_defect, BundleClass, RepPoint, Tolerances,
};
use crate::error::{Error, Result};
use crate::free_words::Presentation;
use crate::lie_model::LieGroupModel;
use crate::linalg::{column_space, numerical_rank, pinv_solve, RankTol};

/// Result of a successful projection.
#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub rep: RepPoint,
    pub iterations: usize,
    pub defect: f64,
}

/// Stacked left-translated residual `log(c⁻¹ r_i(y))`.
fn residual(pres: &Presentation, rep: &RepPoint, class: &BundleClass) -> Result<DVector<f64>> {
    let group = rep.group();
    let d = group.dim();
    let c_inv = class.element().inverse();
    let mut out = DVector::zeros(pres.relator_count() * d);
    for (i, r) in pres.relators().iter().enumerate() {
        let v = group.log(&c_inv.mul(&rep.evaluate_word(r)))?;
        out.rows_mut(i * d, d).copy_from(&v.0);
    }
    Ok(out)
}

/// Gauss-Newton on `log(c⁻¹ r(y)) = 0` with `D1` as Jacobian.
///
/// Steps `y_j ← y_j exp(δ_j)` are minimum-norm solutions of `D1 δ = -F`
/// restricted to the slice `(im D0)^⊥`, halved while they fail to reduce the
/// defect.
pub fn newton_project_to_variety(
    pres: &Presentation,
    start: &RepPoint,
    class: &BundleClass,
    tol: f64,
    max_iter: usize,
) -> Result<NewtonOutcome> {
    let group = start.group();
    let mut rep = start.clone();
    let mut defect = relator_defect(pres, &rep, class);
    let rank = RankTol::new(1e-10, 1.0);
    for iteration in 0..max_iter {
        if defect < tol {
            return Ok(NewtonOutcome {
                rep,
                iterations: iteration,
                defect,
            });
        }
        let f = residual(pres, &rep, class)?;
        let (d0, d1) = coboundary_operators(pres, &rep);
        let gauge = column_space(&d0, RankTol::new(1e-8, 1.0));
        // restrict to the slice orthogonal to the gauge directions
        let slice = nalgebra::DMatrix::<f64>::identity(d1.ncols(), d1.ncols())
            - &gauge * gauge.transpose();
        let step = &slice * pinv_solve(&(&d1 * &slice), &(-f), rank);

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let candidate = rep.right_translate(&(&step * alpha));
            let candidate = RepPoint::from_parts(
                rep.group_arc().clone(),
                candidate
                    .values()
                    .iter()
                    .map(|y| group.project(y.matrix()))
                    .collect(),
            );
            let new_defect = relator_defect(pres, &candidate, class);
            if new_defect < defect {
                accepted = Some((candidate, new_defect));
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((candidate, new_defect)) => {
                rep = candidate;
                defect = new_defect;
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations: iteration + 1,
                    defect,
                })
            }
        }
    }
    if defect < tol {
        return Ok(NewtonOutcome {
            rep,
            iterations: max_iter,
            defect,
        });
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        defect,
    })
}

/// A solution of `r(y) = c` obtained by Newton projection from a Haar-random
/// start. Failed attempts are retried with the next sub-stream of `seed`.
pub fn random_solution(
    pres: &Presentation,
    group: &Arc<LieGroupModel>,
    class: &BundleClass,
    seed: u64,
) -> Result<RepPoint> {
    let mut last = Error::NoConvergence {
        iterations: 0,
        defect: f64::NAN,
    };
    for attempt in 0..32u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let values = (0..pres.generator_count())
            .map(|_| group.random_element(&mut rng))
            .collect();
        let start = RepPoint::from_parts(group.clone(), values);
        match newton_project_to_variety(pres, &start, class, 1e-12, 100) {
            Ok(out) => return Ok(out.rep),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Tangent directions harvested at a point of the variety.
#[derive(Debug, Clone)]
pub struct ConeSampling {
    /// Unit log-displacements `log(y_j⁻¹ y'_j)`, stacked in `gⁿ`.
    pub directions: Vec<DVector<f64>>,
    /// Rank of the directions projected onto `Z¹`.
    pub span_dim_z1: usize,
    /// Rank of the directions projected onto harmonic `H¹`.
    pub span_dim_h1: usize,
    pub z1_dim: usize,
    pub h1_dim: usize,
    pub attempts: usize,
    pub failures: usize,
    /// Largest `‖q(P_Z¹ d)‖` over harvested unit directions.
    pub max_obstruction: f64,
    pub step: f64,
}

impl ConeSampling {
    pub fn success_rate(&self) -> f64 {
        if self.attempts == 0 {
            return 0.0;
        }
        (self.attempts - self.failures) as f64 / self.attempts as f64
    }
}

/// Moves `ε` along random cocycles, projects back onto the variety and
/// records the resulting displacement directions.
#[allow(clippy::too_many_arguments)]
pub fn sample_cone_directions(
    pres: &Presentation,
    rep: &RepPoint,
    class: &BundleClass,
    count: usize,
    seed: u64,
    step: f64,
    tol: &Tolerances,
) -> Result<ConeSampling> {
    let defect = relator_defect(pres, rep, class);
    if defect.is_nan() || defect >= tol.defect_tol {
        return Err(Error::InvalidArgument(format!(
            "base point is off the variety (defect {defect:.3e})"
        )));
    }
    let group = rep.group();
    let d = group.dim();
    let complex = build_complex(pres, rep, tol);
    let z1 = &complex.basis_z1;
    let h1 = &complex.basis_h1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut directions = Vec::with_capacity(count);
    let mut failures = 0;
    let mut max_obstruction: f64 = 0.0;
    for _ in 0..count {
        let coords = DVector::from_fn(z1.ncols(), |_, _| rng.sample(StandardNormal));
        let mut u = z1 * coords;
        u /= u.norm();
        let moved = rep.right_translate(&(&u * step));
        let projected = match newton_project_to_variety(pres, &moved, class, 1e-13, 50) {
            Ok(out) => out.rep,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let mut disp = DVector::zeros(rep.len() * d);
        let mut ok = true;
        for (j, (y, y_new)) in rep.values().iter().zip(projected.values()).enumerate() {
            match group.log(&y.inverse().mul(y_new)) {
                Ok(v) => disp.rows_mut(j * d, d).copy_from(&v.0),
                Err(_) => ok = false,
            }
        }
        let norm = disp.norm();
        if !ok || norm == 0.0 {
            failures += 1;
            continue;
        }
        disp /= norm;
        let on_z1 = z1 * (z1.transpose() * &disp);
        if let Ok(q) = super::obstruction_quadratic(pres, rep, &complex, &on_z1) {
            max_obstruction = max_obstruction.max(q.norm());
        }
        directions.push(disp);
    }
    let span = |basis: &nalgebra::DMatrix<f64>| {
        if directions.is_empty() || basis.ncols() == 0 {
            return 0;
        }
        let mut m = nalgebra::DMatrix::zeros(basis.ncols(), directions.len());
        for (k, v) in directions.iter().enumerate() {
            m.set_column(k, &(basis.transpose() * v));
        }
        numerical_rank(&m, tol.rank())
    };
    Ok(ConeSampling {
        span_dim_z1: span(z1),
        span_dim_h1: span(h1),
        z1_dim: z1.ncols(),
        h1_dim: h1.ncols(),
        attempts: count,
        failures,
        max_obstruction,
        step,
        directions,
    })
}

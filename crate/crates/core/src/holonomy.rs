//! Parallel transport along a path in a trivialized bundle.
//!
//! A connection pulled back along the path is the algebra-valued function
//! `A(t)`, sampled on a uniform grid of `[0, b]` and linearly interpolated.
//! The horizontal lift solves `a' = -A a`, `a(0) = e`, and the holonomy is
//! `a(b)`.
//!
//! For a variation `ϑ` the left-translated derivative of `s ↦ Hol(A - sϑ)`
//! at `s = 0` is
//!
//! ```text
//! ∫₀ᵇ Ad(a(t)⁻¹) ϑ(t) dt
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_model::{AlgebraVector, CMatrix, GroupElement, LieGroupModel};

/// Successive refinements must agree to this before a result is accepted.
pub const REFINEMENT_TOL: f64 = 1e-10;
const MAX_SUBSTEPS: usize = 1 << 12;

/// `t ↦ A(t)` on a uniform grid of `[0, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathConnection {
    group: Arc<LieGroupModel>,
    b: f64,
    values: Vec<AlgebraVector>,
}

/// `t ↦ ϑ(t)` on the grid of a [`PathConnection`].
#[derive(Debug, Clone, PartialEq)]
pub struct Variation {
    values: Vec<AlgebraVector>,
}

fn check_samples(values: &[AlgebraVector], dim: usize) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(
            "a grid needs at least two points".into(),
        ));
    }
    for (i, v) in values.iter().enumerate() {
        if v.dim() != dim {
            return Err(Error::InvalidArgument(format!(
                "grid point {i} has {} coordinates, expected {dim}",
                v.dim()
            )));
        }
        if v.0.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid point {i} is not finite")));
        }
    }
    Ok(())
}

impl PathConnection {
    pub fn new(group: Arc<LieGroupModel>, b: f64, values: Vec<AlgebraVector>) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("path length {b} must be positive")));
        }
        check_samples(&values, group.dim())?;
        Ok(Self { group, b, values })
    }

    /// `A ≡ x` sampled at two points.
    pub fn constant(group: Arc<LieGroupModel>, b: f64, x: AlgebraVector) -> Result<Self> {
        Self::new(group, b, vec![x.clone(), x])
    }

    /// `A(t) = f(t)` sampled at `points` grid points.
    pub fn sample(
        group: Arc<LieGroupModel>,
        b: f64,
        points: usize,
        f: impl Fn(f64) -> AlgebraVector,
    ) -> Result<Self> {
        let step = b / (points.max(2) - 1) as f64;
        let values = (0..points).map(|i| f(i as f64 * step)).collect();
        Self::new(group, b, values)
    }

    pub fn group(&self) -> &LieGroupModel {
        &self.group
    }

    pub fn length(&self) -> f64 {
        self.b
    }

    pub fn values(&self) -> &[AlgebraVector] {
        &self.values
    }

    fn cell(&self) -> f64 {
        self.b / (self.values.len() - 1) as f64
    }

    /// Linear interpolation, clamped to `[0, b]`.
    pub fn at(&self, t: f64) -> AlgebraVector {
        interpolate(&self.values, self.cell(), t)
    }

    /// The same path traversed backwards: `t ↦ -A(b - t)`.
    pub fn reversed(&self) -> Self {
        Self {
            group: self.group.clone(),
            b: self.b,
            values: self.values.iter().rev().map(|v| v.scale(-1.0)).collect(),
        }
    }

    /// Constant gauge transformation `A ↦ Ad(x) A`.
    pub fn gauge_transform(&self, x: &GroupElement) -> Self {
        let ad = self.group.ad_matrix(x);
        Self {
            group: self.group.clone(),
            b: self.b,
            values: self.values.iter().map(|v| AlgebraVector(&ad * &v.0)).collect(),
        }
    }

    /// `A + s ϑ`.
    pub fn perturbed(&self, var: &Variation, s: f64) -> Result<Self> {
        self.check_variation(var)?;
        Ok(Self {
            group: self.group.clone(),
            b: self.b,
            values: self
                .values
                .iter()
                .zip(&var.values)
                .map(|(a, v)| a.add(&v.scale(s)))
                .collect(),
        })
    }

    fn check_variation(&self, var: &Variation) -> Result<()> {
        if var.values.len() != self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "variation has {} grid points, connection has {}",
                var.values.len(),
                self.values.len()
            )));
        }
        check_samples(&var.values, self.group.dim())
    }
}

impl Variation {
    pub fn new(values: Vec<AlgebraVector>) -> Result<Self> {
        let dim = values.first().map_or(0, AlgebraVector::dim);
        check_samples(&values, dim)?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[AlgebraVector] {
        &self.values
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect(),
        }
    }
}

fn interpolate(values: &[AlgebraVector], cell: f64, t: f64) -> AlgebraVector {
    let last = values.len() - 1;
    let x = (t / cell).clamp(0.0, last as f64);
    let i = (x.floor() as usize).min(last - 1);
    let w = x - i as f64;
    values[i].scale(1.0 - w).add(&values[i + 1].scale(w))
}

/// Step boundaries between `t0 < t1`: every grid node inside plus the ends,
/// each interval split into `substeps` equal steps.
fn breakpoints(cell: f64, t0: f64, t1: f64, substeps: usize) -> Vec<f64> {
    let mut nodes = vec![t0];
    let mut k = (t0 / cell).floor() as usize + 1;
    while (k as f64) * cell < t1 - 1e-14 * cell {
        let t = k as f64 * cell;
        if t > t0 + 1e-14 * cell {
            nodes.push(t);
        }
        k += 1;
    }
    nodes.push(t1);
    let mut out = vec![t0];
    for pair in nodes.windows(2) {
        let h = (pair[1] - pair[0]) / substeps as f64;
        for s in 1..=substeps {
            out.push(if s == substeps { pair[1] } else { pair[0] + s as f64 * h });
        }
    }
    out
}

fn rk4_step(conn: &PathConnection, a: &CMatrix, t: f64, h: f64) -> CMatrix {
    let g = conn.group();
    let f = |t: f64, y: &CMatrix| -(g.algebra_matrix(&conn.at(t)) * y);
    let k1 = f(t, a);
    let k2 = f(t + h / 2.0, &(a + &k1 * num_complex::Complex64::new(h / 2.0, 0.0)));
    let k3 = f(t + h / 2.0, &(a + &k2 * num_complex::Complex64::new(h / 2.0, 0.0)));
    let k4 = f(t + h, &(a + &k3 * num_complex::Complex64::new(h, 0.0)));
    let sum = k1 + (k2 + k3) * num_complex::Complex64::new(2.0, 0.0) + k4;
    g.project(&(a + sum * num_complex::Complex64::new(h / 6.0, 0.0)))
        .matrix()
        .clone()
}

/// The lift at every breakpoint, starting from the identity at `t0`.
fn lift(conn: &PathConnection, times: &[f64]) -> Vec<CMatrix> {
    let mut a = conn.group().identity().matrix().clone();
    let mut out = Vec::with_capacity(times.len());
    out.push(a.clone());
    for pair in times.windows(2) {
        a = rk4_step(conn, &a, pair[0], pair[1] - pair[0]);
        out.push(a.clone());
    }
    out
}

/// Transport from `t0` to `t1` with a fixed number of RK4 steps per grid
/// cell.
pub fn transport_at_resolution(
    conn: &PathConnection,
    t0: f64,
    t1: f64,
    substeps: usize,
) -> Result<GroupElement> {
    if !(0.0 <= t0 && t0 <= t1 && t1 <= conn.b * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "transport interval [{t0}, {t1}] is not inside [0, {}]",
            conn.b
        )));
    }
    if t0 == t1 {
        return Ok(conn.group().identity());
    }
    let times = breakpoints(conn.cell(), t0, t1.min(conn.b), substeps.max(1));
    Ok(GroupElement::from_matrix(lift(conn, &times).pop().unwrap()))
}

/// Transport from `t0` to `t1`, refined until successive doublings agree to
/// [`REFINEMENT_TOL`].
pub fn transport_between(conn: &PathConnection, t0: f64, t1: f64) -> Result<GroupElement> {
    let mut substeps = 1;
    let mut prev = transport_at_resolution(conn, t0, t1, substeps)?;
    while substeps < MAX_SUBSTEPS {
        substeps *= 2;
        let next = transport_at_resolution(conn, t0, t1, substeps)?;
        if next.distance(&prev) < REFINEMENT_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// `a(t)`.
pub fn horizontal_transport(conn: &PathConnection, t: f64) -> Result<GroupElement> {
    transport_between(conn, 0.0, t)
}

/// `a(b)`.
pub fn holonomy(conn: &PathConnection) -> GroupElement {
    transport_between(conn, 0.0, conn.b).expect("full interval is always valid")
}

pub fn holonomy_at_resolution(conn: &PathConnection, substeps: usize) -> GroupElement {
    transport_at_resolution(conn, 0.0, conn.b, substeps).expect("full interval is always valid")
}

/// Holonomy of the concatenated path: later segments multiply on the left.
pub fn holonomy_of_segments(segments: &[PathConnection]) -> Result<GroupElement> {
    let first = segments
        .first()
        .ok_or_else(|| Error::InvalidArgument("no segments".into()))?;
    let mut out = first.group().identity();
    for seg in segments {
        out = holonomy(seg).mul(&out);
    }
    Ok(out)
}

/// `∫₀ᵇ Ad(a(t)⁻¹) ϑ(t) dt` by composite Simpson over pairs of RK4 steps,
/// `2 · substeps` steps per grid cell.
pub fn holonomy_derivative_at_resolution(
    conn: &PathConnection,
    var: &Variation,
    substeps: usize,
) -> Result<AlgebraVector> {
    conn.check_variation(var)?;
    let g = conn.group();
    let times = breakpoints(conn.cell(), 0.0, conn.b, 2 * substeps.max(1));
    let lifts = lift(conn, &times);
    let integrand: Vec<AlgebraVector> = times
        .iter()
        .zip(&lifts)
        .map(|(&t, a)| {
            let theta = interpolate(&var.values, conn.cell(), t);
            let a = GroupElement::from_matrix(a.clone());
            AlgebraVector(g.ad_matrix(&a.inverse()) * theta.0)
        })
        .collect();
    let mut total = AlgebraVector::zeros(g.dim());
    for k in (0..times.len() - 1).step_by(2) {
        let h = times[k + 2] - times[k];
        let panel = integrand[k]
            .add(&integrand[k + 1].scale(4.0))
            .add(&integrand[k + 2]);
        total = total.add(&panel.scale(h / 6.0));
    }
    Ok(total)
}

/// The derivative refined until successive doublings agree to
/// [`REFINEMENT_TOL`].
pub fn holonomy_derivative(conn: &PathConnection, var: &Variation) -> Result<AlgebraVector> {
    let mut substeps = 1;
    let mut prev = holonomy_derivative_at_resolution(conn, var, substeps)?;
    while substeps < MAX_SUBSTEPS {
        substeps *= 2;
        let next = holonomy_derivative_at_resolution(conn, var, substeps)?;
        if next.sub(&prev).norm() < REFINEMENT_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Central difference of `s ↦ Hol(A - sϑ)`, left-translated to `g`.
pub fn holonomy_derivative_fd(conn: &PathConnection, var: &Variation, s: f64) -> Result<AlgebraVector> {
    let g = conn.group();
    let base_inv = holonomy(conn).inverse();
    let minus = holonomy(&conn.perturbed(var, -s)?);
    let plus = holonomy(&conn.perturbed(var, s)?);
    let diff = (minus.matrix() - plus.matrix()) * num_complex::Complex64::new(0.5 / s, 0.0);
    Ok(g.coords(&(base_inv.matrix() * diff)))
}

/// `‖Hol(Ad(x) A) - x Hol(A) x⁻¹‖`.
pub fn conjugation_invariance_check(conn: &PathConnection, x: &GroupElement) -> f64 {
    let lhs = holonomy(&conn.gauge_transform(x));
    lhs.distance(&holonomy(conn).conjugate_by(x))
}

/// `{group, b, grid: [[t, coords…]…], variation: [[t, coords…]…]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyConfig {
    pub group: String,
    pub b: f64,
    pub grid: Vec<Vec<f64>>,
    #[serde(default)]
    pub variation: Option<Vec<Vec<f64>>>,
}

impl HolonomyConfig {
    pub fn resolve(&self) -> Result<(PathConnection, Option<Variation>)> {
        let group = Arc::new(LieGroupModel::parse(&self.group)?);
        let conn = PathConnection::new(group, self.b, self.rows(&self.grid)?)?;
        let var = match &self.variation {
            Some(rows) => {
                let var = Variation::new(self.rows(rows)?)?;
                conn.check_variation(&var)?;
                Some(var)
            }
            None => None,
        };
        Ok((conn, var))
    }

    /// Strips and validates the `t` column against a uniform grid.
    fn rows(&self, rows: &[Vec<f64>]) -> Result<Vec<AlgebraVector>> {
        if rows.len() < 2 {
            return Err(Error::InvalidArgument("a grid needs at least two points".into()));
        }
        let cell = self.b / (rows.len() - 1) as f64;
        rows.iter()
            .enumerate()
            .map(|(i, row)| {
                let (&t, coords) = row
                    .split_first()
                    .ok_or_else(|| Error::InvalidArgument(format!("grid row {i} is empty")))?;
                if (t - i as f64 * cell).abs() > 1e-9 * self.b.max(1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "grid row {i}: t = {t} breaks the uniform grid on [0, {}]",
                        self.b
                    )));
                }
                Ok(AlgebraVector::new(coords.to_vec()))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn su2() -> Arc<LieGroupModel> {
        Arc::new(LieGroupModel::su2())
    }

    fn smooth_conn(g: &Arc<LieGroupModel>, seed: u64) -> PathConnection {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (g.random_algebra_vector(&mut rng), g.random_algebra_vector(&mut rng));
        PathConnection::sample(g.clone(), 1.5, 9, |t| p.scale(t.cos()).add(&q.scale(t * t))).unwrap()
    }

    fn smooth_var(g: &Arc<LieGroupModel>, seed: u64) -> Variation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (g.random_algebra_vector(&mut rng), g.random_algebra_vector(&mut rng));
        Variation::new((0..9).map(|i| p.add(&q.scale((i as f64).sin()))).collect()).unwrap()
    }

    #[test]
    fn zero_connection_has_trivial_transport() {
        let g = su2();
        let conn = PathConnection::constant(g.clone(), 2.0, AlgebraVector::zeros(3)).unwrap();
        for t in [0.0, 0.3, 2.0] {
            assert!(horizontal_transport(&conn, t).unwrap().distance(&g.identity()) < 1e-15);
        }
    }

    #[test]
    fn constant_connection_matches_closed_form() {
        let g = su2();
        for seed in 0..5 {
            let x = g.random_algebra_vector_seeded(seed);
            let conn = PathConnection::constant(g.clone(), 1.0, x.clone()).unwrap();
            let err = holonomy(&conn).distance(&g.exp(&x.scale(-1.0)));
            assert!(err < 1e-10, "{err}");
        }
    }

    #[test]
    fn transport_has_the_flow_property() {
        let g = su2();
        let conn = smooth_conn(&g, 1);
        let b = conn.length();
        let first = transport_between(&conn, 0.0, b / 2.0).unwrap();
        let second = transport_between(&conn, b / 2.0, b).unwrap();
        assert!(holonomy(&conn).distance(&second.mul(&first)) < 1e-9);
    }

    #[test]
    fn reversal_inverts_holonomy() {
        let g = su2();
        let conn = smooth_conn(&g, 2);
        assert!(holonomy(&conn.reversed()).distance(&holonomy(&conn).inverse()) < 1e-9);
    }

    #[test]
    fn piecewise_constant_segments_compose_in_path_order() {
        let g = su2();
        let xs: Vec<_> = (10..13).map(|s| g.random_algebra_vector_seeded(s)).collect();
        let segments: Vec<_> = xs
            .iter()
            .map(|x| PathConnection::constant(g.clone(), 1.0, x.clone()).unwrap())
            .collect();
        let expected = xs
            .iter()
            .fold(g.identity(), |acc, x| g.exp(&x.scale(-1.0)).mul(&acc));
        assert!(holonomy_of_segments(&segments).unwrap().distance(&expected) < 1e-9);
    }

    #[test]
    fn transport_stays_on_the_group() {
        let g = su2();
        let conn = smooth_conn(&g, 3);
        assert!(g.membership_residual(&holonomy_at_resolution(&conn, 1)) < 1e-10);
    }

    #[test]
    fn derivative_trivial_cases() {
        let g = su2();
        let conn = smooth_conn(&g, 4);
        let zero = Variation::new(vec![AlgebraVector::zeros(3); 9]).unwrap();
        assert_eq!(holonomy_derivative(&conn, &zero).unwrap().norm(), 0.0);

        let flat = PathConnection::sample(g.clone(), 1.5, 9, |_| AlgebraVector::zeros(3)).unwrap();
        let var = smooth_var(&g, 5);
        // trapezoid of a piecewise-linear function is exact
        let cell = 1.5 / 8.0;
        let vals = var.values();
        let exact = vals
            .windows(2)
            .fold(AlgebraVector::zeros(3), |acc, w| acc.add(&w[0].add(&w[1]).scale(cell / 2.0)));
        assert!(holonomy_derivative(&flat, &var).unwrap().sub(&exact).norm() < 1e-13);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let g = su2();
        for seed in 0..3 {
            let conn = smooth_conn(&g, 20 + seed);
            let var = smooth_var(&g, 40 + seed);
            let formula = holonomy_derivative(&conn, &var).unwrap();
            let fd = holonomy_derivative_fd(&conn, &var, 1e-4).unwrap();
            assert!(formula.sub(&fd).norm() < 1e-6, "{}", formula.sub(&fd).norm());
        }
    }

    #[test]
    fn derivative_is_linear_in_the_variation() {
        let g = su2();
        let conn = smooth_conn(&g, 6);
        let (v, w) = (smooth_var(&g, 7), smooth_var(&g, 8));
        let lhs = holonomy_derivative_at_resolution(&conn, &v.scale(2.0).add(&w.scale(-0.5)), 4).unwrap();
        let rhs = holonomy_derivative_at_resolution(&conn, &v, 4)
            .unwrap()
            .scale(2.0)
            .add(&holonomy_derivative_at_resolution(&conn, &w, 4).unwrap().scale(-0.5));
        assert!(lhs.sub(&rhs).norm() < 1e-10);
    }

    #[test]
    fn refinement_is_fourth_order() {
        let g = su2();
        let conn = smooth_conn(&g, 9);
        let var = smooth_var(&g, 10);
        let reference = holonomy_derivative_at_resolution(&conn, &var, 256).unwrap();
        let err = |k| {
            holonomy_derivative_at_resolution(&conn, &var, k)
                .unwrap()
                .sub(&reference)
                .norm()
        };
        let order = (err(2) / err(4)).log2();
        assert!(order >= 3.5, "{order}");
        let href = holonomy_at_resolution(&conn, 256);
        let herr = |k| holonomy_at_resolution(&conn, k).distance(&href);
        assert!((herr(2) / herr(4)).log2() >= 3.5);
    }

    #[test]
    fn gauge_invariance() {
        let g = su2();
        let conn = smooth_conn(&g, 11);
        assert!(conjugation_invariance_check(&conn, &g.identity()) < 1e-15);
        assert_eq!(conjugation_invariance_check(&conn, &g.central_element("-I").unwrap()), 0.0);
        for s in 0..3 {
            assert!(conjugation_invariance_check(&conn, &g.random_element_seeded(s)) < 1e-9);
        }
    }

    #[test]
    fn config_rows_are_validated() {
        let cfg = HolonomyConfig {
            group: "SU2".into(),
            b: 1.0,
            grid: vec![vec![0.0, 0.1, 0.2, 0.3], vec![0.5, 0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0, 0.0]],
            variation: Some(vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.5, 0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0, 1.0]]),
        };
        let (conn, var) = cfg.resolve().unwrap();
        assert_eq!(conn.values().len(), 3);
        assert!(var.is_some());
        let mut bad = cfg.clone();
        bad.grid[1][0] = 0.4;
        assert!(bad.resolve().is_err());
        let mut short = cfg;
        short.variation = Some(vec![vec![0.0, 1.0, 0.0, 0.0], vec![1.0, 0.0, 1.0, 0.0]]);
        assert!(short.resolve().is_err());
    }
}

//! Linear momentum-map models of the singular points of the genus-two SU2
//! moduli space.
//!
//! * `SO(2)` acting diagonally on `W = ℝ² × ℝ²`, `μ(q, p) = |q p|`. The
//!   invariants `u = qq - pp`, `v = 2qp`, `r = qq + pp` map the reduced
//!   space onto the cone `u² + v² = r², r ≥ 0`.
//! * `SO(3)` acting diagonally on `W = (ℝ³)⁴`, points `(q1, p1, q2, p2)`,
//!   `μ = q1 × p1 + q2 × p2`. The invariants are the ten scalar products,
//!   collected in the Gram matrix `λ` with rows ordered `(q1, q2, p1, p2)`.
//!
//! Zariski tangent dimensions at the origin are computed as the dimension of
//! the linear span of Hilbert images of zero-locus points.

use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Rotation3, SymmetricEigen, Unit, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, pinv_solve, RankTol};

/// Rank decisions on spans of Hilbert images.
pub const SPAN_RANK_TOL: f64 = 1e-8;
/// Relations must vanish to this on zero-locus points.
pub const RELATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    So2,
    So3,
}

impl ModelKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "so2" => Ok(Self::So2),
            "so3" => Ok(Self::So3),
            other => Err(Error::InvalidArgument(format!(
                "unknown model `{other}` (expected so2 or so3)"
            ))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::So2 => "so2",
            Self::So3 => "so3",
        })
    }
}

/// A linear symplectic representation with quadratic momentum map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearMomentumModel {
    kind: ModelKind,
}

/// A point of `W` with `‖μ(w)‖` recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLocusPoint {
    pub w: DVector<f64>,
    pub residual: f64,
}

/// Image of the Hilbert map.
#[derive(Debug, Clone, PartialEq)]
pub enum HilbertImage {
    Cone { u: f64, v: f64, r: f64 },
    Gram(Matrix4<f64>),
}

impl HilbertImage {
    /// Coordinates in the ambient space: `(u, v, r)` or the upper triangle
    /// of `λ` row by row.
    pub fn coordinates(&self) -> Vec<f64> {
        match self {
            Self::Cone { u, v, r } => vec![*u, *v, *r],
            Self::Gram(m) => (0..4).flat_map(|i| (i..4).map(move |j| m[(i, j)])).collect(),
        }
    }
}

/// `|q p|`.
pub fn momentum_so2(q: &Vector2<f64>, p: &Vector2<f64>) -> f64 {
    q.x * p.y - q.y * p.x
}

/// `q1 × p1 + q2 × p2`.
pub fn momentum_so3(
    q1: &Vector3<f64>,
    p1: &Vector3<f64>,
    q2: &Vector3<f64>,
    p2: &Vector3<f64>,
) -> Vector3<f64> {
    q1.cross(p1) + q2.cross(p2)
}

/// Splits an `SO(3)` point into `(q1, p1, q2, p2)`.
fn so3_parts(w: &DVector<f64>) -> [Vector3<f64>; 4] {
    std::array::from_fn(|k| Vector3::new(w[3 * k], w[3 * k + 1], w[3 * k + 2]))
}

fn so3_point(q1: Vector3<f64>, p1: Vector3<f64>, q2: Vector3<f64>, p2: Vector3<f64>) -> DVector<f64> {
    DVector::from_iterator(12, q1.iter().chain(&p1).chain(&q2).chain(&p2).copied())
}

fn gaussian<R: Rng + ?Sized, const N: usize>(rng: &mut R) -> [f64; N] {
    std::array::from_fn(|_| rng.sample(StandardNormal))
}

impl LinearMomentumModel {
    pub fn new(kind: ModelKind) -> Self {
        Self { kind }
    }

    pub fn so2() -> Self {
        Self::new(ModelKind::So2)
    }

    pub fn so3() -> Self {
        Self::new(ModelKind::So3)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// `dim W`.
    pub fn w_dim(&self) -> usize {
        match self.kind {
            ModelKind::So2 => 4,
            ModelKind::So3 => 12,
        }
    }

    /// `dim k*`.
    pub fn momentum_dim(&self) -> usize {
        match self.kind {
            ModelKind::So2 => 1,
            ModelKind::So3 => 3,
        }
    }

    /// Number of generating invariants on the zero locus.
    pub fn invariant_count(&self) -> usize {
        match self.kind {
            ModelKind::So2 => 3,
            ModelKind::So3 => 10,
        }
    }

    pub fn momentum(&self, w: &DVector<f64>) -> DVector<f64> {
        match self.kind {
            ModelKind::So2 => {
                let q = Vector2::new(w[0], w[1]);
                let p = Vector2::new(w[2], w[3]);
                DVector::from_element(1, momentum_so2(&q, &p))
            }
            ModelKind::So3 => {
                let [q1, p1, q2, p2] = so3_parts(w);
                DVector::from_column_slice(momentum_so3(&q1, &p1, &q2, &p2).as_slice())
            }
        }
    }

    /// Jacobian of `μ` at `w`.
    fn momentum_jacobian(&self, w: &DVector<f64>) -> DMatrix<f64> {
        match self.kind {
            ModelKind::So2 => DMatrix::from_row_slice(1, 4, &[w[3], -w[2], -w[1], w[0]]),
            ModelKind::So3 => {
                // d(a × b) = da × b + a × db, and a × x = [a]ₓ x
                let [q1, p1, q2, p2] = so3_parts(w);
                let mut jac = DMatrix::zeros(3, 12);
                let blocks = [
                    -p1.cross_matrix(),
                    q1.cross_matrix(),
                    -p2.cross_matrix(),
                    q2.cross_matrix(),
                ];
                for (k, b) in blocks.iter().enumerate() {
                    jac.view_mut((0, 3 * k), (3, 3)).copy_from(b);
                }
                jac
            }
        }
    }

    /// A Haar-random group element as `(action on W, coadjoint action on k*)`.
    pub fn random_group_action<R: Rng + ?Sized>(&self, rng: &mut R) -> (DMatrix<f64>, DMatrix<f64>) {
        match self.kind {
            ModelKind::So2 => {
                let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let (s, c) = theta.sin_cos();
                let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
                (crate::linalg::block_diagonal(&rot, 2), DMatrix::identity(1, 1))
            }
            ModelKind::So3 => {
                let axis = Unit::new_normalize(Vector3::from(gaussian::<_, 3>(rng)));
                let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
                let rot = Rotation3::from_axis_angle(&axis, angle).into_inner();
                let rot = DMatrix::from_iterator(3, 3, rot.iter().copied());
                (crate::linalg::block_diagonal(&rot, 4), rot)
            }
        }
    }

    pub fn hilbert_map(&self, w: &DVector<f64>) -> HilbertImage {
        match self.kind {
            ModelKind::So2 => {
                let (qq, pp) = (w[0] * w[0] + w[1] * w[1], w[2] * w[2] + w[3] * w[3]);
                let qp = w[0] * w[2] + w[1] * w[3];
                HilbertImage::Cone {
                    u: qq - pp,
                    v: 2.0 * qp,
                    r: qq + pp,
                }
            }
            ModelKind::So3 => {
                let [q1, p1, q2, p2] = so3_parts(w);
                let ordered = [q1, q2, p1, p2];
                HilbertImage::Gram(Matrix4::from_fn(|i, j| ordered[i].dot(&ordered[j])))
            }
        }
    }

    /// Constructive zero-locus samples; the first is always `w = 0`.
    ///
    /// `SO(2)`: `p = s q`. `SO(3)`: all four vectors in a random plane with
    /// `p2` adjusted so the two signed areas cancel; every tenth sample puts
    /// all vectors on one line.
    pub fn sample_zero_locus(&self, count: usize, seed: u64) -> Vec<ZeroLocusPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        out.push(self.point(DVector::zeros(self.w_dim())));
        while out.len() < count {
            let w = match self.kind {
                ModelKind::So2 => {
                    let [a, b, s] = gaussian::<_, 3>(&mut rng);
                    DVector::from_vec(vec![a, b, s * a, s * b])
                }
                ModelKind::So3 if out.len() % 10 == 1 => {
                    let e = Vector3::from(gaussian::<_, 3>(&mut rng)).normalize();
                    let c = gaussian::<_, 4>(&mut rng);
                    so3_point(e * c[0], e * c[1], e * c[2], e * c[3])
                }
                ModelKind::So3 => match planar_balanced(&mut rng) {
                    Some(w) => w,
                    None => continue,
                },
            };
            out.push(self.point(w));
        }
        out
    }

    /// Zero-locus samples by Gauss-Newton projection of Gaussian points of
    /// `W` onto `μ = 0`. Points that fail to converge are dropped.
    pub fn sample_zero_locus_projected(&self, count: usize, seed: u64) -> Vec<ZeroLocusPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count * 4 {
            if out.len() == count {
                break;
            }
            let w = DVector::from_fn(self.w_dim(), |_, _| rng.sample(StandardNormal));
            if let Some(p) = self.project_to_zero_locus(&w, 1e-13, 50) {
                out.push(p);
            }
        }
        out
    }

    /// Minimum-norm Gauss-Newton steps on `μ(w) = 0`.
    pub fn project_to_zero_locus(&self, start: &DVector<f64>, tol: f64, max_iter: usize) -> Option<ZeroLocusPoint> {
        let mut w = start.clone();
        for _ in 0..max_iter {
            let mu = self.momentum(&w);
            if mu.norm() < tol {
                return Some(self.point(w));
            }
            let step = pinv_solve(&self.momentum_jacobian(&w), &(-mu), RankTol::relative(1e-12));
            w += step;
        }
        let p = self.point(w);
        (p.residual < tol).then_some(p)
    }

    fn point(&self, w: DVector<f64>) -> ZeroLocusPoint {
        let residual = self.momentum(&w).norm();
        ZeroLocusPoint { w, residual }
    }

    /// Residuals of the defining relations of the image of the zero locus.
    pub fn check_relations(&self, point: &ZeroLocusPoint) -> RelationReport {
        let mut entries = Vec::new();
        match self.hilbert_map(&point.w) {
            HilbertImage::Cone { u, v, r } => {
                entries.push(("cone".to_string(), (u * u + v * v - r * r).abs()));
                entries.push(("nonnegative_r".to_string(), (-r).max(0.0)));
            }
            HilbertImage::Gram(l) => {
                entries.push(("det".to_string(), l.determinant().abs()));
                entries.push(("psi".to_string(), psi(&l).abs()));
                for (name, value) in wedge_mu_invariants(&l) {
                    entries.push((name, value.abs()));
                }
                for (k, m) in three_minors(&l).into_iter().enumerate() {
                    entries.push((format!("minor_{k:02}"), m.abs()));
                }
                let eig = SymmetricEigen::new(l).eigenvalues;
                let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
                entries.push(("psd".to_string(), (-min).max(0.0)));
                let mut sv: Vec<f64> = l.singular_values().iter().copied().collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                let rank_residual = if sv[0] > 0.0 { sv[2] / sv[0] } else { 0.0 };
                entries.push(("rank_le_2".to_string(), rank_residual));
            }
        }
        RelationReport { entries }
    }
}

/// Four vectors in a random plane with `area(q1, p1) + area(q2, p2) = 0`.
fn planar_balanced<R: Rng + ?Sized>(rng: &mut R) -> Option<DVector<f64>> {
    let normal = Vector3::from(gaussian::<_, 3>(rng)).normalize();
    let helper = if normal.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = normal.cross(&helper).normalize();
    let e2 = normal.cross(&e1);
    let c = gaussian::<_, 6>(rng);
    let (a1, b1, a2) = (Vector2::new(c[0], c[1]), Vector2::new(c[2], c[3]), Vector2::new(c[4], c[5]));
    if a2.norm() < 0.1 {
        return None;
    }
    let area1 = momentum_so2(&a1, &b1);
    // b2 = s a2 + t J a2 with |a2 J a2| = |a2|², so t fixes the area
    let s: f64 = rng.sample(StandardNormal);
    let j_a2 = Vector2::new(-a2.y, a2.x);
    let b2 = a2 * s - j_a2 * (area1 / a2.norm_squared());
    let lift = |v: Vector2<f64>| e1 * v.x + e2 * v.y;
    Some(so3_point(lift(a1), lift(b1), lift(a2), lift(b2)))
}

/// `ψ(λ)`: the sum of the three `2×2` determinants equal to `|μ|²`.
pub fn psi(l: &Matrix4<f64>) -> f64 {
    // indices: 0 = q1, 1 = q2, 2 = p1, 3 = p2
    let det2 = |a: usize, b: usize, c: usize, d: usize| l[(a, c)] * l[(b, d)] - l[(a, d)] * l[(b, c)];
    det2(0, 2, 0, 2) + 2.0 * det2(0, 2, 1, 3) + det2(1, 3, 1, 3)
}

/// The six invariants `(a ∧ b) μ` for couples `(a, b)` of the four vectors.
pub fn wedge_mu_invariants(l: &Matrix4<f64>) -> Vec<(String, f64)> {
    const NAMES: [&str; 4] = ["q1", "q2", "p1", "p2"];
    let (q1, q2, p1, p2) = (0, 1, 2, 3);
    let mut out = Vec::with_capacity(6);
    for a in 0..4 {
        for b in a + 1..4 {
            let value = l[(a, q1)] * l[(b, p1)] - l[(a, p1)] * l[(b, q1)] + l[(a, q2)] * l[(b, p2)]
                - l[(a, p2)] * l[(b, q2)];
            out.push((format!("wedge_{}_{}", NAMES[a], NAMES[b]), value));
        }
    }
    out
}

/// All sixteen `3×3` minors, rows-then-columns in lexicographic order.
pub fn three_minors(l: &Matrix4<f64>) -> Vec<f64> {
    let triples: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let mut out = Vec::with_capacity(16);
    for rows in &triples {
        for cols in &triples {
            out.push(Matrix3::from_fn(|i, j| l[(rows[i], cols[j])]).determinant());
        }
    }
    out
}

/// Named residuals from [`LinearMomentumModel::check_relations`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub entries: Vec<(String, f64)>,
}

impl RelationReport {
    pub fn max(&self) -> f64 {
        self.entries.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn passes(&self) -> bool {
        self.max() < RELATION_TOL
    }
}

/// Dimension of the linear span of the Hilbert images of `points`.
pub fn zariski_dim_at_origin(model: &LinearMomentumModel, points: &[ZeroLocusPoint]) -> Result<usize> {
    let needed = 2 * model.invariant_count();
    if points.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: points.len(),
        });
    }
    let images: Vec<Vec<f64>> = points.iter().map(|p| model.hilbert_map(&p.w).coordinates()).collect();
    Ok(span_rank(&images))
}

fn span_rank(images: &[Vec<f64>]) -> usize {
    let rows = images.first().map_or(0, Vec::len);
    let m = DMatrix::from_fn(rows, images.len(), |i, j| images[j][i]);
    numerical_rank(&m, RankTol::relative(SPAN_RANK_TOL))
}

/// The ten configurations spanning `S²(ℝ⁴)`, built from a unit vector `v`.
///
/// Each configuration is a tuple over the Gram ordering `(q1, q2, p1, p2)`
/// with entries `v` or `0`; the returned points use the `(q1, p1, q2, p2)`
/// layout of `W`.
pub fn spanning_vectors_with(v: &Vector3<f64>) -> Vec<DVector<f64>> {
    let mut patterns: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
    for i in 0..4 {
        for j in i + 1..4 {
            patterns.push(vec![i, j]);
        }
    }
    patterns
        .into_iter()
        .map(|slots| {
            let pick = |k: usize| if slots.contains(&k) { *v } else { Vector3::zeros() };
            so3_point(pick(0), pick(2), pick(1), pick(3))
        })
        .collect()
}

/// [`spanning_vectors_with`] at `v = e1`.
pub fn spanning_vectors_8_5() -> Vec<DVector<f64>> {
    spanning_vectors_with(&Vector3::x())
}

/// Rank of the Hilbert images of the given configurations.
pub fn hilbert_image_rank(model: &LinearMomentumModel, points: &[DVector<f64>]) -> usize {
    let images: Vec<Vec<f64>> = points.iter().map(|w| model.hilbert_map(w).coordinates()).collect();
    span_rank(&images)
}

/// Which PSD rank stratum `n_j` a symmetric matrix lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsdStratum {
    Rank(usize),
    Outside,
}

impl fmt::Display for PsdStratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rank(j) => write!(f, "n{j}"),
            Self::Outside => f.write_str("outside"),
        }
    }
}

pub fn psd_rank_stratum(image: &Matrix4<f64>) -> PsdStratum {
    let eig = SymmetricEigen::new(*image).eigenvalues;
    let max = eig.iter().map(|e| e.abs()).fold(0.0, f64::max);
    if eig.iter().any(|&e| e < -RELATION_TOL) {
        return PsdStratum::Outside;
    }
    let rank = eig.iter().filter(|&&e| e > RELATION_TOL * max).count();
    if rank <= 2 {
        PsdStratum::Rank(rank)
    } else {
        PsdStratum::Outside
    }
}

/// The local picture at a middle-stratum point: a smooth factor times the
/// `SO(2)` cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeModelReport {
    pub cone_zariski_dim: usize,
    pub smooth_factor_dim: usize,
    pub total_zariski_dim: usize,
}

/// Combines the cone's Zariski dimension with the dimension of the smooth
/// factor (the stratum dimension, supplied by the caller).
pub fn so2_cone_model_report(samples: usize, seed: u64, smooth_factor_dim: usize) -> Result<ConeModelReport> {
    let model = LinearMomentumModel::so2();
    let cone = zariski_dim_at_origin(&model, &model.sample_zero_locus(samples, seed))?;
    Ok(ConeModelReport {
        cone_zariski_dim: cone,
        smooth_factor_dim,
        total_zariski_dim: cone + smooth_factor_dim,
    })
}

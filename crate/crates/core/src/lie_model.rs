//! Numerical models of `U(1)`, `SU(2)`, `SO(3)` and their direct products.
//!
//! Group elements are block-diagonal complex matrices. Each factor carries a
//! basis of its Lie algebra that is orthonormal for the Ad-invariant form
//! `⟨X, Y⟩ = -c · Re tr(XY)`:
//!
//! | factor | basis                    | c    |
//! |--------|--------------------------|------|
//! | U1     | `i`                      | 1    |
//! | SU2    | `E_k = i σ_k / 2`        | 2    |
//! | SO3    | `(L_k)_{ij} = -ε_{kij}`  | 1/2  |
//!
//! With these choices `[L_1, L_2] = L_3` in `so(3)` while
//! `[E_1, E_2] = -E_3` in `su(2)`, so the `su(2)` bracket is minus the cross
//! product in coordinates.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space, RankTol};

pub type CMatrix = DMatrix<Complex64>;

/// Margin kept away from the cut locus of the logarithm.
pub const LOG_MARGIN: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// One simple (or abelian) factor of a product group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    U1,
    Su2,
    So3,
}

impl Factor {
    pub fn block_size(self) -> usize {
        match self {
            Factor::U1 => 1,
            Factor::Su2 => 2,
            Factor::So3 => 3,
        }
    }

    pub fn algebra_dim(self) -> usize {
        match self {
            Factor::U1 => 1,
            Factor::Su2 | Factor::So3 => 3,
        }
    }

    fn form_scale(self) -> f64 {
        match self {
            Factor::U1 => 1.0,
            Factor::Su2 => 2.0,
            Factor::So3 => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Factor::U1 => "U1",
            Factor::Su2 => "SU2",
            Factor::So3 => "SO3",
        }
    }

    fn basis(self) -> Vec<CMatrix> {
        match self {
            Factor::U1 => vec![CMatrix::from_element(1, 1, I)],
            Factor::Su2 => {
                let h = 0.5;
                vec![
                    CMatrix::from_row_slice(2, 2, &[c(0.0), I * h, I * h, c(0.0)]),
                    CMatrix::from_row_slice(2, 2, &[c(0.0), c(h), c(-h), c(0.0)]),
                    CMatrix::from_row_slice(2, 2, &[I * h, c(0.0), c(0.0), -I * h]),
                ]
            }
            Factor::So3 => (0..3)
                .map(|k| {
                    let m = hat(&[
                        if k == 0 { 1.0 } else { 0.0 },
                        if k == 1 { 1.0 } else { 0.0 },
                        if k == 2 { 1.0 } else { 0.0 },
                    ]);
                    CMatrix::from_fn(3, 3, |i, j| c(m[(i, j)]))
                })
                .collect(),
        }
    }

    fn exp_block(self, v: &[f64]) -> CMatrix {
        match self {
            Factor::U1 => CMatrix::from_element(1, 1, Complex64::from_polar(1.0, v[0])),
            Factor::Su2 => {
                let [a, b] = su2_from_vector(v);
                su2_matrix(a, b)
            }
            Factor::So3 => {
                let r = rodrigues(v);
                CMatrix::from_fn(3, 3, |i, j| c(r[(i, j)]))
            }
        }
    }

    fn log_block(self, g: &CMatrix) -> Result<Vec<f64>> {
        match self {
            Factor::U1 => {
                let angle = g[(0, 0)].arg();
                if angle.abs() >= std::f64::consts::PI - LOG_MARGIN {
                    return Err(Error::LogDomain { angle: angle.abs() });
                }
                Ok(vec![angle])
            }
            Factor::Su2 => {
                // g = cos(θ/2) I + i sin(θ/2) n·σ
                let a = 0.5 * (g[(0, 0)].re + g[(1, 1)].re);
                let s = [
                    0.5 * (g[(0, 1)].im + g[(1, 0)].im),
                    0.5 * (g[(0, 1)].re - g[(1, 0)].re),
                    0.5 * (g[(0, 0)].im - g[(1, 1)].im),
                ];
                let sn = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
                let half = sn.atan2(a);
                let angle = 2.0 * half;
                if angle >= 2.0 * std::f64::consts::PI - LOG_MARGIN {
                    return Err(Error::LogDomain { angle });
                }
                let factor = if sn > 1e-8 {
                    angle / sn
                } else {
                    // atan2(s, a)/s = (1/a)(1 - s²/(3a²) + ...) for a > 0
                    2.0 / a * (1.0 - sn * sn / (3.0 * a * a))
                };
                Ok(s.iter().map(|x| x * factor).collect())
            }
            Factor::So3 => {
                let r = Matrix3::from_fn(|i, j| g[(i, j)].re);
                let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
                let angle = cos.acos();
                if angle >= std::f64::consts::PI - LOG_MARGIN {
                    return Err(Error::LogDomain { angle });
                }
                let w = [r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]];
                let factor = if angle > 1e-6 {
                    angle / (2.0 * angle.sin())
                } else {
                    0.5 * (1.0 + angle * angle / 6.0)
                };
                Ok(w.iter().map(|x| x * factor).collect())
            }
        }
    }

    fn project_block(self, g: &CMatrix) -> CMatrix {
        match self {
            Factor::U1 => {
                let z = g[(0, 0)];
                let norm = z.norm();
                CMatrix::from_element(1, 1, if norm > 0.0 { z / norm } else { c(1.0) })
            }
            Factor::Su2 => {
                let a = (g[(0, 0)] + g[(1, 1)].conj()) * 0.5;
                let b = (g[(1, 0)] - g[(0, 1)].conj()) * 0.5;
                let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                if norm == 0.0 {
                    return CMatrix::identity(2, 2);
                }
                su2_matrix(a / norm, b / norm)
            }
            Factor::So3 => {
                let m = Matrix3::from_fn(|i, j| g[(i, j)].re);
                let r = crate::linalg::nearest_rotation(&m);
                CMatrix::from_fn(3, 3, |i, j| c(r[(i, j)]))
            }
        }
    }

    fn random_block<R: Rng + ?Sized>(self, rng: &mut R) -> CMatrix {
        match self {
            Factor::U1 => {
                let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                CMatrix::from_element(1, 1, Complex64::from_polar(1.0, angle))
            }
            Factor::Su2 => {
                let [a, b] = haar_quaternion(rng);
                su2_matrix(a, b)
            }
            Factor::So3 => {
                let [a, b] = haar_quaternion(rng);
                let r = so3_from_su2(a, b);
                CMatrix::from_fn(3, 3, |i, j| c(r[(i, j)]))
            }
        }
    }

    fn torus_direction(self) -> Vec<f64> {
        match self {
            Factor::U1 => vec![1.0],
            Factor::Su2 | Factor::So3 => vec![0.0, 0.0, 1.0],
        }
    }
}

/// `[[a, -b̄], [b, ā]]`.
fn su2_matrix(a: Complex64, b: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()])
}

/// `exp(Σ v_k E_k)` written as the pair `(a, b)` of [`su2_matrix`].
fn su2_from_vector(v: &[f64]) -> [Complex64; 2] {
    let theta = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let half = 0.5 * theta;
    // sin(θ/2)/θ, stable near zero
    let sinc = if theta > 1e-6 {
        half.sin() / theta
    } else {
        0.5 * (1.0 - half * half / 6.0)
    };
    let (s1, s2, s3) = (sinc * v[0], sinc * v[1], sinc * v[2]);
    // cos + i s (n·σ): entry (0,0) = cos + i s n3, entry (1,0) = i s n1 - s n2
    [Complex64::new(half.cos(), s3), Complex64::new(-s2, s1)]
}

fn haar_quaternion<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 2] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return [
                Complex64::new(q[0] / norm, q[1] / norm),
                Complex64::new(q[2] / norm, q[3] / norm),
            ];
        }
    }
}

/// Rotation matrix of `Ad(g)` on `su(2) ≅ ℝ³` for `g = su2_matrix(a, b)`.
fn so3_from_su2(a: Complex64, b: Complex64) -> Matrix3<f64> {
    let g = su2_matrix(a, b);
    let basis = Factor::Su2.basis();
    let g_inv = g.adjoint();
    Matrix3::from_fn(|k, l| {
        let m = &g * &basis[l] * &g_inv;
        -2.0 * (&basis[k] * m).trace().re
    })
}

fn hat(v: &[f64]) -> Matrix3<f64> {
    Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

fn rodrigues(v: &[f64]) -> Matrix3<f64> {
    let theta = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let k = hat(v);
    let (a, b) = if theta > 1e-6 {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    } else {
        (1.0 - theta * theta / 6.0, 0.5 - theta * theta / 24.0)
    };
    Matrix3::identity() + k * a + k * k * b
}

/// A group element: a unitary (or orthogonal) block-diagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement(CMatrix);

impl GroupElement {
    /// Wraps a matrix without checking membership.
    pub fn from_matrix(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn conjugate_by(&self, x: &Self) -> Self {
        Self(&x.0 * &self.0 * x.0.adjoint())
    }

    /// Frobenius distance.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).norm()
    }
}

/// Coordinates of a Lie algebra element in the model's orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector(pub DVector<f64>);

impl AlgebraVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(DVector::from_vec(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }
}

/// A compact matrix group: a finite product of `U1`, `SU2` and `SO3`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieGroupModel {
    name: String,
    factors: Vec<Factor>,
    matrix_dim: usize,
    dim: usize,
    basis: Vec<CMatrix>,
    scales: Vec<f64>,
}

impl LieGroupModel {
    pub fn product(factors: &[Factor]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::UnknownGroup(String::new()));
        }
        let matrix_dim = factors.iter().map(|f| f.block_size()).sum();
        let mut basis = Vec::new();
        let mut scales = Vec::new();
        let mut offset = 0;
        for f in factors {
            for block in f.basis() {
                let mut full = CMatrix::zeros(matrix_dim, matrix_dim);
                full.view_mut((offset, offset), block.shape()).copy_from(&block);
                basis.push(full);
                scales.push(f.form_scale());
            }
            offset += f.block_size();
        }
        let name = factors.iter().map(|f| f.name()).collect::<Vec<_>>().join("x");
        Ok(Self {
            name,
            factors: factors.to_vec(),
            matrix_dim,
            dim: basis.len(),
            basis,
            scales,
        })
    }

    pub fn u1() -> Self {
        Self::product(&[Factor::U1]).expect("nonempty")
    }

    pub fn su2() -> Self {
        Self::product(&[Factor::Su2]).expect("nonempty")
    }

    pub fn so3() -> Self {
        Self::product(&[Factor::So3]).expect("nonempty")
    }

    /// Parses `"SU2"`, `"SO3"`, `"U1"` or products such as `"SU2xU1"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let upper = spec.trim().to_ascii_uppercase();
        let factors = upper
            .split('X')
            .map(|part| match part.trim() {
                "U1" => Ok(Factor::U1),
                "SU2" => Ok(Factor::Su2),
                "SO3" => Ok(Factor::So3),
                _ => Err(Error::UnknownGroup(spec.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::product(&factors)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Dimension of the Lie algebra.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_dim(&self) -> usize {
        self.matrix_dim
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(CMatrix::identity(self.matrix_dim, self.matrix_dim))
    }

    /// `Σ v_k E_k`.
    pub fn algebra_matrix(&self, v: &AlgebraVector) -> CMatrix {
        let mut out = CMatrix::zeros(self.matrix_dim, self.matrix_dim);
        for (k, e) in self.basis.iter().enumerate() {
            if v.0[k] != 0.0 {
                out += e * c(v.0[k]);
            }
        }
        out
    }

    /// Orthogonal projection of a matrix onto the algebra, in coordinates.
    pub fn coords(&self, m: &CMatrix) -> AlgebraVector {
        AlgebraVector(DVector::from_fn(self.dim, |k, _| {
            -self.scales[k] * (&self.basis[k] * m).trace().re
        }))
    }

    pub fn inner(&self, x: &AlgebraVector, y: &AlgebraVector) -> f64 {
        x.0.dot(&y.0)
    }

    fn blocks(&self) -> impl Iterator<Item = (Factor, usize, usize)> + '_ {
        let mut m_off = 0;
        let mut a_off = 0;
        self.factors.iter().map(move |&f| {
            let item = (f, m_off, a_off);
            m_off += f.block_size();
            a_off += f.algebra_dim();
            item
        })
    }

    pub fn exp(&self, v: &AlgebraVector) -> GroupElement {
        let mut out = CMatrix::zeros(self.matrix_dim, self.matrix_dim);
        for (f, m_off, a_off) in self.blocks() {
            let block = f.exp_block(&v.0.as_slice()[a_off..a_off + f.algebra_dim()]);
            out.view_mut((m_off, m_off), block.shape()).copy_from(&block);
        }
        GroupElement(out)
    }

    /// Principal logarithm. Fails within [`LOG_MARGIN`] of the cut locus
    /// (`-I` for SU2, rotation angle `π` for SO3 and U1).
    pub fn log(&self, g: &GroupElement) -> Result<AlgebraVector> {
        let mut out = Vec::with_capacity(self.dim);
        for (f, m_off, _) in self.blocks() {
            let n = f.block_size();
            let block = g.0.view((m_off, m_off), (n, n)).into_owned();
            out.extend(f.log_block(&block)?);
        }
        Ok(AlgebraVector::new(out))
    }

    /// Matrix of `Ad(g)` on algebra coordinates.
    pub fn ad_matrix(&self, g: &GroupElement) -> DMatrix<f64> {
        let g_inv = g.0.adjoint();
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for l in 0..self.dim {
            let image = &g.0 * &self.basis[l] * &g_inv;
            out.set_column(l, &self.coords(&image).0);
        }
        out
    }

    /// Matrix of `ad(X) = [X, ·]`.
    pub fn ad_algebra(&self, x: &AlgebraVector) -> DMatrix<f64> {
        let xm = self.algebra_matrix(x);
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for l in 0..self.dim {
            let br = &xm * &self.basis[l] - &self.basis[l] * &xm;
            out.set_column(l, &self.coords(&br).0);
        }
        out
    }

    pub fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
        let (xm, ym) = (self.algebra_matrix(x), self.algebra_matrix(y));
        self.coords(&(&xm * &ym - &ym * &xm))
    }

    /// Orthonormal basis (columns) of `{X : Ad(y) X = X for all y}`.
    pub fn centralizer_algebra(&self, elements: &[GroupElement], tol: RankTol) -> DMatrix<f64> {
        if elements.is_empty() {
            return DMatrix::identity(self.dim, self.dim);
        }
        let id = DMatrix::<f64>::identity(self.dim, self.dim);
        let mut stacked = DMatrix::zeros(self.dim * elements.len(), self.dim);
        for (i, y) in elements.iter().enumerate() {
            stacked
                .view_mut((i * self.dim, 0), (self.dim, self.dim))
                .copy_from(&(self.ad_matrix(y) - &id));
        }
        null_space(&stacked, tol)
    }

    /// Distance from the group: `‖g*g - I‖`, plus `|det g - 1|` on special
    /// factors, plus off-block leakage.
    pub fn membership_residual(&self, g: &GroupElement) -> f64 {
        let n = self.matrix_dim;
        if g.0.shape() != (n, n) {
            return f64::INFINITY;
        }
        let mut r = (g.0.adjoint() * &g.0 - CMatrix::identity(n, n)).norm();
        let mut block_mass = 0.0;
        for (f, m_off, _) in self.blocks() {
            let b = f.block_size();
            let block = g.0.view((m_off, m_off), (b, b)).into_owned();
            block_mass += block.norm_squared();
            match f {
                Factor::U1 => {}
                Factor::Su2 => r += (block.determinant() - c(1.0)).norm(),
                Factor::So3 => {
                    r += (block.determinant() - c(1.0)).norm();
                    r += block.iter().map(|z| z.im.abs()).sum::<f64>();
                }
            }
        }
        r + (g.0.norm_squared() - block_mass).max(0.0).sqrt()
    }

    /// Nearest group element, factor by factor.
    pub fn project(&self, m: &CMatrix) -> GroupElement {
        let mut out = CMatrix::zeros(self.matrix_dim, self.matrix_dim);
        for (f, m_off, _) in self.blocks() {
            let b = f.block_size();
            let block = f.project_block(&m.view((m_off, m_off), (b, b)).into_owned());
            out.view_mut((m_off, m_off), (b, b)).copy_from(&block);
        }
        GroupElement(out)
    }

    /// `‖Ad(g) - Id‖`: zero exactly for central elements.
    pub fn centrality_residual(&self, g: &GroupElement) -> f64 {
        (self.ad_matrix(g) - DMatrix::identity(self.dim, self.dim)).norm()
    }

    /// The finite center, or `None` when it is infinite (any U1 factor).
    pub fn center_elements(&self) -> Option<Vec<GroupElement>> {
        let mut choices: Vec<Vec<Complex64>> = Vec::new();
        for f in &self.factors {
            match f {
                Factor::U1 => return None,
                Factor::Su2 => choices.push(vec![c(1.0), c(-1.0)]),
                Factor::So3 => choices.push(vec![c(1.0)]),
            }
        }
        let mut out = vec![Vec::new()];
        for options in &choices {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Complex64>| {
                    options.iter().map(move |&z| {
                        let mut p = prefix.clone();
                        p.push(z);
                        p
                    })
                })
                .collect();
        }
        Some(
            out.into_iter()
                .map(|signs| {
                    let mut m = CMatrix::zeros(self.matrix_dim, self.matrix_dim);
                    for ((f, m_off, _), z) in self.blocks().zip(signs) {
                        for d in 0..f.block_size() {
                            m[(m_off + d, m_off + d)] = z;
                        }
                    }
                    GroupElement(m)
                })
                .collect(),
        )
    }

    /// Central elements by name: `"+I"` or `"-I"` (the latter whenever it
    /// lies in the group).
    pub fn central_element(&self, name: &str) -> Result<GroupElement> {
        let n = self.matrix_dim;
        match name.trim() {
            "+I" | "I" | "+" => Ok(self.identity()),
            "-I" | "-" => {
                if self.factors.contains(&Factor::So3) {
                    return Err(Error::InvalidArgument(format!(
                        "-I is not an element of {}",
                        self.name
                    )));
                }
                Ok(GroupElement(CMatrix::identity(n, n) * c(-1.0)))
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown central element `{other}` (expected +I or -I)"
            ))),
        }
    }

    /// Unit vector spanning the standard maximal torus of each factor,
    /// summed over factors.
    pub fn torus_direction(&self) -> AlgebraVector {
        AlgebraVector::new(self.factors.iter().flat_map(|f| f.torus_direction()).collect())
    }

    /// Haar-distributed element.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let mut out = CMatrix::zeros(self.matrix_dim, self.matrix_dim);
        for (f, m_off, _) in self.blocks() {
            let block = f.random_block(rng);
            out.view_mut((m_off, m_off), block.shape()).copy_from(&block);
        }
        GroupElement(out)
    }

    pub fn random_element_seeded(&self, seed: u64) -> GroupElement {
        self.random_element(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Standard Gaussian coordinates.
    pub fn random_algebra_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraVector {
        AlgebraVector(DVector::from_fn(self.dim, |_, _| rng.sample(StandardNormal)))
    }

    pub fn random_algebra_vector_seeded(&self, seed: u64) -> AlgebraVector {
        self.random_algebra_vector(&mut ChaCha8Rng::seed_from_u64(seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn models() -> Vec<LieGroupModel> {
        ["U1", "SU2", "SO3", "SU2xU1", "SO3xSU2"]
            .iter()
            .map(|s| LieGroupModel::parse(s).unwrap())
            .collect()
    }

    #[test]
    fn parse_names_and_dims() {
        let g = LieGroupModel::parse("SU2xU1").unwrap();
        assert_eq!((g.dim(), g.matrix_dim(), g.name()), (4, 3, "SU2xU1"));
        assert!(LieGroupModel::parse("SU3").is_err());
        assert_eq!(LieGroupModel::parse("so3").unwrap().dim(), 3);
    }

    #[test]
    fn basis_is_orthonormal() {
        for g in models() {
            let gram = DMatrix::from_fn(g.dim(), g.dim(), |k, l| {
                g.coords(&g.basis()[l]).0[k]
            });
            assert!((gram - DMatrix::identity(g.dim(), g.dim())).norm() < 1e-12);
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for g in models() {
            let e = g.exp(&AlgebraVector::zeros(g.dim()));
            assert!(e.distance(&g.identity()) < 1e-15);
        }
    }

    #[test]
    fn su2_quarter_turn_about_z() {
        let g = LieGroupModel::su2();
        let e = g.exp(&AlgebraVector::new(vec![0.0, 0.0, PI / 2.0]));
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::from_polar(1.0, PI / 4.0),
                c(0.0),
                c(0.0),
                Complex64::from_polar(1.0, -PI / 4.0),
            ],
        );
        assert!((e.matrix() - expected).norm() < 1e-14);
    }

    #[test]
    fn closed_form_exp_matches_series() {
        for g in models() {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..10 {
                let v = g.random_algebra_vector(&mut rng);
                let x = g.algebra_matrix(&v);
                // scaling and squaring with a long Taylor series
                let scaled = &x * c(1.0 / 1024.0);
                let mut term = CMatrix::identity(g.matrix_dim(), g.matrix_dim());
                let mut sum = term.clone();
                for k in 1..20 {
                    term = &term * &scaled * c(1.0 / k as f64);
                    sum += &term;
                }
                for _ in 0..10 {
                    sum = &sum * &sum;
                }
                assert!((g.exp(&v).matrix() - sum).norm() < 1e-10, "{}", g.name());
            }
        }
    }

    #[test]
    fn log_inverts_exp() {
        for g in models() {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..50 {
                let mut v = g.random_algebra_vector(&mut rng);
                if v.norm() >= 1.0 {
                    v = v.scale(0.9 / v.norm());
                }
                let back = g.log(&g.exp(&v)).unwrap();
                assert!((back.0 - &v.0).norm() < 1e-12);
                let h = g.random_element(&mut rng);
                if let Ok(w) = g.log(&h) {
                    assert!(g.exp(&w).distance(&h) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn log_rejects_cut_locus() {
        let su2 = LieGroupModel::su2();
        assert!(matches!(
            su2.log(&su2.central_element("-I").unwrap()),
            Err(Error::LogDomain { .. })
        ));
        let so3 = LieGroupModel::so3();
        let half_turn = so3.exp(&AlgebraVector::new(vec![PI, 0.0, 0.0]));
        assert!(so3.log(&half_turn).is_err());
        let u1 = LieGroupModel::u1();
        assert!(u1.log(&u1.exp(&AlgebraVector::new(vec![PI]))).is_err());
    }

    #[test]
    fn ad_of_identity_and_inner_product_invariance() {
        for g in models() {
            assert!(
                (g.ad_matrix(&g.identity()) - DMatrix::identity(g.dim(), g.dim())).norm() < 1e-15
            );
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..100 {
                let h = g.random_element(&mut rng);
                let x = g.random_algebra_vector(&mut rng);
                let y = g.random_algebra_vector(&mut rng);
                let ad = g.ad_matrix(&h);
                let lhs = (&ad * &x.0).dot(&(&ad * &y.0));
                assert!((lhs - g.inner(&x, &y)).abs() < 1e-10);
                // Ad(g) X matches g X g^-1
                let direct = g.coords(&(h.matrix() * g.algebra_matrix(&x) * h.matrix().adjoint()));
                assert!((direct.0 - &ad * &x.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn brackets_are_cross_products_up_to_sign() {
        let e = |k: usize| {
            let mut v = vec![0.0; 3];
            v[k] = 1.0;
            AlgebraVector::new(v)
        };
        let so3 = LieGroupModel::so3();
        assert!((so3.bracket(&e(0), &e(1)).0 - e(2).0).norm() < 1e-15);
        let su2 = LieGroupModel::su2();
        assert!((su2.bracket(&e(0), &e(1)).0 + e(2).0).norm() < 1e-15);
        assert!((su2.bracket(&e(1), &e(2)).0 + e(0).0).norm() < 1e-15);
    }

    #[test]
    fn jacobi_and_antisymmetry() {
        for g in models() {
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            for _ in 0..50 {
                let x = g.random_algebra_vector(&mut rng);
                let y = g.random_algebra_vector(&mut rng);
                let z = g.random_algebra_vector(&mut rng);
                let anti = g.bracket(&x, &y).add(&g.bracket(&y, &x));
                assert!(anti.norm() < 1e-12);
                let jac = g
                    .bracket(&x, &g.bracket(&y, &z))
                    .add(&g.bracket(&y, &g.bracket(&z, &x)))
                    .add(&g.bracket(&z, &g.bracket(&x, &y)));
                assert!(jac.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ad_of_exp_is_matrix_exp_of_ad() {
        for g in models() {
            let x = g.random_algebra_vector_seeded(23);
            let ad = g.ad_algebra(&x);
            let lhs = g.ad_matrix(&g.exp(&x));
            let rhs = ad.exp();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn ad_algebra_is_derivative_of_ad() {
        let g = LieGroupModel::su2();
        let x = g.random_algebra_vector_seeded(29);
        let h = 1e-5;
        let fd = (g.ad_matrix(&g.exp(&x.scale(h))) - g.ad_matrix(&g.exp(&x.scale(-h)))) / (2.0 * h);
        assert!((fd - g.ad_algebra(&x)).norm() < 1e-8);
    }

    #[test]
    fn centralizers() {
        let g = LieGroupModel::su2();
        let tol = RankTol::default();
        assert_eq!(g.centralizer_algebra(&[g.identity()], tol).ncols(), 3);
        let diag = GroupElement::from_matrix(CMatrix::from_row_slice(
            2,
            2,
            &[I, c(0.0), c(0.0), -I],
        ));
        let z = g.centralizer_algebra(&[diag], tol);
        assert_eq!(z.ncols(), 1);
        assert!((z[(2, 0)].abs() - 1.0).abs() < 1e-12);
        let a = g.random_element_seeded(1);
        let b = g.random_element_seeded(2);
        assert_eq!(g.centralizer_algebra(&[a, b], tol).ncols(), 0);
    }

    #[test]
    fn sampling_is_deterministic_and_in_group() {
        for g in models() {
            assert_eq!(g.random_element_seeded(9), g.random_element_seeded(9));
            let h = g.random_element_seeded(9);
            assert!(g.membership_residual(&h) < 1e-12);
        }
        let su2 = LieGroupModel::su2();
        let h = su2.random_element_seeded(4);
        assert!((h.matrix().determinant() - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn mean_adjoint_action_vanishes() {
        // Monte-Carlo: E[Ad(g)] is the projection onto invariants, zero for SU2.
        let g = LieGroupModel::su2();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut mean = DMatrix::zeros(3, 3);
        let count = 10_000;
        for _ in 0..count {
            mean += g.ad_matrix(&g.random_element(&mut rng));
        }
        mean /= count as f64;
        assert!(mean.amax() < 5e-2, "{mean}");
    }

    #[test]
    fn centers() {
        assert_eq!(LieGroupModel::su2().center_elements().unwrap().len(), 2);
        assert_eq!(LieGroupModel::so3().center_elements().unwrap().len(), 1);
        assert!(LieGroupModel::u1().center_elements().is_none());
        let su2 = LieGroupModel::su2();
        for z in su2.center_elements().unwrap() {
            assert!(su2.centrality_residual(&z) < 1e-15);
        }
        assert!(LieGroupModel::so3().central_element("-I").is_err());
    }

    #[test]
    fn projection_repairs_drift() {
        for g in models() {
            let h = g.random_element_seeded(31);
            let drifted = h.matrix() * c(1.0 + 1e-6);
            let p = g.project(&drifted);
            assert!(g.membership_residual(&p) < 1e-12);
            assert!(p.distance(&h) < 1e-9);
        }
    }
}

//! Small dense linear-algebra helpers: ranks, kernels and least squares
//! from a thin SVD.
//!
//! Rank decisions count a singular value `σ_k` iff `σ_k > rel · max(σ_1, floor)`.
//! The floor keeps a matrix made of pure round-off (an operator that is
//! exactly zero in exact arithmetic) at rank zero; pass `floor = 0` for a
//! purely relative test.

use nalgebra::{DMatrix, DVector, Matrix3};

/// Relative rank tolerance plus an absolute scale floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTol {
    pub rel: f64,
    pub floor: f64,
}

impl RankTol {
    pub const fn new(rel: f64, floor: f64) -> Self {
        Self { rel, floor }
    }

    /// Purely relative tolerance.
    pub const fn relative(rel: f64) -> Self {
        Self { rel, floor: 0.0 }
    }

    fn threshold(&self, sigma_max: f64) -> f64 {
        self.rel * sigma_max.max(self.floor)
    }
}

impl Default for RankTol {
    fn default() -> Self {
        Self::new(1e-8, 1.0)
    }
}

/// Thin SVD `m = U diag(s) Vᵀ`, singular values in decreasing order.
///
/// Computed with faer: nalgebra's SVD returned decompositions with
/// reconstruction errors near `1e-2` on `3 × 12` Jacobians whose two leading
/// singular values agree to seven digits.
struct ThinSvd {
    u: DMatrix<f64>,
    s: DVector<f64>,
    v_t: DMatrix<f64>,
}

fn thin_svd(m: &DMatrix<f64>) -> ThinSvd {
    let a = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let svd = a.thin_svd().expect("SVD of a finite matrix converges");
    let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
    let k = s.nrows();
    ThinSvd {
        u: DMatrix::from_fn(m.nrows(), k, |i, j| u[(i, j)]),
        s: DVector::from_fn(k, |i, _| s[i]),
        v_t: DMatrix::from_fn(k, m.ncols(), |i, j| v[(j, i)]),
    }
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let a = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    a.singular_values().expect("SVD of a finite matrix converges")
}

pub fn numerical_rank(m: &DMatrix<f64>, tol: RankTol) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    let threshold = tol.threshold(top);
    s.iter().filter(|&&x| x > threshold && x > 0.0).count()
}

/// Orthonormal basis (as rows) of the row space of `m`.
fn row_space(m: &DMatrix<f64>, tol: RankTol) -> DMatrix<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DMatrix::zeros(0, m.ncols());
    }
    let svd = thin_svd(m);
    let top = svd.s.iter().copied().fold(0.0, f64::max);
    let threshold = tol.threshold(top);
    let keep: Vec<usize> = (0..svd.s.len())
        .filter(|&k| svd.s[k] > threshold && svd.s[k] > 0.0)
        .collect();
    DMatrix::from_fn(keep.len(), m.ncols(), |i, j| svd.v_t[(keep[i], j)])
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &DMatrix<f64>, tol: RankTol) -> DMatrix<f64> {
    row_space(&m.transpose(), tol).transpose()
}

/// Orthonormal basis (as columns) of `ker m`.
///
/// The basis is obtained by pivoted Gram-Schmidt on the columns of the
/// projector `I - RᵀR`, so when `m` vanishes the result is the identity.
pub fn null_space(m: &DMatrix<f64>, tol: RankTol) -> DMatrix<f64> {
    let rows = row_space(m, tol);
    complement_of_rows(&rows, m.ncols())
}

/// Orthonormal basis (columns) of the orthogonal complement of the span of
/// the orthonormal columns of `basis`.
pub fn orthogonal_complement(basis: &DMatrix<f64>) -> DMatrix<f64> {
    complement_of_rows(&basis.transpose(), basis.nrows())
}

fn complement_of_rows(rows: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let target = dim - rows.nrows();
    let projector = DMatrix::<f64>::identity(dim, dim) - rows.transpose() * rows;
    pivoted_gram_schmidt(&projector, target)
}

/// Picks `count` orthonormal vectors from the column span of `m`, always
/// taking the column with the largest remaining norm (first index on ties).
fn pivoted_gram_schmidt(m: &DMatrix<f64>, count: usize) -> DMatrix<f64> {
    let dim = m.nrows();
    let mut residual = m.clone();
    let mut out = DMatrix::zeros(dim, count);
    for k in 0..count {
        let mut best = 0;
        let mut best_norm = -1.0;
        for j in 0..residual.ncols() {
            let norm = residual.column(j).norm();
            if norm > best_norm * (1.0 + 1e-12) {
                best = j;
                best_norm = norm;
            }
        }
        if best_norm <= 0.0 {
            break;
        }
        let q: DVector<f64> = residual.column(best) / best_norm;
        for j in 0..residual.ncols() {
            let dot = q.dot(&residual.column(j));
            let mut col = residual.column_mut(j);
            col.axpy(-dot, &q, 1.0);
        }
        out.set_column(k, &q);
    }
    out
}

/// Minimum-norm least-squares solution of `m x = rhs`, discarding singular
/// values below the tolerance.
pub fn pinv_solve(m: &DMatrix<f64>, rhs: &DVector<f64>, tol: RankTol) -> DVector<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(m.ncols());
    }
    let ThinSvd { u, s, v_t } = thin_svd(m);
    let top = s.iter().copied().fold(0.0, f64::max);
    let threshold = tol.threshold(top);
    let mut x = DVector::zeros(m.ncols());
    for (k, &sk) in s.iter().enumerate() {
        if sk > threshold && sk > 0.0 {
            let coef = u.column(k).dot(rhs) / sk;
            x += v_t.row(k).transpose() * coef;
        }
    }
    x
}

/// Nearest rotation to a `3 × 3` matrix in the Frobenius norm.
pub fn nearest_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let ThinSvd { mut u, v_t, .. } = thin_svd(&DMatrix::from_fn(3, 3, |i, j| m[(i, j)]));
    let mut r = &u * &v_t;
    if r.determinant() < 0.0 {
        u.column_mut(2).neg_mut();
        r = &u * &v_t;
    }
    Matrix3::from_fn(|i, j| r[(i, j)])
}

/// Block-diagonal matrix with `count` copies of `block`.
pub fn block_diagonal(block: &DMatrix<f64>, count: usize) -> DMatrix<f64> {
    let (r, c) = block.shape();
    let mut out = DMatrix::zeros(r * count, c * count);
    for k in 0..count {
        out.view_mut((k * r, k * c), (r, c)).copy_from(block);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_with_floor_ignores_roundoff() {
        let noise = DMatrix::from_element(3, 3, 1e-17);
        assert_eq!(numerical_rank(&noise, RankTol::default()), 0);
        assert_eq!(numerical_rank(&noise, RankTol::relative(1e-8)), 1);
        assert_eq!(numerical_rank(&DMatrix::zeros(2, 2), RankTol::relative(1e-8)), 0);
    }

    #[test]
    fn null_space_of_zero_is_identity() {
        let z = DMatrix::zeros(2, 3);
        assert_eq!(null_space(&z, RankTol::default()), DMatrix::identity(3, 3));
    }

    #[test]
    fn null_space_is_orthonormal_kernel() {
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 0.0, -1.0, 0.0, 1.0, 1.0, 1.0]);
        let k = null_space(&m, RankTol::default());
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-12);
        assert!((k.transpose() * &k - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn complement_and_column_space_are_orthogonal() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let c = column_space(&m, RankTol::default());
        let perp = orthogonal_complement(&c);
        assert_eq!((c.ncols(), perp.ncols()), (2, 1));
        assert!((c.transpose() * &perp).norm() < 1e-12);
    }

    #[test]
    fn wide_matrices_with_clustered_singular_values() {
        // two singular values agreeing to seven digits and one small one
        let rot = |a: f64| {
            let (s, c) = a.sin_cos();
            DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
        };
        let mut v = DMatrix::<f64>::zeros(3, 12);
        for i in 0..3 {
            for j in 0..12 {
                v[(i, j)] = ((i * 5 + j * 7) % 13) as f64 - 6.0;
            }
        }
        let v = crate::linalg::row_space(&v, RankTol::default());
        let sigma = DMatrix::from_diagonal(&DVector::from_vec(vec![2.2482753, 2.2482751, 8.5e-4]));
        let m = rot(0.3) * sigma * v;
        let rhs = DVector::from_vec(vec![-5.7e-8, 1.26e-7, -3.9e-8]);
        let x = pinv_solve(&m, &rhs, RankTol::new(1e-10, 1.0));
        assert!((&m * &x - &rhs).norm() < 1e-13);
        let svd = thin_svd(&m);
        let rec = &svd.u * DMatrix::from_diagonal(&svd.s) * &svd.v_t;
        assert!((rec - &m).norm() < 1e-12);
    }

    #[test]
    fn nearest_rotation_of_a_perturbed_rotation() {
        let r = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0).into_inner();
        let noise = Matrix3::from_fn(|i, j| 1e-9 * ((i * 3 + j) as f64 - 4.0));
        let p = nearest_rotation(&(r + noise));
        assert!((p.transpose() * p - Matrix3::identity()).norm() < 1e-14);
        assert!((p.determinant() - 1.0).abs() < 1e-14);
        assert!((p - r).norm() < 1e-8);
        let reflected = nearest_rotation(&(-Matrix3::identity()));
        assert!((reflected.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pinv_solves_consistent_systems() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 2.0, 0.0]);
        let rhs = DVector::from_vec(vec![2.0, 4.0]);
        let x = pinv_solve(&m, &rhs, RankTol::default());
        assert!((&m * &x - rhs).norm() < 1e-12);
        assert!((x - DVector::from_vec(vec![1.0, 2.0, 1.0])).norm() < 1e-12);
    }
}

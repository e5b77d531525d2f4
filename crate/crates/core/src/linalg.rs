//! Dense linear algebra for Gramians: a cyclic Jacobi eigensolver, Cholesky
//! and LU solves.

use std::ops::{Index, IndexMut};

use crate::error::{MzError, Result};

/// Jacobi stops once the off-diagonal Frobenius mass is below this fraction of `||G||_F`.
pub const JACOBI_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 50;
/// Negative eigenvalues within this fraction of `||G||_F` are reported as zero.
pub const CLAMP_TOL: f64 = 1e-14;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(MzError::InvalidArgument(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MzError::InvalidArgument("ragged rows".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Matrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(MzError::InvalidArgument(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Leading `rows x cols` block.
    pub fn leading(&self, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[..cols]);
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A square matrix that is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Symmetrizes `m` as `(m + m^T) / 2`.
    pub fn new(mut m: Matrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(MzError::InvalidArgument(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        if m.data.iter().any(|v| !v.is_finite()) {
            return Err(MzError::InvalidArgument("matrix has non-finite entries".into()));
        }
        let n = m.rows;
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        Ok(SymMatrix(m))
    }

    /// Builds from the upper triangle, mirroring it into the lower one.
    pub(crate) fn from_upper(mut m: Matrix) -> Self {
        let n = m.rows;
        for i in 0..n {
            for j in i + 1..n {
                m[(j, i)] = m[(i, j)];
            }
        }
        SymMatrix(m)
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        SymMatrix(Matrix::from_diag(diag))
    }

    pub fn order(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Leading principal `d x d` submatrix.
    pub fn leading(&self, d: usize) -> SymMatrix {
        SymMatrix(self.0.leading(d, d))
    }

    /// `c^T G c`.
    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        dot(c, &self.0.matvec(c))
    }

    pub fn trace(&self) -> f64 {
        (0..self.order()).map(|i| self.0[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Full spectral decomposition `G = V diag(lambda) V^T`.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    /// Ascending, with tiny negative values clamped to zero.
    pub eigenvalues: Vec<f64>,
    /// Same order, before clamping.
    pub raw_eigenvalues: Vec<f64>,
    /// Row `j` holds the unit eigenvector for `eigenvalues[j]`.
    vectors: Matrix,
    pub sweeps: usize,
}

impl EigDecomposition {
    pub fn eigenvector(&self, j: usize) -> &[f64] {
        self.vectors.row(j)
    }

    /// Eigenvectors as matrix columns.
    pub fn eigenvector_matrix(&self) -> Matrix {
        self.vectors.transpose()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Each sweep visits every pair once in round-robin order: a round applies
/// `n / 2` rotations on disjoint index pairs, so rows and then columns are
/// updated in contiguous passes.
pub fn sym_eig(g: &SymMatrix) -> Result<EigDecomposition> {
    let n = g.order();
    let mut a = g.0.clone();
    // vt holds V^T so that the rotations act on contiguous rows.
    let mut vt = Matrix::identity(n);
    let fro = a.frobenius_norm();
    let target = JACOBI_TOL * fro;
    let negligible = target / n.max(1) as f64;
    // Circle-method schedule; index `n` is a dummy when `n` is odd.
    let slots = n + n % 2;
    let mut ring: Vec<usize> = (0..slots).collect();
    let mut round: Vec<Rotation> = Vec::with_capacity(slots / 2);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(&a);
        if off <= target || off == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(MzError::NoConvergence {
                off_diagonal: off,
                sweeps,
            });
        }
        sweeps += 1;
        for _ in 1..slots {
            round.clear();
            for i in 0..slots / 2 {
                let (p, q) = (ring[i].min(ring[slots - 1 - i]), ring[i].max(ring[slots - 1 - i]));
                if q >= n {
                    continue;
                }
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Entries this small together weigh at most `target`; dropping
                // them moves no eigenvalue by more than that.
                if apq.abs() <= negligible
                    || (sweeps > 4 && app.abs() + 100.0 * apq.abs() == app.abs() && aqq.abs() + 100.0 * apq.abs() == aqq.abs())
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                if t == 0.0 {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                round.push(Rotation {
                    p,
                    q,
                    c,
                    s: t * c,
                    app: app - t * apq,
                    aqq: aqq + t * apq,
                });
            }
            for r in &round {
                rotate_rows(&mut a, r.p, r.q, r.c, r.s);
                rotate_rows(&mut vt, r.p, r.q, r.c, r.s);
            }
            for i in 0..n {
                let row = a.row_mut(i);
                for r in &round {
                    let (x, y) = (row[r.p], row[r.q]);
                    row[r.p] = r.c * x - r.s * y;
                    row[r.q] = r.s * x + r.c * y;
                }
            }
            for r in &round {
                a[(r.p, r.p)] = r.app;
                a[(r.q, r.q)] = r.aqq;
                a[(r.p, r.q)] = 0.0;
                a[(r.q, r.p)] = 0.0;
            }
            ring[1..].rotate_right(1);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));
    let raw: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let clamp = CLAMP_TOL * fro;
    let clamped = raw
        .iter()
        .map(|&l| if l < 0.0 && l >= -clamp { 0.0 } else { l })
        .collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.row_mut(dst).copy_from_slice(vt.row(src));
    }
    Ok(EigDecomposition {
        eigenvalues: clamped,
        raw_eigenvalues: raw,
        vectors,
        sweeps,
    })
}

struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    // Diagonal entries after the rotation.
    app: f64,
    aqq: f64,
}

// Rows p and q become c*row_p - s*row_q and s*row_p + c*row_q.
fn rotate_rows(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let cols = m.cols;
    let (head, tail) = m.data.split_at_mut(q * cols);
    let rp = &mut head[p * cols..(p + 1) * cols];
    let rq = &mut tail[..cols];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

fn off_diagonal_mass(a: &Matrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for (j, v) in a.row(i).iter().enumerate() {
            if j != i {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// `||Id - G||_2 = max(|1 - lambda_min|, |1 - lambda_max|)`.
pub fn spectral_dist_from_identity(g: &SymMatrix) -> Result<f64> {
    let eig = sym_eig(g)?;
    Ok(dist_from_identity(eig.min(), eig.max()))
}

pub(crate) fn dist_from_identity(lmin: f64, lmax: f64) -> f64 {
    (1.0 - lmin).abs().max((1.0 - lmax).abs())
}

/// Lower-triangular Cholesky factor `L` with `G = L L^T`.
pub fn cholesky(g: &SymMatrix) -> Result<Matrix> {
    let n = g.order();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = g[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= 0.0 {
            return Err(MzError::NotPositiveDefinite { pivot: j, value: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let s = g[(i, j)] - dot(&l.row(i)[..j], &l.row(j)[..j]);
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `G c = b` for symmetric positive definite `G` by Cholesky.
pub fn spd_solve(g: &SymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != g.order() {
        return Err(MzError::InvalidArgument(format!(
            "right-hand side has length {}, matrix order {}",
            b.len(),
            g.order()
        )));
    }
    let l = cholesky(g)?;
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - dot(&l.row(i)[..i], &y[..i])) / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    Ok(x)
}

/// Solves a general square system by LU with partial pivoting.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows;
    if a.cols != n || b.len() != n {
        return Err(MzError::InvalidArgument("lu_solve needs a square system".into()));
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= f64::EPSILON * scale * n as f64 {
            return Err(MzError::Singular { pivot: k });
        }
        if piv != k {
            for j in 0..n {
                m.data.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        let pivot = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                m[(i, j)] -= f * m[(k, j)];
            }
            x[i] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        let s = x[i] - dot(&m.row(i)[i + 1..], &x[i + 1..]);
        x[i] = s / m[(i, i)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sym(rows: &[Vec<f64>]) -> SymMatrix {
        SymMatrix::new(Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let eig = sym_eig(&SymMatrix::identity(5)).unwrap();
        assert!(eig.eigenvalues.iter().all(|&l| l == 1.0));
    }

    #[test]
    fn two_by_two() {
        let eig = sym_eig(&sym(&[vec![2.0, 1.0], vec![1.0, 2.0]])).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((eig.eigenvalues[1] - 3.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = eig.eigenvector(0);
        let v1 = eig.eigenvector(1);
        assert!((v0[0] * v0[1] + 0.5).abs() < 1e-15, "{v0:?}");
        assert!((v0[0].abs() - h).abs() < 1e-15);
        assert!((v1[0] - v1[1]).abs() < 1e-15 && (v1[0].abs() - h).abs() < 1e-15);
    }

    #[test]
    fn diagonal_input() {
        let eig = sym_eig(&SymMatrix::from_diag(&[1.0, 0.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.0, 1.0]);
        assert_eq!(eig.sweeps, 0);
    }

    #[test]
    fn distance_from_identity() {
        assert_eq!(spectral_dist_from_identity(&SymMatrix::identity(4)).unwrap(), 0.0);
        assert_eq!(spectral_dist_from_identity(&SymMatrix::from_diag(&[1.0, 0.0])).unwrap(), 1.0);
        let d = spectral_dist_from_identity(&SymMatrix::from_diag(&[0.5, 1.8])).unwrap();
        assert!((d - 0.8).abs() < 1e-15);
    }

    #[test]
    fn small_negative_eigenvalues_are_clamped() {
        let eig = sym_eig(&SymMatrix::from_diag(&[-1e-16, 1.0])).unwrap();
        assert_eq!(eig.eigenvalues[0], 0.0);
        assert_eq!(eig.raw_eigenvalues[0], -1e-16);
        let eig = sym_eig(&SymMatrix::from_diag(&[-1e-3, 1.0])).unwrap();
        assert_eq!(eig.eigenvalues[0], -1e-3);
    }

    #[test]
    fn spd_solves() {
        let b = vec![0.3, -1.0, 2.0];
        assert_eq!(spd_solve(&SymMatrix::identity(3), &b).unwrap(), b);
        let x = spd_solve(&SymMatrix::from_diag(&[4.0, 9.0]), &[4.0, 9.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
        let x = spd_solve(&sym(&[vec![2.0, 1.0], vec![1.0, 2.0]]), &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn not_spd_reports_pivot() {
        let err = spd_solve(&SymMatrix::from_diag(&[1.0, 0.0, 1.0]), &[1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, MzError::NotPositiveDefinite { pivot: 1, .. }));
    }

    #[test]
    fn lu_handles_pivoting() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(lu_solve(&a, &[3.0, 4.0]).unwrap(), vec![2.0, 3.0]);
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(lu_solve(&s, &[1.0, 1.0]), Err(MzError::Singular { .. })));
    }

    fn random_sym(d: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        SymMatrix::new(m).unwrap()
    }

    fn det(m: &Matrix) -> f64 {
        // Laplace expansion, fine for d <= 4.
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = (1..n)
                    .map(|i| (0..n).filter(|&k| k != j).map(|k| m[(i, k)]).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[(0, j)] * det(&Matrix::from_rows(&minor).unwrap())
            })
            .sum()
    }

    #[test]
    fn trace_and_determinant() {
        for d in 1..=4 {
            let g = random_sym(d, d as u64);
            let eig = sym_eig(&g).unwrap();
            let fro = g.matrix().frobenius_norm();
            let sum: f64 = eig.raw_eigenvalues.iter().sum();
            assert!((sum - g.trace()).abs() <= 1e-10 * fro);
            let prod: f64 = eig.raw_eigenvalues.iter().product();
            assert!((prod - det(g.matrix())).abs() <= 1e-12, "d={d}");
        }
    }

    #[test]
    fn decomposition_residuals() {
        let g = random_sym(40, 7);
        let eig = sym_eig(&g).unwrap();
        let fro = g.matrix().frobenius_norm();
        for j in 0..40 {
            let v = eig.eigenvector(j);
            let gv = g.matrix().matvec(v);
            let lam = eig.raw_eigenvalues[j];
            let res: f64 = gv.iter().zip(v).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
            assert!(res <= 1e-10 * (1.0 + lam.abs()) * fro);
            assert!((norm2(v) - 1.0).abs() < 1e-12);
            for k in 0..j {
                assert!(dot(v, eig.eigenvector(k)).abs() < 1e-10);
            }
        }
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn random_spd_solve_recovers_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [1, 5, 17, 30] {
            let mut r = Matrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    r[(i, j)] = rng.gen_range(-1.0..1.0);
                }
                r[(i, i)] += 2.0;
            }
            let g = SymMatrix::new(r.transpose().matmul(&r).unwrap()).unwrap();
            let b: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = spd_solve(&g, &b).unwrap();
            let back = g.matrix().matvec(&c);
            let err = norm2(&back.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>());
            assert!(err <= 1e-9 * norm2(&b));
        }
    }

    proptest! {
        #[test]
        fn permutation_invariant_spectrum(seed in 0u64..1000, d in 2usize..12) {
            let g = random_sym(d, seed);
            let mut perm: Vec<usize> = (0..d).collect();
            perm.rotate_left(seed as usize % d);
            perm.swap(0, d - 1);
            let mut pg = Matrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    pg[(i, j)] = g[(perm[i], perm[j])];
                }
            }
            let a = sym_eig(&g).unwrap();
            let b = sym_eig(&SymMatrix::new(pg).unwrap()).unwrap();
            for (x, y) in a.raw_eigenvalues.iter().zip(&b.raw_eigenvalues) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}

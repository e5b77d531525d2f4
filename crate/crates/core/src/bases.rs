//! Orthonormal total-degree bases on the reference domains.
//!
//! Index order is graded: all elements of total degree `k` precede those of
//! degree `k + 1`, so the basis of degree `n` is a prefix of the basis of any
//! higher degree. Within a degree:
//!
//! | family              | element            | order within degree `k`          |
//! |---------------------|--------------------|----------------------------------|
//! | Legendre1D          | `p_k(x)`           | single element                   |
//! | ProductLegendreTD   | `p_a(x) p_b(y) ..` | `a` descending, then `b`         |
//! | ProductChebyshevTD  | `t_a(x) t_b(y)`    | `a` descending                   |
//! | LoganShepp          | ridge `U_k`        | angle index `j = 0..k`           |
//! | Dubiner             | `(p, q)`           | `p` descending                   |
//! | SphericalHarmonics  | `Y_{l,m}`          | `m = -l..l`                      |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, DomainKind, Measure};
use crate::error::{MzError, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::poly;
use crate::rules::CubatureRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisFamily {
    Legendre1D,
    ProductLegendreTD,
    ProductChebyshevTD,
    LoganShepp,
    Dubiner,
    SphericalHarmonics,
}

impl BasisFamily {
    /// The family used for a given domain and measure.
    pub fn for_domain(domain: Domain) -> BasisFamily {
        match (domain.kind(), domain.measure()) {
            (DomainKind::Interval, _) => BasisFamily::Legendre1D,
            (DomainKind::Square, Measure::ProductChebyshev) => BasisFamily::ProductChebyshevTD,
            (DomainKind::Square | DomainKind::Cube, _) => BasisFamily::ProductLegendreTD,
            (DomainKind::Disk, _) => BasisFamily::LoganShepp,
            (DomainKind::Simplex, _) => BasisFamily::Dubiner,
            (DomainKind::Sphere, _) => BasisFamily::SphericalHarmonics,
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            BasisFamily::Legendre1D => "legendre",
            BasisFamily::ProductLegendreTD => "product-legendre",
            BasisFamily::ProductChebyshevTD => "product-chebyshev",
            BasisFamily::LoganShepp => "logan-shepp",
            BasisFamily::Dubiner => "dubiner",
            BasisFamily::SphericalHarmonics => "spherical-harmonics",
        }
    }
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for BasisFamily {
    type Err = MzError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "legendre" => BasisFamily::Legendre1D,
            "product-legendre" => BasisFamily::ProductLegendreTD,
            "product-chebyshev" => BasisFamily::ProductChebyshevTD,
            "logan-shepp" => BasisFamily::LoganShepp,
            "dubiner" => BasisFamily::Dubiner,
            "spherical-harmonics" => BasisFamily::SphericalHarmonics,
            other => return Err(MzError::InvalidArgument(format!("unknown basis family `{other}`"))),
        })
    }
}

/// Dimension `d_n` of the degree-`n` polynomial space on `domain`.
pub fn basis_dim(domain: Domain, n: usize) -> usize {
    match domain.kind() {
        DomainKind::Interval => n + 1,
        DomainKind::Square | DomainKind::Disk | DomainKind::Simplex => (n + 1) * (n + 2) / 2,
        DomainKind::Cube => (n + 1) * (n + 2) * (n + 3) / 6,
        DomainKind::Sphere => (n + 1) * (n + 1),
    }
}

/// A mu-orthonormal basis of total degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthonormalBasis {
    domain: Domain,
    degree: usize,
    family: BasisFamily,
}

impl OrthonormalBasis {
    pub fn new(domain: Domain, degree: usize) -> Self {
        OrthonormalBasis {
            domain,
            degree,
            family: BasisFamily::for_domain(domain),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        basis_dim(self.domain, self.degree)
    }

    pub fn with_degree(&self, degree: usize) -> Self {
        OrthonormalBasis { degree, ..*self }
    }

    /// Index of the constant element, always the first one.
    pub fn constant_index(&self) -> usize {
        0
    }

    /// Multi-index labels in basis order, e.g. `(2,0)` or `l=3,m=-1`.
    pub fn labels(&self) -> Vec<String> {
        let n = self.degree;
        let mut out = Vec::with_capacity(self.dim());
        for k in 0..=n {
            match self.family {
                BasisFamily::Legendre1D => out.push(format!("({k})")),
                BasisFamily::ProductLegendreTD | BasisFamily::ProductChebyshevTD => {
                    if self.domain.kind() == DomainKind::Cube {
                        for (a, b, c) in cube_indices(k) {
                            out.push(format!("({a},{b},{c})"));
                        }
                    } else {
                        for a in (0..=k).rev() {
                            out.push(format!("({a},{})", k - a));
                        }
                    }
                }
                BasisFamily::LoganShepp => out.extend((0..=k).map(|j| format!("k={k},j={j}"))),
                BasisFamily::Dubiner => out.extend((0..=k).rev().map(|p| format!("({p},{})", k - p))),
                BasisFamily::SphericalHarmonics => {
                    let l = k as i64;
                    out.extend((-l..=l).map(|m| format!("l={l},m={m}")))
                }
            }
        }
        out
    }

    /// Writes `phi_j(p)` for all `j` into `out`, which must have length `dim()`.
    /// The point is assumed to lie in the domain.
    pub fn eval_point(&self, p: &[f64], out: &mut [f64]) {
        let n = self.degree;
        match self.family {
            BasisFamily::Legendre1D => poly::legendre_orthonormal(p[0], out),
            BasisFamily::ProductLegendreTD | BasisFamily::ProductChebyshevTD => {
                let f: fn(f64, &mut [f64]) = if self.family == BasisFamily::ProductLegendreTD {
                    poly::legendre_orthonormal
                } else {
                    poly::chebyshev_orthonormal
                };
                let mut tx = vec![0.0; n + 1];
                let mut ty = vec![0.0; n + 1];
                f(p[0], &mut tx);
                f(p[1], &mut ty);
                let mut j = 0;
                if self.domain.kind() == DomainKind::Cube {
                    let mut tz = vec![0.0; n + 1];
                    f(p[2], &mut tz);
                    for k in 0..=n {
                        for (a, b, c) in cube_indices(k) {
                            out[j] = tx[a] * ty[b] * tz[c];
                            j += 1;
                        }
                    }
                } else {
                    for k in 0..=n {
                        for a in (0..=k).rev() {
                            out[j] = tx[a] * ty[k - a];
                            j += 1;
                        }
                    }
                }
            }
            BasisFamily::LoganShepp => logan_shepp(n, p, out),
            BasisFamily::Dubiner => dubiner(n, p, out),
            BasisFamily::SphericalHarmonics => spherical_harmonics(n, p, out),
        }
    }
}

fn cube_indices(k: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..=k)
        .rev()
        .flat_map(move |a| (0..=k - a).rev().map(move |b| (a, b, k - a - b)))
}

fn logan_shepp(n: usize, p: &[f64], out: &mut [f64]) {
    let scale = 1.0 / PI.sqrt();
    let mut u = vec![0.0; n + 1];
    let mut j = 0;
    for k in 0..=n {
        for i in 0..=k {
            let theta = i as f64 * PI / (k + 1) as f64;
            let t = p[0] * theta.cos() + p[1] * theta.sin();
            poly::chebyshev_u(t, &mut u[..=k]);
            out[j] = scale * u[k];
            j += 1;
        }
    }
}

fn dubiner(n: usize, p: &[f64], out: &mut [f64]) {
    let (x, y) = (p[0], p[1]);
    let s = 1.0 - y;
    // q[i] = s^i P_i(2x/s - 1), evaluated without dividing by s.
    let mut q = vec![0.0; n + 1];
    q[0] = 1.0;
    if n >= 1 {
        q[1] = 2.0 * x - s;
    }
    for i in 1..n {
        let fi = i as f64;
        q[i + 1] = ((2.0 * fi + 1.0) * (2.0 * x - s) * q[i] - fi * s * s * q[i - 1]) / (fi + 1.0);
    }
    let b = 2.0 * y - 1.0;
    let mut jac: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for pi in 0..=n {
        let mut v = vec![0.0; n - pi + 1];
        poly::jacobi(2.0 * pi as f64 + 1.0, 0.0, b, &mut v);
        jac.push(v);
    }
    let mut j = 0;
    for k in 0..=n {
        for pi in (0..=k).rev() {
            let qi = k - pi;
            let norm = (2.0 * (2 * pi + 1) as f64 * (k + 1) as f64).sqrt();
            out[j] = norm * q[pi] * jac[pi][qi];
            j += 1;
        }
    }
}

fn spherical_harmonics(n: usize, p: &[f64], out: &mut [f64]) {
    let (x, y, t) = (p[0], p[1], p[2]);
    // hat[m][l - m] = normalized associated Legendre P_l^m(t) divided by sin^m.
    let mut hat: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut diag = std::f64::consts::FRAC_1_SQRT_2;
    for m in 0..=n {
        if m > 0 {
            let mf = m as f64;
            diag *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
        }
        let mut col = vec![0.0; n - m + 1];
        col[0] = diag;
        if n > m {
            col[1] = (2.0 * m as f64 + 3.0).sqrt() * t * diag;
        }
        for l in m + 2..=n {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            col[l - m] = a * (t * col[l - m - 1] - b * col[l - m - 2]);
        }
        hat.push(col);
    }
    // (x + iy)^m = sin^m (cos m phi + i sin m phi)
    let mut re = vec![0.0; n + 1];
    let mut im = vec![0.0; n + 1];
    re[0] = 1.0;
    for m in 1..=n {
        re[m] = re[m - 1] * x - im[m - 1] * y;
        im[m] = re[m - 1] * y + im[m - 1] * x;
    }
    let zonal = 1.0 / (2.0 * PI).sqrt();
    let sectoral = 1.0 / PI.sqrt();
    let mut j = 0;
    for l in 0..=n {
        for m in -(l as i64)..=(l as i64) {
            let am = m.unsigned_abs() as usize;
            let plm = hat[am][l - am];
            out[j] = match m.cmp(&0) {
                std::cmp::Ordering::Equal => zonal * plm,
                std::cmp::Ordering::Greater => sectoral * plm * re[am],
                std::cmp::Ordering::Less => sectoral * plm * im[am],
            };
            j += 1;
        }
    }
}

/// The `M x d_n` matrix `B_ij = phi_j(x_i)`.
#[derive(Debug, Clone)]
pub struct BasisMatrix {
    basis: OrthonormalBasis,
    matrix: Matrix,
}

impl BasisMatrix {
    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn num_points(&self) -> usize {
        self.matrix.rows()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    /// The basis matrix of a lower degree, taken as a column prefix.
    pub fn truncate(&self, degree: usize) -> BasisMatrix {
        assert!(degree <= self.basis.degree, "cannot raise the degree by truncation");
        let basis = self.basis.with_degree(degree);
        BasisMatrix {
            matrix: self.matrix.leading(self.matrix.rows(), basis.dim()),
            basis,
        }
    }

    /// `B^T diag(w) B`, accumulated over the upper triangle one node at a time.
    pub fn weighted_gram(&self, weights: &[f64]) -> SymMatrix {
        assert_eq!(weights.len(), self.num_points());
        let d = self.basis.dim();
        let mut g = Matrix::zeros(d, d);
        for (i, &w) in weights.iter().enumerate() {
            rank_one_upper(&mut g, w, self.matrix.row(i));
        }
        SymMatrix::from_upper(g)
    }

    /// `B^T v`.
    pub fn transpose_mul(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.num_points());
        let mut out = vec![0.0; self.basis.dim()];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.matrix.row(i)) {
                *o += vi * b;
            }
        }
        out
    }
}

/// Evaluates the basis at a flat list of points.
pub fn eval_basis(basis: &OrthonormalBasis, coords: &[f64]) -> Result<BasisMatrix> {
    basis.domain.check_points(coords)?;
    let dim = basis.domain.dim();
    let d = basis.dim();
    let m = coords.len() / dim;
    let mut data = vec![0.0; m * d];
    data.par_chunks_mut(d)
        .zip(coords.par_chunks_exact(dim))
        .with_min_len(256)
        .for_each(|(row, p)| basis.eval_point(p, row));
    Ok(BasisMatrix {
        basis: *basis,
        matrix: Matrix::from_vec(m, d, data)?,
    })
}

/// Points per block in [`streaming_gram`].
const GRAM_CHUNK: usize = 2048;

/// `B^T diag(w) B` without materializing `B`: the points are evaluated in
/// fixed-size blocks whose partial Gramians are summed in block order, so the
/// result does not depend on the number of worker threads.
pub fn streaming_gram(basis: &OrthonormalBasis, coords: &[f64], weights: &[f64]) -> Result<SymMatrix> {
    basis.domain.check_points(coords)?;
    let dim = basis.domain.dim();
    if coords.len() != weights.len() * dim {
        return Err(MzError::InvalidArgument("node and weight counts differ".into()));
    }
    let d = basis.dim();
    let partials: Vec<Matrix> = coords
        .par_chunks(GRAM_CHUNK * dim)
        .zip(weights.par_chunks(GRAM_CHUNK))
        .map(|(pts, ws)| {
            let mut g = Matrix::zeros(d, d);
            let mut row = vec![0.0; d];
            for (p, &w) in pts.chunks_exact(dim).zip(ws) {
                basis.eval_point(p, &mut row);
                rank_one_upper(&mut g, w, &row);
            }
            g
        })
        .collect();
    let mut total = Matrix::zeros(d, d);
    for part in &partials {
        for i in 0..d {
            for (t, v) in total.row_mut(i)[i..].iter_mut().zip(&part.row(i)[i..]) {
                *t += v;
            }
        }
    }
    Ok(SymMatrix::from_upper(total))
}

fn rank_one_upper(g: &mut Matrix, w: f64, row: &[f64]) {
    for j in 0..row.len() {
        let s = w * row[j];
        if s == 0.0 {
            continue;
        }
        for (acc, &b) in g.row_mut(j)[j..].iter_mut().zip(&row[j..]) {
            *acc += s * b;
        }
    }
}

/// `max_{j,k} |S_ref(phi_j phi_k) - delta_jk|` for a reference rule exact to degree `2n`.
pub fn check_orthonormality(basis: &OrthonormalBasis, reference: &CubatureRule) -> Result<f64> {
    if reference.domain() != basis.domain() {
        return Err(MzError::DomainMismatch {
            expected: basis.domain(),
            found: reference.domain(),
        });
    }
    if let Some(ade) = reference.ade() {
        if ade < 2 * basis.degree() {
            return Err(MzError::InvalidArgument(format!(
                "reference rule has ADE {ade}, need at least {}",
                2 * basis.degree()
            )));
        }
    }
    let g = streaming_gram(basis, reference.nodes(), reference.weights())?;
    let d = basis.dim();
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in 0..d {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((g[(j, k)] - target).abs());
        }
    }
    Ok(worst)
}

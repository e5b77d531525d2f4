//! Hyperinterpolation and discrete least-squares projection onto `P_n`.
//!
//! Both operators start from the discrete moments `m_j = S(f phi_j)`. The
//! hyperinterpolant uses them directly as coefficients; the least-squares
//! projection solves `G c = m`, which is the minimizer of
//! `sum_i w_i (p(x_i) - f(x_i))^2` over `P_n` whenever `G` is positive definite.
//!
//! User functions are called from several threads during basis evaluation and
//! must therefore be `Sync`.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::bases::{eval_basis, BasisMatrix, OrthonormalBasis};
use crate::domain::{Domain, DomainKind};
use crate::error::{MzError, Result};
use crate::linalg::{dot, lu_solve, spd_solve, SymMatrix};
use crate::mz::{check_domains, MzReport};
use crate::poly;
use crate::rules::{reference_rule, CubatureRule, Provenance};

/// ADE of the rule that error norms are measured with.
pub const REFERENCE_ADE: usize = 50;
/// Size of the seeded random sample used to estimate sup-norms.
pub const SUP_SAMPLE_SIZE: usize = 10_000;
pub const SUP_SAMPLE_SEED: u64 = 0x5eed_0001;
/// Absolute slack in the bound comparison, so that `0 <= 0` survives rounding.
pub const BOUND_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    Hyperinterpolation,
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximant {
    pub basis: OrthonormalBasis,
    pub coeffs: Vec<f64>,
    pub method: Method,
    pub source: Provenance,
}

impl Approximant {
    pub fn eval_point(&self, p: &[f64]) -> f64 {
        let mut row = vec![0.0; self.basis.dim()];
        self.basis.eval_point(p, &mut row);
        dot(&row, &self.coeffs)
    }
}

/// `f` at every node of `rule`.
pub fn sample<F>(rule: &CubatureRule, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    sample_coords(rule.nodes(), rule.domain().dim(), f)
}

fn sample_coords<F>(coords: &[f64], dim: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    coords
        .chunks_exact(dim)
        .enumerate()
        .map(|(index, p)| {
            let v = f(p);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(MzError::NonFiniteValue { index })
            }
        })
        .collect()
}

/// `m_j = sum_i w_i v_i phi_j(x_i)`.
pub fn moments(bm: &BasisMatrix, weights: &[f64], values: &[f64]) -> Vec<f64> {
    let wv: Vec<f64> = weights.iter().zip(values).map(|(w, v)| w * v).collect();
    bm.transpose_mul(&wv)
}

/// Solves `G c = m`. A failed Cholesky factorization means `A <= 0`, so the
/// rule has no MZ property at this degree.
///
/// With `signed_weights` (a rule with some negative weight) an indefinite but
/// nonsingular `G` is still solved, by pivoted LU; the result is then the
/// stationary point of the weighted residual rather than its minimizer.
pub fn least_squares_coeffs(g: &SymMatrix, moments: &[f64], signed_weights: bool) -> Result<Vec<f64>> {
    match spd_solve(g, moments) {
        Err(MzError::NotPositiveDefinite { .. }) if signed_weights => lu_solve(g.matrix(), moments),
        other => other,
    }
}

pub fn hyperinterpolate<F>(rule: &CubatureRule, basis: &OrthonormalBasis, f: F) -> Result<Approximant>
where
    F: Fn(&[f64]) -> f64,
{
    check_domains(rule, basis)?;
    let values = sample(rule, f)?;
    let bm = eval_basis(basis, rule.nodes())?;
    Ok(Approximant {
        basis: *basis,
        coeffs: moments(&bm, rule.weights(), &values),
        method: Method::Hyperinterpolation,
        source: rule.provenance(),
    })
}

pub fn least_squares<F>(rule: &CubatureRule, basis: &OrthonormalBasis, f: F) -> Result<Approximant>
where
    F: Fn(&[f64]) -> f64,
{
    check_domains(rule, basis)?;
    let values = sample(rule, f)?;
    let bm = eval_basis(basis, rule.nodes())?;
    let g = bm.weighted_gram(rule.weights());
    let m = moments(&bm, rule.weights(), &values);
    Ok(Approximant {
        basis: *basis,
        coeffs: least_squares_coeffs(&g, &m, rule.min_weight() < 0.0)?,
        method: Method::LeastSquares,
        source: rule.provenance(),
    })
}

/// `p(z) = sum_j c_j phi_j(z)` at every point of a flat coordinate list.
pub fn evaluate(approx: &Approximant, coords: &[f64]) -> Result<Vec<f64>> {
    let bm = eval_basis(&approx.basis, coords)?;
    Ok(evaluate_on(&bm, &approx.coeffs))
}

/// Values of the expansion with `coeffs` (a prefix of the basis order) on the
/// points behind `bm`.
pub fn evaluate_on(bm: &BasisMatrix, coeffs: &[f64]) -> Vec<f64> {
    (0..bm.num_points()).map(|i| dot(&bm.row(i)[..coeffs.len()], coeffs)).collect()
}

/// `sqrt(sum u_k (p_k - f_k)^2) / sqrt(sum u_k f_k^2)`.
pub fn rel_l2_from_values(p: &[f64], f: &[f64], weights: &[f64]) -> Result<f64> {
    let (num, den) = l2_parts(p, f, weights);
    if den <= f64::MIN_POSITIVE {
        return Err(MzError::DegenerateFunction);
    }
    Ok(num / den)
}

fn l2_parts(p: &[f64], f: &[f64], weights: &[f64]) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((pk, fk), u) in p.iter().zip(f).zip(weights) {
        num += u * (pk - fk) * (pk - fk);
        den += u * fk * fk;
    }
    (num.sqrt(), den.sqrt())
}

pub fn rel_l2_error<F>(approx: &Approximant, f: F, reference: &CubatureRule) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if reference.domain() != approx.basis.domain() {
        return Err(MzError::DomainMismatch {
            expected: approx.basis.domain(),
            found: reference.domain(),
        });
    }
    let p = evaluate(approx, reference.nodes())?;
    let fv = sample(reference, f)?;
    rel_l2_from_values(&p, &fv, reference.weights())
}

/// Outcome of comparing the least-squares error with its MZ upper bound
/// `(1 + 1/sqrt(A)) sqrt(mu) ||f - q||_inf` for a surrogate `q` in `P_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub n: usize,
    pub a: f64,
    /// `||f - G_n f||_2` on the reference rule.
    pub lhs: f64,
    pub rhs: f64,
    /// Sampled estimate of `||f - q||_inf`; a lower estimate of the true sup.
    pub sup_estimate: f64,
    pub sup_samples: usize,
    pub pass: bool,
}

pub fn check_error_bounds<F, Q>(report: &MzReport, rule: &CubatureRule, f: F, surrogate: Q) -> Result<BoundCheck>
where
    F: Fn(&[f64]) -> f64 + Sync,
    Q: Fn(&[f64]) -> f64,
{
    if report.a.is_nan() || report.a <= 0.0 || !report.has_mz_property() {
        return Err(MzError::InvalidArgument(format!(
            "error bound needs A > 0, report has A = {:e}",
            report.a
        )));
    }
    let domain = rule.domain();
    let basis = OrthonormalBasis::new(domain, report.n);
    let ls = least_squares(rule, &basis, &f)?;
    let reference = reference_rule(domain, REFERENCE_ADE)?;
    let p = evaluate(&ls, reference.nodes())?;
    let fv = sample(&reference, &f)?;
    let (lhs, norm_f) = l2_parts(&p, &fv, reference.weights());

    let pts = domain.sample_points(SUP_SAMPLE_SIZE, SUP_SAMPLE_SEED);
    let sup_estimate = pts
        .chunks_exact(domain.dim())
        .chain(rule.points())
        .map(|z| (f(z) - surrogate(z)).abs())
        .fold(0.0, f64::max);
    let rhs = (1.0 + 1.0 / report.a.sqrt()) * domain.mass().sqrt() * sup_estimate;
    Ok(BoundCheck {
        n: report.n,
        a: report.a,
        lhs,
        rhs,
        sup_estimate,
        sup_samples: SUP_SAMPLE_SIZE + rule.len(),
        pass: lhs <= rhs + BOUND_SLACK * norm_f.max(1.0),
    })
}

/// Truncated tensor Chebyshev expansion `sum_{|alpha| <= n} c_alpha T_alpha`
/// on a box domain, used as a surrogate near-best approximant.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSeries {
    dim: usize,
    degree: usize,
    terms: Vec<([usize; 3], f64)>,
}

/// Chebyshev nodes per axis used to compute the coefficients.
fn transform_size(n: usize) -> usize {
    (4 * (n + 1)).max(64)
}

pub fn chebyshev_truncation<F>(domain: Domain, f: F, n: usize) -> Result<ChebyshevSeries>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = match domain.kind() {
        DomainKind::Interval | DomainKind::Square | DomainKind::Cube => domain.dim(),
        _ => return Err(MzError::Unsupported(format!("Chebyshev truncation on {domain}"))),
    };
    let big_n = transform_size(n);
    let x: Vec<f64> = (0..big_n)
        .map(|k| ((k as f64 + 0.5) * std::f64::consts::PI / big_n as f64).cos())
        .collect();
    // t[k][j] = T_j(x_k)
    let mut t = vec![vec![0.0; n + 1]; big_n];
    for (k, row) in t.iter_mut().enumerate() {
        poly::chebyshev_t(x[k], row);
    }
    let sizes: Vec<usize> = (0..3).map(|a| if a < dim { big_n } else { 1 }).collect();
    let mut grid = vec![0.0; sizes[0] * sizes[1] * sizes[2]];
    let mut p = [0.0; 3];
    for i in 0..sizes[0] {
        for j in 0..sizes[1] {
            for k in 0..sizes[2] {
                p[0] = x[i];
                p[1] = x[j];
                p[2] = x[k];
                let v = f(&p[..dim]);
                if !v.is_finite() {
                    return Err(MzError::NonFiniteValue { index: (i * sizes[1] + j) * sizes[2] + k });
                }
                grid[(i * sizes[1] + j) * sizes[2] + k] = v;
            }
        }
    }
    // Transform one axis at a time: axis a of size sizes[a] becomes n+1 modes.
    let mut shape = sizes.clone();
    let mut data = grid;
    for axis in 0..dim {
        let mut new_shape = shape.clone();
        new_shape[axis] = n + 1;
        let mut out = vec![0.0; new_shape.iter().product()];
        let scale = 2.0 / big_n as f64;
        for a in 0..new_shape[0] {
            for b in 0..new_shape[1] {
                for c in 0..new_shape[2] {
                    let idx = [a, b, c];
                    let mode = idx[axis];
                    let mut s = 0.0;
                    for (kk, tk) in t.iter().enumerate() {
                        let mut src = idx;
                        src[axis] = kk;
                        s += tk[mode] * data[(src[0] * shape[1] + src[1]) * shape[2] + src[2]];
                    }
                    let factor = if mode == 0 { 0.5 * scale } else { scale };
                    out[(a * new_shape[1] + b) * new_shape[2] + c] = factor * s;
                }
            }
        }
        data = out;
        shape = new_shape;
    }
    let mut terms = Vec::new();
    for a in 0..shape[0] {
        for b in 0..shape[1] {
            for c in 0..shape[2] {
                if a + b + c <= n {
                    terms.push(([a, b, c], data[(a * shape[1] + b) * shape[2] + c]));
                }
            }
        }
    }
    Ok(ChebyshevSeries { dim, degree: n, terms })
}

impl ChebyshevSeries {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        let mut t = vec![vec![0.0; self.degree + 1]; self.dim];
        for (axis, row) in t.iter_mut().enumerate() {
            poly::chebyshev_t(p[axis], row);
        }
        self.terms
            .iter()
            .map(|(alpha, c)| c * (0..self.dim).map(|axis| t[axis][alpha[axis]]).product::<f64>())
            .sum()
    }
}

/// How an error record's coefficients were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Scheme {
    /// Hyperinterpolation with the low-exactness rule.
    Unfettered,
    /// Hyperinterpolation with a rule of ADE at least `2 n_max`.
    Classical,
    LeastSquares,
}

impl Scheme {
    pub fn token(&self) -> &'static str {
        match self {
            Scheme::Unfettered => "hyper-unfettered",
            Scheme::Classical => "hyper-classical",
            Scheme::LeastSquares => "least-squares",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub domain: Domain,
    pub family: String,
    pub ade: Option<usize>,
    pub n: usize,
    pub method: Scheme,
    pub fid: String,
    /// Relative L2 error, `NaN` when the approximant could not be built.
    pub relerr: f64,
    /// Failure description for records without an error value.
    pub failure: Option<String>,
}

pub const ERROR_CSV_HEADER: [&str; 7] = ["domain", "family", "ade", "n", "method", "fid", "relerr"];

pub fn write_error_csv<W: Write>(records: &[ErrorRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| MzError::Io {
        path: "<csv>".into(),
        source: std::io::Error::other(e.to_string()),
    };
    w.write_record(ERROR_CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            r.domain.to_string(),
            r.family.clone(),
            r.ade.map_or("unknown".to_string(), |a| a.to_string()),
            r.n.to_string(),
            r.method.to_string(),
            r.fid.clone(),
            format_float(r.relerr),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|source| MzError::Io {
        path: "<csv>".into(),
        source,
    })
}

/// 17 significant digits; non-finite values as `inf`, `-inf` or `nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

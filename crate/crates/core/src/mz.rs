//! Rule Gramians and the weak Marcinkiewicz-Zygmund constants derived from them.
//!
//! For a rule `S` and a mu-orthonormal basis of degree `n`, `G_jk = S(phi_j phi_k)`
//! and `S(p^2) = c^T G c` for `p = sum c_j phi_j`. The sharpest constants in
//! `A ||p||^2 <= S(p^2) <= B ||p||^2` are the extreme eigenvalues of `G`, and
//! `eta = ||Id - G||_2 = max(|1 - A|, |1 - B|)`.

use serde::{Serialize, Serializer};

use crate::bases::{eval_basis, streaming_gram, BasisMatrix, OrthonormalBasis};
use crate::error::{MzError, Result};
use crate::linalg::{dist_from_identity, dot, norm2, sym_eig, SymMatrix};
use crate::rules::CubatureRule;

/// `A <= NO_MZ_TOL * B` is treated as `A = 0`: `cond2` is infinite and the
/// rule has no MZ property at that degree.
pub const NO_MZ_TOL: f64 = 1e-14;

/// `G = B^T diag(w) B` with `B_ij = phi_j(x_i)`.
pub fn gramian(rule: &CubatureRule, basis: &OrthonormalBasis) -> Result<SymMatrix> {
    check_domains(rule, basis)?;
    streaming_gram(basis, rule.nodes(), rule.weights())
}

pub(crate) fn check_domains(rule: &CubatureRule, basis: &OrthonormalBasis) -> Result<()> {
    if rule.domain() != basis.domain() {
        return Err(MzError::DomainMismatch {
            expected: basis.domain(),
            found: rule.domain(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MzReport {
    pub n: usize,
    /// `lambda_min(G)`, clamped at zero when it is rounding noise.
    pub a: f64,
    /// `lambda_max(G)`.
    pub b: f64,
    pub eta: f64,
    /// `B / A`, infinite when `A` vanishes.
    pub cond2: f64,
    pub pa_coeffs: Vec<f64>,
    pub pb_coeffs: Vec<f64>,
    /// Unit eigenvector of `Id - G` for its eigenvalue of largest magnitude.
    pub worst_coeffs: Vec<f64>,
    pub d_n: usize,
    /// Number of rule nodes, when the report was built from a rule.
    pub nodes: Option<usize>,
    pub family: String,
    pub ade: Option<usize>,
}

impl MzReport {
    /// `A > 0` in the sense of [`NO_MZ_TOL`].
    pub fn has_mz_property(&self) -> bool {
        self.cond2.is_finite()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MzReportJson::from(self)).expect("report serializes")
    }
}

#[derive(Serialize)]
struct MzReportJson<'a> {
    n: usize,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    eta: f64,
    #[serde(serialize_with = "finite_or_inf")]
    cond2: f64,
    #[serde(rename = "M")]
    nodes: Option<usize>,
    d_n: usize,
    family: &'a str,
    #[serde(serialize_with = "ade_or_unknown")]
    ade: Option<usize>,
    mz_property: bool,
}

impl<'a> From<&'a MzReport> for MzReportJson<'a> {
    fn from(r: &'a MzReport) -> Self {
        MzReportJson {
            n: r.n,
            a: r.a,
            b: r.b,
            eta: r.eta,
            cond2: r.cond2,
            nodes: r.nodes,
            d_n: r.d_n,
            family: &r.family,
            ade: r.ade,
            mz_property: r.has_mz_property(),
        }
    }
}

fn finite_or_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

fn ade_or_unknown<S: Serializer>(v: &Option<usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(a) => s.serialize_u64(*a as u64),
        None => s.serialize_str("unknown"),
    }
}

/// MZ constants of a Gramian built over `basis`.
pub fn mz_report(g: &SymMatrix, basis: &OrthonormalBasis) -> Result<MzReport> {
    if g.order() != basis.dim() {
        return Err(MzError::InvalidArgument(format!(
            "Gramian of order {} does not match basis dimension {}",
            g.order(),
            basis.dim()
        )));
    }
    let eig = sym_eig(g)?;
    let d = g.order();
    let (a, b) = (eig.min(), eig.max());
    let eta = dist_from_identity(a, b);
    let cond2 = if a <= NO_MZ_TOL * b { f64::INFINITY } else { b / a };
    let pa = eig.eigenvector(0).to_vec();
    let pb = eig.eigenvector(d - 1).to_vec();
    let worst = if (1.0 - a).abs() >= (1.0 - b).abs() { pa.clone() } else { pb.clone() };
    Ok(MzReport {
        n: basis.degree(),
        a,
        b,
        eta,
        cond2,
        pa_coeffs: pa,
        pb_coeffs: pb,
        worst_coeffs: worst,
        d_n: d,
        nodes: None,
        family: basis.family().token().to_string(),
        ade: None,
    })
}

/// Gramian and report for `rule` at degree `n`.
pub fn analyze(rule: &CubatureRule, n: usize) -> Result<MzReport> {
    let basis = OrthonormalBasis::new(rule.domain(), n);
    let g = gramian(rule, &basis)?;
    Ok(tag(mz_report(&g, &basis)?, rule))
}

fn tag(mut report: MzReport, rule: &CubatureRule) -> MzReport {
    report.nodes = Some(rule.len());
    report.ade = rule.ade();
    report.family = rule.provenance().to_string();
    report
}

/// Gramians of one rule for every degree up to `n_max`.
///
/// The graded basis order makes each lower-degree Gramian a leading block of
/// the top one, so the Gramian is accumulated once.
#[derive(Debug, Clone)]
pub struct GramianLadder {
    rule: CubatureRule,
    basis: OrthonormalBasis,
    gram: SymMatrix,
}

impl GramianLadder {
    pub fn new(rule: CubatureRule, n_max: usize) -> Result<Self> {
        let basis = OrthonormalBasis::new(rule.domain(), n_max);
        let gram = streaming_gram(&basis, rule.nodes(), rule.weights())?;
        Ok(GramianLadder { rule, basis, gram })
    }

    pub fn rule(&self) -> &CubatureRule {
        &self.rule
    }

    pub fn max_degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn gramian(&self, n: usize) -> SymMatrix {
        assert!(n <= self.max_degree());
        self.gram.leading(self.basis.with_degree(n).dim())
    }

    pub fn report(&self, n: usize) -> Result<MzReport> {
        let basis = self.basis.with_degree(n);
        Ok(tag(mz_report(&self.gramian(n), &basis)?, &self.rule))
    }
}

/// `|1 - S(p^2)|` for `p = sum c_j phi_j` with `||c||_2 = 1`, computed from
/// point values without any eigen-decomposition.
pub fn eta_direct_check(rule: &CubatureRule, basis: &OrthonormalBasis, coeffs: &[f64]) -> Result<f64> {
    check_domains(rule, basis)?;
    let bm = eval_basis(basis, rule.nodes())?;
    eta_direct_from_matrix(&bm, rule.weights(), coeffs)
}

/// As [`eta_direct_check`] on a precomputed basis matrix.
pub fn eta_direct_from_matrix(bm: &BasisMatrix, weights: &[f64], coeffs: &[f64]) -> Result<f64> {
    if coeffs.len() != bm.basis().dim() {
        return Err(MzError::InvalidArgument(format!(
            "expected {} coefficients, got {}",
            bm.basis().dim(),
            coeffs.len()
        )));
    }
    let norm = norm2(coeffs);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(MzError::InvalidArgument(format!("coefficient vector has norm {norm}, expected 1")));
    }
    let s: f64 = weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let p = dot(bm.row(i), coeffs);
            w * p * p
        })
        .sum();
    Ok((1.0 - s).abs())
}

//! Degree scans of the MZ constants and the approximation error comparison.

use std::collections::BTreeMap;
use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{
    format_float, least_squares_coeffs, moments, rel_l2_from_values, sample, ErrorRecord, Scheme, REFERENCE_ADE,
};
use crate::bases::{basis_dim, eval_basis, OrthonormalBasis};
use crate::domain::{Domain, DomainKind, Measure};
use crate::error::{MzError, Result};
use crate::mz::{GramianLadder, MzReport};
use crate::rules::{clenshaw_curtis, halton_qmc, padua_rule, reference_rule, CubatureRule, DataSource, RuleFamily};
use crate::testfns::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    Eta,
    Cond,
}

/// Upper edges and labels of the conditioning buckets.
pub const COND_BUCKETS: [(f64, &str); 5] = [
    (1e1, "[1,10)"),
    (1e2, "[10,1e2)"),
    (1e4, "[1e2,1e4)"),
    (1e7, "[1e4,1e7)"),
    (f64::INFINITY, "[1e7,inf)"),
];

pub fn cond_bucket(cond2: f64) -> &'static str {
    COND_BUCKETS
        .iter()
        .find(|(edge, _)| cond2 < *edge)
        .map_or(COND_BUCKETS[4].1, |(_, label)| label)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "kebab-case")]
pub enum CellStatus {
    Ok,
    DatasetMissing(String),
    Unsupported(String),
    Failed(String),
}

impl CellStatus {
    pub fn token(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::DatasetMissing(_) => "dataset-missing",
            CellStatus::Unsupported(_) => "unsupported",
            CellStatus::Failed(_) => "failed",
        }
    }

    fn from_error(e: &MzError) -> Self {
        match e {
            MzError::DatasetMissing(p) => CellStatus::DatasetMissing(p.display().to_string()),
            MzError::Unsupported(msg) => CellStatus::Unsupported(msg.clone()),
            other => CellStatus::Failed(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCell {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub nodes: Option<usize>,
    pub d_n: usize,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub eta: Option<f64>,
    #[serde(serialize_with = "opt_finite_or_inf")]
    pub cond2: Option<f64>,
    pub bucket: Option<&'static str>,
    #[serde(flatten)]
    pub status: CellStatus,
}

fn opt_finite_or_inf<S: serde::Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(c) if c.is_infinite() => s.serialize_str("inf"),
        Some(c) => s.serialize_f64(*c),
        None => s.serialize_none(),
    }
}

impl ScanCell {
    fn from_report(m: usize, r: &MzReport) -> Self {
        ScanCell {
            m,
            n: r.n,
            nodes: r.nodes,
            d_n: r.d_n,
            a: Some(r.a),
            b: Some(r.b),
            eta: Some(r.eta),
            cond2: Some(r.cond2),
            bucket: Some(cond_bucket(r.cond2)),
            status: CellStatus::Ok,
        }
    }

    fn skipped(m: usize, n: usize, domain: Domain, nodes: Option<usize>, status: CellStatus) -> Self {
        ScanCell {
            m,
            n,
            nodes,
            d_n: basis_dim(domain, n),
            a: None,
            b: None,
            eta: None,
            cond2: None,
            bucket: None,
            status,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub kind: ScanKind,
    pub family: RuleFamily,
    pub domain: Domain,
    pub m: RangeInclusive<usize>,
    pub n: RangeInclusive<usize>,
    pub data: DataSource,
    /// Worker threads; `None` uses every logical processor.
    pub jobs: Option<usize>,
}

impl ScanSpec {
    pub fn new(kind: ScanKind, family: RuleFamily, domain: Domain) -> Self {
        let n_max = if family == RuleFamily::Qmc { 20 } else { 30 };
        ScanSpec {
            kind,
            family,
            domain,
            m: 1..=20,
            n: 0..=n_max,
            data: DataSource::default(),
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanGrid {
    pub kind: ScanKind,
    pub family: &'static str,
    pub domain: String,
    pub m_values: Vec<usize>,
    pub n_values: Vec<usize>,
    /// Sorted by `(m, n)`.
    pub cells: Vec<ScanCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub cells: usize,
    pub computed: usize,
    pub skipped: usize,
    pub eta_below_one: usize,
    pub buckets: BTreeMap<&'static str, usize>,
}

pub const SCAN_CSV_HEADER: [&str; 10] = ["family", "domain", "m", "n", "M", "d_n", "eta", "cond2", "bucket", "status"];

pub fn scan(spec: &ScanSpec) -> Result<ScanGrid> {
    if spec.m.is_empty() || spec.n.is_empty() {
        return Err(MzError::InvalidArgument("scan ranges must be nonempty".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = spec.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| MzError::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let m_values: Vec<usize> = spec.m.clone().collect();
    let n_values: Vec<usize> = spec.n.clone().collect();
    let mut cells: Vec<ScanCell> = pool.install(|| {
        m_values
            .par_iter()
            .flat_map_iter(|&m| scan_column(spec, m, &n_values))
            .collect()
    });
    cells.sort_by_key(|c| (c.m, c.n));
    Ok(ScanGrid {
        kind: spec.kind,
        family: spec.family.token(),
        domain: spec.domain.to_string(),
        m_values,
        n_values,
        cells,
    })
}

pub fn scan_eta(family: RuleFamily, domain: Domain, m: RangeInclusive<usize>, n: RangeInclusive<usize>) -> Result<ScanGrid> {
    scan(&ScanSpec {
        m,
        n,
        ..ScanSpec::new(ScanKind::Eta, family, domain)
    })
}

pub fn scan_cond(
    family: RuleFamily,
    domain: Domain,
    m: RangeInclusive<usize>,
    n: RangeInclusive<usize>,
) -> Result<ScanGrid> {
    scan(&ScanSpec {
        m,
        n,
        ..ScanSpec::new(ScanKind::Cond, family, domain)
    })
}

fn scan_column(spec: &ScanSpec, m: usize, n_values: &[usize]) -> Vec<ScanCell> {
    let skip_all = |nodes: Option<usize>, status: CellStatus| -> Vec<ScanCell> {
        n_values
            .iter()
            .map(|&n| ScanCell::skipped(m, n, spec.domain, nodes, status.clone()))
            .collect()
    };
    let rule = match spec.family.build(spec.domain, m, &spec.data) {
        Ok(rule) => rule,
        Err(e) => return skip_all(None, CellStatus::from_error(&e)),
    };
    let nodes = Some(rule.len());
    let n_max = *n_values.iter().max().expect("nonempty n range");
    let ladder = match GramianLadder::new(rule, n_max) {
        Ok(l) => l,
        Err(e) => return skip_all(nodes, CellStatus::from_error(&e)),
    };
    n_values
        .par_iter()
        .map(|&n| match ladder.report(n) {
            Ok(r) => ScanCell::from_report(m, &r),
            Err(e) => ScanCell::skipped(m, n, spec.domain, nodes, CellStatus::from_error(&e)),
        })
        .collect()
}

impl ScanGrid {
    pub fn cell(&self, m: usize, n: usize) -> Option<&ScanCell> {
        self.cells
            .binary_search_by_key(&(m, n), |c| (c.m, c.n))
            .ok()
            .map(|i| &self.cells[i])
    }

    /// Cells of one `m` in increasing `n`.
    pub fn column(&self, m: usize) -> impl Iterator<Item = &ScanCell> {
        self.cells.iter().filter(move |c| c.m == m)
    }

    pub fn summary(&self) -> ScanSummary {
        let mut buckets: BTreeMap<&'static str, usize> = COND_BUCKETS.iter().map(|(_, l)| (*l, 0)).collect();
        let mut computed = 0;
        let mut eta_below_one = 0;
        for c in &self.cells {
            if let (Some(eta), Some(b)) = (c.eta, c.bucket) {
                computed += 1;
                if eta < 1.0 {
                    eta_below_one += 1;
                }
                *buckets.entry(b).or_default() += 1;
            }
        }
        ScanSummary {
            cells: self.cells.len(),
            computed,
            skipped: self.cells.len() - computed,
            eta_below_one,
            buckets,
        }
    }

    /// One row per cell. Skipped cells keep their row with empty numeric
    /// fields and the skip reason in `status`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SCAN_CSV_HEADER).map_err(csv_err)?;
        let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        for c in &self.cells {
            w.write_record([
                self.family.to_string(),
                self.domain.clone(),
                c.m.to_string(),
                c.n.to_string(),
                c.nodes.map(|v| v.to_string()).unwrap_or_default(),
                c.d_n.to_string(),
                opt(c.eta),
                opt(c.cond2),
                c.bucket.unwrap_or_default().to_string(),
                c.status.token().to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|source| MzError::Io {
            path: "<csv>".into(),
            source,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("scan grid serializes")
    }
}

fn csv_err(e: csv::Error) -> MzError {
    MzError::Io {
        path: "<csv>".into(),
        source: std::io::Error::other(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub domain: Domain,
    pub build_ade: usize,
    pub n_max: usize,
}

impl BenchConfig {
    pub fn new(domain: Domain) -> Self {
        BenchConfig {
            domain,
            build_ade: 15,
            n_max: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub config: BenchConfig,
    pub relaxed_family: RuleFamily,
    pub relaxed_nodes: usize,
    pub classical_nodes: usize,
    pub reference_nodes: usize,
    /// Ordered by function, then method, then `n`.
    pub records: Vec<ErrorRecord>,
}

/// The low-exactness rule of a box domain: Clenshaw-Curtis on the interval,
/// Padua points on the square, `2^ade` Halton points on the cube.
pub fn relaxed_rule(domain: Domain, ade: usize) -> Result<(RuleFamily, CubatureRule)> {
    if domain.measure() != Measure::Lebesgue {
        return Err(MzError::Unsupported(format!("approximation bench on {domain}")));
    }
    match domain.kind() {
        DomainKind::Interval => Ok((RuleFamily::ClenshawCurtis, clenshaw_curtis(ade)?)),
        DomainKind::Square => Ok((RuleFamily::Padua, padua_rule(ade)?)),
        DomainKind::Cube => {
            let count = 1usize
                .checked_shl(ade as u32)
                .filter(|c| *c <= 1 << 24)
                .ok_or_else(|| MzError::InvalidArgument(format!("2^{ade} Halton points is too many")))?;
            Ok((RuleFamily::Qmc, halton_qmc(count, domain)?))
        }
        _ => Err(MzError::Unsupported(format!("approximation bench on {domain}"))),
    }
}

struct Prepared {
    family: RuleFamily,
    rule: CubatureRule,
    moments: Vec<f64>,
}

pub fn approx_bench(config: &BenchConfig) -> Result<BenchRun> {
    let domain = config.domain;
    let (relaxed_family, relaxed) = relaxed_rule(domain, config.build_ade)?;
    let classical = RuleFamily::GaussLegendre.build(domain, 2 * config.build_ade, &DataSource::Fixtures)?;
    let reference = reference_rule(domain, REFERENCE_ADE)?;
    let basis = OrthonormalBasis::new(domain, config.n_max);
    let bm_rel = eval_basis(&basis, relaxed.nodes())?;
    let bm_cls = eval_basis(&basis, classical.nodes())?;
    let bm_ref = eval_basis(&basis, reference.nodes())?;
    let gram = bm_rel.weighted_gram(relaxed.weights());
    let signed = relaxed.min_weight() < 0.0;

    let functions = TestFunction::catalog(domain)?;
    let per_function: Vec<Result<Vec<ErrorRecord>>> = functions
        .par_iter()
        .map(|tf| {
            let f = |p: &[f64]| tf.eval(p);
            let f_ref = sample(&reference, f)?;
            let rel = Prepared {
                family: relaxed_family,
                moments: moments(&bm_rel, relaxed.weights(), &sample(&relaxed, f)?),
                rule: relaxed.clone(),
            };
            let cls = Prepared {
                family: RuleFamily::GaussLegendre,
                moments: moments(&bm_cls, classical.weights(), &sample(&classical, f)?),
                rule: classical.clone(),
            };
            let mut out = Vec::with_capacity(3 * config.n_max);
            for scheme in [Scheme::Unfettered, Scheme::Classical, Scheme::LeastSquares] {
                let src = if scheme == Scheme::Classical { &cls } else { &rel };
                for n in 1..=config.n_max {
                    let d = basis_dim(domain, n);
                    let coeffs = match scheme {
                        Scheme::LeastSquares => {
                            least_squares_coeffs(&gram.leading(d), &src.moments[..d], signed)
                        }
                        _ => Ok(src.moments[..d].to_vec()),
                    };
                    let (relerr, failure) = match coeffs.and_then(|c| {
                        let p: Vec<f64> = (0..bm_ref.num_points())
                            .map(|i| crate::linalg::dot(&bm_ref.row(i)[..d], &c))
                            .collect();
                        rel_l2_from_values(&p, &f_ref, reference.weights())
                    }) {
                        Ok(e) => (e, None),
                        Err(e) => (f64::NAN, Some(e.to_string())),
                    };
                    out.push(ErrorRecord {
                        domain,
                        family: src.family.token().to_string(),
                        ade: src.rule.ade(),
                        n,
                        method: scheme,
                        fid: tf.id.token().to_string(),
                        relerr,
                        failure,
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut records = Vec::with_capacity(15 * config.n_max);
    for r in per_function {
        records.extend(r?);
    }
    Ok(BenchRun {
        config: config.clone(),
        relaxed_family,
        relaxed_nodes: relaxed.len(),
        classical_nodes: classical.len(),
        reference_nodes: reference.len(),
        records,
    })
}

impl BenchRun {
    pub fn record(&self, fid: &str, method: Scheme, n: usize) -> Option<&ErrorRecord> {
        self.records
            .iter()
            .find(|r| r.fid == fid && r.method == method && r.n == n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_edges() {
        assert_eq!(cond_bucket(1.0), "[1,10)");
        assert_eq!(cond_bucket(9.999), "[1,10)");
        assert_eq!(cond_bucket(10.0), "[10,1e2)");
        assert_eq!(cond_bucket(5e3), "[1e2,1e4)");
        assert_eq!(cond_bucket(1e7), "[1e7,inf)");
        assert_eq!(cond_bucket(f64::INFINITY), "[1e7,inf)");
    }

    #[test]
    fn gauss_scan_examples() {
        let g = scan_eta(RuleFamily::GaussLegendre, Domain::INTERVAL, 7..=9, 0..=8).unwrap();
        assert_eq!(g.cells.len(), 27);
        assert!(g.cell(7, 3).unwrap().eta.unwrap() <= 1e-12);
        assert!((g.cell(7, 4).unwrap().eta.unwrap() - 1.0).abs() <= 1e-10);
        assert!((g.cell(9, 4).unwrap().cond2.unwrap() - 1.0).abs() <= 1e-10);
        assert_eq!(g.cell(9, 8).unwrap().bucket, Some("[1e7,inf)"));
    }

    #[test]
    fn clenshaw_curtis_cell() {
        let g = scan_eta(RuleFamily::ClenshawCurtis, Domain::INTERVAL, 14..=14, 13..=13).unwrap();
        assert!(g.cells[0].eta.unwrap() < 1.0);
    }

    #[test]
    fn missing_datasets_are_skipped_not_fatal() {
        let g = scan_eta(RuleFamily::Design, Domain::SPHERE, 1..=4, 0..=2).unwrap();
        assert_eq!(g.cells.len(), 12);
        let missing: Vec<usize> = g
            .cells
            .iter()
            .filter(|c| c.status.token() == "dataset-missing")
            .map(|c| c.m)
            .collect();
        assert_eq!(missing, vec![4, 4, 4]);
        assert!(g.cell(2, 2).unwrap().eta.is_some());
    }

    #[test]
    fn unsupported_degrees_are_marked() {
        let g = scan_eta(RuleFamily::MorrowPattersonXu, Domain::CHEBYSHEV_SQUARE, 2..=3, 0..=1).unwrap();
        assert_eq!(g.cell(2, 0).unwrap().status.token(), "unsupported");
        assert_eq!(g.cell(3, 0).unwrap().status, CellStatus::Ok);
    }

    #[test]
    fn job_count_does_not_change_output() {
        let base = ScanSpec {
            m: 1..=6,
            n: 0..=6,
            ..ScanSpec::new(ScanKind::Eta, RuleFamily::Padua, Domain::SQUARE)
        };
        let one = scan(&ScanSpec { jobs: Some(1), ..base.clone() }).unwrap();
        let four = scan(&ScanSpec { jobs: Some(4), ..base }).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        one.write_csv(&mut a).unwrap();
        four.write_csv(&mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_quotes_bucket_labels() {
        let g = scan_eta(RuleFamily::GaussLegendre, Domain::INTERVAL, 3..=3, 0..=1).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "family,domain,m,n,M,d_n,eta,cond2,bucket,status");
        let row = lines.next().unwrap();
        assert!(row.starts_with("gl,interval,3,0,2,1,"));
        assert!(row.ends_with(",\"[1,10)\",ok"));
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rdr.records().count(), 2);
    }

    #[test]
    fn small_interval_bench() {
        let run = approx_bench(&BenchConfig {
            domain: Domain::INTERVAL,
            build_ade: 15,
            n_max: 4,
        })
        .unwrap();
        assert_eq!(run.records.len(), 60);
        assert_eq!(run.reference_nodes, 26);
        assert_eq!(run.relaxed_nodes, 16);
        assert!(run.records.iter().all(|r| r.relerr.is_finite()));
    }
}

//! Plain-text rule files.
//!
//! ```text
//! # domain=sphere ade=3 count=6 columns=3
//! 1 0 0
//! ...
//! ```
//!
//! Each data row holds the node coordinates and, when `columns = d + 1`, the
//! weight. Only sphere files may omit the weight column; such files are
//! spherical designs and get equal weights `4 pi / M`. An optional
//! `measure=cheb` key selects the product Chebyshev square.

use std::fs;
use std::path::Path;

use crate::domain::{Domain, DomainKind, Measure};
use crate::error::{MzError, ParseError, Result};

use super::{CubatureRule, Provenance};

struct Header {
    domain: Domain,
    ade: Option<usize>,
    count: usize,
    weighted: bool,
}

fn parse_header(line: &str, lineno: usize) -> Result<Header, ParseError> {
    let err = |reason: String| ParseError::Header { line: lineno, reason };
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| err("expected a `#` header line".into()))?;
    let (mut kind, mut measure, mut ade, mut count, mut columns) = (None, Measure::Lebesgue, None, None, None);
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(format!("field `{field}` is not key=value")))?;
        match key {
            "domain" => kind = Some(value.parse::<DomainKind>().map_err(|e| err(e.to_string()))?),
            "measure" => measure = value.parse::<Measure>().map_err(|e| err(e.to_string()))?,
            "ade" => {
                ade = Some(if value == "unknown" {
                    None
                } else {
                    Some(value.parse::<usize>().map_err(|_| err(format!("bad ade `{value}`")))?)
                })
            }
            "count" => count = Some(value.parse::<usize>().map_err(|_| err(format!("bad count `{value}`")))?),
            "columns" => {
                columns = Some(value.parse::<usize>().map_err(|_| err(format!("bad columns `{value}`")))?)
            }
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    let kind = kind.ok_or_else(|| err("missing domain".into()))?;
    let domain = Domain::new(kind, measure).map_err(|e| err(e.to_string()))?;
    let ade = ade.ok_or_else(|| err("missing ade".into()))?;
    let count = count.ok_or_else(|| err("missing count".into()))?;
    let columns = columns.ok_or_else(|| err("missing columns".into()))?;
    let d = domain.dim();
    let weighted = if columns == d + 1 {
        true
    } else if columns == d {
        if kind != DomainKind::Sphere {
            return Err(err("weight column may only be omitted for sphere designs".into()));
        }
        false
    } else {
        return Err(err(format!("columns must be {d} or {}, got {columns}", d + 1)));
    };
    Ok(Header {
        domain,
        ade,
        count,
        weighted,
    })
}

/// Parses rule text for the given domain. `ade_claim` overrides the header's ade.
pub fn parse_rule(text: &str, domain: Domain, ade_claim: Option<usize>) -> Result<CubatureRule> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hline, htext) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or(ParseError::Header {
            line: 1,
            reason: "empty file".into(),
        })?;
    let header = parse_header(htext, hline)?;
    if header.domain != domain {
        return Err(ParseError::Header {
            line: hline,
            reason: format!("file is for {}, expected {domain}", header.domain),
        }
        .into());
    }
    let d = domain.dim();
    let columns = if header.weighted { d + 1 } else { d };
    let mut nodes = Vec::with_capacity(header.count * d);
    let mut weights = Vec::with_capacity(header.count);
    let mut last = hline;
    for (lineno, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        last = lineno;
        let values = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| ParseError::Malformed {
                    line: lineno,
                    reason: format!("`{tok}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>, ParseError>>()?;
        if values.len() != columns {
            return Err(ParseError::Malformed {
                line: lineno,
                reason: format!("expected {columns} values, found {}", values.len()),
            }
            .into());
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ParseError::Malformed {
                line: lineno,
                reason: "non-finite value".into(),
            }
            .into());
        }
        if !domain.contains(&values[..d]) {
            return Err(ParseError::OutsideDomain {
                line: lineno,
                domain: domain.to_string(),
            }
            .into());
        }
        if header.weighted {
            let w = values[d];
            if w <= 0.0 {
                return Err(ParseError::NonPositiveWeight { line: lineno, weight: w }.into());
            }
            weights.push(w);
        }
        nodes.extend_from_slice(&values[..d]);
    }
    let found = nodes.len() / d;
    if found != header.count {
        return Err(ParseError::CountMismatch {
            line: if found > header.count { last } else { hline },
            declared: header.count,
            found,
        }
        .into());
    }
    let provenance = if header.weighted {
        Provenance::NearMinimalFile
    } else {
        weights = vec![4.0 * std::f64::consts::PI / found as f64; found];
        if is_antipodal(&nodes) {
            Provenance::SymmetricSphericalDesign
        } else {
            Provenance::SphericalDesign
        }
    };
    CubatureRule::new(domain, nodes, weights, ade_claim.or(header.ade), provenance)
}

fn is_antipodal(nodes: &[f64]) -> bool {
    let pts: Vec<&[f64]> = nodes.chunks_exact(3).collect();
    pts.iter().all(|p| {
        pts.iter()
            .any(|q| p.iter().zip(q.iter()).all(|(a, b)| (a + b).abs() <= 1e-10))
    })
}

pub fn load_rule(path: &Path, domain: Domain, ade_claim: Option<usize>) -> Result<CubatureRule> {
    let text = fs::read_to_string(path).map_err(|source| MzError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_rule(&text, domain, ade_claim)
}

/// Writes a rule in the text format with 17 significant digits. Spherical
/// designs are written without the weight column.
pub fn serialize_rule(rule: &CubatureRule) -> String {
    let domain = rule.domain();
    let d = domain.dim();
    let designs = matches!(
        rule.provenance(),
        Provenance::SphericalDesign | Provenance::SymmetricSphericalDesign
    );
    let columns = if designs { d } else { d + 1 };
    let ade = rule.ade().map_or_else(|| "unknown".to_string(), |a| a.to_string());
    let measure = match domain.measure() {
        Measure::ProductChebyshev => " measure=cheb",
        Measure::Lebesgue => "",
    };
    let mut out = format!(
        "# domain={}{measure} ade={ade} count={} columns={columns}\n",
        domain.kind().token(),
        rule.len()
    );
    for (p, w) in rule.points().zip(rule.weights()) {
        let mut fields: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        if !designs {
            fields.push(format!("{w:.16e}"));
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

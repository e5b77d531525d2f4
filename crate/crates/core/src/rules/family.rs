//! Named rule families indexed by degree, as used by scans and the CLI.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, DomainKind, Measure};
use crate::error::{MzError, Result};

use super::{
    clenshaw_curtis, gauss_chebyshev_square, gauss_legendre, halton_qmc, latlong_sphere, load_rule,
    morrow_patterson_xu, padua_rule, parse_rule, polar_disk_rule, stroud_conical, tensor_rule, CubatureRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleFamily {
    GaussLegendre,
    ClenshawCurtis,
    Padua,
    MorrowPattersonXu,
    PolarDisk,
    StroudConical,
    LatLong,
    Qmc,
    Design,
    SymmetricDesign,
    NearMinimal,
}

impl RuleFamily {
    pub const ALL: [RuleFamily; 11] = [
        RuleFamily::GaussLegendre,
        RuleFamily::ClenshawCurtis,
        RuleFamily::Padua,
        RuleFamily::MorrowPattersonXu,
        RuleFamily::PolarDisk,
        RuleFamily::StroudConical,
        RuleFamily::LatLong,
        RuleFamily::Qmc,
        RuleFamily::Design,
        RuleFamily::SymmetricDesign,
        RuleFamily::NearMinimal,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            RuleFamily::GaussLegendre => "gl",
            RuleFamily::ClenshawCurtis => "cc",
            RuleFamily::Padua => "padua",
            RuleFamily::MorrowPattersonXu => "mpx",
            RuleFamily::PolarDisk => "polar",
            RuleFamily::StroudConical => "stroud",
            RuleFamily::LatLong => "latlong",
            RuleFamily::Qmc => "qmc",
            RuleFamily::Design => "design",
            RuleFamily::SymmetricDesign => "sym-design",
            RuleFamily::NearMinimal => "near-minimal",
        }
    }

    /// Families read from rule files rather than constructed.
    pub fn is_external(&self) -> bool {
        matches!(
            self,
            RuleFamily::Design | RuleFamily::SymmetricDesign | RuleFamily::NearMinimal
        )
    }

    /// Number of nodes of the QMC rule at scan index `m`.
    pub fn qmc_count(m: usize) -> usize {
        1usize << m
    }

    /// Builds the member of degree `m`. For `Qmc`, `m` is the base-2 logarithm
    /// of the number of points. Gauss rules use the fewest points with ADE >= m.
    pub fn build(&self, domain: Domain, m: usize, data: &DataSource) -> Result<CubatureRule> {
        let kind = domain.kind();
        let cheb = domain.measure() == Measure::ProductChebyshev;
        let unsupported = || {
            Err(MzError::Unsupported(format!(
                "family `{}` is not available on {domain}",
                self.token()
            )))
        };
        match self {
            RuleFamily::GaussLegendre => {
                let k = m / 2 + 1;
                match kind {
                    DomainKind::Interval => gauss_legendre(k),
                    DomainKind::Square if cheb => gauss_chebyshev_square(k),
                    DomainKind::Square => tensor_rule(&vec![gauss_legendre(k)?; 2]),
                    DomainKind::Cube => tensor_rule(&vec![gauss_legendre(k)?; 3]),
                    _ => unsupported(),
                }
            }
            RuleFamily::ClenshawCurtis if !cheb => match kind {
                DomainKind::Interval => clenshaw_curtis(m),
                DomainKind::Square => tensor_rule(&vec![clenshaw_curtis(m)?; 2]),
                DomainKind::Cube => tensor_rule(&vec![clenshaw_curtis(m)?; 3]),
                _ => unsupported(),
            },
            RuleFamily::Padua if domain == Domain::SQUARE => padua_rule(m),
            RuleFamily::MorrowPattersonXu if domain == Domain::CHEBYSHEV_SQUARE => morrow_patterson_xu(m),
            RuleFamily::PolarDisk if kind == DomainKind::Disk => polar_disk_rule(m),
            RuleFamily::StroudConical if kind == DomainKind::Simplex => stroud_conical(m),
            RuleFamily::LatLong if kind == DomainKind::Sphere => latlong_sphere(m),
            RuleFamily::Qmc => {
                if m >= usize::BITS as usize {
                    return Err(MzError::InvalidArgument(format!("2^{m} points overflow")));
                }
                halton_qmc(Self::qmc_count(m), domain)
            }
            RuleFamily::Design | RuleFamily::SymmetricDesign if kind == DomainKind::Sphere => {
                data.load(*self, domain, m)
            }
            RuleFamily::NearMinimal if kind != DomainKind::Sphere => data.load(*self, domain, m),
            _ => unsupported(),
        }
    }
}

impl fmt::Display for RuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for RuleFamily {
    type Err = MzError;

    fn from_str(s: &str) -> Result<Self> {
        RuleFamily::ALL
            .into_iter()
            .find(|f| f.token() == s)
            .ok_or_else(|| MzError::InvalidArgument(format!("unknown rule family `{s}`")))
    }
}

/// Where file-based families are read from.
///
/// Files live at `<root>/<family>/<domain>_m<m>.txt`. The built-in fixtures
/// cover a handful of low degrees only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum DataSource {
    #[default]
    Fixtures,
    Dir(PathBuf),
}

macro_rules! fixture {
    ($family:literal, $file:literal) => {
        (
            $family,
            $file,
            include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/", $family, "/", $file)),
        )
    };
}

const FIXTURES: &[(&str, &str, &str)] = &[
    fixture!("design", "sphere_m1.txt"),
    fixture!("design", "sphere_m2.txt"),
    fixture!("design", "sphere_m3.txt"),
    fixture!("sym-design", "sphere_m1.txt"),
    fixture!("sym-design", "sphere_m3.txt"),
    fixture!("sym-design", "sphere_m5.txt"),
    fixture!("near-minimal", "disk_m3.txt"),
    fixture!("near-minimal", "simplex_m2.txt"),
    fixture!("near-minimal", "square_m3.txt"),
];

impl DataSource {
    pub fn file_name(domain: Domain, m: usize) -> String {
        format!("{}_m{m}.txt", domain.kind().token())
    }

    pub fn path_for(root: &Path, family: RuleFamily, domain: Domain, m: usize) -> PathBuf {
        root.join(family.token()).join(Self::file_name(domain, m))
    }

    pub fn load(&self, family: RuleFamily, domain: Domain, m: usize) -> Result<CubatureRule> {
        let name = Self::file_name(domain, m);
        match self {
            DataSource::Fixtures => FIXTURES
                .iter()
                .find(|(f, file, _)| *f == family.token() && *file == name)
                .ok_or_else(|| MzError::DatasetMissing(PathBuf::from(family.token()).join(&name)))
                .and_then(|(_, _, text)| parse_rule(text, domain, None)),
            DataSource::Dir(root) => {
                let path = Self::path_for(root, family, domain, m);
                if !path.exists() {
                    return Err(MzError::DatasetMissing(path));
                }
                load_rule(&path, domain, None)
            }
        }
    }
}

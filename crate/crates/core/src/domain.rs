//! Reference regions and their measures.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MzError, Result};

/// Slack used when testing membership of a point in a closed domain.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    /// `[-1, 1]`
    Interval,
    /// `[-1, 1]^2`
    Square,
    /// `[-1, 1]^3`
    Cube,
    /// Closed unit disk.
    Disk,
    /// Unit triangle `{x, y >= 0, x + y <= 1}`.
    Simplex,
    /// Unit sphere in R^3.
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Lebesgue,
    /// `dx dy / (sqrt(1 - x^2) sqrt(1 - y^2))` on the square, total mass `pi^2`.
    ProductChebyshev,
}

/// A reference domain together with its measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    kind: DomainKind,
    measure: Measure,
}

impl Domain {
    pub const INTERVAL: Domain = Domain::lebesgue(DomainKind::Interval);
    pub const SQUARE: Domain = Domain::lebesgue(DomainKind::Square);
    pub const CUBE: Domain = Domain::lebesgue(DomainKind::Cube);
    pub const DISK: Domain = Domain::lebesgue(DomainKind::Disk);
    pub const SIMPLEX: Domain = Domain::lebesgue(DomainKind::Simplex);
    pub const SPHERE: Domain = Domain::lebesgue(DomainKind::Sphere);
    pub const CHEBYSHEV_SQUARE: Domain = Domain {
        kind: DomainKind::Square,
        measure: Measure::ProductChebyshev,
    };

    const fn lebesgue(kind: DomainKind) -> Self {
        Domain {
            kind,
            measure: Measure::Lebesgue,
        }
    }

    pub fn new(kind: DomainKind, measure: Measure) -> Result<Self> {
        if measure == Measure::ProductChebyshev && kind != DomainKind::Square {
            return Err(MzError::InvalidDomain(format!(
                "product Chebyshev measure is only defined on the square, not on {}",
                kind.token()
            )));
        }
        Ok(Domain { kind, measure })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    /// Ambient dimension of the points.
    pub fn dim(&self) -> usize {
        match self.kind {
            DomainKind::Interval => 1,
            DomainKind::Square | DomainKind::Disk | DomainKind::Simplex => 2,
            DomainKind::Cube | DomainKind::Sphere => 3,
        }
    }

    /// Total mass `mu(Omega)` of the reference measure.
    pub fn mass(&self) -> f64 {
        match (self.kind, self.measure) {
            (DomainKind::Square, Measure::ProductChebyshev) => PI * PI,
            (DomainKind::Interval, _) => 2.0,
            (DomainKind::Square, _) => 4.0,
            (DomainKind::Cube, _) => 8.0,
            (DomainKind::Disk, _) => PI,
            (DomainKind::Simplex, _) => 0.5,
            (DomainKind::Sphere, _) => 4.0 * PI,
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let t = MEMBERSHIP_TOL;
        if p.len() != self.dim() || p.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.kind {
            DomainKind::Interval | DomainKind::Square | DomainKind::Cube => {
                p.iter().all(|v| v.abs() <= 1.0 + t)
            }
            DomainKind::Disk => p[0] * p[0] + p[1] * p[1] <= 1.0 + t,
            DomainKind::Simplex => p[0] >= -t && p[1] >= -t && p[0] + p[1] <= 1.0 + t,
            DomainKind::Sphere => ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs() <= t,
        }
    }

    /// Checks every point of a flat coordinate list, reporting the first violation.
    pub fn check_points(&self, coords: &[f64]) -> Result<()> {
        let dim = self.dim();
        if !coords.len().is_multiple_of(dim) {
            return Err(MzError::InvalidArgument(format!(
                "coordinate list of length {} is not a multiple of dimension {dim}",
                coords.len()
            )));
        }
        for (index, p) in coords.chunks_exact(dim).enumerate() {
            if self.contains(p) {
                continue;
            }
            if self.kind == DomainKind::Sphere && p.iter().all(|v| v.is_finite()) {
                let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                return Err(MzError::NotNormalized { index, norm });
            }
            return Err(MzError::DomainViolation {
                index,
                point: p.to_vec(),
                domain: *self,
            });
        }
        Ok(())
    }

    /// `count` points drawn uniformly from the domain by rejection from the
    /// bounding box, reproducible from `seed`.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = self.dim();
        let mut out = Vec::with_capacity(count * dim);
        let mut p = vec![0.0; dim];
        while out.len() < count * dim {
            for v in p.iter_mut() {
                *v = rng.gen_range(-1.0..=1.0);
            }
            match self.kind {
                DomainKind::Simplex => {
                    p[0] = 0.5 * (p[0] + 1.0);
                    p[1] = 0.5 * (p[1] + 1.0);
                }
                DomainKind::Sphere => {
                    let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if !(1e-3..=1.0).contains(&r) {
                        continue;
                    }
                    p.iter_mut().for_each(|v| *v /= r);
                }
                _ => {}
            }
            if self.contains(&p) {
                out.extend_from_slice(&p);
            }
        }
        out
    }
}

impl DomainKind {
    pub fn token(&self) -> &'static str {
        match self {
            DomainKind::Interval => "interval",
            DomainKind::Square => "square",
            DomainKind::Cube => "cube",
            DomainKind::Disk => "disk",
            DomainKind::Simplex => "simplex",
            DomainKind::Sphere => "sphere",
        }
    }
}

impl FromStr for DomainKind {
    type Err = MzError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "interval" => DomainKind::Interval,
            "square" => DomainKind::Square,
            "cube" => DomainKind::Cube,
            "disk" => DomainKind::Disk,
            "simplex" => DomainKind::Simplex,
            "sphere" => DomainKind::Sphere,
            other => return Err(MzError::InvalidDomain(format!("unknown domain token `{other}`"))),
        })
    }
}

impl FromStr for Measure {
    type Err = MzError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lebesgue" => Ok(Measure::Lebesgue),
            "cheb" => Ok(Measure::ProductChebyshev),
            other => Err(MzError::InvalidDomain(format!("unknown measure token `{other}`"))),
        }
    }
}

impl Measure {
    pub fn token(&self) -> &'static str {
        match self {
            Measure::Lebesgue => "lebesgue",
            Measure::ProductChebyshev => "cheb",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.measure {
            Measure::Lebesgue => f.write_str(self.kind.token()),
            Measure::ProductChebyshev => write!(f, "{}/cheb", self.kind.token()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masses() {
        assert_eq!(Domain::INTERVAL.mass(), 2.0);
        assert_eq!(Domain::CHEBYSHEV_SQUARE.mass(), PI * PI);
        assert_eq!(Domain::SPHERE.mass(), 4.0 * PI);
        assert_eq!(Domain::SIMPLEX.mass(), 0.5);
        assert_eq!(Domain::DISK.mass(), PI);
        assert_eq!(Domain::CUBE.mass(), 8.0);
    }

    #[test]
    fn chebyshev_only_on_square() {
        assert!(Domain::new(DomainKind::Disk, Measure::ProductChebyshev).is_err());
        assert_eq!(
            Domain::new(DomainKind::Square, Measure::ProductChebyshev).unwrap(),
            Domain::CHEBYSHEV_SQUARE
        );
    }

    #[test]
    fn membership() {
        assert!(Domain::SIMPLEX.contains(&[0.5, 0.5]));
        assert!(!Domain::SIMPLEX.contains(&[0.6, 0.5]));
        assert!(Domain::DISK.contains(&[0.6, 0.8]));
        assert!(!Domain::SQUARE.contains(&[1.1, 0.0]));
        assert!(matches!(
            Domain::SPHERE.check_points(&[0.0, 0.0, 1.1]),
            Err(MzError::NotNormalized { index: 0, .. })
        ));
        assert!(matches!(
            Domain::INTERVAL.check_points(&[0.0, 2.0]),
            Err(MzError::DomainViolation { index: 1, .. })
        ));
    }

    #[test]
    fn tokens_round_trip() {
        for k in [
            DomainKind::Interval,
            DomainKind::Square,
            DomainKind::Cube,
            DomainKind::Disk,
            DomainKind::Simplex,
            DomainKind::Sphere,
        ] {
            assert_eq!(k.token().parse::<DomainKind>().unwrap(), k);
        }
        assert!("torus".parse::<DomainKind>().is_err());
    }
}

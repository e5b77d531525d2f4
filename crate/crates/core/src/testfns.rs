//! Test functions on `[-1, 1]^d` for `d = 1, 2, 3`.

use std::fmt;
use std::str::FromStr;

use crate::domain::{Domain, DomainKind};
use crate::error::{MzError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionId {
    F1,
    F2,
    F3,
    F4,
    F5,
}

impl FunctionId {
    pub const ALL: [FunctionId; 5] = [FunctionId::F1, FunctionId::F2, FunctionId::F3, FunctionId::F4, FunctionId::F5];

    pub fn token(&self) -> &'static str {
        match self {
            FunctionId::F1 => "f1",
            FunctionId::F2 => "f2",
            FunctionId::F3 => "f3",
            FunctionId::F4 => "f4",
            FunctionId::F5 => "f5",
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for FunctionId {
    type Err = MzError;

    fn from_str(s: &str) -> Result<Self> {
        FunctionId::ALL
            .into_iter()
            .find(|id| id.token() == s)
            .ok_or_else(|| MzError::InvalidArgument(format!("unknown test function '{s}'")))
    }
}

/// One of the five catalog functions in a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestFunction {
    pub id: FunctionId,
    pub dim: usize,
}

/// Coefficients of the linear form inside `f2`.
const F2_SLOPES: [f64; 3] = [1.0, 0.1, 0.4];
const CENTER: f64 = 0.5;

impl TestFunction {
    pub fn new(id: FunctionId, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(MzError::InvalidArgument(format!("test functions exist for d = 1, 2, 3, not {dim}")));
        }
        Ok(TestFunction { id, dim })
    }

    /// The catalog on a box domain (interval, square or cube).
    pub fn catalog(domain: Domain) -> Result<Vec<TestFunction>> {
        match domain.kind() {
            DomainKind::Interval | DomainKind::Square | DomainKind::Cube => {
                FunctionId::ALL.into_iter().map(|id| TestFunction::new(id, domain.dim())).collect()
            }
            _ => Err(MzError::Unsupported(format!("no test functions on {domain}"))),
        }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        let p = &p[..self.dim];
        match self.id {
            FunctionId::F1 => (-p.iter().map(|x| x * x).sum::<f64>()).exp(),
            FunctionId::F2 => (0.5 + p.iter().zip(F2_SLOPES).map(|(x, s)| s * x).sum::<f64>()).powi(15),
            FunctionId::F3 => (std::f64::consts::PI * p.iter().sum::<f64>()).sin(),
            FunctionId::F4 => dist_to_center(p).powi(3),
            FunctionId::F5 => dist_to_center(p).powi(7),
        }
    }

    /// Total degree when the function is a polynomial.
    pub fn polynomial_degree(&self) -> Option<usize> {
        (self.id == FunctionId::F2).then_some(15)
    }
}

fn dist_to_center(p: &[f64]) -> f64 {
    p.iter().map(|x| (x - CENTER).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_forms() {
        let f = |id| TestFunction::new(id, 1).unwrap();
        let x = [0.3];
        assert!((f(FunctionId::F1).eval(&x) - (-0.09f64).exp()).abs() < 1e-15);
        assert!((f(FunctionId::F2).eval(&x) - 0.8f64.powi(15)).abs() < 1e-15);
        assert!((f(FunctionId::F3).eval(&x) - (0.3 * std::f64::consts::PI).sin()).abs() < 1e-15);
        assert!((f(FunctionId::F4).eval(&x) - 0.008).abs() < 1e-15);
        assert!((f(FunctionId::F5).eval(&x) - 0.2f64.powi(7)).abs() < 1e-18);
    }

    #[test]
    fn cube_f2_and_center() {
        let f2 = TestFunction::new(FunctionId::F2, 3).unwrap();
        assert!((f2.eval(&[0.1, 0.2, 0.3]) - (0.5 + 0.1 + 0.02 + 0.12f64).powi(15)).abs() < 1e-12);
        let f4 = TestFunction::new(FunctionId::F4, 3).unwrap();
        assert_eq!(f4.eval(&[0.5, 0.5, 0.5]), 0.0);
        assert!((f4.eval(&[0.5, 0.5, -0.5]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn catalog_rejects_round_domains() {
        assert_eq!(TestFunction::catalog(Domain::SQUARE).unwrap().len(), 5);
        assert!(TestFunction::catalog(Domain::DISK).is_err());
        assert!(TestFunction::new(FunctionId::F1, 4).is_err());
        assert_eq!("f3".parse::<FunctionId>().unwrap(), FunctionId::F3);
    }
}

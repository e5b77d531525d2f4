//! Cubature rules `S(f) = sum_i w_i f(x_i)` on the reference domains.

mod family;
mod gauss;
mod halton;
mod io;
mod planar;
mod round;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bases::{eval_basis, OrthonormalBasis};
use crate::domain::{Domain, DomainKind, Measure};
use crate::error::{MzError, Result};

pub use family::{DataSource, RuleFamily};
pub use gauss::{gauss_chebyshev_square, gauss_jacobi, gauss_legendre, tensor_gauss_legendre};
pub use halton::{halton_qmc, radical_inverse};
pub use io::{load_rule, parse_rule, serialize_rule};
pub use planar::{clenshaw_curtis, morrow_patterson_xu, padua_points, padua_rule};
pub use round::{latlong_sphere, polar_disk_rule, stroud_conical};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    GaussLegendre,
    ClenshawCurtis,
    TensorProduct,
    Padua,
    MorrowPattersonXu,
    PolarDisk,
    StroudConical,
    LatLong,
    SphericalDesign,
    SymmetricSphericalDesign,
    HaltonQMC,
    NearMinimalFile,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Nodes are stored as a flat coordinate list, `domain.dim()` values per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureRule {
    domain: Domain,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    ade: Option<usize>,
    provenance: Provenance,
}

impl CubatureRule {
    /// Validates shapes, finiteness, node membership and (except for Padua
    /// rules) weight positivity.
    pub fn new(
        domain: Domain,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        ade: Option<usize>,
        provenance: Provenance,
    ) -> Result<Self> {
        if weights.is_empty() || nodes.len() != weights.len() * domain.dim() {
            return Err(MzError::Construction(format!(
                "{} weights do not match {} coordinates in dimension {}",
                weights.len(),
                nodes.len(),
                domain.dim()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(MzError::Construction(format!("weight {i} is not finite")));
        }
        if provenance != Provenance::Padua {
            if let Some(i) = weights.iter().position(|&w| w <= 0.0) {
                return Err(MzError::Construction(format!(
                    "weight {i} = {} is not positive",
                    weights[i]
                )));
            }
        }
        domain.check_points(&nodes)?;
        Ok(CubatureRule {
            domain,
            nodes,
            weights,
            ade,
            provenance,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let d = self.domain.dim();
        &self.nodes[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.domain.dim())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Claimed algebraic degree of exactness; `None` for QMC rules.
    pub fn ade(&self) -> Option<usize> {
        self.ade
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `S(f)`.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// Tensor product of interval rules: two factors give a square rule, three a cube rule.
pub fn tensor_rule(factors: &[CubatureRule]) -> Result<CubatureRule> {
    let domain = match factors.len() {
        2 => Domain::SQUARE,
        3 => Domain::CUBE,
        k => {
            return Err(MzError::Unsupported(format!(
                "tensor product of {k} factors; supported are 2 (square) and 3 (cube)"
            )))
        }
    };
    if let Some(f) = factors.iter().find(|f| f.domain() != Domain::INTERVAL) {
        return Err(MzError::Unsupported(format!(
            "tensor factors must be Lebesgue interval rules, got {}",
            f.domain()
        )));
    }
    let mut nodes: Vec<Vec<f64>> = vec![vec![]];
    let mut weights = vec![1.0];
    for f in factors {
        let mut next_nodes = Vec::with_capacity(nodes.len() * f.len());
        let mut next_weights = Vec::with_capacity(nodes.len() * f.len());
        for (prefix, w) in nodes.iter().zip(&weights) {
            for (x, v) in f.nodes().iter().zip(f.weights()) {
                let mut p = prefix.clone();
                p.push(*x);
                next_nodes.push(p);
                next_weights.push(w * v);
            }
        }
        nodes = next_nodes;
        weights = next_weights;
    }
    let ade = factors
        .iter()
        .map(|f| f.ade())
        .try_fold(usize::MAX, |acc, a| a.map(|a| acc.min(a)));
    CubatureRule::new(domain, nodes.concat(), weights, ade, Provenance::TensorProduct)
}

/// `max_j |S(phi_j) - I(phi_j)|` over the orthonormal basis of degree `claimed`.
pub fn verify_ade(rule: &CubatureRule, claimed: usize) -> Result<f64> {
    let basis = OrthonormalBasis::new(rule.domain(), claimed);
    let bm = eval_basis(&basis, rule.nodes())?;
    let sums = bm.transpose_mul(rule.weights());
    let root_mass = rule.domain().mass().sqrt();
    Ok(sums
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let exact = if j == basis.constant_index() { root_mass } else { 0.0 };
            (s - exact).abs()
        })
        .fold(0.0, f64::max))
}

/// Reference rule of ADE at least `ade` for error measurement on any domain.
pub fn reference_rule(domain: Domain, ade: usize) -> Result<CubatureRule> {
    let k = ade / 2 + 1;
    match (domain.kind(), domain.measure()) {
        (DomainKind::Square, Measure::ProductChebyshev) => gauss_chebyshev_square(k),
        (DomainKind::Interval, _) => gauss_legendre(k),
        (DomainKind::Square, _) => tensor_rule(&vec![gauss_legendre(k)?; 2]),
        (DomainKind::Cube, _) => tensor_rule(&vec![gauss_legendre(k)?; 3]),
        (DomainKind::Disk, _) => polar_disk_rule(ade),
        (DomainKind::Simplex, _) => stroud_conical(ade),
        (DomainKind::Sphere, _) => latlong_sphere(ade),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_products() {
        let gl2 = gauss_legendre(2).unwrap();
        let sq = tensor_rule(&[gl2.clone(), gl2.clone()]).unwrap();
        assert_eq!(sq.len(), 4);
        assert!(sq.weights().iter().all(|&w| (w - 1.0).abs() < 1e-14));
        assert!((sq.weight_sum() - 4.0).abs() < 1e-13);
        assert_eq!(sq.ade(), Some(3));

        let cc2 = clenshaw_curtis(2).unwrap();
        let sq = tensor_rule(&[cc2.clone(), cc2]).unwrap();
        assert_eq!(sq.len(), 9);
        let center = sq.points().position(|p| p[0].abs() < 1e-15 && p[1].abs() < 1e-15).unwrap();
        assert!((sq.weights()[center] - 16.0 / 9.0).abs() < 1e-14);

        let gl1 = gauss_legendre(1).unwrap();
        let cube = tensor_rule(&[gl1.clone(), gl1.clone(), gl1]).unwrap();
        assert_eq!(cube.nodes(), &[0.0, 0.0, 0.0]);
        assert_eq!(cube.weights(), &[8.0]);
    }

    #[test]
    fn tensor_rejects_bad_compositions() {
        let gl = gauss_legendre(2).unwrap();
        assert!(tensor_rule(std::slice::from_ref(&gl)).is_err());
        assert!(tensor_rule(&[gl.clone(), gl.clone(), gl.clone(), gl.clone()]).is_err());
        let disk = polar_disk_rule(2).unwrap();
        assert!(tensor_rule(&[gl, disk]).is_err());
    }

    #[test]
    fn verify_ade_examples() {
        assert!(verify_ade(&gauss_legendre(3).unwrap(), 5).unwrap() <= 1e-13);
        assert!(verify_ade(&clenshaw_curtis(2).unwrap(), 3).unwrap() <= 1e-13);
        // S(x^4) = 2/9 against I(x^4) = 2/5
        assert!(verify_ade(&gauss_legendre(2).unwrap(), 4).unwrap() >= 0.1);
    }

    #[test]
    fn every_family_meets_its_claimed_degree() {
        let mut rules = Vec::new();
        for m in 1..=30 {
            rules.push(clenshaw_curtis(m).unwrap());
            rules.push(polar_disk_rule(m).unwrap());
            rules.push(stroud_conical(m).unwrap());
            rules.push(latlong_sphere(m).unwrap());
            rules.push(padua_rule(m).unwrap());
            if m % 2 == 1 {
                rules.push(morrow_patterson_xu(m).unwrap());
            }
        }
        for k in 1..=15 {
            rules.push(gauss_legendre(k).unwrap());
            rules.push(gauss_chebyshev_square(k).unwrap());
        }
        for rule in &rules {
            let ade = rule.ade().unwrap();
            let res = verify_ade(rule, ade).unwrap();
            assert!(res <= 1e-10, "{:?} ade {ade}: residual {res:e}", rule.provenance());
            let rel = (rule.weight_sum() - rule.domain().mass()).abs() / rule.domain().mass();
            assert!(rel <= 1e-10, "{:?} ade {ade}: mass {rel:e}", rule.provenance());
            if rule.provenance() != Provenance::Padua {
                assert!(rule.min_weight() > 0.0);
            }
        }
    }

    #[test]
    fn gaussian_rules_are_sharp() {
        for k in 1..=12 {
            let r = verify_ade(&gauss_legendre(k).unwrap(), 2 * k).unwrap();
            assert!(r >= 1e-3, "k={k}: {r}");
        }
    }

    #[test]
    fn reference_rules() {
        assert_eq!(reference_rule(Domain::INTERVAL, 50).unwrap().len(), 26);
        assert_eq!(reference_rule(Domain::SQUARE, 50).unwrap().len(), 676);
        for d in [Domain::INTERVAL, Domain::SQUARE, Domain::DISK, Domain::SIMPLEX, Domain::SPHERE, Domain::CHEBYSHEV_SQUARE] {
            let r = reference_rule(d, 20).unwrap();
            assert!(r.ade().unwrap() >= 20);
            assert!(verify_ade(&r, 20).unwrap() < 1e-10);
        }
    }
}

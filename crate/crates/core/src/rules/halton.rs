use crate::domain::{Domain, DomainKind, Measure};
use crate::error::{MzError, Result};

use super::{CubatureRule, Provenance};

/// Van der Corput radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Equal-weight rule on the first `count` Halton points (indices from 1,
/// bases 2, 3 and 5), mapped from `[0, 1]^d` to `[-1, 1]^d`.
pub fn halton_qmc(count: usize, domain: Domain) -> Result<CubatureRule> {
    let bases: &[u64] = match (domain.kind(), domain.measure()) {
        (DomainKind::Square, Measure::Lebesgue) => &[2, 3],
        (DomainKind::Cube, Measure::Lebesgue) => &[2, 3, 5],
        _ => {
            return Err(MzError::Unsupported(format!(
                "Halton rules are defined on the square and the cube, not on {domain}"
            )))
        }
    };
    if count == 0 {
        return Err(MzError::InvalidArgument("Halton rule needs at least one point".into()));
    }
    let mut nodes = Vec::with_capacity(count * bases.len());
    for i in 1..=count as u64 {
        nodes.extend(bases.iter().map(|&b| 2.0 * radical_inverse(i, b) - 1.0));
    }
    let w = domain.mass() / count as f64;
    CubatureRule::new(domain, nodes, vec![w; count], None, Provenance::HaltonQMC)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_points() {
        let r = halton_qmc(1, Domain::SQUARE).unwrap();
        assert_eq!(r.nodes()[0], 0.0);
        assert!((r.nodes()[1] + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.weights(), &[4.0]);
        let r = halton_qmc(2, Domain::SQUARE).unwrap();
        assert!((r.node(1)[0] + 0.5).abs() < 1e-15);
        assert!((r.node(1)[1] - 1.0 / 3.0).abs() < 1e-15);
        let c = halton_qmc(4, Domain::CUBE).unwrap();
        assert!((c.weight_sum() - 8.0).abs() < 1e-14);
        assert_eq!(c.ade(), None);
    }

    #[test]
    fn deterministic_and_domain_checked() {
        assert_eq!(halton_qmc(100, Domain::CUBE).unwrap(), halton_qmc(100, Domain::CUBE).unwrap());
        assert!(halton_qmc(4, Domain::DISK).is_err());
        assert!(halton_qmc(4, Domain::CHEBYSHEV_SQUARE).is_err());
    }
}

//! Product rules in polar, collapsed and spherical coordinates.

use std::f64::consts::PI;

use crate::domain::Domain;
use crate::error::Result;

use super::gauss::gauss_jacobi;
use super::{gauss_legendre, CubatureRule, Provenance};

/// Number of Gauss points needed for polynomial exactness `m` in one variable.
fn gauss_count(m: usize) -> usize {
    m / 2 + 1
}

fn equispaced_angles(m: usize) -> impl Iterator<Item = (f64, f64)> {
    let count = m + 1;
    (0..count).map(move |j| {
        let theta = 2.0 * PI * j as f64 / count as f64;
        (theta.cos(), theta.sin())
    })
}

/// Polar product rule on the unit disk: Gauss in `r` for the weight `r` and
/// `m + 1` equispaced angles. ADE `m`.
pub fn polar_disk_rule(m: usize) -> Result<CubatureRule> {
    let (x, w) = gauss_jacobi(gauss_count(m), 0, 1)?;
    let angle_weight = 2.0 * PI / (m + 1) as f64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (xi, wi) in x.iter().zip(&w) {
        let r = 0.5 * (1.0 + xi);
        for (c, s) in equispaced_angles(m) {
            nodes.extend([r * c, r * s]);
            weights.push(0.25 * wi * angle_weight);
        }
    }
    CubatureRule::new(Domain::DISK, nodes, weights, Some(m), Provenance::PolarDisk)
}

/// Stroud conical rule on the unit triangle via the collapsed map
/// `(u, v) -> (u, (1 - u) v)`: Gauss-Jacobi in `u` for the weight `1 - u`,
/// Gauss-Legendre in `v`. ADE `m` with `ceil((m + 1) / 2)^2` nodes.
pub fn stroud_conical(m: usize) -> Result<CubatureRule> {
    let q = gauss_count(m);
    let (ux, uw) = gauss_jacobi(q, 1, 0)?;
    let gl = gauss_legendre(q)?;
    let mut nodes = Vec::with_capacity(2 * q * q);
    let mut weights = Vec::with_capacity(q * q);
    for (xi, wi) in ux.iter().zip(&uw) {
        let u = 0.5 * (1.0 + xi);
        for (yj, wj) in gl.nodes().iter().zip(gl.weights()) {
            let v = 0.5 * (1.0 + yj);
            nodes.extend([u, (1.0 - u) * v]);
            weights.push(0.25 * wi * 0.5 * wj);
        }
    }
    CubatureRule::new(Domain::SIMPLEX, nodes, weights, Some(m), Provenance::StroudConical)
}

/// Latitude-longitude rule on the sphere: Gauss-Legendre in `cos(theta)` and
/// `m + 1` equispaced longitudes. ADE `m`.
pub fn latlong_sphere(m: usize) -> Result<CubatureRule> {
    let gl = gauss_legendre(gauss_count(m))?;
    let angle_weight = 2.0 * PI / (m + 1) as f64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (&t, &w) in gl.nodes().iter().zip(gl.weights()) {
        let s = (1.0 - t * t).sqrt();
        for (c, sn) in equispaced_angles(m) {
            nodes.extend([s * c, s * sn, t]);
            weights.push(w * angle_weight);
        }
    }
    CubatureRule::new(Domain::SPHERE, nodes, weights, Some(m), Provenance::LatLong)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{eval_basis, OrthonormalBasis};

    #[test]
    fn polar_moments() {
        for m in 0..12 {
            let r = polar_disk_rule(m).unwrap();
            assert!((r.weight_sum() - PI).abs() <= 1e-12);
            if m >= 2 {
                let x2 = r.integrate(|p| p[0] * p[0]);
                assert!((x2 - PI / 4.0).abs() <= 1e-12, "m={m}");
            }
        }
    }

    #[test]
    fn stroud_cardinality_and_moments() {
        assert_eq!(stroud_conical(5).unwrap().len(), 9);
        for m in 0..12 {
            let r = stroud_conical(m).unwrap();
            assert_eq!(r.len(), (m / 2 + 1).pow(2));
            assert!((r.weight_sum() - 0.5).abs() <= 1e-12);
        }
        let x = stroud_conical(4).unwrap().integrate(|p| p[0]);
        assert!((x - 1.0 / 6.0).abs() <= 1e-12);
    }

    #[test]
    fn latlong_integrates_harmonics() {
        for m in 0..10 {
            assert!((latlong_sphere(m).unwrap().weight_sum() - 4.0 * PI).abs() <= 1e-10);
        }
        let r = latlong_sphere(2).unwrap();
        let bm = eval_basis(&OrthonormalBasis::new(Domain::SPHERE, 2), r.nodes()).unwrap();
        let s = bm.transpose_mul(r.weights());
        for v in &s[1..] {
            assert!(v.abs() <= 1e-12);
        }
    }
}

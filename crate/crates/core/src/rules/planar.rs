//! Clenshaw-Curtis on the interval and the Chebyshev-based square rules.

use std::f64::consts::PI;

use crate::domain::Domain;
use crate::error::{MzError, Result};
use crate::linalg::{lu_solve, Matrix};
use crate::poly;

use super::{CubatureRule, Provenance};

/// Clenshaw-Curtis rule on the `m + 1` Chebyshev-Lobatto nodes `cos(j pi / m)`, ADE `m`.
pub fn clenshaw_curtis(m: usize) -> Result<CubatureRule> {
    if m == 0 {
        return Err(MzError::InvalidArgument("Clenshaw-Curtis needs m >= 1".into()));
    }
    let mf = m as f64;
    let mut nodes = Vec::with_capacity(m + 1);
    let mut weights = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let c = if j == 0 || j == m { 1.0 } else { 2.0 };
        let mut s = 0.0;
        for k in 1..=m / 2 {
            let b = if 2 * k == m { 1.0 } else { 2.0 };
            let kf = k as f64;
            s += b / (4.0 * kf * kf - 1.0) * (2.0 * kf * j as f64 * PI / mf).cos();
        }
        weights.push(c / mf * (1.0 - s));
        nodes.push(if 2 * j == m { 0.0 } else { (j as f64 * PI / mf).cos() });
    }
    CubatureRule::new(Domain::INTERVAL, nodes, weights, Some(m), Provenance::ClenshawCurtis)
}

/// The `(m + 1)(m + 2) / 2` Padua points of degree `m` (first family):
/// `(cos(j pi / m), cos(k pi / (m + 1)))` with `j + k` even.
pub fn padua_points(m: usize) -> Vec<f64> {
    let mut pts = Vec::with_capacity((m + 1) * (m + 2));
    for j in 0..=m {
        let x = if m == 0 { 1.0 } else { cheb_lobatto(j, m) };
        for k in (0..=m + 1).filter(|k| (j + k) % 2 == 0) {
            pts.extend([x, cheb_lobatto(k, m + 1)]);
        }
    }
    pts
}

fn cheb_lobatto(j: usize, m: usize) -> f64 {
    if 2 * j == m {
        0.0
    } else {
        (j as f64 * PI / m as f64).cos()
    }
}

/// Interpolatory rule on the Padua points for the Lebesgue measure, ADE `m`.
///
/// Weights solve the moment system for the product Chebyshev basis `T_a(x) T_b(y)`,
/// `a + b <= m`. They are not guaranteed to be positive.
pub fn padua_rule(m: usize) -> Result<CubatureRule> {
    if m == 0 {
        return Err(MzError::InvalidArgument("Padua rule needs m >= 1".into()));
    }
    let nodes = padua_points(m);
    let count = nodes.len() / 2;
    let mut system = Matrix::zeros(count, count);
    let mut moments = Vec::with_capacity(count);
    let mut tx = vec![0.0; m + 1];
    let mut ty = vec![0.0; m + 1];
    for (i, p) in nodes.chunks_exact(2).enumerate() {
        poly::chebyshev_t(p[0], &mut tx);
        poly::chebyshev_t(p[1], &mut ty);
        let mut r = 0;
        for deg in 0..=m {
            for a in (0..=deg).rev() {
                system[(r, i)] = tx[a] * ty[deg - a];
                r += 1;
            }
        }
    }
    for deg in 0..=m {
        for a in (0..=deg).rev() {
            moments.push(chebyshev_moment(a) * chebyshev_moment(deg - a));
        }
    }
    let weights = lu_solve(&system, &moments).map_err(|e| {
        MzError::Construction(format!("Padua moment system of degree {m} is singular: {e}"))
    })?;
    CubatureRule::new(Domain::SQUARE, nodes, weights, Some(m), Provenance::Padua)
}

/// `int_{-1}^{1} T_k(x) dx`.
fn chebyshev_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        2.0 / (1.0 - (k * k) as f64)
    }
}

/// Xu's minimal-type rule for the product Chebyshev measure, for odd `m`.
///
/// With `n = (m + 1) / 2` and Chebyshev-Lobatto abscissae `z_i = cos(i pi / n)`,
/// the nodes are `(z_i, z_j)` with `i - j` odd. The weights are twice the
/// product Gauss-Lobatto-Chebyshev weights, scaled to total mass `pi^2`.
pub fn morrow_patterson_xu(m: usize) -> Result<CubatureRule> {
    if m.is_multiple_of(2) {
        return Err(MzError::Unsupported(format!(
            "Morrow-Patterson-Xu rule is available for odd degrees only (m = 1, 3, 5, ...), got {m}"
        )));
    }
    let n = m.div_ceil(2);
    let lobatto_weight = |i: usize| {
        if i == 0 || i == n {
            0.5 / n as f64
        } else {
            1.0 / n as f64
        }
    };
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            if (i + j) % 2 == 1 {
                nodes.extend([cheb_lobatto(i, n), cheb_lobatto(j, n)]);
                weights.push(2.0 * PI * PI * lobatto_weight(i) * lobatto_weight(j));
            }
        }
    }
    CubatureRule::new(Domain::CHEBYSHEV_SQUARE, nodes, weights, Some(m), Provenance::MorrowPattersonXu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clenshaw_curtis_small() {
        let r = clenshaw_curtis(1).unwrap();
        assert_eq!(r.nodes(), &[1.0, -1.0]);
        assert!(r.weights().iter().all(|w| (w - 1.0).abs() < 1e-15));
        let r = clenshaw_curtis(2).unwrap();
        assert_eq!(r.nodes()[1], 0.0);
        assert!((r.weights()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.weights()[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!((r.weights()[2] - 1.0 / 3.0).abs() < 1e-15);
        assert!((clenshaw_curtis(4).unwrap().weight_sum() - 2.0).abs() < 1e-14);
        assert!(clenshaw_curtis(0).is_err());
    }

    #[test]
    fn padua_cardinality_and_mass() {
        assert_eq!(padua_points(1).len() / 2, 3);
        for m in [1, 2, 5, 15, 30] {
            let r = padua_rule(m).unwrap();
            assert_eq!(r.len(), (m + 1) * (m + 2) / 2);
            assert!((r.weight_sum() - 4.0).abs() <= 1e-12, "m={m}");
        }
        assert_eq!(padua_rule(15).unwrap().len(), 136);
    }

    #[test]
    fn mpx_properties() {
        for m in [1, 3, 7, 19] {
            let r = morrow_patterson_xu(m).unwrap();
            assert!((r.weight_sum() - PI * PI).abs() <= 1e-12);
            assert!(r.min_weight() > 0.0);
        }
        let err = morrow_patterson_xu(4).unwrap_err();
        assert!(err.to_string().contains("odd"));
    }
}

use std::f64::consts::PI;

use crate::domain::Domain;
use crate::error::{MzError, Result};
use crate::linalg::{sym_eig, Matrix, SymMatrix};

use super::{tensor_rule, CubatureRule, Provenance};

/// Nodes and weights of the `k`-point Gauss rule for `(1 - x)^alpha (1 + x)^beta`
/// on `[-1, 1]`, from the eigenproblem of the Jacobi recurrence matrix.
/// Nodes are ascending.
pub fn gauss_jacobi(k: usize, alpha: u32, beta: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 {
        return Err(MzError::InvalidArgument("Gauss rule needs at least one node".into()));
    }
    let (a, b) = (alpha as f64, beta as f64);
    let mut t = Matrix::zeros(k, k);
    for i in 0..k {
        let fi = i as f64;
        let s = 2.0 * fi + a + b;
        t[(i, i)] = if i == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        if i + 1 < k {
            let j = fi + 1.0;
            let s = 2.0 * j + a + b;
            let off = (4.0 * j * (j + a) * (j + b) * (j + a + b) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
        }
    }
    let eig = sym_eig(&SymMatrix::new(t)?)?;
    let mu0 = 2f64.powi((alpha + beta + 1) as i32) * factorial(alpha) * factorial(beta)
        / factorial(alpha + beta + 1);
    let nodes = eig.raw_eigenvalues.clone();
    let weights = (0..k).map(|j| mu0 * eig.eigenvector(j)[0].powi(2)).collect();
    Ok((nodes, weights))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `k`-point Gauss-Legendre rule on `[-1, 1]`, ADE `2k - 1`.
///
/// Nodes come from the tridiagonal eigenproblem and are then polished by
/// Newton steps on `P_k`; weights use `2 / ((1 - x^2) P_k'(x)^2)`.
pub fn gauss_legendre(k: usize) -> Result<CubatureRule> {
    let (mut nodes, _) = gauss_jacobi(k, 0, 0)?;
    let mut weights = Vec::with_capacity(k);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = legendre_with_derivative(k, *x);
            let step = p / dp;
            *x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(k, *x);
        weights.push(2.0 / ((1.0 - *x * *x) * dp * dp));
    }
    // Enforce exact symmetry of the node set.
    for i in 0..k / 2 {
        let j = k - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    CubatureRule::new(Domain::INTERVAL, nodes, weights, Some(2 * k - 1), Provenance::GaussLegendre)
}

fn legendre_with_derivative(k: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for i in 1..k {
        let fi = i as f64;
        let p2 = ((2.0 * fi + 1.0) * x * p1 - fi * p0) / (fi + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if k == 0 { (1.0, 0.0) } else { (p1, p0) };
    let dp = k as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, dp)
}

/// Tensor `k x k` Gauss-Chebyshev rule for the product Chebyshev measure, ADE `2k - 1`.
pub fn gauss_chebyshev_square(k: usize) -> Result<CubatureRule> {
    if k == 0 {
        return Err(MzError::InvalidArgument("Gauss rule needs at least one node".into()));
    }
    let x: Vec<f64> = (0..k)
        .map(|i| ((2 * i + 1) as f64 * PI / (2 * k) as f64).cos())
        .collect();
    let w = PI / k as f64;
    let mut nodes = Vec::with_capacity(2 * k * k);
    for &a in &x {
        for &b in &x {
            nodes.extend([a, b]);
        }
    }
    CubatureRule::new(
        Domain::CHEBYSHEV_SQUARE,
        nodes,
        vec![w * w; k * k],
        Some(2 * k - 1),
        Provenance::TensorProduct,
    )
}

/// Tensor Gauss-Legendre rule with `k` points per axis on the square or cube.
pub fn tensor_gauss_legendre(k: usize, dim: usize) -> Result<CubatureRule> {
    tensor_rule(&vec![gauss_legendre(k)?; dim])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_gauss_legendre() {
        let r = gauss_legendre(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - 2.0).abs() < 1e-15);

        let r = gauss_legendre(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r.nodes()[0] + s).abs() < 1e-15 && (r.nodes()[1] - s).abs() < 1e-15);
        assert!(r.weights().iter().all(|w| (w - 1.0).abs() < 1e-15));

        let r = gauss_legendre(3).unwrap();
        let s = 0.6f64.sqrt();
        assert!((r.nodes()[0] + s).abs() < 1e-15 && r.nodes()[1] == 0.0);
        assert!((r.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((r.weights()[0] - 5.0 / 9.0).abs() < 1e-15);
        assert_eq!(r.ade(), Some(5));
    }

    #[test]
    fn rejects_zero_points() {
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn jacobi_weight_moments() {
        // weight (1 - x): integral 2, first moment -2/3
        let (x, w) = gauss_jacobi(4, 1, 0).unwrap();
        let m0: f64 = w.iter().sum();
        let m1: f64 = x.iter().zip(&w).map(|(x, w)| x * w).sum();
        assert!((m0 - 2.0).abs() < 1e-14);
        assert!((m1 + 2.0 / 3.0).abs() < 1e-14);
    }
}

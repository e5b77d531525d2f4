//! Three-term recurrences for the univariate families behind every basis.
//!
//! All functions fill `out[0..=n]` with the values at `x` of degrees `0..=n`.

/// Orthonormal Legendre polynomials on `[-1, 1]` w.r.t. `dx`.
pub fn legendre_orthonormal(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = x;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
    for (k, v) in out.iter_mut().enumerate() {
        *v *= ((2 * k + 1) as f64 / 2.0).sqrt();
    }
}

/// Chebyshev polynomials of the first kind, normalized w.r.t. `dx / sqrt(1 - x^2)`:
/// `1/sqrt(pi)` for degree 0 and `sqrt(2/pi) T_k` above.
pub fn chebyshev_orthonormal(x: f64, out: &mut [f64]) {
    chebyshev_t(x, out);
    let pi = std::f64::consts::PI;
    for (k, v) in out.iter_mut().enumerate() {
        *v *= if k == 0 { 1.0 / pi.sqrt() } else { (2.0 / pi).sqrt() };
    }
}

pub fn chebyshev_t(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = x;
    }
    for k in 1..n.saturating_sub(1) {
        out[k + 1] = 2.0 * x * out[k] - out[k - 1];
    }
}

/// Chebyshev polynomials of the second kind.
pub fn chebyshev_u(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = 2.0 * x;
    }
    for k in 1..n.saturating_sub(1) {
        out[k + 1] = 2.0 * x * out[k] - out[k - 1];
    }
}

/// Jacobi polynomials `P_k^{(alpha, beta)}` in the standard normalization.
pub fn jacobi(alpha: f64, beta: f64, x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * x;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        let s = 2.0 * kf + alpha + beta;
        let a1 = 2.0 * (kf + 1.0) * (kf + alpha + beta + 1.0) * s;
        let a2 = (s + 1.0) * (alpha * alpha - beta * beta);
        let a3 = s * (s + 1.0) * (s + 2.0);
        let a4 = 2.0 * (kf + alpha) * (kf + beta) * (s + 2.0);
        out[k + 1] = ((a2 + a3 * x) * out[k] - a4 * out[k - 1]) / a1;
    }
}

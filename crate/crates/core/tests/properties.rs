use mzquad::approx::{evaluate, hyperinterpolate, least_squares, sample};
use mzquad::bases::{eval_basis, streaming_gram};
use mzquad::experiments::{scan_eta, ScanKind, ScanSpec};
use mzquad::linalg::{dot, spectral_dist_from_identity, sym_eig, Matrix};
use mzquad::mz::{analyze, gramian, GramianLadder};
use mzquad::rules::{
    clenshaw_curtis, gauss_legendre, halton_qmc, latlong_sphere, padua_rule, polar_disk_rule, reference_rule,
    stroud_conical, verify_ade,
};
use mzquad::{CubatureRule, DataSource, Domain, OrthonormalBasis, RuleFamily, SymMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rule_for(domain_ix: usize, m: usize) -> CubatureRule {
    match domain_ix % 6 {
        0 => clenshaw_curtis(m).unwrap(),
        1 => padua_rule(m).unwrap(),
        2 => polar_disk_rule(m).unwrap(),
        3 => stroud_conical(m).unwrap(),
        4 => latlong_sphere(m).unwrap(),
        _ => halton_qmc(16 * m, Domain::CUBE).unwrap(),
    }
}

fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(d);
    while q.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for u in &q {
                let c = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-3 {
            q.push(v.into_iter().map(|a| a / n).collect());
        }
    }
    Matrix::from_rows(&q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn report_invariants(domain_ix in 0usize..6, m in 2usize..12, n in 0usize..8) {
        let rule = rule_for(domain_ix, m);
        // Padua weights are not all positive; the Gramian can be indefinite there.
        prop_assume!(rule.min_weight() > 0.0);
        let r = analyze(&rule, n).unwrap();
        prop_assert!(0.0 <= r.a && r.a <= r.b);
        prop_assert!(r.cond2 >= 1.0);
        prop_assert_eq!(r.eta, (r.a - 1.0).abs().max((r.b - 1.0).abs()));
        prop_assert!((dot(&r.pa_coeffs, &r.pa_coeffs).sqrt() - 1.0).abs() <= 1e-12);
        prop_assert!((dot(&r.pb_coeffs, &r.pb_coeffs).sqrt() - 1.0).abs() <= 1e-12);
        let g = gramian(&rule, &OrthonormalBasis::new(rule.domain(), n)).unwrap();
        prop_assert!((g.quadratic_form(&r.pa_coeffs) - r.a).abs() <= 1e-10);
        prop_assert!((g.quadratic_form(&r.pb_coeffs) - r.b).abs() <= 1e-10);
    }

    #[test]
    fn eta_is_monotone_in_degree(domain_ix in 0usize..6, m in 2usize..10) {
        let rule = rule_for(domain_ix, m);
        let ladder = GramianLadder::new(rule, 10).unwrap();
        let etas: Vec<f64> = (0..=10).map(|n| ladder.report(n).unwrap().eta).collect();
        for w in etas.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12, "{:?}", etas);
        }
    }

    #[test]
    fn spectrum_is_basis_invariant(domain_ix in 0usize..6, m in 2usize..10, n in 1usize..6, seed in 0u64..1000) {
        let rule = rule_for(domain_ix, m);
        let basis = OrthonormalBasis::new(rule.domain(), n);
        let eta = analyze(&rule, n).unwrap().eta;
        let q = random_orthogonal(basis.dim(), &mut ChaCha8Rng::seed_from_u64(seed));
        // psi = Q phi, so the remixed basis matrix is B Q^T.
        let b = eval_basis(&basis, rule.nodes()).unwrap();
        let remixed = b.matrix().matmul(&q.transpose()).unwrap();
        let mut g = Matrix::zeros(basis.dim(), basis.dim());
        for (i, w) in rule.weights().iter().enumerate() {
            let row = remixed.row(i);
            for j in 0..basis.dim() {
                for k in 0..basis.dim() {
                    g[(j, k)] += w * row[j] * row[k];
                }
            }
        }
        let eta2 = spectral_dist_from_identity(&SymMatrix::new(g).unwrap()).unwrap();
        prop_assert!((eta - eta2).abs() <= 1e-10, "{} vs {}", eta, eta2);
    }

    #[test]
    fn classical_hyperinterpolation_recovers_coefficients(domain_ix in 0usize..5, n in 0usize..7, seed in 0u64..1000) {
        let domain = [Domain::INTERVAL, Domain::SQUARE, Domain::DISK, Domain::SIMPLEX, Domain::SPHERE][domain_ix];
        let basis = OrthonormalBasis::new(domain, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<f64> = (0..basis.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = |z: &[f64]| {
            let mut row = vec![0.0; basis.dim()];
            basis.eval_point(z, &mut row);
            dot(&row, &c)
        };
        let rule = reference_rule(domain, 2 * n).unwrap();
        let h = hyperinterpolate(&rule, &basis, p).unwrap();
        for (a, b) in h.coeffs.iter().zip(&c) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let ls = least_squares(&rule, &basis, p).unwrap();
        for (a, b) in ls.coeffs.iter().zip(&h.coeffs) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn least_squares_is_idempotent(m in 6usize..16, n in 1usize..6) {
        let rule = padua_rule(m).unwrap();
        prop_assume!(n < m);
        let basis = OrthonormalBasis::new(Domain::SQUARE, n);
        prop_assume!(analyze(&rule, n).unwrap().a > 1e-8);
        let f = |z: &[f64]| (z[0] - 2.0 * z[1]).sin() + (z[0] * z[1]).exp();
        let first = least_squares(&rule, &basis, f).unwrap();
        let values = evaluate(&first, rule.nodes()).unwrap();
        let lookup = |z: &[f64]| {
            let i = rule.points().position(|q| q == z).unwrap();
            values[i]
        };
        let second = least_squares(&rule, &basis, lookup).unwrap();
        for (a, b) in first.coeffs.iter().zip(&second.coeffs) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }
}

#[test]
fn gauss_rules_are_sharp() {
    for k in 1..=12 {
        let rule = gauss_legendre(k).unwrap();
        assert!(verify_ade(&rule, 2 * k - 1).unwrap() <= 1e-13);
        assert!(verify_ade(&rule, 2 * k).unwrap() >= 1e-3, "k={k}");
    }
}

#[test]
fn halton_generation_is_deterministic() {
    let a = halton_qmc(1000, Domain::CUBE).unwrap();
    let b = halton_qmc(1000, Domain::CUBE).unwrap();
    assert_eq!(a, b);
}

#[test]
fn scans_are_reproducible() {
    let spec = ScanSpec {
        m: 1..=8,
        n: 0..=10,
        ..ScanSpec::new(ScanKind::Eta, RuleFamily::LatLong, Domain::SPHERE)
    };
    let a = mzquad::experiments::scan(&spec).unwrap();
    let b = mzquad::experiments::scan(&ScanSpec { jobs: Some(2), ..spec }).unwrap();
    assert_eq!(a, b);
}

#[test]
fn qmc_gramian_approaches_identity() {
    for (domain, n_max) in [(Domain::SQUARE, 10), (Domain::CUBE, 10)] {
        let coarse = GramianLadder::new(halton_qmc(1 << 6, domain).unwrap(), n_max).unwrap();
        let fine = GramianLadder::new(halton_qmc(1 << 20, domain).unwrap(), n_max).unwrap();
        for n in 0..=n_max {
            let (c, f) = (coarse.report(n).unwrap().eta, fine.report(n).unwrap().eta);
            assert!(f < c || (n == 0 && f <= 1e-12 && c <= 1e-12), "{domain} n={n}: {f} vs {c}");
        }
    }
}

#[test]
fn streaming_and_dense_gramians_agree() {
    let rule = halton_qmc(5000, Domain::SQUARE).unwrap();
    let basis = OrthonormalBasis::new(Domain::SQUARE, 6);
    let a = streaming_gram(&basis, rule.nodes(), rule.weights()).unwrap();
    let b = eval_basis(&basis, rule.nodes()).unwrap().weighted_gram(rule.weights());
    let d = basis.dim();
    for j in 0..d {
        for k in 0..d {
            assert!((a[(j, k)] - b[(j, k)]).abs() <= 1e-13);
        }
    }
    let eig = sym_eig(&a).unwrap();
    assert!(eig.min() > 0.5);
}

#[test]
fn fixture_designs_integrate_constants() {
    for (family, m) in [(RuleFamily::Design, 2), (RuleFamily::SymmetricDesign, 5)] {
        let rule = family.build(Domain::SPHERE, m, &DataSource::Fixtures).unwrap();
        assert!((rule.weight_sum() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(verify_ade(&rule, m).unwrap() <= 1e-12);
        let f = sample(&rule, |p| p[2]).unwrap();
        assert!(dot(&f, rule.weights()).abs() < 1e-12);
    }
}

#[test]
fn gauss_scan_columns() {
    let g = scan_eta(RuleFamily::GaussLegendre, Domain::INTERVAL, 1..=12, 0..=12).unwrap();
    for m in 1..=12usize {
        let k = m / 2 + 1;
        for c in g.column(m) {
            let eta = c.eta.unwrap();
            if c.n < k {
                assert!(eta <= 1e-12);
            } else {
                assert!(eta >= 1.0 - 1e-10);
            }
        }
    }
}

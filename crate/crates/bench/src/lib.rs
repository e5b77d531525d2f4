//! Inputs shared by the criterion benches.

use mzquad::mz::gramian;
use mzquad::rules::{halton_qmc, padua_rule};
use mzquad::{CubatureRule, Domain, OrthonormalBasis, SymMatrix};

/// Gramian of the Padua rule of degree `m` at degree `n`.
pub fn padua_gramian(m: usize, n: usize) -> SymMatrix {
    let rule = padua_rule(m).expect("padua rule");
    gramian(&rule, &OrthonormalBasis::new(Domain::SQUARE, n)).expect("gramian")
}

pub fn halton_cube(log2_count: u32) -> CubatureRule {
    halton_qmc(1 << log2_count, Domain::CUBE).expect("halton rule")
}

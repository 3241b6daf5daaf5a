//! Dense-matrix reference operators, built element by element.

use std::f64::consts::PI;

use num_complex::Complex64;
use qsearch_core::sat::{generate_instance, CostTable, EnsembleParams};

pub type Dense = Vec<Vec<Complex64>>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn walsh_matrix(n: usize) -> Dense {
    let len = 1usize << n;
    let norm = (len as f64).sqrt();
    (0..len)
        .map(|r| {
            (0..len)
                .map(|s| {
                    let sign = if (r & s).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    c(sign / norm)
                })
                .collect()
        })
        .collect()
}

pub fn diag(values: Vec<Complex64>) -> Dense {
    let len = values.len();
    (0..len)
        .map(|r| (0..len).map(|s| if r == s { values[r] } else { c(0.0) }).collect())
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let len = a.len();
    (0..len)
        .map(|r| {
            (0..len)
                .map(|s| (0..len).map(|t| a[r][t] * b[t][s]).sum())
                .collect()
        })
        .collect()
}

pub fn apply(a: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn dense_mixing(n: usize, tau: f64) -> Dense {
    let t = (0..1usize << n)
        .map(|s| Complex64::cis(PI * tau * s.count_ones() as f64))
        .collect();
    let w = walsh_matrix(n);
    matmul(&matmul(&w, &diag(t)), &w)
}

pub fn dense_phase(table: &CostTable, rho: f64) -> Dense {
    diag(table.costs().iter().map(|&k| Complex64::cis(PI * rho * k as f64)).collect())
}

/// `u_d = -delta_d0 + 2^(1-n)`.
pub fn dense_diffusion(n: usize) -> Dense {
    let len = 1usize << n;
    (0..len)
        .map(|r| {
            (0..len)
                .map(|s| c(if r == s { -1.0 } else { 0.0 } + 2.0 / len as f64))
                .collect()
        })
        .collect()
}

/// Largest deviation of `a^dagger a` from the identity.
pub fn unitarity_error(a: &Dense) -> f64 {
    let len = a.len();
    let mut worst = 0.0f64;
    for r in 0..len {
        for s in 0..len {
            let dot: Complex64 = (0..len).map(|t| a[t][r].conj() * a[t][s]).sum();
            let want = if r == s { 1.0 } else { 0.0 };
            worst = worst.max((dot - want).norm());
        }
    }
    worst
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_matrix_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter().zip(b).map(|(x, y)| max_diff(x, y)).fold(0.0, f64::max)
}

pub fn costs(n: usize, m: usize, seed: u64) -> CostTable {
    generate_instance(EnsembleParams::new(n, 3, m).unwrap(), seed)
        .cost_table()
        .unwrap()
}

//! Sampling and enumeration checks of the ensemble laws.

use qsearch_core::ensemble::{all_overlaps, cost_prob, pair_cost_law, FourStateLaw, OverlapVector};
use qsearch_core::rng::{derive_seed, stream, Purpose};
use qsearch_core::sat::{generate_instance, EnsembleParams};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

/// Compares observed counts with expected counts cell by cell.
///
/// Cells with expected count at least `min_expected` must each sit within
/// `z` binomial standard deviations; the remaining cells are pooled into one
/// bin held to the same bound. Returns the number of individually checked cells.
pub fn check_counts(
    observed: &[u64],
    expected_prob: &[f64],
    trials: u64,
    z: f64,
    min_expected: f64,
) -> Result<usize, String> {
    assert_eq!(observed.len(), expected_prob.len());
    let nf = trials as f64;
    let mut checked = 0;
    let (mut pooled_obs, mut pooled_p) = (0u64, 0.0f64);
    for (i, (&o, &p)) in observed.iter().zip(expected_prob).enumerate() {
        let e = nf * p;
        if e >= min_expected {
            let sigma = (nf * p * (1.0 - p)).sqrt();
            let dev = (o as f64 - e).abs() / sigma;
            if dev > z {
                return Err(format!("cell {i}: observed {o}, expected {e:.2} ({dev:.2} sigma)"));
            }
            checked += 1;
        } else {
            pooled_obs += o;
            pooled_p += p;
        }
    }
    let e = nf * pooled_p;
    let sigma = (nf * pooled_p * (1.0 - pooled_p)).sqrt().max(1.0);
    if (pooled_obs as f64 - e).abs() > z * sigma {
        return Err(format!("pooled sparse cells: observed {pooled_obs}, expected {e:.2}"));
    }
    Ok(checked)
}

/// Joint law of `(C, c)` for random pairs at distance `d`, plus the
/// conditional rows of well-populated `C`. Returns the checked cell count.
pub fn pair_law_check(params: EnsembleParams, d: usize, samples: u64, seed: u64) -> Result<usize, String> {
    let (n, m) = (params.n, params.m);
    let pairs: Vec<(usize, usize)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(seed, i);
            let inst = generate_instance(params, s);
            let mut rng = stream(s, Purpose::Sampling);
            let r: u64 = rng.gen::<u64>() & ((1 << n) - 1);
            let flips = sample(&mut rng, n, d).iter().fold(0u64, |acc, v| acc | 1 << v);
            (inst.cost_bits(r), inst.cost_bits(r ^ flips))
        })
        .collect();
    let side = m + 1;
    let mut observed = vec![0u64; side * side];
    for &(big_c, c) in &pairs {
        observed[big_c * side + c] += 1;
    }
    let mut expected = vec![0.0f64; side * side];
    let mut checked = 0;
    for big_c in 0..side {
        let law = pair_cost_law(&params, d, big_c).map_err(|e| e.to_string())?;
        let pc = cost_prob(&params, big_c);
        for c in 0..side {
            expected[big_c * side + c] = pc * law[c];
        }
        let row = &observed[big_c * side..(big_c + 1) * side];
        let total: u64 = row.iter().sum();
        if total >= 5_000 {
            checked += check_counts(row, &law, total, 4.0, 10.0).map_err(|e| format!("C = {big_c}: {e}"))?;
        }
    }
    checked += check_counts(&observed, &expected, samples, 4.0, 10.0)?;
    Ok(checked)
}

/// Overlap vector of four explicit states.
pub fn overlap_of(states: [u64; 4], n: usize) -> OverlapVector {
    let [r, r1, s, s1] = states;
    let mut w = [0usize; 8];
    for v in 0..n {
        let bit = |x: u64| ((x ^ r) >> v & 1) as usize;
        w[4 * bit(r1) + 2 * bit(s) + bit(s1)] += 1;
    }
    OverlapVector::new(w, n).unwrap()
}

/// Joint law of the four costs of fixed states over sampled instances.
pub fn four_state_check(params: EnsembleParams, states: [u64; 4], samples: u64, seed: u64) -> Result<usize, String> {
    let w = overlap_of(states, params.n);
    let law = FourStateLaw::new(&params, &w).map_err(|e| e.to_string())?;
    let side = params.m + 1;
    let cells: Vec<usize> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let inst = generate_instance(params, derive_seed(seed, i));
            let c = states.map(|s| inst.cost_bits(s));
            ((c[0] * side + c[1]) * side + c[2]) * side + c[3]
        })
        .collect();
    let mut observed = vec![0u64; side.pow(4)];
    for cell in cells {
        observed[cell] += 1;
    }
    let expected: Vec<f64> = (0..side.pow(4))
        .map(|i| law.prob(i / side.pow(3), i / side.pow(2) % side, i / side % side, i % side))
        .collect();
    check_counts(&observed, &expected, samples, 4.0, 10.0)
}

/// Counts every ordered 4-tuple over `n` variables by overlap and compares
/// with `N(W)`. Returns the number of overlap vectors.
pub fn multiplicity_check(n: usize) -> Result<usize, String> {
    assert!(n <= 6, "enumeration over 2^(4n) tuples");
    let full = (1u64 << n) - 1;
    let base = n + 1;
    let code = |w: &[usize; 8]| w.iter().fold(0usize, |acc, &x| acc * base + x);
    let mut counts = vec![0u64; base.pow(8)];
    for r in 0..=full {
        for r1 in 0..=full {
            for s in 0..=full {
                for s1 in 0..=full {
                    let (x, y, z) = (r ^ r1, r ^ s, r ^ s1);
                    let mut w = [0usize; 8];
                    for (g, slot) in w.iter_mut().enumerate() {
                        let pick = |bit: usize, v: u64| if g >> bit & 1 == 1 { v } else { !v };
                        *slot = (pick(2, x) & pick(1, y) & pick(0, z) & full).count_ones() as usize;
                    }
                    counts[code(&w)] += 1;
                }
            }
        }
    }
    let overlaps = all_overlaps(n);
    let mut total = 0u64;
    for w in &overlaps {
        let got = counts[code(&w.0)];
        let want = w.multiplicity();
        if (got as f64 - want).abs() >= 1e-6 * want {
            return Err(format!("{:?}: counted {got}, N(W) = {want}", w.0));
        }
        total += got;
    }
    if total != 1 << (4 * n) {
        return Err(format!("{total} tuples counted"));
    }
    Ok(overlaps.len())
}

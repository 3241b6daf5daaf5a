//! Ensemble-averaged cost and distance structure of random k-SAT.
//!
//! Single-state law: a state's cost is Binomial(m, p) with `p = 2^-k`.
//!
//! Pair law: a random clause conflicts with both ends of a distance-`d` pair
//! with probability `q(d) = 2^-k C(n-d, k) / C(n, k)` (its variables must avoid
//! the `d` differing ones). Given `C` conflicts at the first state, the second
//! state's cost is Binomial(C, q/p) shared conflicts plus Binomial(m-C,
//! (p-q)/(1-p)) new ones.
//!
//! Four-state law: for states `r, r', s, s'` the variables fall into eight
//! groups by which states disagree with `r` on them. Group index bits are
//! `4*[r' != r] + 2*[s != r] + [s' != r]`. A clause's variable set induces a
//! partition of the four states (states agreeing on all chosen variables);
//! each partition class is conflicted by exactly one of the `2^k` sign
//! patterns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{binomial_law, choose, convolve, ln_choose, ln_factorial, CompensatedSum};
use crate::sat::EnsembleParams;

/// Default ceiling on `m` for the four-state joint law, whose table has
/// `(m+1)^4` cells.
pub const FOUR_STATE_M_LIMIT: usize = 120;

/// Probability that a single assignment has cost `c`: Binomial(m, p) at `c`.
pub fn cost_prob(params: &EnsembleParams, c: usize) -> f64 {
    crate::math::binomial_pmf(params.m, params.p(), c)
}

/// Expected number of states with cost `c`, `2^n P(c)`.
pub fn expected_states(params: &EnsembleParams, c: usize) -> f64 {
    (params.n as f64).exp2() * cost_prob(params, c)
}

/// Probability a random clause conflicts with both states of a pair at distance `d`.
pub fn shared_conflict_prob(params: &EnsembleParams, d: usize) -> f64 {
    if d > params.n || params.n - d < params.k {
        return 0.0;
    }
    params.p() * (ln_choose(params.n - d, params.k) - ln_choose(params.n, params.k)).exp()
}

/// Conditional law `P(. | C, d)` of the second state's cost over `0..=m`.
pub fn pair_cost_law(params: &EnsembleParams, d: usize, big_c: usize) -> Result<Vec<f64>> {
    let (n, m) = (params.n, params.m);
    if d > n || big_c > m {
        return Err(Error::invalid(format!(
            "pair law needs d <= {n} and C <= {m}, got d = {d}, C = {big_c}"
        )));
    }
    let p = params.p();
    let q = shared_conflict_prob(params, d);
    let keep = (q / p).clamp(0.0, 1.0);
    let fresh = ((p - q) / (1.0 - p)).clamp(0.0, 1.0);
    let law = convolve(&binomial_law(big_c, keep), &binomial_law(m - big_c, fresh));
    debug_assert_eq!(law.len(), m + 1);
    Ok(law)
}

/// `P(c | C, d)`.
pub fn pair_cost_prob(params: &EnsembleParams, d: usize, big_c: usize, c: usize) -> Result<f64> {
    let law = pair_cost_law(params, d, big_c)?;
    law.get(c)
        .copied()
        .ok_or_else(|| Error::invalid(format!("c = {c} exceeds m = {}", params.m)))
}

/// Conditional mean `E[c | C, d]` implied by the two-binomial construction.
pub fn pair_conditional_mean(params: &EnsembleParams, d: usize, big_c: usize) -> f64 {
    let p = params.p();
    let q = shared_conflict_prob(params, d);
    big_c as f64 * q / p + (params.m - big_c) as f64 * (p - q) / (1.0 - p)
}

/// Expected counts `Theta_d(C, c) = C(n, d) P(c | C, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStructureTable {
    params: EnsembleParams,
    theta: Vec<f64>,
}

impl PairStructureTable {
    pub fn new(params: EnsembleParams) -> Result<Self> {
        let (n, m) = (params.n, params.m);
        let cells = (n + 1) * (m + 1) * (m + 1);
        const BUDGET: usize = 1 << 26;
        if cells > BUDGET {
            return Err(Error::ResourceGuard {
                what: "pair table cells",
                got: cells,
                limit: BUDGET,
            });
        }
        let mut theta = Vec::with_capacity(cells);
        for d in 0..=n {
            let ways = choose(n, d);
            for big_c in 0..=m {
                theta.extend(pair_cost_law(&params, d, big_c)?.into_iter().map(|x| ways * x));
            }
        }
        Ok(Self { params, theta })
    }

    pub fn params(&self) -> EnsembleParams {
        self.params
    }

    /// Row `Theta_d(C, .)` over `c = 0..=m`.
    pub fn row(&self, d: usize, big_c: usize) -> &[f64] {
        let w = self.params.m + 1;
        let start = (d * w + big_c) * w;
        &self.theta[start..start + w]
    }

    pub fn get(&self, d: usize, big_c: usize, c: usize) -> f64 {
        self.row(d, big_c)[c]
    }

    /// Writes the `P(c | C, d)` slice for one `C` as CSV rows `d,c,probability`.
    pub fn write_slice_csv<W: std::io::Write>(&self, big_c: usize, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["d", "c", "probability"])?;
        for d in 0..=self.params.n {
            let ways = choose(self.params.n, d);
            for (c, theta) in self.row(d, big_c).iter().enumerate() {
                w.write_record([
                    d.to_string(),
                    c.to_string(),
                    format!("{:.11e}", theta / ways),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Group sizes `w_0..w_7` for four assignments `r, r', s, s'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OverlapVector(pub [usize; 8]);

/// `(D, d, d', delta)` = `(d(r,r'), d(r,s), d(r',s'), d(s,s'))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FourDistances {
    pub big_d: usize,
    pub d: usize,
    pub d_prime: usize,
    pub delta: usize,
}

impl OverlapVector {
    pub fn new(w: [usize; 8], n: usize) -> Result<Self> {
        let total: usize = w.iter().sum();
        if total != n {
            return Err(Error::invalid(format!("group sizes sum to {total}, expected {n}")));
        }
        Ok(Self(w))
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn distances(&self) -> FourDistances {
        let w = &self.0;
        FourDistances {
            big_d: w[4] + w[5] + w[6] + w[7],
            d: w[2] + w[3] + w[6] + w[7],
            d_prime: w[1] + w[3] + w[4] + w[6],
            delta: w[1] + w[2] + w[5] + w[6],
        }
    }

    /// ln N(W), with `N(W) = 2^n n! / prod w_i!`.
    pub fn ln_multiplicity(&self) -> f64 {
        let n = self.n();
        n as f64 * std::f64::consts::LN_2 + ln_factorial(n)
            - self.0.iter().map(|&w| ln_factorial(w)).sum::<f64>()
    }

    pub fn multiplicity(&self) -> f64 {
        self.ln_multiplicity().exp()
    }

    /// Four explicit assignments `[r, r', s, s']` realizing this overlap, with
    /// `r` all zeros and groups laid out in index order.
    pub fn realize(&self) -> [u64; 4] {
        let mut out = [0u64; 4];
        let mut var = 0;
        for (g, &size) in self.0.iter().enumerate() {
            for _ in 0..size {
                let bit = 1u64 << var;
                if g & 4 != 0 {
                    out[1] |= bit;
                }
                if g & 2 != 0 {
                    out[2] |= bit;
                }
                if g & 1 != 0 {
                    out[3] |= bit;
                }
                var += 1;
            }
        }
        out
    }
}

/// Every overlap vector over `n` variables (compositions of `n` into 8 parts).
pub fn all_overlaps(n: usize) -> Vec<OverlapVector> {
    fn rec(pos: usize, left: usize, cur: &mut [usize; 8], out: &mut Vec<OverlapVector>) {
        if pos == 7 {
            cur[7] = left;
            out.push(OverlapVector(*cur));
            return;
        }
        for w in 0..=left {
            cur[pos] = w;
            rec(pos + 1, left - w, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut [0; 8], &mut out);
    out
}

/// Overlap vectors with the given four distances.
pub fn overlaps_matching(n: usize, dist: FourDistances) -> Vec<OverlapVector> {
    let FourDistances {
        big_d,
        d,
        d_prime,
        delta,
    } = dist;
    let mut out = Vec::new();
    for w7 in 0..=big_d.min(d) {
        for w6 in 0..=(big_d - w7).min(d - w7).min(d_prime) {
            for w4 in 0..=(big_d - w7 - w6).min(d_prime - w6) {
                let w5 = big_d - w7 - w6 - w4;
                let rest_d = d - w7 - w6;
                for w3 in 0..=rest_d.min(d_prime - w6 - w4) {
                    let w2 = rest_d - w3;
                    let w1 = d_prime - w3 - w4 - w6;
                    if w1 + w2 + w5 + w6 != delta {
                        continue;
                    }
                    let used = w1 + w2 + w3 + w4 + w5 + w6 + w7;
                    if used > n {
                        continue;
                    }
                    out.push(OverlapVector([n - used, w1, w2, w3, w4, w5, w6, w7]));
                }
            }
        }
    }
    out
}

/// Per-clause distribution over which of the four states it conflicts with.
/// Index bits: 1 = r, 2 = r', 4 = s, 8 = s'.
pub fn clause_conflict_subsets(params: &EnsembleParams, w: &OverlapVector) -> [f64; 16] {
    let k = params.k;
    let ln_total = ln_choose(params.n, k);
    let pattern = params.p();
    let mut dist = [0.0f64; 16];
    let mut parts = [0usize; 8];

    fn flips(g: usize) -> [usize; 4] {
        [0, g >> 2 & 1, g >> 1 & 1, g & 1]
    }

    fn rec(
        pos: usize,
        left: usize,
        parts: &mut [usize; 8],
        w: &OverlapVector,
        ln_total: f64,
        pattern: f64,
        dist: &mut [f64; 16],
    ) {
        if pos == 8 {
            if left != 0 {
                return;
            }
            let ln_ways: f64 = (0..8).map(|g| ln_choose(w.0[g], parts[g])).sum();
            let prob = (ln_ways - ln_total).exp();
            if prob == 0.0 {
                return;
            }
            // Signature of each state: its flip bits on every present group.
            let sig = |state: usize| -> u32 {
                (0..8)
                    .filter(|&g| parts[g] > 0)
                    .fold(0u32, |acc, g| acc | ((flips(g)[state] as u32) << g))
            };
            let sigs = [sig(0), sig(1), sig(2), sig(3)];
            let mut assigned = 0usize;
            let mut classes = 0usize;
            for a in 0..4 {
                if assigned >> a & 1 == 1 {
                    continue;
                }
                let mut mask = 0usize;
                for b in a..4 {
                    if sigs[b] == sigs[a] {
                        mask |= 1 << b;
                    }
                }
                assigned |= mask;
                classes += 1;
                dist[mask] += prob * pattern;
            }
            dist[0] += prob * (1.0 - classes as f64 * pattern);
            return;
        }
        for a in 0..=left.min(w.0[pos]) {
            parts[pos] = a;
            rec(pos + 1, left - a, parts, w, ln_total, pattern, dist);
        }
        parts[pos] = 0;
    }

    rec(0, k, &mut parts, w, ln_total, pattern, &mut dist);
    dist
}

/// Joint law of `(C, C', c, c')` for four fixed states with overlap `W`.
#[derive(Debug, Clone)]
pub struct FourStateLaw {
    m: usize,
    table: Vec<f64>,
}

impl FourStateLaw {
    pub fn new(params: &EnsembleParams, w: &OverlapVector) -> Result<Self> {
        Self::with_limit(params, w, FOUR_STATE_M_LIMIT)
    }

    pub fn with_limit(params: &EnsembleParams, w: &OverlapVector, limit: usize) -> Result<Self> {
        let m = params.m;
        if m > limit {
            return Err(Error::ResourceGuard {
                what: "m",
                got: m,
                limit,
            });
        }
        if w.n() != params.n {
            return Err(Error::DimensionMismatch(format!(
                "overlap over {} variables, ensemble has {}",
                w.n(),
                params.n
            )));
        }
        let subsets = clause_conflict_subsets(params, w);
        let active: Vec<(usize, f64)> = subsets
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (i, p))
            .collect();
        let side = m + 1;
        let idx = |a: usize, b: usize, c: usize, d: usize| ((a * side + b) * side + c) * side + d;
        let mut cur = vec![0.0f64; side.pow(4)];
        let mut next = vec![0.0f64; side.pow(4)];
        cur[0] = 1.0;
        // After t clauses every coordinate is at most t.
        for t in 0..m {
            for x in next.iter_mut() {
                *x = 0.0;
            }
            for a in 0..=t {
                for b in 0..=t {
                    for c in 0..=t {
                        for d in 0..=t {
                            let v = cur[idx(a, b, c, d)];
                            if v == 0.0 {
                                continue;
                            }
                            for &(mask, p) in &active {
                                let j = idx(
                                    a + (mask & 1),
                                    b + (mask >> 1 & 1),
                                    c + (mask >> 2 & 1),
                                    d + (mask >> 3 & 1),
                                );
                                next[j] += v * p;
                            }
                        }
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(Self { m, table: cur })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `P(C, C', c, c' | W)`; zero outside `0..=m`.
    pub fn prob(&self, big_c: usize, big_c_prime: usize, c: usize, c_prime: usize) -> f64 {
        let side = self.m + 1;
        if big_c >= side || big_c_prime >= side || c >= side || c_prime >= side {
            return 0.0;
        }
        self.table[((big_c * side + big_c_prime) * side + c) * side + c_prime]
    }

    pub fn total(&self) -> f64 {
        self.table.iter().copied().collect::<CompensatedSum>().value()
    }

    /// Marginal law of `(C, C')` as a row-major `(m+1) x (m+1)` matrix.
    pub fn marginal_first_pair(&self) -> Vec<f64> {
        let side = self.m + 1;
        let mut out = vec![0.0; side * side];
        for (i, chunk) in self.table.chunks(side * side).enumerate() {
            out[i] = chunk.iter().copied().collect::<CompensatedSum>().value();
        }
        out
    }
}

/// `P(C, C', c, c' | W)` for one query.
pub fn four_state_cost_prob(
    params: &EnsembleParams,
    w: &OverlapVector,
    costs: [usize; 4],
) -> Result<f64> {
    let law = FourStateLaw::new(params, w)?;
    Ok(law.prob(costs[0], costs[1], costs[2], costs[3]))
}

/// Joint probability that a pair at distance `D` has costs `(C, C')`.
pub fn pair_joint_prob(params: &EnsembleParams, big_d: usize, big_c: usize, big_c_prime: usize) -> Result<f64> {
    Ok(cost_prob(params, big_c) * pair_cost_prob(params, big_d, big_c, big_c_prime)?)
}

/// Expected number of ordered pairs `(s, s')` with costs `(c, c')` and the given
/// distances, per ordered pair `(r, r')` at distance `D` with costs `(C, C')`.
///
/// Computed as `sum_W N(W) P(C,C',c,c'|W)` over matching overlaps, divided by
/// the expected number of `(r, r')` pairs at distance `D` with costs `(C, C')`,
/// i.e. `2^n C(n, D) P(C) P(C' | C, D)`. Zero when that denominator vanishes or
/// no overlap matches.
pub fn four_state_structure(
    params: &EnsembleParams,
    dist: FourDistances,
    costs: [usize; 4],
) -> Result<f64> {
    let n = params.n;
    if dist.big_d > n || dist.d > n || dist.d_prime > n || dist.delta > n {
        return Ok(0.0);
    }
    let pair = pair_joint_prob(params, dist.big_d, costs[0], costs[1])?;
    if pair == 0.0 {
        return Ok(0.0);
    }
    let ln_pairs = n as f64 * std::f64::consts::LN_2 + ln_choose(n, dist.big_d);
    let mut acc = CompensatedSum::default();
    for w in overlaps_matching(n, dist) {
        let law = FourStateLaw::new(params, &w)?;
        let p = law.prob(costs[0], costs[1], costs[2], costs[3]);
        if p > 0.0 {
            acc.add((w.ln_multiplicity() - ln_pairs).exp() * p);
        }
    }
    Ok(acc.value() / pair)
}

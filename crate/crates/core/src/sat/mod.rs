//! Random k-SAT instances, assignments and conflict counting.
//!
//! Clauses are stored as two bitmasks over the variables: the variables the
//! clause mentions and which of them are negated. A clause conflicts with an
//! assignment exactly when the assignment, restricted to the clause's variables,
//! equals the negation mask, so the cost of a state is `m` mask compares.

mod dimacs;

pub use dimacs::{emit_dimacs, parse_dimacs, InstanceMeta};

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::choose;
use crate::rng::{self, Purpose};

/// Largest variable count an instance can hold (one `u64` mask per clause).
pub const MAX_VARS: usize = 64;

/// Default ceiling on `n` for anything that enumerates all `2^n` assignments.
pub const ENUMERATION_LIMIT: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
}

impl EnsembleParams {
    pub fn new(n: usize, k: usize, m: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::invalid("n and k must be positive"));
        }
        if k > n {
            return Err(Error::invalid(format!("k = {k} exceeds n = {n}")));
        }
        if n > MAX_VARS {
            return Err(Error::ResourceGuard {
                what: "n",
                got: n,
                limit: MAX_VARS,
            });
        }
        if k > 30 {
            return Err(Error::invalid("k above 30 is not supported"));
        }
        Ok(Self { n, k, m })
    }

    /// Parameters at clause density `mu`, with `m = floor(mu * n)`.
    pub fn at_density(n: usize, k: usize, mu: f64) -> Result<Self> {
        Self::new(n, k, (mu * n as f64 + 1e-9).floor() as usize)
    }

    pub fn mu(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// Probability that a random clause conflicts with a fixed assignment, `2^-k`.
    pub fn p(&self) -> f64 {
        (-(self.k as f64)).exp2()
    }

    /// Number of distinct clauses, `C(n, k) 2^k`.
    pub fn clause_count(&self) -> f64 {
        choose(self.n, self.k) * (self.k as f64).exp2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause {
    vars: u64,
    negated: u64,
}

impl Clause {
    /// Builds a clause from parallel slices of variable indices and negation flags.
    pub fn new(vars: &[usize], negated: &[bool], n: usize) -> Result<Self> {
        if vars.len() != negated.len() {
            return Err(Error::LengthMismatch(vars.len(), negated.len()));
        }
        let mut vmask = 0u64;
        let mut nmask = 0u64;
        for (&v, &neg) in vars.iter().zip(negated) {
            if v >= n {
                return Err(Error::invalid(format!("variable {v} out of range for n = {n}")));
            }
            let bit = 1u64 << v;
            if vmask & bit != 0 {
                return Err(Error::invalid(format!("variable {v} repeated in clause")));
            }
            vmask |= bit;
            if neg {
                nmask |= bit;
            }
        }
        Ok(Self {
            vars: vmask,
            negated: nmask,
        })
    }

    pub(crate) fn from_masks(vars: u64, negated: u64) -> Self {
        debug_assert_eq!(negated & !vars, 0);
        Self { vars, negated }
    }

    pub fn var_mask(&self) -> u64 {
        self.vars
    }

    pub fn negated_mask(&self) -> u64 {
        self.negated
    }

    pub fn width(&self) -> usize {
        self.vars.count_ones() as usize
    }

    /// Literals as `(variable, negated)` in increasing variable order.
    pub fn literals(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        let mut rest = self.vars;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some((v, self.negated >> v & 1 == 1))
        })
    }

    #[inline]
    pub fn conflicts(&self, bits: u64) -> bool {
        bits & self.vars == self.negated
    }
}

/// A truth value per variable; bit `i` holds variable `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: u64,
    n: usize,
}

impl Assignment {
    pub fn new(bits: u64, n: usize) -> Self {
        assert!(n <= MAX_VARS);
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Self { bits: bits & mask, n }
    }

    pub fn from_bools(values: &[bool]) -> Self {
        let bits = values
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        Self::new(bits, values.len())
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, var: usize) -> bool {
        self.bits >> var & 1 == 1
    }

    pub fn flipped(&self, var: usize) -> Self {
        Self::new(self.bits ^ (1u64 << var), self.n)
    }
}

pub fn hamming(r: &Assignment, s: &Assignment) -> Result<usize> {
    if r.n != s.n {
        return Err(Error::LengthMismatch(r.n, s.n));
    }
    Ok((r.bits ^ s.bits).count_ones() as usize)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatInstance {
    params: EnsembleParams,
    clauses: Vec<Clause>,
}

impl SatInstance {
    pub fn new(params: EnsembleParams, clauses: Vec<Clause>) -> Result<Self> {
        if clauses.len() != params.m {
            return Err(Error::LengthMismatch(clauses.len(), params.m));
        }
        let limit = if params.n == 64 { u64::MAX } else { (1u64 << params.n) - 1 };
        for c in &clauses {
            if c.width() != params.k || c.vars & !limit != 0 {
                return Err(Error::invalid("clause does not match ensemble parameters"));
            }
        }
        Ok(Self { params, clauses })
    }

    pub fn params(&self) -> EnsembleParams {
        self.params
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Number of clauses conflicting with `s`.
    pub fn cost(&self, s: &Assignment) -> Result<usize> {
        if s.n != self.params.n {
            return Err(Error::LengthMismatch(s.n, self.params.n));
        }
        Ok(self.cost_bits(s.bits))
    }

    #[inline]
    pub fn cost_bits(&self, bits: u64) -> usize {
        self.clauses.iter().filter(|c| c.conflicts(bits)).count()
    }

    fn is_solution_bits(&self, bits: u64) -> bool {
        !self.clauses.iter().any(|c| c.conflicts(bits))
    }

    /// Exact number of zero-cost assignments, with the default size limit.
    pub fn count_solutions(&self) -> Result<u64> {
        self.count_solutions_with_limit(ENUMERATION_LIMIT)
    }

    /// Exhaustive count, checking clauses per state until the first conflict.
    /// Work is split into fixed chunks; the integer total is order independent.
    pub fn count_solutions_with_limit(&self, limit: usize) -> Result<u64> {
        let n = self.params.n;
        if n > limit {
            return Err(Error::ResourceGuard {
                what: "n",
                got: n,
                limit,
            });
        }
        let total = 1u64 << n;
        let chunk = 1u64 << n.min(14);
        let count = (0..total / chunk)
            .into_par_iter()
            .map(|c| {
                let base = c * chunk;
                (base..base + chunk)
                    .filter(|&s| self.is_solution_bits(s))
                    .count() as u64
            })
            .sum();
        Ok(count)
    }

    /// Per-state costs for all `2^n` assignments.
    pub fn cost_table(&self) -> Result<CostTable> {
        CostTable::from_instance(self, ENUMERATION_LIMIT)
    }
}

/// Draws a random instance: each clause picks a uniform k-subset of the
/// variables and negates each independently with probability 1/2.
pub fn generate_instance(params: EnsembleParams, seed: u64) -> SatInstance {
    let mut rng = rng::stream(seed, Purpose::Instance);
    let clauses = (0..params.m)
        .map(|_| {
            let mut vars = 0u64;
            let mut negated = 0u64;
            for v in sample(&mut rng, params.n, params.k) {
                vars |= 1u64 << v;
                if rng.gen_bool(0.5) {
                    negated |= 1u64 << v;
                }
            }
            Clause::from_masks(vars, negated)
        })
        .collect();
    SatInstance { params, clauses }
}

/// Costs of every assignment, one byte each, indexed by the assignment bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    n: usize,
    m: usize,
    costs: Vec<u8>,
}

impl CostTable {
    pub fn from_instance(instance: &SatInstance, limit: usize) -> Result<Self> {
        let EnsembleParams { n, m, .. } = instance.params;
        if n > limit {
            return Err(Error::ResourceGuard {
                what: "n",
                got: n,
                limit,
            });
        }
        if m > u8::MAX as usize {
            return Err(Error::ResourceGuard {
                what: "m",
                got: m,
                limit: u8::MAX as usize,
            });
        }
        let mut costs = vec![0u8; 1usize << n];
        let full = (1u64 << n) - 1;
        // Walk the 2^(n-k) conflicting states of each clause directly.
        for c in &instance.clauses {
            let free = full & !c.vars;
            let mut sub = free;
            loop {
                costs[(sub | c.negated) as usize] += 1;
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
        }
        Ok(Self { n, m, costs })
    }

    /// Table from explicit per-state values; used for derived cost functions.
    pub fn from_costs(n: usize, m: usize, costs: Vec<u8>) -> Result<Self> {
        if costs.len() != 1usize << n {
            return Err(Error::LengthMismatch(costs.len(), 1usize << n));
        }
        if let Some(&bad) = costs.iter().find(|&&c| c as usize > m) {
            return Err(Error::invalid(format!("cost {bad} exceeds m = {m}")));
        }
        Ok(Self { n, m, costs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn costs(&self) -> &[u8] {
        &self.costs
    }

    pub fn solution_count(&self) -> u64 {
        self.costs.iter().filter(|&&c| c == 0).count() as u64
    }

    /// Number of states with each cost, `0..=m`.
    pub fn population(&self) -> Vec<u64> {
        let mut pop = vec![0u64; self.m + 1];
        for &c in &self.costs {
            pop[c as usize] += 1;
        }
        pop
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// {v1 or not v2, v2 or v3} with variables renumbered from zero.
    fn two_sat_example() -> SatInstance {
        let params = EnsembleParams::new(3, 2, 2).unwrap();
        let clauses = vec![
            Clause::new(&[0, 1], &[false, true], 3).unwrap(),
            Clause::new(&[1, 2], &[false, false], 3).unwrap(),
        ];
        SatInstance::new(params, clauses).unwrap()
    }

    #[test]
    fn two_sat_example_costs() {
        let inst = two_sat_example();
        let s = Assignment::from_bools(&[false, false, true]);
        assert_eq!(inst.cost(&s).unwrap(), 0);
        let s = Assignment::from_bools(&[false, true, false]);
        assert_eq!(inst.cost(&s).unwrap(), 1);
        assert_eq!(inst.count_solutions().unwrap(), 4);
    }

    #[test]
    fn empty_clause_set() {
        let params = EnsembleParams::new(4, 3, 0).unwrap();
        let inst = generate_instance(params, 11);
        assert_eq!(inst.cost_bits(0b1010), 0);
        assert_eq!(inst.count_solutions().unwrap(), 16);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(matches!(
            EnsembleParams::new(2, 3, 5),
            Err(Error::InvalidParameters(_))
        ));
        assert!(Clause::new(&[1, 1], &[false, true], 3).is_err());
        assert!(Clause::new(&[0, 3], &[false, true], 3).is_err());
    }

    #[test]
    fn generated_structure() {
        let params = EnsembleParams::new(3, 2, 5).unwrap();
        let inst = generate_instance(params, 99);
        assert_eq!(inst.clauses().len(), 5);
        assert!(inst.clauses().iter().all(|c| c.width() == 2));
        let p = EnsembleParams::new(20, 3, 85).unwrap();
        assert_eq!(p.clause_count(), 9120.0);
        assert_eq!(EnsembleParams::at_density(20, 3, 4.25).unwrap().m, 85);
    }

    #[test]
    fn hamming_distances() {
        let a = Assignment::new(0b0101, 4);
        let b = Assignment::new(0b0110, 4);
        assert_eq!(hamming(&a, &a).unwrap(), 0);
        assert_eq!(hamming(&a, &b).unwrap(), 2);
        assert_eq!(
            hamming(&Assignment::new(0, 7), &Assignment::new(u64::MAX, 7)).unwrap(),
            7
        );
        assert!(hamming(&a, &Assignment::new(0, 5)).is_err());
    }

    #[test]
    fn enumeration_limit_guard() {
        let params = EnsembleParams::new(30, 3, 10).unwrap();
        let inst = generate_instance(params, 1);
        assert!(matches!(
            inst.count_solutions(),
            Err(Error::ResourceGuard { .. })
        ));
    }

    fn naive_cost(inst: &SatInstance, s: u64) -> usize {
        inst.clauses()
            .iter()
            .filter(|c| c.literals().all(|(v, neg)| (s >> v & 1 == 1) == neg))
            .count()
    }

    #[test]
    fn mask_cost_matches_literal_loop() {
        let mut rng = rng::stream(5, Purpose::Sampling);
        for i in 0..1000 {
            let n = rng.gen_range(3..=20);
            let k = rng.gen_range(1..=3.min(n));
            let m = rng.gen_range(0..=90);
            let inst = generate_instance(EnsembleParams::new(n, k, m).unwrap(), i);
            let s = rng.gen::<u64>() & ((1 << n) - 1);
            let c = naive_cost(&inst, s);
            assert_eq!(inst.cost_bits(s), c);
            assert!(c <= m);
        }
    }

    #[test]
    fn cost_table_matches_direct_costs() {
        let inst = generate_instance(EnsembleParams::new(10, 3, 43).unwrap(), 3);
        let table = inst.cost_table().unwrap();
        for s in 0..1u64 << 10 {
            assert_eq!(table.costs()[s as usize] as usize, inst.cost_bits(s));
        }
        assert_eq!(table.solution_count(), inst.count_solutions().unwrap());
        assert_eq!(table.population().iter().sum::<u64>(), 1024);
    }

    #[test]
    fn generation_is_deterministic() {
        let p = EnsembleParams::new(16, 3, 68).unwrap();
        assert_eq!(generate_instance(p, 42), generate_instance(p, 42));
        assert_ne!(generate_instance(p, 42), generate_instance(p, 43));
    }
}

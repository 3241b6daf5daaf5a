//! GSAT local search and the GSAT-informed cost function.
//!
//! A move flips the variable whose flip leaves the fewest conflicts. Conflict
//! deltas are kept incrementally from per-clause true-literal counts.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::sat::{Assignment, CostTable, SatInstance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsatConfig {
    /// Moves per try before restarting; defaults to `2n`.
    pub max_steps_per_try: usize,
    /// `None` restarts until `budget` is spent.
    pub max_restarts: Option<u64>,
    /// Cap on total moves across all tries.
    pub budget: u64,
    /// Only strictly improving moves; a try ends at the first local minimum.
    pub strict: bool,
    pub seed: u64,
}

impl GsatConfig {
    pub fn for_instance(instance: &SatInstance, seed: u64) -> Self {
        Self {
            max_steps_per_try: 2 * instance.params().n,
            max_restarts: None,
            budget: 10_000_000,
            strict: false,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GsatOutcome {
    pub solved: bool,
    /// Moves across all tries.
    pub total_steps: u64,
    /// Neighbor cost evaluations (n per move).
    pub neighbor_evaluations: u64,
    pub tries: u64,
    pub best_cost: usize,
    pub final_bits: u64,
}

/// Mutable search state with incremental conflict bookkeeping.
#[derive(Debug, Clone)]
pub struct LocalSearch<'a> {
    instance: &'a SatInstance,
    occurrences: Vec<Vec<u32>>,
    bits: u64,
    true_count: Vec<u8>,
    cost: usize,
}

impl<'a> LocalSearch<'a> {
    pub fn new(instance: &'a SatInstance, start: u64) -> Self {
        let n = instance.params().n;
        let mut occurrences = vec![Vec::new(); n];
        for (i, c) in instance.clauses().iter().enumerate() {
            for (v, _) in c.literals() {
                occurrences[v].push(i as u32);
            }
        }
        let mut s = Self {
            instance,
            occurrences,
            bits: 0,
            true_count: Vec::new(),
            cost: 0,
        };
        s.reset(start);
        s
    }

    /// Moves to a fresh assignment and recounts everything.
    pub fn reset(&mut self, bits: u64) {
        self.bits = bits;
        self.true_count = self
            .instance
            .clauses()
            .iter()
            .map(|c| ((bits ^ c.negated_mask()) & c.var_mask()).count_ones() as u8)
            .collect();
        self.cost = self.true_count.iter().filter(|&&t| t == 0).count();
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn cost(&self) -> usize {
        self.cost
    }

    /// Change in cost if `var` were flipped.
    pub fn delta(&self, var: usize) -> isize {
        let bit = 1u64 << var;
        let mut d = 0isize;
        for &ci in &self.occurrences[var] {
            let c = &self.instance.clauses()[ci as usize];
            let tc = self.true_count[ci as usize];
            if tc == 0 {
                d -= 1;
            } else if tc == 1 && (self.bits ^ c.negated_mask()) & bit != 0 {
                // `var` supplies the only true literal.
                d += 1;
            }
        }
        d
    }

    pub fn flip(&mut self, var: usize) {
        let bit = 1u64 << var;
        for &ci in &self.occurrences[var] {
            let c = &self.instance.clauses()[ci as usize];
            let tc = &mut self.true_count[ci as usize];
            if (self.bits ^ c.negated_mask()) & bit != 0 {
                *tc -= 1;
                if *tc == 0 {
                    self.cost += 1;
                }
            } else {
                if *tc == 0 {
                    self.cost -= 1;
                }
                *tc += 1;
            }
        }
        self.bits ^= bit;
    }
}

/// Randomized GSAT with restarts. Ties among best neighbors are broken
/// uniformly at random.
pub fn gsat_run(instance: &SatInstance, cfg: &GsatConfig) -> Result<GsatOutcome> {
    if cfg.max_steps_per_try == 0 {
        return Err(Error::invalid("max_steps_per_try must be at least 1"));
    }
    let n = instance.params().n;
    let mut rng = rng::stream(cfg.seed, Purpose::Gsat);
    let random_bits = |rng: &mut rng::Rng| -> u64 {
        if n == 64 {
            rng.gen()
        } else {
            rng.gen::<u64>() & ((1u64 << n) - 1)
        }
    };
    let mut search = LocalSearch::new(instance, random_bits(&mut rng));
    let mut out = GsatOutcome {
        solved: false,
        total_steps: 0,
        neighbor_evaluations: 0,
        tries: 1,
        best_cost: search.cost(),
        final_bits: search.bits(),
    };
    let mut ties: Vec<usize> = Vec::with_capacity(n);
    loop {
        let mut steps_this_try = 0;
        while search.cost() > 0 && steps_this_try < cfg.max_steps_per_try {
            if out.total_steps >= cfg.budget {
                out.final_bits = search.bits();
                return Ok(out);
            }
            let mut best = isize::MAX;
            ties.clear();
            for v in 0..n {
                let d = search.delta(v);
                if d < best {
                    best = d;
                    ties.clear();
                }
                if d == best {
                    ties.push(v);
                }
            }
            out.neighbor_evaluations += n as u64;
            if cfg.strict && best >= 0 {
                break;
            }
            let v = ties[rng.gen_range(0..ties.len())];
            search.flip(v);
            out.total_steps += 1;
            steps_this_try += 1;
            out.best_cost = out.best_cost.min(search.cost());
        }
        if search.cost() == 0 {
            out.solved = true;
            out.final_bits = search.bits();
            return Ok(out);
        }
        let restarts_done = out.tries - 1;
        if cfg.max_restarts.is_some_and(|r| restarts_done >= r) || out.total_steps >= cfg.budget {
            out.final_bits = search.bits();
            return Ok(out);
        }
        search.reset(random_bits(&mut rng));
        out.tries += 1;
        out.best_cost = out.best_cost.min(search.cost());
    }
}

/// One deterministic move: the lowest-index neighbor of minimum cost, taken
/// even when it only ties the current cost. Solutions and states whose
/// neighbors are all worse are fixed points.
pub fn gsat_step_deterministic(instance: &SatInstance, s: &Assignment) -> Result<Assignment> {
    let n = instance.params().n;
    if s.len() != n {
        return Err(Error::LengthMismatch(s.len(), n));
    }
    let search = LocalSearch::new(instance, s.bits());
    Ok(Assignment::new(deterministic_move(&search, n).map_or(s.bits(), |v| s.bits() ^ (1 << v)), n))
}

fn deterministic_move(search: &LocalSearch<'_>, n: usize) -> Option<usize> {
    if search.cost() == 0 {
        return None;
    }
    let (v, d) = (0..n).map(|v| (v, search.delta(v))).min_by_key(|&(v, d)| (d, v))?;
    (d <= 0).then_some(v)
}

/// Cost after `t` deterministic moves from `s`.
pub fn gsat_informed_cost(instance: &SatInstance, s: &Assignment, t: usize) -> Result<usize> {
    let n = instance.params().n;
    if s.len() != n {
        return Err(Error::LengthMismatch(s.len(), n));
    }
    let mut search = LocalSearch::new(instance, s.bits());
    for _ in 0..t {
        match deterministic_move(&search, n) {
            Some(v) => search.flip(v),
            None => break,
        }
    }
    Ok(search.cost())
}

/// GSAT-informed costs for all `2^n` states, walking the exact cost table.
pub fn informed_cost_table(costs: &CostTable, t: usize) -> Result<CostTable> {
    let n = costs.n();
    let table = costs.costs();
    let walk = |mut s: usize| -> u8 {
        for _ in 0..t {
            let here = table[s];
            if here == 0 {
                break;
            }
            let mut best = (u8::MAX, usize::MAX);
            for v in 0..n {
                let c = table[s ^ (1 << v)];
                if c < best.0 {
                    best = (c, v);
                }
            }
            if best.0 > here {
                break;
            }
            s ^= 1 << best.1;
        }
        table[s]
    };
    let informed: Vec<u8> = (0..table.len()).into_par_iter().map(walk).collect();
    CostTable::from_costs(n, costs.m(), informed)
}

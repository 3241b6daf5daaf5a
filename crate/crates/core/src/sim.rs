//! Exact statevector simulation of one trial.
//!
//! A step applies the diagonal cost phase `exp(i pi rho_h c(s))` and then the
//! mixing operator `W T W`, where `W` is the normalized Walsh transform and `T`
//! is diagonal with `exp(i pi tau_h |s|)`. Amplification steps instead negate
//! solution amplitudes and apply the diffusion `2|u><u| - I`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::sat::{CostTable, ENUMERATION_LIMIT};
use crate::schedule::{boyer_cap, PhaseSchedule, Schedule};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Equal superposition, every amplitude `2^(-n/2)`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::uniform_with_limit(n, ENUMERATION_LIMIT)
    }

    pub fn uniform_with_limit(n: usize, limit: usize) -> Result<Self> {
        if n > limit {
            return Err(Error::ResourceGuard {
                what: "n",
                got: n,
                limit,
            });
        }
        let len = 1usize << n;
        let a = Complex64::new((-(n as f64) / 2.0).exp2(), 0.0);
        Ok(Self {
            n,
            amps: vec![a; len],
        })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::invalid(format!("{len} amplitudes is not a power of two")));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies each amplitude by `exp(i pi rho c(s))`.
    pub fn apply_cost_phase(&mut self, costs: &CostTable, rho: f64) -> Result<()> {
        self.check_costs(costs)?;
        let factors: Vec<Complex64> = (0..=costs.m())
            .map(|c| Complex64::cis(PI * rho * c as f64))
            .collect();
        for (a, &c) in self.amps.iter_mut().zip(costs.costs()) {
            *a *= factors[c as usize];
        }
        Ok(())
    }

    /// Normalized Walsh transform, in place.
    pub fn fast_walsh(&mut self) {
        butterflies(&mut self.amps);
        let scale = (-(self.n as f64) / 2.0).exp2();
        for a in &mut self.amps {
            *a *= scale;
        }
    }

    /// Applies `W T W` with `T = diag(exp(i pi tau |s|))`.
    pub fn apply_mixing(&mut self, tau: f64) {
        butterflies(&mut self.amps);
        // Both transforms' 2^(-n/2) factors are folded into the diagonal.
        let scale = (-(self.n as f64)).exp2();
        let factors: Vec<Complex64> = (0..=self.n)
            .map(|b| Complex64::cis(PI * tau * b as f64) * scale)
            .collect();
        for (s, a) in self.amps.iter_mut().enumerate() {
            *a *= factors[s.count_ones() as usize];
        }
        butterflies(&mut self.amps);
    }

    /// Negates the amplitudes of zero-cost states.
    pub fn invert_solutions(&mut self, costs: &CostTable) -> Result<()> {
        self.check_costs(costs)?;
        for (a, &c) in self.amps.iter_mut().zip(costs.costs()) {
            if c == 0 {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// Diffusion with elements `u_d = -delta_d0 + 2^(1-n)`: inversion about the mean.
    pub fn apply_diffusion(&mut self) {
        let mean = self.amps.iter().sum::<Complex64>() / self.amps.len() as f64;
        for a in &mut self.amps {
            *a = 2.0 * mean - *a;
        }
    }

    /// Probability of measuring each cost value.
    pub fn cost_histogram(&self, costs: &CostTable) -> Result<CostHistogram> {
        self.check_costs(costs)?;
        let mut pc = vec![0.0; costs.m() + 1];
        for (a, &c) in self.amps.iter().zip(costs.costs()) {
            pc[c as usize] += a.norm_sqr();
        }
        Ok(CostHistogram { pc })
    }

    pub fn solution_probability(&self, costs: &CostTable) -> Result<f64> {
        self.check_costs(costs)?;
        Ok(self
            .amps
            .iter()
            .zip(costs.costs())
            .filter(|(_, &c)| c == 0)
            .map(|(a, _)| a.norm_sqr())
            .sum())
    }

    /// Per-cost mean amplitude and relative deviation.
    pub fn amplitude_stats(&self, costs: &CostTable) -> Result<AmplitudeStats> {
        self.check_costs(costs)?;
        let slots = costs.m() + 1;
        let mut count = vec![0u64; slots];
        let mut sum = vec![Complex64::new(0.0, 0.0); slots];
        for (a, &c) in self.amps.iter().zip(costs.costs()) {
            count[c as usize] += 1;
            sum[c as usize] += a;
        }
        let mean: Vec<Complex64> = sum
            .iter()
            .zip(&count)
            .map(|(s, &k)| if k == 0 { Complex64::new(0.0, 0.0) } else { s / k as f64 })
            .collect();
        let mut sq = vec![0.0f64; slots];
        for (a, &c) in self.amps.iter().zip(costs.costs()) {
            sq[c as usize] += (a - mean[c as usize]).norm_sqr();
        }
        let rows = (0..slots)
            .map(|c| {
                if count[c] == 0 {
                    return CostAmplitude {
                        count: 0,
                        mean: mean[c],
                        relative_deviation: f64::NAN,
                    };
                }
                let std = (sq[c] / count[c] as f64).sqrt();
                let m = mean[c].norm();
                let rel = if std == 0.0 {
                    0.0
                } else if m == 0.0 {
                    f64::INFINITY
                } else {
                    std / m
                };
                CostAmplitude {
                    count: count[c],
                    mean: mean[c],
                    relative_deviation: rel,
                }
            })
            .collect();
        Ok(AmplitudeStats { rows })
    }

    /// Samples one basis state from the measurement distribution.
    pub fn measure(&self, rng: &mut rng::Rng) -> usize {
        let x: f64 = rng.gen::<f64>() * self.norm_sqr();
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if x < acc {
                return i;
            }
        }
        self.amps.len() - 1
    }

    fn check_costs(&self, costs: &CostTable) -> Result<()> {
        if costs.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "cost table over {} variables, state over {}",
                costs.n(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Unnormalized in-place Walsh-Hadamard butterflies, fixed stride order.
fn butterflies(a: &mut [Complex64]) {
    let len = a.len();
    let mut h = 1;
    while h < len {
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
}

/// Mixing-matrix elements by distance,
/// `u_d = (e^{i pi tau/2} cos(pi tau/2))^n (-i tan(pi tau/2))^d`.
pub fn mixing_coefficients(n: usize, tau: f64) -> Result<Vec<Complex64>> {
    let half = PI * tau / 2.0;
    let c = half.cos();
    if !tau.is_finite() || c.abs() < 1e-12 {
        return Err(Error::invalid(format!("tau = {tau} makes the mixing coefficients degenerate")));
    }
    let base = (Complex64::cis(half) * c).powi(n as i32);
    let ratio = Complex64::new(0.0, -half.tan());
    let mut out = Vec::with_capacity(n + 1);
    let mut term = base;
    for _ in 0..=n {
        out.push(term);
        term *= ratio;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostHistogram {
    pub pc: Vec<f64>,
}

impl CostHistogram {
    /// Cost with the largest probability (lowest such cost on ties).
    pub fn peak(&self) -> usize {
        let mut best = 0;
        for (c, &p) in self.pc.iter().enumerate() {
            if p > self.pc[best] {
                best = c;
            }
        }
        best
    }

    pub fn mean_cost(&self) -> f64 {
        self.pc.iter().enumerate().map(|(c, p)| c as f64 * p).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostAmplitude {
    pub count: u64,
    pub mean: Complex64,
    /// Standard deviation over `|mean|`; NaN for unpopulated costs.
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeStats {
    pub rows: Vec<CostAmplitude>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrialOptions {
    pub histograms: bool,
    pub amplitude_stats: bool,
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub psoln: f64,
    /// Per-step histograms, index 0 being the initial state, when requested.
    pub histograms: Vec<CostHistogram>,
    pub amplitude_stats: Vec<AmplitudeStats>,
}

/// Runs one trial from the uniform state.
pub fn run_trial(
    costs: &CostTable,
    schedule: &Schedule,
    opts: TrialOptions,
) -> Result<(StateVector, TrialResult)> {
    run_trial_with_phase_costs(costs, costs, schedule, opts)
}

/// Like [`run_trial`] but with a separate cost table driving the phase
/// operator; solutions are still judged by `costs`.
pub fn run_trial_with_phase_costs(
    costs: &CostTable,
    phase_costs: &CostTable,
    schedule: &Schedule,
    opts: TrialOptions,
) -> Result<(StateVector, TrialResult)> {
    let mut psi = StateVector::uniform(costs.n())?;
    psi.check_costs(phase_costs)?;
    let mut result = TrialResult {
        psoln: 0.0,
        histograms: Vec::new(),
        amplitude_stats: Vec::new(),
    };
    let record = |psi: &StateVector, result: &mut TrialResult| -> Result<()> {
        if opts.histograms {
            result.histograms.push(psi.cost_histogram(costs)?);
        }
        if opts.amplitude_stats {
            result.amplitude_stats.push(psi.amplitude_stats(costs)?);
        }
        Ok(())
    };
    record(&psi, &mut result)?;
    match schedule {
        Schedule::Phased(PhaseSchedule { rho, tau, .. }) => {
            for (&r, &t) in rho.iter().zip(tau) {
                psi.apply_cost_phase(phase_costs, r)?;
                psi.apply_mixing(t);
                record(&psi, &mut result)?;
            }
        }
        Schedule::Amplify { steps } => {
            for _ in 0..*steps {
                psi.invert_solutions(phase_costs)?;
                psi.apply_diffusion();
                record(&psi, &mut result)?;
            }
        }
    }
    result.psoln = psi.solution_probability(costs)?;
    Ok((psi, result))
}

/// Solution probability after every prefix of a phased schedule.
pub fn psoln_by_step(costs: &CostTable, schedule: &PhaseSchedule) -> Result<Vec<f64>> {
    let mut psi = StateVector::uniform(costs.n())?;
    let mut out = vec![psi.solution_probability(costs)?];
    for (&r, &t) in schedule.rho.iter().zip(&schedule.tau) {
        psi.apply_cost_phase(costs, r)?;
        psi.apply_mixing(t);
        out.push(psi.solution_probability(costs)?);
    }
    Ok(out)
}

/// Writes per-step `step,cost,probability,relative_deviation` rows for the
/// populated costs. `stats` may be empty, leaving the last column blank.
pub fn write_histogram_csv<W: std::io::Write>(
    out: W,
    histograms: &[CostHistogram],
    stats: &[AmplitudeStats],
) -> Result<()> {
    if !stats.is_empty() && stats.len() != histograms.len() {
        return Err(Error::LengthMismatch(histograms.len(), stats.len()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "cost", "probability", "relative_deviation"])?;
    for (step, h) in histograms.iter().enumerate() {
        for (c, p) in h.pc.iter().enumerate() {
            let dev = match stats.get(step).map(|s| &s.rows[c]) {
                Some(row) if row.count == 0 => continue,
                Some(row) => format!("{:.11e}", row.relative_deviation),
                None => String::new(),
            };
            w.write_record([step.to_string(), c.to_string(), format!("{p:.11e}"), dev])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Estimates the solution probability by sampling `shots` measurements.
pub fn sampled_psoln(psi: &StateVector, costs: &CostTable, shots: u64, seed: u64) -> Result<f64> {
    psi.check_costs(costs)?;
    if shots == 0 {
        return Err(Error::invalid("need at least one shot"));
    }
    let mut rng = rng::stream(seed, Purpose::Measurement);
    let hits = (0..shots)
        .filter(|_| costs.costs()[psi.measure(&mut rng)] == 0)
        .count();
    Ok(hits as f64 / shots as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoyerOutcome {
    pub steps: u64,
    pub trials: u64,
    pub found: bool,
    /// Largest `M` reached.
    pub max_m: f64,
}

/// Simulates the unknown-solution-count amplification loop: each trial draws
/// `j` uniformly from `0..floor(M)`, runs `j` steps and measures; on failure
/// `M <- min(2^(n/2), 6M/5)`. Stops when a solution is measured or the total
/// step budget is spent.
pub fn run_boyer_loop(costs: &CostTable, seed: u64, budget: u64) -> Result<BoyerOutcome> {
    let mut rng = rng::stream(seed, Purpose::Boyer);
    let cap = boyer_cap(costs.n());
    let mut big_m = 1.0f64;
    let mut max_m = big_m;
    let mut steps = 0u64;
    let mut trials = 0u64;
    loop {
        max_m = max_m.max(big_m);
        let range = (big_m.floor() as u64).max(1);
        let j = rng.gen_range(0..range);
        if steps + j > budget {
            return Ok(BoyerOutcome {
                steps,
                trials,
                found: false,
                max_m,
            });
        }
        let (psi, _) = run_trial(costs, &Schedule::aa(j as usize), TrialOptions::default())?;
        steps += j;
        trials += 1;
        let s = psi.measure(&mut rng);
        if costs.costs()[s] == 0 {
            return Ok(BoyerOutcome {
                steps,
                trials,
                found: true,
                max_m,
            });
        }
        big_m = (6.0 * big_m / 5.0).min(cap);
    }
}

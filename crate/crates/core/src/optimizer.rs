//! Derivative-free tuning of phase schedules.
//!
//! Simulator objectives evaluate one trial per instance of a fixed sample; the
//! ODE objective scores `r(1)` of the pair model. When only the last few steps
//! are free, the state after the fixed prefix is cached per instance and each
//! evaluation runs just the free steps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{soluble_cost_tables, SampleSpec};
use crate::meanfield::{r1_objective, Density, FormFamily, Grid};
use crate::nelder_mead::{self, Bounds, NelderMeadConfig};
use crate::sat::CostTable;
use crate::schedule::{LinearForm, PhaseSchedule, Schedule, ScheduleFile, ScheduleFileKind, TailStep};
use crate::sim::{run_trial, StateVector, TrialOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    /// Median over the sample of `j / Psoln`.
    MedianCost,
    /// Negated median `Psoln`, so smaller is better.
    MedianPsoln,
    /// Mean over the sample of the expected cost of the final state.
    ExpectedFinalCost,
    /// `r(1)` of the pair model.
    OdeR1,
}

/// Which schedule coefficients the optimizer may change.
///
/// The parameter vector is `[r0, r1, t0, t1]` when `free_linear` is set,
/// followed by `(rho, tau)` for each of the last `free_tail` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFamily {
    /// Linear schedule supplying the step count and all fixed steps.
    pub base: ScheduleFile,
    #[serde(default)]
    pub free_linear: bool,
    #[serde(default)]
    pub free_tail: usize,
    /// Half-width of the box around zero for tail phases.
    #[serde(default = "default_tail_bound")]
    pub tail_bound: f64,
}

fn default_tail_bound() -> f64 {
    1.0
}

impl ScheduleFamily {
    pub fn new(base: ScheduleFile, free_linear: bool, free_tail: usize) -> Self {
        Self {
            base,
            free_linear,
            free_tail,
            tail_bound: default_tail_bound(),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.base.kind != ScheduleFileKind::Linear {
            return Err(Error::invalid("the family base must be a linear schedule"));
        }
        if !self.base.tail.is_empty() && self.free_tail > 0 {
            return Err(Error::invalid("base tail and free tail steps cannot be combined"));
        }
        if self.dim() == 0 {
            return Err(Error::invalid("family has no free coefficients"));
        }
        if !(self.tail_bound > 0.0 && self.tail_bound.is_finite()) {
            return Err(Error::invalid("tail bound must be positive"));
        }
        let j = self.base.steps_for(n)?;
        if self.free_tail > j {
            return Err(Error::invalid(format!("{} free tail steps but j = {j}", self.free_tail)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        4 * usize::from(self.free_linear) + 2 * self.free_tail
    }

    fn form(&self) -> LinearForm {
        self.base.coefficients.unwrap_or(LinearForm::PAPER)
    }

    pub fn bounds(&self) -> Result<Bounds> {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        if self.free_linear {
            lower.extend([-8.0, -8.0, 0.0, 0.0]);
            upper.extend([8.0, 8.0, 6.0, 6.0]);
        }
        for _ in 0..2 * self.free_tail {
            lower.push(-self.tail_bound);
            upper.push(self.tail_bound);
        }
        Bounds::new(lower, upper)
    }

    /// The unmodified base schedule, expressed as a parameter vector at `n`.
    pub fn start(&self, n: usize) -> Result<Vec<f64>> {
        self.check(n)?;
        let mut x = Vec::with_capacity(self.dim());
        if self.free_linear {
            x.extend(self.form().to_vec());
        }
        if self.free_tail > 0 {
            let Schedule::Phased(s) = self.base.build(n)? else {
                unreachable!("linear base")
            };
            let j = s.steps();
            for h in j - self.free_tail..j {
                x.extend([s.rho[h], s.tau[h]]);
            }
        }
        let bounds = self.bounds()?;
        bounds.clamp(&mut x);
        Ok(x)
    }

    /// Schedule file for parameters `x`.
    pub fn schedule_file(&self, x: &[f64]) -> Result<ScheduleFile> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch(self.dim(), x.len()));
        }
        let mut file = self.base.clone();
        let rest = if self.free_linear {
            file.coefficients = Some(LinearForm::from_slice(&x[..4])?);
            &x[4..]
        } else {
            x
        };
        if self.free_tail > 0 {
            file.tail = rest.chunks(2).map(|p| TailStep { rho: p[0], tau: p[1] }).collect();
        }
        Ok(file)
    }

    pub fn schedule(&self, x: &[f64], n: usize) -> Result<PhaseSchedule> {
        match self.schedule_file(x)?.build(n)? {
            Schedule::Phased(s) => Ok(s),
            Schedule::Amplify { .. } => unreachable!("linear base"),
        }
    }
}

/// Per-instance trial summary used by the simulator objectives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub psoln: f64,
    pub expected_cost: f64,
}

/// Simulator objective over a fixed sample of soluble instances, all with the same `n`.
pub struct SampleObjective<'a> {
    kind: ObjectiveKind,
    family: ScheduleFamily,
    sample: &'a [CostTable],
    n: usize,
    j: usize,
    /// States after the fixed prefix, when only tail steps are free.
    prefix: Option<Vec<StateVector>>,
}

impl<'a> SampleObjective<'a> {
    pub fn new(kind: ObjectiveKind, family: ScheduleFamily, sample: &'a [CostTable]) -> Result<Self> {
        if kind == ObjectiveKind::OdeR1 {
            return Err(Error::invalid("ode-r1 does not use an instance sample"));
        }
        let first = sample.first().ok_or_else(|| Error::EmptySample("instance sample is empty".into()))?;
        let n = first.n();
        if sample.iter().any(|c| c.n() != n) {
            return Err(Error::invalid("sample instances must share n"));
        }
        if sample.iter().any(|c| c.solution_count() == 0) {
            return Err(Error::invalid("sample contains insoluble instances"));
        }
        family.check(n)?;
        let j = family.base.steps_for(n)?;
        let prefix = if family.free_linear {
            None
        } else {
            let Schedule::Phased(s) = family.base.build(n)? else {
                unreachable!("linear base")
            };
            let fixed = j - family.free_tail;
            let states = sample
                .par_iter()
                .map(|costs| {
                    let mut psi = StateVector::uniform(n)?;
                    for h in 0..fixed {
                        psi.apply_cost_phase(costs, s.rho[h])?;
                        psi.apply_mixing(s.tau[h]);
                    }
                    Ok(psi)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(states)
        };
        Ok(Self {
            kind,
            family,
            sample,
            n,
            j,
            prefix,
        })
    }

    pub fn steps(&self) -> usize {
        self.j
    }

    pub fn family(&self) -> &ScheduleFamily {
        &self.family
    }

    /// Trial summaries for every instance, in sample order.
    pub fn summaries(&self, x: &[f64]) -> Result<Vec<TrialSummary>> {
        let sched = self.family.schedule(x, self.n)?;
        let start = if self.prefix.is_some() { self.j - self.family.free_tail } else { 0 };
        (0..self.sample.len())
            .into_par_iter()
            .map(|i| {
                let costs = &self.sample[i];
                let mut psi = match &self.prefix {
                    Some(states) => states[i].clone(),
                    None => StateVector::uniform(self.n)?,
                };
                for h in start..self.j {
                    psi.apply_cost_phase(costs, sched.rho[h])?;
                    psi.apply_mixing(sched.tau[h]);
                }
                let hist = psi.cost_histogram(costs)?;
                Ok(TrialSummary {
                    psoln: hist.pc[0],
                    expected_cost: hist.mean_cost(),
                })
            })
            .collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let s = self.summaries(x)?;
        Ok(match self.kind {
            ObjectiveKind::MedianCost => median(s.iter().map(|t| trial_cost(self.j, t.psoln)).collect()),
            ObjectiveKind::MedianPsoln => -median(s.iter().map(|t| t.psoln).collect()),
            ObjectiveKind::ExpectedFinalCost => s.iter().map(|t| t.expected_cost).sum::<f64>() / s.len() as f64,
            ObjectiveKind::OdeR1 => unreachable!("rejected in new"),
        })
    }
}

/// Expected steps to a solution, `j / Psoln`; infinite when `Psoln = 0`.
pub fn trial_cost(j: usize, psoln: f64) -> f64 {
    if psoln > 0.0 {
        j as f64 / psoln
    } else {
        f64::INFINITY
    }
}

pub(crate) fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// One objective evaluation, in call order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub x: Vec<f64>,
    pub value: f64,
    pub initial_value: f64,
    pub converged: bool,
    pub trace: Vec<Evaluation>,
}

/// Minimizes `f` from `x0` within `bounds`. The returned value is never worse
/// than the value at `x0`; the trace holds every evaluation in order.
pub fn optimize<F>(mut f: F, x0: &[f64], bounds: &Bounds, cfg: &NelderMeadConfig) -> Result<Optimized>
where
    F: FnMut(&[f64]) -> f64,
{
    if cfg.max_evals == 0 {
        return Err(Error::invalid("budget must allow at least one evaluation"));
    }
    if !bounds.contains(x0) {
        return Err(Error::invalid("initial point lies outside the bounds"));
    }
    let mut trace = Vec::new();
    let found = nelder_mead::minimize(
        |x| {
            let value = f(x);
            trace.push(Evaluation { x: x.to_vec(), value });
            value
        },
        x0,
        Some(bounds),
        cfg,
    )?;
    let initial_value = trace.first().map_or(f64::NAN, |e| e.value);
    let (x, value) = if found.value <= initial_value || initial_value.is_nan() {
        (found.x, found.value)
    } else {
        (x0.to_vec(), initial_value)
    };
    Ok(Optimized {
        x,
        value,
        initial_value,
        converged: found.converged,
        trace,
    })
}

/// Tunes a schedule family against a simulator objective.
pub fn optimize_sample(objective: &SampleObjective, cfg: &NelderMeadConfig) -> Result<Optimized> {
    let x0 = objective.family.start(objective.n)?;
    let bounds = objective.family.bounds()?;
    let mut failure = None;
    let out = optimize(
        |x| match objective.evaluate(x) {
            Ok(v) if v.is_nan() => f64::INFINITY,
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        &x0,
        &bounds,
        cfg,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Minimizes `r(1)` over a phase-function family from its default start.
pub fn optimize_ode_r1(family: &FormFamily, density: &Density, grid: &Grid, cfg: &NelderMeadConfig) -> Result<Optimized> {
    optimize(|x| r1_objective(family, x, density, grid), &family.start(), &family.bounds(), cfg)
}

/// Writes `eval,value,best,x0,x1,...`.
pub fn write_trace_csv<W: std::io::Write>(out: W, trace: &[Evaluation]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let dim = trace.first().map_or(0, |e| e.x.len());
    let mut header = vec!["eval".to_string(), "value".into(), "best".into()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    let mut best = f64::INFINITY;
    for (i, e) in trace.iter().enumerate() {
        best = best.min(e.value);
        let mut row = vec![(i + 1).to_string(), format!("{:.11e}", e.value), format!("{best:.11e}")];
        row.extend(e.x.iter().map(|v| format!("{v:.11e}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Value of a simulator objective for a fixed schedule, used for held-out checks.
pub fn evaluate_schedule(kind: ObjectiveKind, schedule: &Schedule, sample: &[CostTable]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample("instance sample is empty".into()));
    }
    let j = schedule.steps();
    let s: Vec<TrialSummary> = sample
        .par_iter()
        .map(|costs| {
            let (psi, res) = run_trial(costs, schedule, TrialOptions::default())?;
            Ok(TrialSummary {
                psoln: res.psoln,
                expected_cost: psi.cost_histogram(costs)?.mean_cost(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(match kind {
        ObjectiveKind::MedianCost => median(s.iter().map(|t| trial_cost(j, t.psoln)).collect()),
        ObjectiveKind::MedianPsoln => -median(s.iter().map(|t| t.psoln).collect()),
        ObjectiveKind::ExpectedFinalCost => s.iter().map(|t| t.expected_cost).sum::<f64>() / s.len() as f64,
        ObjectiveKind::OdeR1 => return Err(Error::invalid("ode-r1 does not use an instance sample")),
    })
}

/// Optimization run read from JSON.
///
/// Simulator objectives need `sample` and `family`; `ode-r1` needs `form_family`
/// and uses `k`, `mu` from `density`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub objective: ObjectiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<ScheduleFamily>,
    /// Size of a test sample drawn from the next partition; 0 skips it.
    #[serde(default)]
    pub held_out: usize,
    /// Schedule also scored on the test sample, for comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<ScheduleFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form_family: Option<FormFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Density>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub nelder_mead: NelderMeadConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeldOut {
    pub count: usize,
    pub optimized: f64,
    pub baseline: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub objective: ObjectiveKind,
    pub coefficients: Vec<f64>,
    pub value: f64,
    pub initial_value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Best schedule, for simulator objectives.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub held_out: Option<HeldOut>,
    #[serde(skip)]
    pub trace: Vec<Evaluation>,
}

impl OptimizeConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn run_optimization(cfg: &OptimizeConfig) -> Result<OptimizeReport> {
    if cfg.objective == ObjectiveKind::OdeR1 {
        let family = cfg
            .form_family
            .ok_or_else(|| Error::invalid("ode-r1 needs form_family"))?;
        let density = cfg.density.unwrap_or(Density { k: 3, mu: 4.25 });
        let density = Density::new(density.k, density.mu)?;
        let out = optimize_ode_r1(&family, &density, &cfg.grid, &cfg.nelder_mead)?;
        return Ok(report(cfg.objective, out, None, None));
    }
    let spec = cfg.sample.ok_or_else(|| Error::invalid("simulator objectives need a sample"))?;
    let family = cfg.family.clone().ok_or_else(|| Error::invalid("simulator objectives need a family"))?;
    let train = soluble_cost_tables(&spec)?;
    let objective = SampleObjective::new(cfg.objective, family.clone(), &train)?;
    let out = optimize_sample(&objective, &cfg.nelder_mead)?;
    let file = family.schedule_file(&out.x)?;
    let held_out = if cfg.held_out > 0 {
        let test_spec = SampleSpec {
            count: cfg.held_out,
            partition: spec.partition.checked_add(1).ok_or_else(|| Error::invalid("partition overflow"))?,
            ..spec
        };
        let test = soluble_cost_tables(&test_spec)?;
        let optimized = evaluate_schedule(cfg.objective, &file.build(spec.n)?, &test)?;
        let baseline = match &cfg.baseline {
            Some(b) => Some(evaluate_schedule(cfg.objective, &b.build(spec.n)?, &test)?),
            None => None,
        };
        Some(HeldOut {
            count: test.len(),
            optimized,
            baseline,
        })
    } else {
        None
    };
    Ok(report(cfg.objective, out, Some(file), held_out))
}

fn report(objective: ObjectiveKind, out: Optimized, schedule: Option<ScheduleFile>, held_out: Option<HeldOut>) -> OptimizeReport {
    OptimizeReport {
        objective,
        coefficients: out.x,
        value: out.value,
        initial_value: out.initial_value,
        evaluations: out.trace.len(),
        converged: out.converged,
        schedule,
        held_out,
        trace: out.trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{generate_instance, EnsembleParams};
    use crate::meanfield::boundary_search_r1;
    use crate::meanfield::BoundarySearchConfig;
    use crate::schedule::linear_schedule;

    fn sample(n: usize, count: usize) -> Vec<CostTable> {
        let params = EnsembleParams::at_density(n, 3, 4.25).unwrap();
        (0..)
            .map(|seed| generate_instance(params, seed).cost_table().unwrap())
            .filter(|c| c.solution_count() > 0)
            .take(count)
            .collect()
    }

    fn quick() -> NelderMeadConfig {
        NelderMeadConfig {
            max_evals: 60,
            ..NelderMeadConfig::default()
        }
    }

    #[test]
    fn quadratic_minimum_is_recovered() {
        let a = [0.3, -1.7, 2.25];
        let bounds = Bounds::new(vec![-5.0; 3], vec![5.0; 3]).unwrap();
        let out = optimize(
            |x| x.iter().zip(&a).map(|(x, a)| (x - a).powi(2)).sum(),
            &[0.0; 3],
            &bounds,
            &NelderMeadConfig::default(),
        )
        .unwrap();
        for (x, a) in out.x.iter().zip(&a) {
            assert!((x - a).abs() < 1e-6, "{:?}", out.x);
        }
        assert!(out.trace.len() <= NelderMeadConfig::default().max_evals);
    }

    #[test]
    fn cached_prefix_matches_full_trial() {
        let costs = sample(8, 5);
        let family = ScheduleFamily::new(ScheduleFile::paper(), false, 2);
        let obj = SampleObjective::new(ObjectiveKind::MedianCost, family.clone(), &costs).unwrap();
        let x = [0.11, 0.2, -0.3, 0.05];
        let got = obj.summaries(&x).unwrap();
        let sched = Schedule::Phased(family.schedule(&x, 8).unwrap());
        for (c, s) in costs.iter().zip(&got) {
            let want = run_trial(c, &sched, TrialOptions::default()).unwrap().1.psoln;
            assert!((want - s.psoln).abs() < 1e-12);
        }
    }

    #[test]
    fn start_reproduces_base_schedule() {
        let family = ScheduleFamily::new(ScheduleFile::paper(), true, 2);
        let x = family.start(10).unwrap();
        assert_eq!(x.len(), 8);
        assert_eq!(family.schedule(&x, 10).unwrap().rho, linear_schedule(&LinearForm::PAPER, 10).unwrap().rho);
    }

    #[test]
    fn zero_schedule_costs_uniform_measurement() {
        let costs = sample(8, 7);
        let mut base = ScheduleFile::linear(LinearForm::ZERO);
        base.j = Some(3);
        let obj = SampleObjective::new(ObjectiveKind::MedianCost, ScheduleFamily::new(base, true, 0), &costs).unwrap();
        let got = obj.evaluate(&[0.0; 4]).unwrap();
        let want = median(costs.iter().map(|c| 3.0 * 256.0 / c.solution_count() as f64).collect());
        assert!((got - want).abs() < 1e-9 * want);
    }

    #[test]
    fn uniform_expected_cost_is_mean_conflicts() {
        let costs = sample(8, 40);
        let mut base = ScheduleFile::linear(LinearForm::ZERO);
        base.j = Some(1);
        let obj = SampleObjective::new(ObjectiveKind::ExpectedFinalCost, ScheduleFamily::new(base, true, 0), &costs).unwrap();
        let got = obj.evaluate(&[0.0; 4]).unwrap();
        // m p = 34 / 8, less a little because the sample is soluble.
        assert!((got - 34.0 / 8.0).abs() < 0.5, "{got}");
    }

    #[test]
    fn optimizer_never_worse_and_reproducible() {
        let costs = sample(8, 10);
        let family = ScheduleFamily::new(ScheduleFile::paper(), false, 2);
        let obj = SampleObjective::new(ObjectiveKind::MedianCost, family, &costs).unwrap();
        let a = optimize_sample(&obj, &quick()).unwrap();
        let b = optimize_sample(&obj, &quick()).unwrap();
        assert!(a.value <= a.initial_value);
        assert!(a.trace.len() <= 60);
        assert_eq!(a.trace, b.trace);
        assert_eq!(obj.evaluate(&a.x).unwrap(), a.value);
    }

    #[test]
    fn insoluble_or_empty_samples_are_rejected() {
        let family = ScheduleFamily::new(ScheduleFile::paper(), false, 1);
        assert!(matches!(
            SampleObjective::new(ObjectiveKind::MedianCost, family.clone(), &[]),
            Err(Error::EmptySample(_))
        ));
        let bad = CostTable::from_costs(2, 1, vec![1; 4]).unwrap();
        assert!(SampleObjective::new(ObjectiveKind::MedianCost, family, &[bad]).is_err());
    }

    #[test]
    fn trace_csv_tracks_best() {
        let trace = vec![
            Evaluation { x: vec![1.0], value: 3.0 },
            Evaluation { x: vec![2.0], value: 1.0 },
            Evaluation { x: vec![3.0], value: 2.0 },
        ];
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last = text.lines().last().unwrap();
        assert!(last.starts_with("3,2.00000000000e0,1.00000000000e0,3.0"), "{last}");
    }

    #[test]
    fn ode_r1_matches_boundary_search_from_same_start() {
        let density = Density::new(3, 4.25).unwrap();
        let grid = Grid::fixed(400);
        let nm = NelderMeadConfig {
            max_evals: 300,
            ..NelderMeadConfig::default()
        };
        let family = FormFamily::Spiked { eps: 0.05 };
        let ours = optimize_ode_r1(&family, &density, &grid, &nm).unwrap();
        let mut cfg = BoundarySearchConfig::new(family, density);
        cfg.grid = grid;
        cfg.scan = 0;
        cfg.starts = 1;
        cfg.nelder_mead = nm;
        let theirs = boundary_search_r1(&cfg).unwrap();
        // With no scan both polish the same start, so they agree exactly.
        assert_eq!(ours.value, theirs.per_start[0].value);
        assert!(ours.value <= ours.initial_value);
    }

    #[test]
    fn held_out_report_from_config() {
        let cfg = OptimizeConfig::from_json(
            r#"{
                "objective": "median-cost",
                "sample": {"n": 8, "count": 6, "seed": 3},
                "family": {"base": {"kind": "linear"}, "free_tail": 1},
                "held_out": 5,
                "baseline": {"kind": "linear"},
                "nelder_mead": {"max_evals": 20, "step": 0.2}
            }"#,
        )
        .unwrap();
        let rep = run_optimization(&cfg).unwrap();
        assert!(rep.evaluations <= 20 && rep.value <= rep.initial_value);
        let held = rep.held_out.unwrap();
        assert_eq!(held.count, 5);
        assert!(held.optimized.is_finite() && held.baseline.unwrap().is_finite());
        assert_eq!(rep.schedule.unwrap().tail.len(), 1);
    }
}

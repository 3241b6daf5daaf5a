//! Experiment sweeps, per-instance records, and the statistics used on them.
//!
//! Instance seeds come from `(base seed, partition, n, sample slot, attempt)`, so
//! any sample can be regenerated alone and training/test partitions never share
//! an instance. Work runs in parallel but records are always ordered by `n`,
//! slot, and method.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gsat::{gsat_run, informed_cost_table, GsatConfig};
use crate::math::binomial_pmf;
use crate::optimizer::{median, trial_cost};
use crate::rng::derive_seed;
use crate::sat::{generate_instance, CostTable, EnsembleParams, SatInstance, ENUMERATION_LIMIT};
use crate::schedule::{aa_angle, aa_known_cost, aa_psoln, boyer_expected_cost, ScheduleFile};
use crate::sim::{run_boyer_loop, run_trial, sampled_psoln, TrialOptions};

/// Version tag written at the top of every records file.
pub const RECORDS_VERSION: &str = "# qsearch records v1";

const MAX_ATTEMPTS: u64 = 1 << 20;

/// What one sample is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub n: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_mu")]
    pub mu: f64,
    pub count: usize,
    #[serde(default = "default_true")]
    pub soluble_only: bool,
    /// When `mu n` is fractional, odd slots get one clause more than `floor(mu n)`.
    #[serde(default = "default_true")]
    pub mixed_m: bool,
    #[serde(default)]
    pub seed: u64,
    /// Disjoint partitions never share an instance seed.
    #[serde(default)]
    pub partition: u8,
}

impl SampleSpec {
    /// Soluble 3-SAT at density 4.25 with the mixed-m rule.
    pub fn paper(n: usize, count: usize, seed: u64) -> Self {
        Self {
            n,
            k: 3,
            mu: 4.25,
            count,
            soluble_only: true,
            mixed_m: true,
            seed,
            partition: 0,
        }
    }

    pub fn params_for_slot(&self, slot: usize) -> Result<EnsembleParams> {
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid(format!("clause density {} must be finite and non-negative", self.mu)));
        }
        let base = EnsembleParams::at_density(self.n, self.k, self.mu)?;
        let fractional = self.mu * self.n as f64 - base.m as f64 > 1e-9;
        if self.mixed_m && fractional && slot % 2 == 1 {
            EnsembleParams::new(self.n, self.k, base.m + 1)
        } else {
            Ok(base)
        }
    }
}

pub fn instance_seed(seed: u64, partition: u8, n: usize, slot: usize, attempt: u64) -> u64 {
    debug_assert!(partition < 16 && n < 256 && (slot as u64) < 1 << 32 && attempt < MAX_ATTEMPTS);
    derive_seed(
        seed,
        (u64::from(partition) << 60) | ((n as u64) << 52) | (attempt << 32) | slot as u64,
    )
}

#[derive(Debug, Clone)]
pub struct DrawnInstance {
    pub slot: usize,
    pub seed: u64,
    pub instance: SatInstance,
    /// Solution count; `None` when solubility was not checked.
    pub solutions: Option<u64>,
}

/// Draws `spec.count` instances. With `soluble_only`, each slot retries with
/// fresh seeds until it finds a soluble instance.
pub fn draw_sample(spec: &SampleSpec) -> Result<Vec<DrawnInstance>> {
    if spec.count == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    if spec.partition >= 16 {
        return Err(Error::invalid("partition must be below 16"));
    }
    if spec.count as u64 >= 1 << 32 {
        return Err(Error::invalid("too many samples"));
    }
    if spec.soluble_only && spec.n > ENUMERATION_LIMIT {
        return Err(Error::ResourceGuard {
            what: "n",
            got: spec.n,
            limit: ENUMERATION_LIMIT,
        });
    }
    (0..spec.count)
        .into_par_iter()
        .map(|slot| {
            let params = spec.params_for_slot(slot)?;
            for attempt in 0..MAX_ATTEMPTS {
                let seed = instance_seed(spec.seed, spec.partition, spec.n, slot, attempt);
                let instance = generate_instance(params, seed);
                if !spec.soluble_only {
                    return Ok(DrawnInstance {
                        slot,
                        seed,
                        instance,
                        solutions: None,
                    });
                }
                let s = instance.count_solutions()?;
                if s > 0 {
                    return Ok(DrawnInstance {
                        slot,
                        seed,
                        instance,
                        solutions: Some(s),
                    });
                }
            }
            Err(Error::UnsupportedInstance(format!(
                "no soluble instance for n = {}, m = {} after {MAX_ATTEMPTS} draws",
                params.n, params.m
            )))
        })
        .collect()
}

/// Cost tables of a soluble sample, in slot order.
pub fn soluble_cost_tables(spec: &SampleSpec) -> Result<Vec<CostTable>> {
    let spec = SampleSpec {
        soluble_only: true,
        ..*spec
    };
    draw_sample(&spec)?.par_iter().map(|d| d.instance.cost_table()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quantum,
    AaKnownS,
    AaBoyer,
    Gsat,
    QuantumGsatInformed,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Quantum => "quantum",
            Method::AaKnownS => "aa-known-s",
            Method::AaBoyer => "aa-boyer",
            Method::Gsat => "gsat",
            Method::QuantumGsatInformed => "quantum-gsat-informed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::invalid(format!("unknown method {s:?}")))
    }
}

/// How `aa-boyer` obtains its cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoyerMode {
    /// Expected steps from the recursion.
    #[default]
    Expected,
    /// One simulated run of the loop with sampled measurements.
    Sampled,
}

/// Either a list of sizes or an inclusive range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sweep {
    One(usize),
    List(Vec<usize>),
    Range { from: usize, to: usize, step: usize },
}

impl Sweep {
    pub fn values(&self) -> Result<Vec<usize>> {
        let v = match self {
            Sweep::One(n) => vec![*n],
            Sweep::List(v) => v.clone(),
            Sweep::Range { from, to, step } => {
                if *step == 0 {
                    return Err(Error::invalid("sweep step must be positive"));
                }
                (*from..=*to).step_by(*step).collect()
            }
        };
        if v.is_empty() {
            return Err(Error::invalid("empty n sweep"));
        }
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep n values must be strictly increasing"));
        }
        Ok(v)
    }
}

fn default_k() -> usize {
    3
}
fn default_mu() -> f64 {
    4.25
}
fn default_true() -> bool {
    true
}
fn default_informed_steps() -> usize {
    3
}
fn default_budget() -> u64 {
    10_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Single method; merged with `methods`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<Method>,
    pub n: Sweep,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_mu")]
    pub mu: f64,
    pub samples: usize,
    #[serde(default = "default_true")]
    pub soluble_only: bool,
    #[serde(default = "default_true")]
    pub mixed_m: bool,
    /// Quantum schedule; the linear paper form with `j = n` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleFile>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub partition: u8,
    /// GSAT steps behind each informed cost.
    #[serde(default = "default_informed_steps")]
    pub informed_steps: usize,
    #[serde(default)]
    pub boyer: BoyerMode,
    /// Step cap for GSAT and the sampled Boyer loop.
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gsat_max_steps_per_try: Option<usize>,
    #[serde(default)]
    pub gsat_strict: bool,
    /// Estimate quantum `Psoln` from this many sampled measurements instead of exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    /// Records path, used by the CLI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn new(methods: Vec<Method>, n: Sweep, samples: usize, seed: u64) -> Self {
        Self {
            method: None,
            methods,
            n,
            k: default_k(),
            mu: default_mu(),
            samples,
            soluble_only: true,
            mixed_m: true,
            schedule: None,
            seed,
            partition: 0,
            informed_steps: default_informed_steps(),
            boyer: BoyerMode::default(),
            budget: default_budget(),
            gsat_max_steps_per_try: None,
            gsat_strict: false,
            shots: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn all_methods(&self) -> Vec<Method> {
        let mut all: Vec<Method> = self.method.into_iter().chain(self.methods.iter().copied()).collect();
        all.dedup();
        all
    }

    pub fn validate(&self) -> Result<Vec<usize>> {
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        if self.all_methods().is_empty() {
            return Err(Error::invalid("no method given"));
        }
        if self.shots == Some(0) {
            return Err(Error::invalid("shots must be at least 1"));
        }
        let ns = self.n.values()?;
        let quantum = self.all_methods().iter().any(|m| *m != Method::Gsat);
        for &n in &ns {
            if (self.soluble_only || quantum) && n > ENUMERATION_LIMIT {
                return Err(Error::ResourceGuard {
                    what: "n",
                    got: n,
                    limit: ENUMERATION_LIMIT,
                });
            }
            EnsembleParams::new(n, self.k, 0)?;
            self.schedule().build(n)?;
        }
        Ok(ns)
    }

    pub fn schedule(&self) -> ScheduleFile {
        self.schedule.clone().unwrap_or_else(ScheduleFile::paper)
    }

    pub fn spec(&self, n: usize) -> SampleSpec {
        SampleSpec {
            n,
            k: self.k,
            mu: self.mu,
            count: self.samples,
            soluble_only: self.soluble_only,
            mixed_m: self.mixed_m,
            seed: self.seed,
            partition: self.partition,
        }
    }
}

/// One method on one instance.
///
/// For quantum methods `j` is the step count and `psoln` is exact; the informed
/// variant counts a measurement as a success when its GSAT walk reaches a
/// solution, and its cost charges those moves to every trial. For step-count
/// methods (GSAT, sampled Boyer) `j` is the number of tries and `psoln` is 1 when
/// a solution was found. `cost` is always expected or actual steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    #[serde(rename = "S")]
    pub solutions: Option<u64>,
    pub method: Method,
    pub j: u64,
    pub psoln: f64,
    pub cost: f64,
    pub neighbor_evals: Option<u64>,
    /// Failure message; empty on success.
    pub note: String,
}

impl Record {
    pub fn ok(&self) -> bool {
        self.note.is_empty()
    }
}

/// Runs every method on every sampled instance.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let ns = cfg.validate()?;
    let mut records = Vec::new();
    for n in ns {
        let sample = draw_sample(&cfg.spec(n))?;
        records.extend(run_on_instances(cfg, &sample)?);
    }
    Ok(records)
}

/// Runs the configured methods on given instances; records follow input order.
/// Failures on one instance are recorded in its `note` and do not stop the run.
pub fn run_on_instances(cfg: &ExperimentConfig, instances: &[DrawnInstance]) -> Result<Vec<Record>> {
    let methods = cfg.all_methods();
    if methods.is_empty() {
        return Err(Error::invalid("no method given"));
    }
    let schedule = cfg.schedule();
    let per_instance: Vec<Vec<Record>> = instances
        .par_iter()
        .map(|d| {
            let p = d.instance.params();
            let built = schedule.build(p.n);
            let costs = if methods.iter().all(|m| *m == Method::Gsat) {
                Ok(None)
            } else {
                d.instance.cost_table().map(Some)
            };
            let solutions = match &costs {
                Ok(Some(c)) => Some(c.solution_count()),
                _ => d.solutions,
            };
            methods
                .iter()
                .map(|&method| {
                    let mut rec = Record {
                        n: p.n,
                        m: p.m,
                        seed: d.seed,
                        solutions,
                        method,
                        j: 0,
                        psoln: f64::NAN,
                        cost: f64::NAN,
                        neighbor_evals: None,
                        note: String::new(),
                    };
                    let outcome = match (&costs, &built) {
                        (Err(e), _) | (_, Err(e)) => Err(Error::UnsupportedInstance(e.to_string())),
                        (Ok(c), Ok(b)) => run_method(cfg, method, b, d, c.as_ref(), &mut rec),
                    };
                    if let Err(e) = outcome {
                        rec.note = e.to_string();
                    }
                    rec
                })
                .collect()
        })
        .collect();
    Ok(per_instance.into_iter().flatten().collect())
}

fn run_method(
    cfg: &ExperimentConfig,
    method: Method,
    schedule: &crate::schedule::Schedule,
    d: &DrawnInstance,
    costs: Option<&CostTable>,
    rec: &mut Record,
) -> Result<()> {
    let n = d.instance.params().n;
    let need_costs = || costs.ok_or_else(|| Error::invalid("cost table unavailable"));
    match method {
        Method::Quantum | Method::QuantumGsatInformed => {
            let costs = need_costs()?;
            // The informed variant searches for good starting states: a
            // measurement succeeds when the deterministic GSAT walk from it
            // reaches a solution, and that walk is charged to every trial.
            let informed;
            let (judge, extra) = if method == Method::Quantum {
                (costs, 0)
            } else {
                informed = informed_cost_table(costs, cfg.informed_steps)?;
                (&informed, cfg.informed_steps)
            };
            let (psi, res) = run_trial(judge, schedule, TrialOptions::default())?;
            let psoln = match cfg.shots {
                Some(shots) => sampled_psoln(&psi, judge, shots, d.seed)?,
                None => res.psoln,
            };
            rec.j = schedule.steps() as u64;
            rec.psoln = psoln;
            rec.cost = trial_cost(schedule.steps() + extra, psoln);
        }
        Method::AaKnownS => {
            let s = solutions(d, costs)?;
            // Steps bringing (2j+1) theta closest to pi/2.
            let j = (PI / (4.0 * aa_angle(s, n)) - 0.5).round().max(0.0) as u64;
            rec.solutions = Some(s);
            rec.j = j;
            rec.psoln = aa_psoln(s, n, j);
            rec.cost = aa_known_cost(s, n);
        }
        Method::AaBoyer => {
            let s = solutions(d, costs)?;
            rec.solutions = Some(s);
            match cfg.boyer {
                BoyerMode::Expected => {
                    rec.psoln = 1.0;
                    rec.cost = boyer_expected_cost(s, n)?;
                }
                BoyerMode::Sampled => {
                    let out = run_boyer_loop(need_costs()?, d.seed, cfg.budget)?;
                    rec.j = out.trials;
                    rec.psoln = if out.found { 1.0 } else { 0.0 };
                    rec.cost = out.steps as f64;
                }
            }
        }
        Method::Gsat => {
            let mut gc = GsatConfig::for_instance(&d.instance, d.seed);
            gc.budget = cfg.budget;
            gc.strict = cfg.gsat_strict;
            if let Some(t) = cfg.gsat_max_steps_per_try {
                gc.max_steps_per_try = t;
            }
            let out = gsat_run(&d.instance, &gc)?;
            rec.j = out.tries;
            rec.psoln = if out.solved { 1.0 } else { 0.0 };
            rec.cost = out.total_steps as f64;
            rec.neighbor_evals = Some(out.neighbor_evaluations);
        }
    }
    Ok(())
}

fn solutions(d: &DrawnInstance, costs: Option<&CostTable>) -> Result<u64> {
    let s = match (d.solutions, costs) {
        (Some(s), _) => s,
        (None, Some(c)) => c.solution_count(),
        (None, None) => d.instance.count_solutions()?,
    };
    if s == 0 {
        return Err(Error::UnsupportedInstance("instance has no solutions".into()));
    }
    Ok(s)
}

fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes the versioned records CSV.
pub fn write_records_csv<W: std::io::Write>(mut out: W, records: &[Record]) -> Result<()> {
    writeln!(out, "{RECORDS_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "m", "seed", "S", "method", "j", "psoln", "cost", "neighbor_evals", "note"])?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.seed.to_string(),
            r.solutions.map_or(String::new(), |s| s.to_string()),
            r.method.name().to_string(),
            r.j.to_string(),
            fmt_float(r.psoln),
            fmt_float(r.cost),
            r.neighbor_evals.map_or(String::new(), |e| e.to_string()),
            r.note.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: std::io::Read>(input: R) -> Result<Vec<Record>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |what: &str| Error::Parse {
            line,
            msg: format!("bad {what}"),
        };
        let get = |idx: usize| row.get(idx).unwrap_or("");
        let opt = |idx: usize, what: &str| -> Result<Option<u64>> {
            match get(idx) {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(what)),
            }
        };
        out.push(Record {
            n: get(0).parse().map_err(|_| bad("n"))?,
            m: get(1).parse().map_err(|_| bad("m"))?,
            seed: get(2).parse().map_err(|_| bad("seed"))?,
            solutions: opt(3, "S")?,
            method: Method::parse(get(4)).map_err(|_| bad("method"))?,
            j: get(5).parse().map_err(|_| bad("j"))?,
            psoln: get(6).parse().map_err(|_| bad("psoln"))?,
            cost: get(7).parse().map_err(|_| bad("cost"))?,
            neighbor_evals: opt(8, "neighbor_evals")?,
            note: get(9).to_string(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianCi {
    pub median: f64,
    pub lo: f64,
    pub hi: f64,
    /// True when too few values for the requested level; the interval is then the full range.
    pub degenerate: bool,
}

/// Median with a distribution-free interval from binomial order statistics:
/// `[x_(k), x_(n+1-k)]` for the largest `k` with `P(Bin(n, 1/2) < k) <= (1 - level) / 2`.
pub fn median_ci(values: &[f64], level: f64) -> Result<MedianCi> {
    if values.is_empty() {
        return Err(Error::EmptySample("no values for a median".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("confidence level {level} outside (0, 1)")));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("NaN in median input"));
    }
    let mut x = values.to_vec();
    x.sort_by(|a, b| a.total_cmp(b));
    let n = x.len();
    let med = median(x.clone());
    let tail = (1.0 - level) / 2.0;
    let mut k = 0;
    let mut cdf = 0.0;
    // cdf holds P(B <= k - 1) at the top of each pass.
    while k < n / 2 {
        let next = cdf + binomial_pmf(n, 0.5, k);
        if next > tail {
            break;
        }
        cdf = next;
        k += 1;
    }
    let degenerate = n < 6 || k == 0;
    let (lo, hi) = if k == 0 { (x[0], x[n - 1]) } else { (x[k - 1], x[n - k]) };
    Ok(MedianCi {
        median: med,
        lo,
        hi,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub rate: f64,
    pub prefactor: f64,
    /// `ln y - (ln prefactor + rate n)` per point.
    pub residuals: Vec<f64>,
}

/// Least-squares fit of `ln y = ln a + rate n`.
pub fn exp_fit(ns: &[f64], ys: &[f64]) -> Result<ExpFit> {
    if ns.len() != ys.len() {
        return Err(Error::LengthMismatch(ns.len(), ys.len()));
    }
    if ns.len() < 3 {
        return Err(Error::invalid("an exponential fit needs at least 3 points"));
    }
    if ys.iter().any(|y| !(*y > 0.0 && y.is_finite())) {
        return Err(Error::invalid("fit values must be positive and finite"));
    }
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let len = ns.len() as f64;
    let mx = ns.iter().sum::<f64>() / len;
    let my = ly.iter().sum::<f64>() / len;
    let sxx: f64 = ns.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("fit needs at least two distinct n"));
    }
    let sxy: f64 = ns.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let rate = sxy / sxx;
    let intercept = my - rate * mx;
    Ok(ExpFit {
        rate,
        prefactor: intercept.exp(),
        residuals: ns.iter().zip(&ly).map(|(x, y)| y - intercept - rate * x).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub count: usize,
    pub failures: usize,
    pub cost: MedianCi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodFit {
    pub method: Method,
    pub sizes: Vec<SizeSummary>,
    /// Present with at least 3 sizes and finite positive medians.
    pub fit: Option<ExpFit>,
}

/// Median cost per method and `n`, with an exponential fit of the medians.
pub fn fit_records(records: &[Record], level: f64) -> Result<Vec<MethodFit>> {
    let mut methods: Vec<Method> = records.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let mut out = Vec::new();
    for method in methods {
        let mut ns: Vec<usize> = records.iter().filter(|r| r.method == method).map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        let mut sizes = Vec::new();
        for n in ns {
            let group: Vec<&Record> = records.iter().filter(|r| r.method == method && r.n == n).collect();
            let costs: Vec<f64> = group
                .iter()
                .filter(|r| r.ok() && r.solutions != Some(0) && !r.cost.is_nan())
                .map(|r| r.cost)
                .collect();
            if costs.is_empty() {
                continue;
            }
            sizes.push(SizeSummary {
                n,
                count: costs.len(),
                failures: group.len() - costs.len(),
                cost: median_ci(&costs, level)?,
            });
        }
        let xs: Vec<f64> = sizes.iter().map(|s| s.n as f64).collect();
        let ys: Vec<f64> = sizes.iter().map(|s| s.cost.median).collect();
        let fit = exp_fit(&xs, &ys).ok();
        out.push(MethodFit { method, sizes, fit });
    }
    Ok(out)
}

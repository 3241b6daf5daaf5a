//! Phase schedules and amplitude-amplification cost formulas.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of `R(l) = r0 + r1 (1 - l)` and `T(l) = t0 + t1 (1 - l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    pub r0: f64,
    pub r1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl LinearForm {
    /// Coefficients tuned for random 3-SAT at clause density 4.25.
    pub const PAPER: LinearForm = LinearForm {
        r0: 4.86376,
        r1: -4.18118,
        t0: 1.2,
        t1: 3.1,
    };

    pub const ZERO: LinearForm = LinearForm {
        r0: 0.0,
        r1: 0.0,
        t0: 0.0,
        t1: 0.0,
    };

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        match x {
            [r0, r1, t0, t1] => Ok(Self { r0: *r0, r1: *r1, t0: *t0, t1: *t1 }),
            _ => Err(Error::invalid(format!("linear form needs 4 coefficients, got {}", x.len()))),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.r0, self.r1, self.t0, self.t1]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            r0: self.r0 * factor,
            r1: self.r1 * factor,
            t0: self.t0 * factor,
            t1: self.t1 * factor,
        }
    }
}

/// Continuous phase functions `R(lambda)`, `T(lambda)` over a trial.
pub trait PhaseFunctions {
    fn r(&self, lambda: f64) -> f64;
    fn t(&self, lambda: f64) -> f64;
}

impl PhaseFunctions for LinearForm {
    fn r(&self, lambda: f64) -> f64 {
        self.r0 + self.r1 * (1.0 - lambda)
    }

    fn t(&self, lambda: f64) -> f64 {
        self.t0 + self.t1 * (1.0 - lambda)
    }
}

/// Linear form plus a cost-phase term `a / (1 - lambda + eps)` that grows near
/// the end of the trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikedForm {
    pub linear: LinearForm,
    pub spike: f64,
    pub eps: f64,
}

impl PhaseFunctions for SpikedForm {
    fn r(&self, lambda: f64) -> f64 {
        self.linear.r(lambda) + self.spike / (1.0 - lambda + self.eps)
    }

    fn t(&self, lambda: f64) -> f64 {
        self.linear.t(lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Linear,
    Custom,
}

/// Per-step phase slopes: the cost phase is `pi * rho_h * c` and the mixing
/// phase is `pi * tau_h * |s|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    pub kind: ScheduleKind,
    pub rho: Vec<f64>,
    pub tau: Vec<f64>,
}

impl PhaseSchedule {
    pub fn custom(rho: Vec<f64>, tau: Vec<f64>) -> Result<Self> {
        if rho.len() != tau.len() {
            return Err(Error::LengthMismatch(rho.len(), tau.len()));
        }
        if rho.iter().chain(&tau).any(|x| !x.is_finite()) {
            return Err(Error::invalid("phase values must be finite"));
        }
        Ok(Self {
            kind: ScheduleKind::Custom,
            rho,
            tau,
        })
    }

    pub fn steps(&self) -> usize {
        self.rho.len()
    }

    /// True when both schedules give identical operators, comparing phases mod 2.
    pub fn equivalent(&self, other: &Self, tol: f64) -> bool {
        fn same(a: f64, b: f64, tol: f64) -> bool {
            let d = (a - b).rem_euclid(2.0);
            d < tol || 2.0 - d < tol
        }
        self.steps() == other.steps()
            && self.rho.iter().zip(&other.rho).all(|(a, b)| same(*a, *b, tol))
            && self.tau.iter().zip(&other.tau).all(|(a, b)| same(*a, *b, tol))
    }

    /// Replaces the listed steps (1-based `h`) with `(rho, tau)`.
    pub fn with_overrides(&self, overrides: &[StepOverride]) -> Result<Self> {
        let j = self.steps();
        let mut out = self.clone();
        for o in overrides {
            if o.step == 0 || o.step > j {
                return Err(Error::invalid(format!("override step {} outside 1..={j}", o.step)));
            }
            out.rho[o.step - 1] = o.rho;
            out.tau[o.step - 1] = o.tau;
        }
        if !overrides.is_empty() {
            out.kind = ScheduleKind::Custom;
        }
        Ok(out)
    }

    /// Reverses both phase signs; the resulting trial amplitudes are conjugated.
    pub fn negated(&self) -> Self {
        Self {
            kind: self.kind,
            rho: self.rho.iter().map(|x| -x).collect(),
            tau: self.tau.iter().map(|x| -x).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOverride {
    pub step: usize,
    pub rho: f64,
    pub tau: f64,
}

/// `rho_h = R((h-1)/j)/j`, `tau_h = T((h-1)/j)/j` for `h = 1..=j`.
pub fn linear_schedule(form: &impl PhaseFunctions, j: usize) -> Result<PhaseSchedule> {
    if j == 0 {
        return Err(Error::invalid("a linear schedule needs at least one step"));
    }
    let jf = j as f64;
    let (rho, tau) = (0..j)
        .map(|h| {
            let lambda = h as f64 / jf;
            (form.r(lambda) / jf, form.t(lambda) / jf)
        })
        .unzip();
    Ok(PhaseSchedule {
        kind: ScheduleKind::Linear,
        rho,
        tau,
    })
}

/// Step count growing as `n^0.2`, `max(1, round(scale * n^0.2))`.
pub fn sublinear_steps(n: usize, scale: f64) -> usize {
    ((scale * (n as f64).powf(0.2)).round() as usize).max(1)
}

/// What one trial applies at each step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Schedule {
    /// Cost-linear phase and bit-count-linear mixing per step.
    Phased(PhaseSchedule),
    /// Solution phase flip followed by diffusion, `steps` times.
    Amplify { steps: usize },
}

impl Schedule {
    pub fn aa(steps: usize) -> Self {
        Schedule::Amplify { steps }
    }

    pub fn steps(&self) -> usize {
        match self {
            Schedule::Phased(s) => s.steps(),
            Schedule::Amplify { steps } => *steps,
        }
    }
}

/// Schedule description read from JSON, resolved against `n` by [`ScheduleFile::build`].
///
/// `j` defaults to `n`, or to `round(scale * n^0.2)` when `sublinear_scale` is set.
/// `tail` replaces the last `tail.len()` steps, which keeps adjusted final steps
/// in place when `j` changes with `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub kind: ScheduleFileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sublinear_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<LinearForm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tau: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<StepOverride>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tail: Vec<TailStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleFileKind {
    Linear,
    Aa,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailStep {
    pub rho: f64,
    pub tau: f64,
}

impl ScheduleFile {
    /// Paper-form linear schedule with `j = n`.
    pub fn paper() -> Self {
        Self::linear(LinearForm::PAPER)
    }

    pub fn linear(form: LinearForm) -> Self {
        Self {
            kind: ScheduleFileKind::Linear,
            j: None,
            sublinear_scale: None,
            coefficients: Some(form),
            rho: Vec::new(),
            tau: Vec::new(),
            overrides: Vec::new(),
            tail: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Step count used at `n`.
    pub fn steps_for(&self, n: usize) -> Result<usize> {
        if self.kind == ScheduleFileKind::Custom {
            return Ok(self.rho.len());
        }
        match (self.j, self.sublinear_scale) {
            (Some(_), Some(_)) => Err(Error::invalid("give either j or sublinear_scale, not both")),
            (Some(j), None) => Ok(j),
            (None, Some(scale)) if scale > 0.0 && scale.is_finite() => Ok(sublinear_steps(n, scale)),
            (None, Some(scale)) => Err(Error::invalid(format!("sublinear scale {scale} must be positive"))),
            (None, None) => Ok(n),
        }
    }

    pub fn build(&self, n: usize) -> Result<Schedule> {
        let j = self.steps_for(n)?;
        let base = match self.kind {
            ScheduleFileKind::Aa => {
                if self.coefficients.is_some() || !self.rho.is_empty() || !self.overrides.is_empty() || !self.tail.is_empty() {
                    return Err(Error::invalid("an aa schedule takes only j or sublinear_scale"));
                }
                return Ok(Schedule::aa(j));
            }
            ScheduleFileKind::Linear => {
                if !self.rho.is_empty() || !self.tau.is_empty() {
                    return Err(Error::invalid("rho/tau lists belong to custom schedules"));
                }
                linear_schedule(&self.coefficients.unwrap_or(LinearForm::PAPER), j)?
            }
            ScheduleFileKind::Custom => {
                if self.j.is_some() || self.sublinear_scale.is_some() || self.coefficients.is_some() {
                    return Err(Error::invalid("a custom schedule is fixed by its rho/tau lists"));
                }
                PhaseSchedule::custom(self.rho.clone(), self.tau.clone())?
            }
        };
        if self.tail.len() > j {
            return Err(Error::invalid(format!("{} tail steps but only {j} steps", self.tail.len())));
        }
        let mut all = self.overrides.clone();
        let first = j - self.tail.len();
        all.extend(self.tail.iter().enumerate().map(|(i, t)| StepOverride {
            step: first + i + 1,
            rho: t.rho,
            tau: t.tau,
        }));
        if all.iter().any(|o| !o.rho.is_finite() || !o.tau.is_finite()) {
            return Err(Error::invalid("override phases must be finite"));
        }
        Ok(Schedule::Phased(base.with_overrides(&all)?))
    }
}

/// Solution probability after `j` amplification steps, `sin^2((2j+1) theta)`
/// with `theta = asin(sqrt(S / 2^n))`. Zero when `S = 0`.
pub fn aa_psoln(solutions: u64, n: usize, j: u64) -> f64 {
    if solutions == 0 {
        return 0.0;
    }
    let theta = aa_angle(solutions, n);
    ((2 * j + 1) as f64 * theta).sin().powi(2)
}

pub fn aa_angle(solutions: u64, n: usize) -> f64 {
    (solutions as f64 / (n as f64).exp2()).sqrt().min(1.0).asin()
}

/// Success probability when the step count is uniform over `0..M`.
pub fn p_random(big_m: f64, theta: f64) -> f64 {
    let s2 = (2.0 * theta).sin();
    if s2.abs() < 1e-12 {
        // Limits at theta = 0 (no solutions) and theta = pi/2 (all solutions).
        return if theta > PI / 4.0 { 1.0 } else { 0.0 };
    }
    0.5 - (4.0 * big_m * theta).sin() / (4.0 * big_m * s2)
}

/// Known-solution-count cost `(pi/4) sqrt(2^n / S)`.
pub fn aa_known_cost(solutions: u64, n: usize) -> f64 {
    PI / 4.0 * ((n as f64).exp2() / solutions as f64).sqrt()
}

/// Cap on the step-range parameter of the unknown-count loop, `round(2^(n/2))`.
pub fn boyer_cap(n: usize) -> f64 {
    (n as f64 / 2.0).exp2().round()
}

/// Expected total steps of the unknown-solution-count loop starting at `M = 1`.
///
/// `cost(M) = (M-1)/2 + (1 - p_random(M)) cost(min(cap, 6M/5))`, closed at the
/// cap by `cost(cap) = (cap-1) / (2 p_random(cap))`. `M` stays real-valued.
pub fn boyer_expected_cost(solutions: u64, n: usize) -> Result<f64> {
    if solutions == 0 {
        return Err(Error::invalid("no solutions: expected cost diverges"));
    }
    let theta = aa_angle(solutions, n);
    let cap = boyer_cap(n);
    let mut ms = vec![1.0f64];
    while *ms.last().unwrap() < cap {
        let next = (6.0 * ms.last().unwrap() / 5.0).min(cap);
        ms.push(next);
    }
    let last = *ms.last().unwrap();
    let mut cost = (last - 1.0) / (2.0 * p_random(last, theta));
    for &m in ms.iter().rev().skip(1) {
        cost = (m - 1.0) / 2.0 + (1.0 - p_random(m, theta)) * cost;
    }
    Ok(cost)
}

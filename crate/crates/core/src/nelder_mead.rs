//! Bounded Nelder-Mead simplex minimization with restarts.
//!
//! Bounds are handled by projection: every trial point is clamped into the box
//! before evaluation, so the objective never sees an out-of-range point.
//! Non-finite objective values are treated as `+inf`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch(lower.len(), upper.len()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::invalid("lower bound above upper bound"));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((v, lo), hi)| lo <= v && v <= hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NelderMeadConfig {
    pub max_evals: usize,
    /// Stop when the spread of simplex values drops below this.
    pub f_tol: f64,
    /// ... and the simplex diameter below this.
    pub x_tol: f64,
    /// Initial simplex edge along each coordinate.
    pub step: f64,
    /// Fresh simplices built around the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            f_tol: 1e-10,
            x_tol: 1e-8,
            step: 0.25,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evals: usize,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// False when the evaluation budget ran out before the tolerances were met.
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

struct Counter<F> {
    f: F,
    evals: usize,
    limit: usize,
    best: f64,
    best_x: Vec<f64>,
    trace: Vec<TracePoint>,
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        // Hard budget: past the limit points score as infinitely bad without a call.
        if self.evals >= self.limit {
            return f64::INFINITY;
        }
        let v = (self.f)(x);
        let v = if v.is_finite() { v } else { f64::INFINITY };
        self.evals += 1;
        if v < self.best {
            self.best = v;
            self.best_x = x.to_vec();
            self.trace.push(TracePoint {
                evals: self.evals,
                best: v,
            });
        }
        v
    }
}

/// Minimizes `f` from `x0`. The starting point is clamped into `bounds` first.
pub fn minimize<F>(f: F, x0: &[f64], bounds: Option<&Bounds>, cfg: &NelderMeadConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    if dim == 0 {
        return Err(Error::invalid("nothing to optimize"));
    }
    if let Some(b) = bounds {
        if b.dim() != dim {
            return Err(Error::LengthMismatch(b.dim(), dim));
        }
    }
    if cfg.max_evals == 0 || !(cfg.step > 0.0) {
        return Err(Error::invalid("max_evals and step must be positive"));
    }
    let project = |x: &mut Vec<f64>| {
        if let Some(b) = bounds {
            b.clamp(x);
        }
    };
    let mut start = x0.to_vec();
    project(&mut start);
    let mut ctr = Counter {
        f,
        evals: 0,
        limit: cfg.max_evals,
        best: f64::INFINITY,
        best_x: start.clone(),
        trace: Vec::new(),
    };

    let mut converged = false;
    for _round in 0..=cfg.restarts {
        if ctr.evals >= cfg.max_evals {
            break;
        }
        let centre = ctr.best_x.clone();
        converged = run_simplex(&mut ctr, &centre, bounds, cfg, &project);
    }
    if ctr.best.is_infinite() && ctr.evals > 0 && ctr.trace.is_empty() {
        // Every evaluation was non-finite; report the start point.
        ctr.best_x = start;
    }
    Ok(Minimum {
        x: ctr.best_x,
        value: ctr.best,
        evals: ctr.evals,
        converged,
        trace: ctr.trace,
    })
}

fn run_simplex<F: FnMut(&[f64]) -> f64>(
    ctr: &mut Counter<F>,
    centre: &[f64],
    bounds: Option<&Bounds>,
    cfg: &NelderMeadConfig,
    project: &dyn Fn(&mut Vec<f64>),
) -> bool {
    let dim = centre.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    pts.push(centre.to_vec());
    for i in 0..dim {
        let mut x = centre.to_vec();
        x[i] += cfg.step;
        // Step inward when the outward edge would be clamped onto the centre.
        if let Some(b) = bounds {
            if x[i] > b.upper[i] {
                x[i] = centre[i] - cfg.step;
            }
        }
        project(&mut x);
        pts.push(x);
    }
    let mut vals: Vec<f64> = Vec::with_capacity(dim + 1);
    for x in &pts {
        if ctr.evals >= cfg.max_evals {
            return false;
        }
        vals.push(ctr.eval(x));
    }

    loop {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[dim] - vals[0];
        let diameter = pts[1..]
            .iter()
            .map(|x| {
                x.iter()
                    .zip(&pts[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (spread <= cfg.f_tol || (vals[0].is_infinite() && vals[dim].is_infinite()))
            && diameter <= cfg.x_tol
        {
            return true;
        }
        if ctr.evals >= cfg.max_evals {
            return false;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|i| pts[..dim].iter().map(|x| x[i]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(&pts[dim])
                .map(|(c, w)| c + t * (w - c))
                .collect();
            project(&mut x);
            x
        };

        let xr = toward(-1.0);
        let fr = ctr.eval(&xr);
        if fr < vals[0] {
            let xe = toward(-2.0);
            let fe = ctr.eval(&xe);
            if fe < fr {
                pts[dim] = xe;
                vals[dim] = fe;
            } else {
                pts[dim] = xr;
                vals[dim] = fr;
            }
            continue;
        }
        if fr < vals[dim - 1] {
            pts[dim] = xr;
            vals[dim] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[dim] {
            let x = toward(-0.5);
            let v = ctr.eval(&x);
            (x, v)
        } else {
            let x = toward(0.5);
            let v = ctr.eval(&x);
            (x, v)
        };
        if fc < vals[dim].min(fr) {
            pts[dim] = xc;
            vals[dim] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for i in 1..=dim {
            if ctr.evals >= cfg.max_evals {
                return false;
            }
            let mut x: Vec<f64> = pts[i]
                .iter()
                .zip(&pts[0])
                .map(|(a, b)| b + 0.5 * (a - b))
                .collect();
            project(&mut x);
            vals[i] = ctr.eval(&x);
            pts[i] = x;
        }
    }
}

//! Mean-field approximations of the heuristic in the large-j limit.
//!
//! Three levels: the discrete average-amplitude map over cost values, the
//! single-ratio `Z` model (`A_c ~ A_C Z^(c-C)`), and the pair-correlation
//! `(Y, r, theta)` model where `X = r e^{i theta}` plays the role of `Z` and `Y`
//! tracks decay with distance.
//!
//! The r-equation of the pair model carries a factor `p / nu`, i.e.
//! `1 - p(1 - r^2)`; with that factor the model agrees with the `Z` model near
//! `lambda = 0`. The alternative factor `nu` is kept as
//! [`SModelVariant::AsPrinted`] for comparison.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::ensemble::{expected_states, PairStructureTable};
use crate::error::{Error, Result};
use crate::nelder_mead::{self, Bounds, Minimum, NelderMeadConfig};
use crate::rng::{self, Purpose};
use crate::sat::EnsembleParams;
use crate::schedule::{LinearForm, PhaseFunctions, PhaseSchedule, SpikedForm};
use crate::sim::mixing_coefficients;

/// Below this `r` the theta equation's `1/r` term is no longer trusted.
pub const R_FLOOR: f64 = 1e-6;

/// Clause width and density; the continuous models depend on nothing else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub k: usize,
    pub mu: f64,
}

impl Density {
    pub fn new(k: usize, mu: f64) -> Result<Self> {
        if k == 0 || k > 62 || !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::invalid(format!("bad density k = {k}, mu = {mu}")));
        }
        Ok(Self { k, mu })
    }

    pub fn p(&self) -> f64 {
        (-(self.k as f64)).exp2()
    }
}

impl From<EnsembleParams> for Density {
    fn from(e: EnsembleParams) -> Self {
        Self { k: e.k, mu: e.mu() }
    }
}

/// Integration grid on `[0, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Grid {
    pub steps: usize,
    pub end: f64,
    /// Local error tolerance; `Some` switches to step-doubling adaptive RK4,
    /// with `steps` setting the initial step.
    pub adaptive: Option<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            steps: 2000,
            end: 1.0,
            adaptive: None,
        }
    }
}

impl Grid {
    pub fn fixed(steps: usize) -> Self {
        Self {
            steps,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 || !(self.end > 0.0) || !self.end.is_finite() {
            return Err(Error::invalid("grid needs steps >= 1 and a positive end"));
        }
        if let Some(tol) = self.adaptive {
            if !(tol > 0.0) {
                return Err(Error::invalid("adaptive tolerance must be positive"));
            }
        }
        Ok(())
    }
}

type Rhs<'a, const N: usize> = dyn FnMut(f64, &[f64; N]) -> Result<[f64; N]> + 'a;

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

fn rk4_step<const N: usize>(rhs: &mut Rhs<'_, N>, t: f64, y: &[f64; N], h: f64) -> Result<[f64; N]> {
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + h / 2.0, &axpy(y, h / 2.0, &k1))?;
    let k3 = rhs(t + h / 2.0, &axpy(y, h / 2.0, &k2))?;
    let k4 = rhs(t + h, &axpy(y, h, &k3))?;
    Ok(std::array::from_fn(|i| {
        y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

/// Integrates from 0 to `grid.end`, returning every accepted point.
fn integrate<const N: usize>(rhs: &mut Rhs<'_, N>, y0: [f64; N], grid: &Grid) -> Result<Vec<(f64, [f64; N])>> {
    grid.validate()?;
    let mut out = vec![(0.0, y0)];
    let mut y = y0;
    match grid.adaptive {
        None => {
            let h = grid.end / grid.steps as f64;
            for i in 0..grid.steps {
                let t = i as f64 * h;
                y = rk4_step(rhs, t, &y, h)?;
                out.push(((i + 1) as f64 * h, y));
            }
        }
        Some(tol) => {
            let mut t = 0.0;
            let mut h = grid.end / grid.steps as f64;
            let h_min = grid.end * 1e-12;
            while t < grid.end {
                h = h.min(grid.end - t);
                let full = rk4_step(rhs, t, &y, h);
                let half = rk4_step(rhs, t, &y, h / 2.0)
                    .and_then(|mid| rk4_step(rhs, t + h / 2.0, &mid, h / 2.0));
                let (full, fine) = match (full, half) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(e), _) | (_, Err(e)) => {
                        if h / 2.0 < h_min {
                            return Err(e);
                        }
                        h /= 2.0;
                        continue;
                    }
                };
                let err = full
                    .iter()
                    .zip(&fine)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
                    / 15.0;
                if err <= tol || h <= h_min {
                    if h <= h_min && err > tol {
                        return Err(Error::Integration {
                            lambda: t,
                            msg: format!("step size underflow (local error {err:.3e})"),
                        });
                    }
                    t = if grid.end - t - h < h_min { grid.end } else { t + h };
                    // Richardson-corrected value.
                    y = std::array::from_fn(|i| fine[i] + (fine[i] - full[i]) / 15.0);
                    out.push((t, y));
                }
                let grow = if err == 0.0 { 4.0 } else { 0.9 * (tol / err).powf(0.2) };
                h *= grow.clamp(0.2, 4.0);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Z model

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZPoint {
    pub lambda: f64,
    pub z: Complex64,
}

impl ZPoint {
    /// `chi = |Z|^2 p / (1 - p(1 - |Z|^2))`; the dominant cost is `chi m`.
    pub fn chi(&self, density: &Density) -> f64 {
        chi(self.z.norm_sqr(), density.p())
    }

    pub fn f(&self, density: &Density) -> Complex64 {
        f_factor(self.z, density)
    }
}

fn chi(a2: f64, p: f64) -> f64 {
    a2 * p / (1.0 - p * (1.0 - a2))
}

/// `f = exp(-k mu (1 - Z) (p (1 - chi)/(1 - p) - chi / Z))`, with `chi / Z`
/// rewritten as `conj(Z) p / (1 - p(1 - |Z|^2))` so that `Z = 0` is regular.
pub fn f_factor(z: Complex64, density: &Density) -> Complex64 {
    let p = density.p();
    let a2 = z.norm_sqr();
    let chi_v = chi(a2, p);
    let chi_over_z = z.conj() * p / (1.0 - p * (1.0 - a2));
    let one = Complex64::new(1.0, 0.0);
    let inner = (one - z) * (p * (1.0 - chi_v) / (1.0 - p) - chi_over_z);
    (-(density.k as f64) * density.mu * inner).exp()
}

fn z_derivative(z: Complex64, r: f64, t: f64, density: &Density) -> Complex64 {
    let p = density.p();
    let one = Complex64::new(1.0, 0.0);
    let f = f_factor(z, density);
    // i pi Z (R - T/2 k f (1 - p(1-Z))(1-Z) / ((1-p) Z)), multiplied through by Z.
    let mix = t / 2.0 * density.k as f64 * f * (one - p * (one - z)) * (one - z) / (1.0 - p);
    Complex64::new(0.0, PI) * (r * z - mix)
}

/// Integrates the `Z` model from `Z(0) = 1`.
pub fn integrate_z(form: &impl PhaseFunctions, density: &Density, grid: &Grid) -> Result<Vec<ZPoint>> {
    let mut rhs = |l: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        let dz = z_derivative(Complex64::new(y[0], y[1]), form.r(l), form.t(l), density);
        if !dz.re.is_finite() || !dz.im.is_finite() {
            return Err(Error::Integration {
                lambda: l,
                msg: "non-finite Z derivative".into(),
            });
        }
        Ok([dz.re, dz.im])
    };
    Ok(integrate(&mut rhs, [1.0, 0.0], grid)?
        .into_iter()
        .map(|(lambda, y)| ZPoint {
            lambda,
            z: Complex64::new(y[0], y[1]),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// (Y, r, theta) model

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SModelVariant {
    /// r-equation factor `p / nu`, consistent with the `Z` model at small lambda.
    #[default]
    Consistent,
    /// r-equation factor `nu`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SPoint {
    pub lambda: f64,
    pub y: f64,
    pub r: f64,
    /// Unwrapped, in radians.
    pub theta: f64,
}

impl SPoint {
    pub fn nu(&self, density: &Density) -> f64 {
        nu(self.r, density.p())
    }

    pub fn x(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

fn nu(r: f64, p: f64) -> f64 {
    p / (1.0 - p * (1.0 - r * r))
}

/// Right-hand side `(Y', r', theta')` at one point.
pub fn s_derivative(
    state: [f64; 3],
    r_phase: f64,
    t_phase: f64,
    density: &Density,
    variant: SModelVariant,
) -> [f64; 3] {
    let [y, r, th] = state;
    let p = density.p();
    let k = density.k as f64;
    let kmu = k * density.mu;
    let nu = nu(r, p);
    let (s, c) = th.sin_cos();
    let f = (-nu * kmu * (1.0 + r * r - 2.0 * r * c)).exp();
    let g = (nu * kmu * ((1.0 + r * r) * c - 2.0 * r)).exp();
    let b = nu * kmu * (r * r - 1.0) * s;
    let r_factor = match variant {
        SModelVariant::Consistent => p / nu,
        SModelVariant::AsPrinted => nu,
    };
    let dy = PI
        * t_phase
        * (y * y * kmu * f * nu / (1.0 - p) * (1.0 - r) * (1.0 + p * (k * r - 1.0)) * s + g * b.sin());
    let dr = -PI * t_phase / 2.0 * k * y * f * r_factor / (1.0 - p) * s;
    let dth = PI * r_phase
        - PI * t_phase / (2.0 * r)
            * (g / y * ((b - th).cos() - r * r * (b + th).cos()) - f * y * (k - 1.0) * (r - c));
    [dy, dr, dth]
}

/// Integrates the pair model from `(Y, r, theta) = (1, 1, 0)`. Fails with
/// [`Error::Integration`] if `r` falls below [`R_FLOOR`].
pub fn integrate_s(
    form: &impl PhaseFunctions,
    density: &Density,
    grid: &Grid,
    variant: SModelVariant,
) -> Result<Vec<SPoint>> {
    let mut rhs = |l: f64, st: &[f64; 3]| -> Result<[f64; 3]> {
        if !(st[1] >= R_FLOOR) {
            return Err(Error::Integration {
                lambda: l,
                msg: format!("r = {:.3e} below {R_FLOOR:e}; the 1/r term is singular", st[1]),
            });
        }
        let d = s_derivative(*st, form.r(l), form.t(l), density, variant);
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration {
                lambda: l,
                msg: "non-finite derivative".into(),
            });
        }
        Ok(d)
    };
    let pts = integrate(&mut rhs, [1.0, 1.0, 0.0], grid)?;
    if let Some((l, st)) = pts.iter().find(|(_, st)| !(st[1] >= R_FLOOR)) {
        return Err(Error::Integration {
            lambda: *l,
            msg: format!("r = {:.3e} below {R_FLOOR:e}", st[1]),
        });
    }
    Ok(pts
        .into_iter()
        .map(|(lambda, st)| SPoint {
            lambda,
            y: st[0],
            r: st[1],
            theta: st[2],
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Predictions

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsolnPrediction {
    pub probability: f64,
    /// `-(1/n) ln(probability)`.
    pub rate: f64,
}

/// `((1 - p) / (1 - p(1 - r^2)))^m` for an ensemble of fixed size.
pub fn predicted_psoln(r: f64, params: &EnsembleParams) -> PsolnPrediction {
    let p = params.p();
    let ln = params.m as f64 * ((1.0 - p) / (1.0 - p * (1.0 - r * r))).ln();
    PsolnPrediction {
        probability: ln.exp(),
        rate: -ln / params.n as f64,
    }
}

/// Large-n decay rate `-mu ln((1 - p)/(1 - p(1 - r^2)))`.
pub fn predicted_rate(r: f64, density: &Density) -> f64 {
    let p = density.p();
    -density.mu * ((1.0 - p) / (1.0 - p * (1.0 - r * r))).ln()
}

/// States whose dominant cost is known in closed form.
pub trait DominantCost {
    /// Dominant cost divided by `m`.
    fn dominant_fraction(&self, density: &Density) -> f64;
}

impl DominantCost for ZPoint {
    fn dominant_fraction(&self, density: &Density) -> f64 {
        self.chi(density)
    }
}

impl DominantCost for SPoint {
    fn dominant_fraction(&self, density: &Density) -> f64 {
        self.r * self.r * self.nu(density)
    }
}

/// `chi m` for the `Z` model, `r^2 nu m` for the pair model.
pub fn dominant_cost(state: &impl DominantCost, params: &EnsembleParams) -> f64 {
    state.dominant_fraction(&Density::from(*params)) * params.m as f64
}

// ---------------------------------------------------------------------------
// Discrete average-amplitude map

/// `A_C = 2^(-n/2)` for every cost, i.e. the uniform state.
pub fn initial_avg_amplitudes(params: &EnsembleParams) -> Vec<Complex64> {
    vec![Complex64::new((-(params.n as f64) / 2.0).exp2(), 0.0); params.m + 1]
}

/// One step `A'_C = sum_{d,c} u_d e^{i pi rho c} Theta_d(C, c) A_c`.
pub fn avg_amplitude_step(
    a: &[Complex64],
    rho: f64,
    tau: f64,
    structure: &PairStructureTable,
) -> Result<Vec<Complex64>> {
    let params = structure.params();
    let (n, m) = (params.n, params.m);
    if a.len() != m + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} average amplitudes for m = {m}",
            a.len()
        )));
    }
    let u = mixing_coefficients(n, tau)?;
    let phased: Vec<Complex64> = a
        .iter()
        .enumerate()
        .map(|(c, x)| x * Complex64::cis(PI * rho * c as f64))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); m + 1];
    for (big_c, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (d, ud) in u.iter().enumerate() {
            let row = structure.row(d, big_c);
            let inner: Complex64 = row.iter().zip(&phased).map(|(t, x)| x * *t).sum();
            acc += ud * inner;
        }
        *slot = acc;
    }
    Ok(out)
}

/// Iterates the map over a whole schedule; entry 0 is the initial vector.
pub fn avg_amplitude_run(schedule: &PhaseSchedule, structure: &PairStructureTable) -> Result<Vec<Vec<Complex64>>> {
    let mut a = initial_avg_amplitudes(&structure.params());
    let mut out = vec![a.clone()];
    for (&rho, &tau) in schedule.rho.iter().zip(&schedule.tau) {
        a = avg_amplitude_step(&a, rho, tau, structure)?;
        out.push(a.clone());
    }
    Ok(out)
}

/// Solution probability implied by average amplitudes, `v(0) |A_0|^2`.
pub fn avg_amplitude_psoln(a: &[Complex64], params: &EnsembleParams) -> f64 {
    expected_states(params, 0) * a[0].norm_sqr()
}

/// `sum_C v(C) |A_C|^2`. Starts at 1 and decays, since averaging over
/// instances cancels amplitudes whose phases differ between them.
pub fn avg_amplitude_norm(a: &[Complex64], params: &EnsembleParams) -> f64 {
    a.iter()
        .enumerate()
        .map(|(c, x)| expected_states(params, c) * x.norm_sqr())
        .sum()
}

/// Share of the retained norm at cost 0. Tracks how schedules rank far better
/// than the raw [`avg_amplitude_psoln`] once the norm has decayed.
pub fn avg_amplitude_solution_share(a: &[Complex64], params: &EnsembleParams) -> f64 {
    avg_amplitude_psoln(a, params) / avg_amplitude_norm(a, params)
}

/// Least-squares ratio `Z` with `A_{C+1} ~ Z A_C` over costs within two
/// standard deviations of the dominant cost.
pub fn extract_z(a: &[Complex64], params: &EnsembleParams) -> Result<Complex64> {
    if a.len() != params.m + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} average amplitudes for m = {}",
            a.len(),
            params.m
        )));
    }
    let w: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(c, x)| expected_states(params, c) * x.norm_sqr())
        .collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::EmptySample("all average amplitudes vanish".into()));
    }
    let mean = w.iter().enumerate().map(|(c, x)| c as f64 * x).sum::<f64>() / total;
    let var = w
        .iter()
        .enumerate()
        .map(|(c, x)| (c as f64 - mean).powi(2) * x)
        .sum::<f64>()
        / total;
    let peak = w
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .map(|(c, _)| c)
        .unwrap_or(0) as f64;
    let half = 2.0 * var.sqrt();
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for c in 0..params.m {
        if (c as f64 - peak).abs() <= half.max(1.0) {
            num += a[c + 1] * a[c].conj();
            den += a[c].norm_sqr();
        }
    }
    if den == 0.0 {
        return Err(Error::EmptySample("no costs in the fitting window".into()));
    }
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// Trajectory output

/// Writes `lambda,abs_z,arg_z,r,theta,y`; either trajectory may be empty, in
/// which case its columns are left blank. Nonempty trajectories must share a grid.
pub fn write_trajectory_csv<W: std::io::Write>(out: W, z: &[ZPoint], s: &[SPoint]) -> Result<()> {
    if !z.is_empty() && !s.is_empty() && z.len() != s.len() {
        return Err(Error::LengthMismatch(z.len(), s.len()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "abs_z", "arg_z", "r", "theta", "y"])?;
    let rows = z.len().max(s.len());
    let g = |x: f64| format!("{x:.12e}");
    for i in 0..rows {
        let lambda = z.get(i).map(|p| p.lambda).or(s.get(i).map(|p| p.lambda)).unwrap_or(0.0);
        let (az, argz) = z
            .get(i)
            .map_or((String::new(), String::new()), |p| (g(p.z.norm()), g(p.z.arg())));
        let (r, th, y) = s.get(i).map_or((String::new(), String::new(), String::new()), |p| {
            (g(p.r), g(p.theta), g(p.y))
        });
        w.write_record([g(lambda), az, argz, r, th, y])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// End-of-trial search for small r(1)

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FormFamily {
    /// `(r0, r1, t0, t1)`.
    Linear,
    /// `(r0, r1, t0, t1, a)` with `R` gaining `a / (1 - lambda + eps)`.
    Spiked { eps: f64 },
}

impl FormFamily {
    pub fn dim(&self) -> usize {
        match self {
            FormFamily::Linear => 4,
            FormFamily::Spiked { .. } => 5,
        }
    }

    pub fn bounds(&self) -> Bounds {
        let mut lo = vec![-8.0, -8.0, 0.0, 0.0];
        let mut hi = vec![8.0, 8.0, 6.0, 6.0];
        if let FormFamily::Spiked { .. } = self {
            lo.push(-4.0);
            hi.push(4.0);
        }
        Bounds { lower: lo, upper: hi }
    }

    pub fn start(&self) -> Vec<f64> {
        let mut x = LinearForm::PAPER.to_vec();
        if let FormFamily::Spiked { .. } = self {
            x.push(0.0);
        }
        x
    }

    pub fn form(&self, x: &[f64]) -> Result<SpikedForm> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch(x.len(), self.dim()));
        }
        let linear = LinearForm::from_slice(&x[..4])?;
        Ok(match self {
            FormFamily::Linear => SpikedForm {
                linear,
                spike: 0.0,
                eps: 1.0,
            },
            FormFamily::Spiked { eps } => SpikedForm {
                linear,
                spike: x[4],
                eps: *eps,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySearchConfig {
    pub family: FormFamily,
    pub density: Density,
    pub grid: Grid,
    /// Uniform random points evaluated before polishing.
    pub scan: usize,
    /// Best scan points (plus the paper-style start) polished by Nelder-Mead.
    pub starts: usize,
    pub seed: u64,
    pub nelder_mead: NelderMeadConfig,
}

impl BoundarySearchConfig {
    pub fn new(family: FormFamily, density: Density) -> Self {
        Self {
            family,
            density,
            grid: Grid::fixed(1000),
            scan: 6000,
            starts: 6,
            seed: 0,
            nelder_mead: NelderMeadConfig {
                max_evals: 2000,
                step: 0.5,
                ..NelderMeadConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySearchResult {
    pub coefficients: Vec<f64>,
    pub r1: f64,
    /// `r(0.95) / r(0.9)` and `r(1) / r(0.95)` for the best coefficients;
    /// linear vanishing at the end gives roughly 0.5 and 0.
    pub end_ratios: [f64; 2],
    /// True when `r(1) < 0.05` and the approach looks linear in `1 - lambda`.
    pub linear_vanishing: bool,
    pub converged: bool,
    pub per_start: Vec<Minimum>,
}

/// `r(1)` for the given coefficients; trajectories that hit the `r` floor
/// before the end score `1 + (1 - lambda_hit)`, worse than any completed run.
pub fn r1_objective(family: &FormFamily, x: &[f64], density: &Density, grid: &Grid) -> f64 {
    let Ok(form) = family.form(x) else {
        return f64::INFINITY;
    };
    match integrate_s(&form, density, grid, SModelVariant::Consistent) {
        Ok(pts) => pts.last().map_or(f64::INFINITY, |p| p.r),
        Err(Error::Integration { lambda, .. }) => 1.0 + (grid.end - lambda).max(0.0),
        Err(_) => f64::INFINITY,
    }
}

/// Minimizes `r(1)` over the family: a uniform scan of the coefficient box,
/// then Nelder-Mead from the paper-style start and the best scan points.
pub fn boundary_search_r1(cfg: &BoundarySearchConfig) -> Result<BoundarySearchResult> {
    if cfg.starts == 0 {
        return Err(Error::invalid("need at least one start"));
    }
    let bounds = cfg.family.bounds();
    let objective = |x: &[f64]| r1_objective(&cfg.family, x, &cfg.density, &cfg.grid);
    let mut rng = rng::stream(cfg.seed, Purpose::Optimizer);
    let mut scanned: Vec<(f64, Vec<f64>)> = (0..cfg.scan)
        .map(|_| {
            let x: Vec<f64> = bounds
                .lower
                .iter()
                .zip(&bounds.upper)
                .map(|(lo, hi)| rng.gen_range(*lo..=*hi))
                .collect();
            (objective(&x), x)
        })
        .collect();
    scanned.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut x0s = vec![cfg.family.start()];
    x0s.extend(scanned.into_iter().take(cfg.starts).map(|(_, x)| x));
    let mut per_start = Vec::with_capacity(x0s.len());
    for x0 in &x0s {
        per_start.push(nelder_mead::minimize(objective, x0, Some(&bounds), &cfg.nelder_mead)?);
    }
    let best = per_start
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one start")
        .clone();
    let form = cfg.family.form(&best.x)?;
    let traj = integrate_s(&form, &cfg.density, &cfg.grid, SModelVariant::Consistent)?;
    let at = |l: f64| -> f64 {
        traj.iter()
            .min_by(|a, b| (a.lambda - l).abs().total_cmp(&(b.lambda - l).abs()))
            .map_or(f64::NAN, |p| p.r)
    };
    let r1 = traj.last().map_or(f64::NAN, |p| p.r);
    let end_ratios = [at(0.95) / at(0.9), r1 / at(0.95)];
    let linear_vanishing = r1 < 0.05 && (0.3..=0.7).contains(&end_ratios[0]) && end_ratios[1] < 0.5;
    Ok(BoundarySearchResult {
        coefficients: best.x.clone(),
        r1,
        end_ratios,
        linear_vanishing,
        converged: per_start.iter().any(|m| m.converged),
        per_start,
    })
}

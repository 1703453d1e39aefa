//! Control-temperature sweeps and transistor figures of merit.
//!
//! Derivatives with respect to `T_M` are finite differences of steady-state
//! currents. The default step is `max(1e-4, 1e-3·T_M)`, central where
//! `T_M - δ ≥ 0` and forward otherwise.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{DressedSystem, Liouvillian};
use crate::model::{occupation, SpinRingParams};
use crate::qop::{partial_trace, Operator, Site};
use crate::steady::{self, SteadyReport};

/// Slopes smaller than this are treated as exactly flat.
pub const SLOPE_FLOOR: f64 = 1e-14;

/// Population ratios above `1 - POPULATION_EQUALITY` read as infinite temperature.
pub const POPULATION_EQUALITY: f64 = 1e-12;

pub fn default_fd_step(tm: f64) -> f64 {
    1e-4_f64.max(1e-3 * tm)
}

/// A lateral terminal of the transistor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn site(self) -> Site {
        match self {
            Side::L => Site::L,
            Side::R => Site::R,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Central,
    Forward,
}

/// `dJ_p/dT_M` for all three baths at one control temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slopes {
    pub tm: f64,
    pub step: f64,
    pub scheme: Scheme,
    pub dj: [f64; 3],
}

/// Differential thermal resistance `χ_s = (∂J_s/∂T_M)⁻¹`. The slope is kept
/// alongside so a flat current stays representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resistance {
    pub side: Side,
    pub slope: f64,
    /// `1 / slope`, infinite when the slope is below [`SLOPE_FLOOR`].
    pub chi: f64,
}

impl Resistance {
    fn from_slope(side: Side, slope: f64) -> Self {
        let chi = if slope.abs() < SLOPE_FLOOR {
            f64::INFINITY.copysign(slope)
        } else {
            1.0 / slope
        };
        Self { side, slope, chi }
    }

    pub fn is_zero_slope(&self) -> bool {
        self.slope.abs() < SLOPE_FLOOR
    }

    /// The resistance, or [`Error::ZeroSlope`] when it is infinite.
    pub fn finite_chi(&self) -> Result<f64> {
        if self.is_zero_slope() {
            Err(Error::ZeroSlope { slope: self.slope })
        } else {
            Ok(self.chi)
        }
    }
}

/// Amplification factors `α_s = ∂J_s/∂J_M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplification {
    pub alpha_l: f64,
    pub alpha_r: f64,
    pub slopes: Slopes,
}

impl Amplification {
    fn from_slopes(slopes: Slopes) -> Result<Self> {
        let [dl, dm, dr] = slopes.dj;
        if dm.abs() < SLOPE_FLOOR {
            return Err(Error::Divergent { slope: dm });
        }
        Ok(Self {
            alpha_l: dl / dm,
            alpha_r: dr / dm,
            slopes,
        })
    }

    /// Step used for the derivatives.
    pub fn step(&self) -> f64 {
        self.slopes.step
    }
}

/// `(α_L, α_R)` from the resistances: `α_L = -χ_R / (χ_L + χ_R)` and
/// `α_R = -χ_L / (χ_L + χ_R)`, which follows from `α_s = ∂J_s/∂J_M` and
/// `J_M = -J_L - J_R`.
pub fn alpha_from_resistances(chi_l: f64, chi_r: f64) -> (f64, f64) {
    let sum = chi_l + chi_r;
    (-chi_r / sum, -chi_l / sum)
}

/// Thermal populations `(ground, excited)` of a two-level system of
/// frequency `omega` at temperature `temp`.
pub fn thermal_populations(omega: f64, temp: f64) -> (f64, f64) {
    if temp == 0.0 {
        return (1.0, 0.0);
    }
    if temp.is_infinite() {
        return (0.5, 0.5);
    }
    let excited = 1.0 / (1.0 + (omega / temp).exp());
    (1.0 - excited, excited)
}

/// `T_p^loc = ω_p / ln(ρ_p⁰ / ρ_p¹)` from the reduced state of qubit `site`.
pub fn local_temperature(rho: &Operator, p: &SpinRingParams, site: Site) -> Result<f64> {
    let reduced = partial_trace(rho, site)?;
    // basis index 0 of a qubit is its excited level
    let excited = reduced[(0, 0)].re;
    let ground = reduced[(1, 1)].re;
    if excited > ground {
        return Err(Error::PopulationInversion {
            site: site.label(),
            ground,
            excited,
        });
    }
    if excited <= 0.0 {
        return Ok(0.0);
    }
    let ratio = excited / ground;
    if ratio >= 1.0 - POPULATION_EQUALITY {
        return Ok(f64::INFINITY);
    }
    Ok(p.omega[site.index()] / (ground / excited).ln())
}

/// Currents of three independent qubits, each held in its two-level Gibbs
/// state at `local_temps[p]` while exchanging heat with its own bath:
/// `J_p = ω_p κ_p ω_p [n_p(ω_p) ρ⁰ - (1 + n_p(ω_p)) ρ¹]`.
pub fn local_model_currents(p: &SpinRingParams, local_temps: [f64; 3]) -> [f64; 3] {
    Site::ALL.map(|site| {
        let i = site.index();
        let w = p.omega[i];
        let n = occupation(w, p.temp[i]);
        let (ground, excited) = thermal_populations(w, local_temps[i]);
        w * p.kappa[i] * w * (n * ground - (1.0 + n) * excited)
    })
}

/// The spin ring with its generator pieces precomputed; only rates change
/// with `T_M`.
#[derive(Debug, Clone)]
pub struct Transistor {
    params: SpinRingParams,
    system: DressedSystem,
}

impl Transistor {
    pub fn new(params: &SpinRingParams) -> Result<Self> {
        Ok(Self {
            params: *params,
            system: DressedSystem::new(params)?,
        })
    }

    pub fn params(&self) -> &SpinRingParams {
        &self.params
    }

    pub fn system(&self) -> &DressedSystem {
        &self.system
    }

    pub fn liouvillian_at(&self, tm: f64) -> Liouvillian {
        let p = self.params.with_tm(tm);
        self.system.liouvillian(p.kappa, p.temp)
    }

    pub fn currents_at(&self, tm: f64) -> Result<[f64; 3]> {
        Ok(steady::steady_currents(&self.liouvillian_at(tm))?.1)
    }

    pub fn report_at(&self, tm: f64) -> Result<SteadyReport> {
        steady::steady_state(&self.liouvillian_at(tm))
    }

    /// Finite-difference slopes; `delta = None` uses [`default_fd_step`].
    pub fn slopes(&self, tm: f64, delta: Option<f64>) -> Result<Slopes> {
        let step = delta.unwrap_or_else(|| default_fd_step(tm));
        if step.is_nan() || step <= 0.0 || tm < 0.0 {
            return Err(Error::Validation {
                key: "fd_step".into(),
                msg: format!("need step > 0 and T_M >= 0 (step {step}, T_M {tm})"),
            });
        }
        let upper = self.currents_at(tm + step)?;
        let (lower, width, scheme) = if tm - step >= 0.0 {
            (self.currents_at(tm - step)?, 2.0 * step, Scheme::Central)
        } else {
            (self.currents_at(tm)?, step, Scheme::Forward)
        };
        let dj = [0, 1, 2].map(|i| (upper[i] - lower[i]) / width);
        Ok(Slopes {
            tm,
            step,
            scheme,
            dj,
        })
    }

    pub fn diff_resistance(&self, side: Side, tm: f64, delta: Option<f64>) -> Result<Resistance> {
        let slopes = self.slopes(tm, delta)?;
        Ok(Resistance::from_slope(side, slopes.dj[side.site().index()]))
    }

    pub fn amplification(&self, tm: f64, delta: Option<f64>) -> Result<Amplification> {
        Amplification::from_slopes(self.slopes(tm, delta)?)
    }

    /// Evaluates every grid point, in parallel, assembled in grid order.
    pub fn sweep(&self, grid: &[f64], delta: Option<f64>) -> Result<SweepResult> {
        check_grid(grid, self.params.temp[Site::L.index()])?;
        let with_derivatives = grid.len() >= 2;
        let points = grid
            .par_iter()
            .map(|&tm| self.sweep_point(tm, delta, with_derivatives))
            .collect();
        Ok(SweepResult {
            grid: grid.to_vec(),
            points,
        })
    }

    fn sweep_point(&self, tm: f64, delta: Option<f64>, with_derivatives: bool) -> SweepPoint {
        let mut point = SweepPoint::failed(tm, String::new());
        let report = match self.report_at(tm) {
            Ok(r) => r,
            Err(e) => {
                point.error = Some(e.to_string());
                return point;
            }
        };
        point.error = None;
        point.currents = report.currents;
        point.residual = report.residual;
        point.nullspace_dim = report.nullspace_dim;
        point.positivity_floor = report.positivity_floor;
        point.t_loc = Site::ALL.map(|s| local_temperature(&report.rho, &self.params, s).ok());
        if with_derivatives {
            match self.slopes(tm, delta) {
                Ok(slopes) => {
                    point.step = Some(slopes.step);
                    point.chi = Some([
                        Resistance::from_slope(Side::L, slopes.dj[0]).chi,
                        Resistance::from_slope(Side::R, slopes.dj[2]).chi,
                    ]);
                    point.slopes = Some(slopes.dj);
                    point.alpha = Amplification::from_slopes(slopes)
                        .ok()
                        .map(|a| [a.alpha_l, a.alpha_r]);
                }
                Err(e) => point.error = Some(e.to_string()),
            }
        }
        point
    }

    /// Landmarks of `J_M` refined with fresh model evaluations: golden-section
    /// search for the minimum and bisection for the zero crossing.
    pub fn find_landmarks(&self, sweep: &SweepResult) -> Result<Landmarks> {
        let (lo, hi) = bracket_minimum(sweep)?;
        let jm = |t: f64| self.currents_at(t).map(|j| j[1]);
        let tm_min = golden_section(lo, hi, 1e-7, &jm)?;
        let jm_min = jm(tm_min)?;

        let (a, b) = bracket_zero(sweep)?;
        let tm_zero = bisect(a, b, 1e-10, &jm)?;
        let alpha = self.amplification(tm_zero, None)?;
        Ok(Landmarks {
            tm_jm_min: tm_min,
            jm_min,
            tm_jm_zero: tm_zero,
            alpha_at_zero: alpha.alpha_l,
            currents_at_zero: self.currents_at(tm_zero)?,
        })
    }
}

fn check_grid(grid: &[f64], t_hot: f64) -> Result<()> {
    let bad = |msg: String| Error::Validation {
        key: "grid".into(),
        msg,
    };
    if grid.is_empty() {
        return Err(bad("empty grid".into()));
    }
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0 || *t > t_hot) {
        return Err(bad(format!("values must lie in [0, T_L = {t_hot}]")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub tm: f64,
    pub currents: [f64; 3],
    /// `dJ_p/dT_M`; `None` when derivatives are unavailable.
    pub slopes: Option<[f64; 3]>,
    pub step: Option<f64>,
    /// `α_L, α_R`; `None` at a divergence or when derivatives are unavailable.
    pub alpha: Option<[f64; 2]>,
    /// `χ_L, χ_R` (possibly infinite).
    pub chi: Option<[f64; 2]>,
    /// Local temperatures; `None` under population inversion.
    pub t_loc: [Option<f64>; 3],
    pub residual: f64,
    pub nullspace_dim: usize,
    pub positivity_floor: f64,
    pub error: Option<String>,
}

impl SweepPoint {
    fn failed(tm: f64, error: String) -> Self {
        Self {
            tm,
            currents: [f64::NAN; 3],
            slopes: None,
            step: None,
            alpha: None,
            chi: None,
            t_loc: [None; 3],
            residual: f64::NAN,
            nullspace_dim: 0,
            positivity_floor: f64::NAN,
            error: Some(error),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// True when the grid is too short for derivatives.
    pub fn is_degenerate(&self) -> bool {
        self.grid.len() < 2
    }

    /// `(T_M, J_M)` for every successful point.
    pub fn jm_series(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.is_ok())
            .map(|p| (p.tm, p.currents[1]))
            .collect()
    }

    /// Builds a sweep from precomputed `(T_M, J_M)` pairs; the other fields
    /// are left empty. Useful for analysing external data.
    pub fn from_jm_series(series: &[(f64, f64)]) -> Self {
        let points = series
            .iter()
            .map(|&(tm, jm)| {
                let mut p = SweepPoint::failed(tm, String::new());
                p.error = None;
                p.currents = [f64::NAN, jm, f64::NAN];
                p
            })
            .collect();
        Self {
            grid: series.iter().map(|s| s.0).collect(),
            points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmarks {
    pub tm_jm_min: f64,
    pub jm_min: f64,
    pub tm_jm_zero: f64,
    /// `α_L` at the zero crossing.
    pub alpha_at_zero: f64,
    pub currents_at_zero: [f64; 3],
}

/// Grid neighbours around the lowest interior local minimum of `J_M`.
fn bracket_minimum(sweep: &SweepResult) -> Result<(f64, f64)> {
    let s = sweep.jm_series();
    let best = (1..s.len().saturating_sub(1))
        .filter(|&i| s[i].1 <= s[i - 1].1 && s[i].1 <= s[i + 1].1)
        .filter(|&i| s[i].1 < s[i - 1].1 || s[i].1 < s[i + 1].1)
        .min_by(|&a, &b| s[a].1.total_cmp(&s[b].1))
        .ok_or(Error::NotFound("no interior local minimum of J_M"))?;
    Ok((s[best - 1].0, s[best + 1].0))
}

/// First grid interval over which `J_M` changes sign.
fn bracket_zero(sweep: &SweepResult) -> Result<(f64, f64)> {
    let s = sweep.jm_series();
    s.windows(2)
        .find(|w| w[0].1 == 0.0 || w[0].1.signum() != w[1].1.signum())
        .map(|w| (w[0].0, w[1].0))
        .ok_or(Error::NotFound("J_M does not change sign"))
}

/// Vertex of the parabola through the three grid points around the
/// interior minimum of `J_M`, from sweep data alone.
pub fn parabolic_minimum(sweep: &SweepResult) -> Result<(f64, f64)> {
    let s = sweep.jm_series();
    let (lo, _) = bracket_minimum(sweep)?;
    let i = s.iter().position(|p| p.0 == lo).unwrap() + 1;
    let (x0, y0) = s[i - 1];
    let (x1, y1) = s[i];
    let (x2, y2) = s[i + 1];
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let curvature = (d1 - d0) / (x2 - x0);
    if curvature <= 0.0 {
        return Ok((x1, y1));
    }
    // y = y1 + b (x - x1) + c (x - x0)(x - x1) expanded around x1
    let b = d0 + curvature * (x1 - x0);
    let x = x1 - b / (2.0 * curvature);
    let y = y1 + b * (x - x1) + curvature * (x - x1) * (x - x1);
    Ok((x, y))
}

/// Zero of `J_M` by linear interpolation across the bracketing grid points.
pub fn interpolated_zero(sweep: &SweepResult) -> Result<f64> {
    let (a, b) = bracket_zero(sweep)?;
    let s = sweep.jm_series();
    let ya = s.iter().find(|p| p.0 == a).unwrap().1;
    let yb = s.iter().find(|p| p.0 == b).unwrap().1;
    if ya == yb {
        return Ok(a);
    }
    Ok(a - ya * (b - a) / (yb - ya))
}

fn golden_section(mut a: f64, mut b: f64, tol: f64, f: &impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

fn bisect(mut a: f64, mut b: f64, tol: f64, f: &impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut fa = f(a)?;
    if fa == 0.0 {
        return Ok(a);
    }
    while (b - a) > tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Sweep of `T_M` over `grid` for the given parameters.
pub fn sweep(p: &SpinRingParams, grid: &[f64]) -> Result<SweepResult> {
    Transistor::new(p)?.sweep(grid, None)
}

pub fn diff_resistance(p: &SpinRingParams, side: Side, tm: f64, delta: Option<f64>) -> Result<Resistance> {
    Transistor::new(p)?.diff_resistance(side, tm, delta)
}

pub fn amplification(p: &SpinRingParams, tm: f64, delta: Option<f64>) -> Result<Amplification> {
    Transistor::new(p)?.amplification(tm, delta)
}

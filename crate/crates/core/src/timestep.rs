//! Explicit time integration, CFL control and steady-state monitoring.

use std::str::FromStr;

use crate::error::{CellIndex, Error, Result};
use crate::field::StateField;
use crate::mesh::Grid;
use crate::systems::HyperbolicSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    Euler,
    #[default]
    Rk2,
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Integrator::Euler),
            "rk2" => Ok(Integrator::Rk2),
            _ => Err(Error::Config(format!("unknown integrator '{s}' (euler|rk2)"))),
        }
    }
}

impl Integrator {
    pub fn name(self) -> &'static str {
        match self {
            Integrator::Euler => "euler",
            Integrator::Rk2 => "rk2",
        }
    }
}

pub const DEFAULT_CFL: f64 = 0.45;
pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub integrator: Integrator,
    pub cfl: f64,
    pub t_final: f64,
    pub max_steps: usize,
    /// Stop once the normalized steady residual drops to this value; 0 disables.
    pub steady_tol: f64,
    pub fixed_dt: Option<f64>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            integrator: Integrator::Rk2,
            cfl: DEFAULT_CFL,
            t_final: 1.0,
            max_steps: DEFAULT_MAX_STEPS,
            steady_tol: 0.0,
            fixed_dt: None,
        }
    }
}

impl TimeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::Config(format!("t_final must be >= 0, got {}", self.t_final)));
        }
        if !(self.steady_tol >= 0.0) {
            return Err(Error::Config(format!("steady_tol must be >= 0, got {}", self.steady_tol)));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("fixed dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }
}

/// Largest wave speed over interior cells.
pub fn max_speed<const N: usize, S: HyperbolicSystem<N>>(sys: &S, q: &StateField<N>) -> Result<f64> {
    let mut m = 0.0_f64;
    for (i, j, v) in q.interior() {
        let l = sys.max_wave_speed(v).map_err(|e| e.at_cell(i, j))?;
        if !l.is_finite() {
            return Err(Error::NonFiniteSpeed {
                cell: CellIndex { i, j },
            });
        }
        m = m.max(l);
    }
    Ok(m)
}

/// `cfl * min(dx, dy) / max lambda`.
pub fn stable_dt<const N: usize, S: HyperbolicSystem<N>>(
    grid: &Grid,
    sys: &S,
    q: &StateField<N>,
    cfl: f64,
) -> Result<f64> {
    let lam = max_speed(sys, q)?;
    if !(lam > 0.0) {
        return Err(Error::Config("maximum wave speed is zero".into()));
    }
    Ok(cfl * grid.dx.min(grid.dy) / lam)
}

pub fn step_euler<const N: usize>(
    q: &StateField<N>,
    dt: f64,
    mut rate: impl FnMut(&StateField<N>) -> Result<StateField<N>>,
) -> Result<StateField<N>> {
    let l = rate(q)?;
    Ok(euler_with(q, dt, &l))
}

/// Heun's method: `q* = q + dt L(q)`, `q_next = (q + q* + dt L(q*)) / 2`.
pub fn step_rk2<const N: usize>(
    q: &StateField<N>,
    dt: f64,
    mut rate: impl FnMut(&StateField<N>) -> Result<StateField<N>>,
) -> Result<StateField<N>> {
    let l = rate(q)?;
    rk2_with(q, dt, &l, rate)
}

fn euler_with<const N: usize>(q: &StateField<N>, dt: f64, l: &StateField<N>) -> StateField<N> {
    let mut out = q.clone();
    out.axpy(dt, l);
    out
}

fn rk2_with<const N: usize>(
    q: &StateField<N>,
    dt: f64,
    l0: &StateField<N>,
    mut rate: impl FnMut(&StateField<N>) -> Result<StateField<N>>,
) -> Result<StateField<N>> {
    let stage = euler_with(q, dt, l0);
    let l1 = rate(&stage)?;
    let mut out = q.clone();
    out.axpy(1.0, &stage);
    out.axpy(dt, &l1);
    Ok(out.map(|v| v.map(|x| 0.5 * x)))
}

/// L∞ of a rate field over interior cells and components.
pub fn rate_norm<const N: usize>(rate: &StateField<N>) -> f64 {
    rate.interior_max_abs().iter().cloned().fold(0.0, f64::max)
}

/// Normalized steady residual `|rate|_∞ / scale`.
pub fn steady_residual<const N: usize>(rate: &StateField<N>, scale: f64) -> f64 {
    rate_norm(rate) / scale
}

/// Normalization of the steady residual: the initial rate, bounded below by
/// `|q0| / dt0` so exact equilibria read as the round-off change per step.
pub fn residual_scale(initial_rate: f64, physical: f64) -> f64 {
    let s = initial_rate.max(physical);
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FinalTime,
    Steady,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunStats {
    pub steps: usize,
    pub t: f64,
    pub termination: Termination,
    /// Normalized steady residual measured at the start of every step, plus the final state.
    pub residuals: Vec<f64>,
    pub residual_scale: f64,
}

impl RunStats {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Integrates from `q0` until `t_final`, the steady tolerance or `max_steps`.
///
/// `rate` maps an interior field to its semi-discrete rate (filling ghosts
/// itself). `observe` is called after every accepted step with `(step, t, q)`.
pub fn integrate<const N: usize, S: HyperbolicSystem<N>>(
    grid: &Grid,
    sys: &S,
    q0: StateField<N>,
    cfg: &TimeConfig,
    mut rate: impl FnMut(&StateField<N>) -> Result<StateField<N>>,
    mut observe: impl FnMut(usize, f64, &StateField<N>),
) -> Result<(StateField<N>, RunStats)> {
    cfg.validate()?;
    let mut q = q0;
    check_field(sys, &q).map_err(|e| e.at_step(0))?;
    let lam0 = max_speed(sys, &q)?;
    let qref = rate_norm(&q).max(f64::MIN_POSITIVE);
    let dt0 = match cfg.fixed_dt {
        Some(dt) => dt,
        None if lam0 > 0.0 => cfg.cfl * grid.dx.min(grid.dy) / lam0,
        None => f64::INFINITY,
    };
    let mut l = rate(&q).map_err(|e| e.at_step(0))?;
    let scale = residual_scale(rate_norm(&l), qref / dt0);
    let mut stats = RunStats {
        steps: 0,
        t: 0.0,
        termination: Termination::FinalTime,
        residuals: Vec::new(),
        residual_scale: scale,
    };
    let eps = 1e-12 * cfg.t_final.max(1.0);
    loop {
        let res = steady_residual(&l, scale);
        stats.residuals.push(res);
        if cfg.steady_tol > 0.0 && res <= cfg.steady_tol {
            stats.termination = Termination::Steady;
            break;
        }
        if stats.t >= cfg.t_final - eps {
            stats.termination = Termination::FinalTime;
            break;
        }
        if stats.steps >= cfg.max_steps {
            stats.termination = Termination::MaxSteps;
            break;
        }
        let n = stats.steps + 1;
        let mut dt = match cfg.fixed_dt {
            Some(dt) => dt,
            None => stable_dt(grid, sys, &q, cfg.cfl).map_err(|e| e.at_step(n))?,
        };
        let remaining = cfg.t_final - stats.t;
        let last = dt >= remaining - eps;
        if last {
            dt = remaining;
        }
        let next = match cfg.integrator {
            Integrator::Euler => euler_with(&q, dt, &l),
            Integrator::Rk2 => rk2_with(&q, dt, &l, &mut rate).map_err(|e| e.at_step(n))?,
        };
        check_field(sys, &next).map_err(|e| e.at_step(n))?;
        q = next;
        stats.steps = n;
        stats.t = if last { cfg.t_final } else { stats.t + dt };
        observe(n, stats.t, &q);
        l = rate(&q).map_err(|e| e.at_step(n))?;
    }
    Ok((q, stats))
}

/// Admissibility and finiteness of every interior cell.
pub fn check_field<const N: usize, S: HyperbolicSystem<N>>(sys: &S, q: &StateField<N>) -> Result<()> {
    for (i, j, v) in q.interior() {
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::inadmissible("non-finite value", v).at_cell(i, j));
        }
        sys.check(v).map_err(|e| e.at_cell(i, j))?;
    }
    Ok(())
}

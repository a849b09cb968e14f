//! Case runs: setup, time integration, error and audit collection.

use std::fmt::Write as _;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::cases::{perturb_density, CaseSetup, CaseSpec, Setup};
use crate::diagnostics::{acoustic_energy, error_norms, scaled_linf_error, ConservationAudit, ErrorNorms};
use crate::error::{Error, Result};
use crate::field::StateField;
use crate::fv::DEFAULT_THETA;
use crate::mesh::Grid;
use crate::scheme::{Discretization, Scheme, SchemeKind};
use crate::systems::{Acoustics, Euler, HyperbolicSystem, ShallowWater};
use crate::timestep::{integrate, max_speed, RunStats, TimeConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub scheme: SchemeKind,
    pub theta: f64,
    pub time: TimeConfig,
    /// Snapshot every `k` steps; `None` reports the final field only.
    pub output_every: Option<usize>,
}

impl RunOptions {
    pub fn new(scheme: SchemeKind, t_final: f64) -> Self {
        RunOptions {
            scheme,
            theta: DEFAULT_THETA,
            time: TimeConfig {
                t_final,
                ..TimeConfig::default()
            },
            output_every: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Acoustics(StateField<3>),
    Euler(StateField<4>),
    ShallowWater(StateField<3>),
}

impl Field {
    pub fn component_names(&self) -> Vec<&'static str> {
        match self {
            Field::Acoustics(_) => Acoustics.component_names().to_vec(),
            Field::Euler(_) => Euler::default().component_names().to_vec(),
            Field::ShallowWater(_) => ShallowWater::default().component_names().to_vec(),
        }
    }

    pub fn all_finite(&self) -> bool {
        match self {
            Field::Acoustics(q) | Field::ShallowWater(q) => q.all_finite(),
            Field::Euler(q) => q.all_finite(),
        }
    }

    /// Interior values as rows `[v_0, ..., v_{N-1}]`, y-outer order.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        fn collect<const N: usize>(q: &StateField<N>) -> Vec<Vec<f64>> {
            q.interior().map(|(_, _, v)| v.to_vec()).collect()
        }
        match self {
            Field::Acoustics(q) | Field::ShallowWater(q) => collect(q),
            Field::Euler(q) => collect(q),
        }
    }

    /// SHA-256 over the little-endian bytes of the interior values.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for r in self.rows() {
            for v in r {
                h.update(v.to_le_bytes());
            }
        }
        hex(&h.finalize())
    }

    /// CSV with a `# config_hash=` line, a header `x,y,<components>` and one row per cell.
    pub fn to_csv(&self, grid: &Grid, config_hash: &str) -> String {
        let mut s = format!("# config_hash={config_hash}\nx,y,{}\n", self.component_names().join(","));
        let rows = self.rows();
        let mut it = rows.iter();
        for j in 1..=grid.ny {
            for i in 1..=grid.nx {
                let (x, y) = grid.cell_center(i, j);
                let _ = write!(s, "{x},{y}");
                for v in it.next().expect("row count matches grid") {
                    let _ = write!(s, ",{v}");
                }
                s.push('\n');
            }
        }
        s
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub grid: Grid,
    pub field: Field,
    pub stats: RunStats,
    pub errors: Option<ErrorNorms>,
    pub conservation_drift: Vec<f64>,
    /// Acoustic energy at every step, starting with the initial field.
    pub energy: Vec<f64>,
    pub dts: Vec<f64>,
    pub wall_time: f64,
    pub max_mach: Option<f64>,
    /// `‖ρu - (ρu)_exact‖∞ / ‖(ρu)_exact‖∞` for Euler cases with a reference.
    pub scaled_momentum_error: Option<f64>,
    pub pre_run_digest: Option<String>,
    /// Smallest density (Euler) or depth (shallow water) of the final field.
    pub min_density: Option<f64>,
}

fn scheme_of(opts: &RunOptions) -> Result<Scheme> {
    Scheme::from_kind(opts.scheme, opts.theta)
}

struct Partial<const N: usize> {
    q: StateField<N>,
    stats: RunStats,
    drift: Vec<f64>,
    energy: Vec<f64>,
    dts: Vec<f64>,
}

fn simulate<const N: usize, S: HyperbolicSystem<N>>(
    grid: &Grid,
    sys: &S,
    setup: Setup<N>,
    opts: &RunOptions,
    energy: Option<fn(&StateField<N>, &Grid) -> f64>,
    mut snapshot: impl FnMut(usize, f64, &StateField<N>),
) -> Result<Partial<N>> {
    let lam = max_speed(sys, &setup.q)?;
    let disc = Discretization::new(grid, sys, setup.bc, setup.bathymetry, scheme_of(opts)?)
        .with_reference_speed(if lam > 0.0 { lam } else { 1.0 });
    let mut audit = ConservationAudit::new(&setup.q);
    let mut en = energy.map(|e| vec![e(&setup.q, grid)]).unwrap_or_default();
    let mut dts = Vec::new();
    let mut t_prev = 0.0;
    let every = opts.output_every;
    let (q, stats) = integrate(grid, sys, setup.q, &opts.time, |q| disc.rate(q), |n, t, q| {
        audit.observe(q);
        if let Some(e) = energy {
            en.push(e(q, grid));
        }
        dts.push(t - t_prev);
        t_prev = t;
        if every.is_some_and(|k| k > 0 && n % k == 0) {
            snapshot(n, t, q);
        }
    })?;
    Ok(Partial {
        q,
        stats,
        drift: audit.drift().to_vec(),
        energy: en,
        dts,
    })
}

fn min_component<const N: usize>(q: &StateField<N>, k: usize) -> f64 {
    q.interior().map(|(_, _, v)| v[k]).fold(f64::INFINITY, f64::min)
}

/// Runs one case on an `nx × ny` mesh. `snapshot` receives intermediate fields
/// at the cadence of `opts.output_every`.
pub fn run_case(
    spec: &CaseSpec,
    nx: usize,
    ny: usize,
    opts: &RunOptions,
    mut snapshot: impl FnMut(usize, f64, &Field),
) -> Result<RunOutcome> {
    let grid = spec.grid(nx, ny)?;
    let start = Instant::now();
    let setup = spec.init_case(&grid)?;
    let mut pre_run_digest = None;
    let mut max_mach = None;
    let (field, stats, drift, energy, dts) = match setup {
        CaseSetup::Acoustics(s) => {
            let p = simulate(&grid, &Acoustics, s, opts, Some(acoustic_energy), |n, t, q| {
                snapshot(n, t, &Field::Acoustics(q.clone()))
            })?;
            (Field::Acoustics(p.q), p.stats, p.drift, p.energy, p.dts)
        }
        CaseSetup::ShallowWater(s) => {
            let sys = ShallowWater::default();
            let p = simulate(&grid, &sys, s, opts, None, |n, t, q| {
                snapshot(n, t, &Field::ShallowWater(q.clone()))
            })?;
            (Field::ShallowWater(p.q), p.stats, p.drift, p.energy, p.dts)
        }
        CaseSetup::Euler(mut s) => {
            let sys = Euler::default();
            if let (CaseSpec::EulerVortexPerturbed { amplitude, sigma, t_pre }, Some(base)) =
                (*spec, spec.base_vortex())
            {
                let CaseSetup::Euler(b) = base.init_case(&grid)? else {
                    return Err(Error::Config("perturbed case needs an Euler base state".into()));
                };
                let mut pre = *opts;
                pre.time.t_final = t_pre;
                pre.time.steady_tol = 0.0;
                pre.output_every = None;
                let eq = simulate(&grid, &sys, b, &pre, None, |_, _, _| {})?;
                pre_run_digest = Some(Field::Euler(eq.q.clone()).digest());
                s.q = perturb_density(&grid, &eq.q, amplitude, sigma)?;
            }
            max_mach = Some(CaseSpec::max_mach(&s.q)?);
            let p = simulate(&grid, &sys, s, opts, None, |n, t, q| snapshot(n, t, &Field::Euler(q.clone())))?;
            (Field::Euler(p.q), p.stats, p.drift, p.energy, p.dts)
        }
    };

    let mut errors = None;
    let mut scaled_momentum_error = None;
    if let Some(exact) = spec.exact_solution(&grid, stats.t)? {
        match (&field, exact) {
            (Field::Acoustics(q), CaseSetup::Acoustics(e)) | (Field::ShallowWater(q), CaseSetup::ShallowWater(e)) => {
                errors = Some(error_norms(q, &e.q, &grid)?);
            }
            (Field::Euler(q), CaseSetup::Euler(e)) => {
                errors = Some(error_norms(q, &e.q, &grid)?);
                scaled_momentum_error = Some(scaled_linf_error(q, &e.q, 1));
            }
            _ => return Err(Error::Config("exact solution of a different system".into())),
        }
    }
    let min_density = match &field {
        Field::Euler(q) => Some(min_component(q, 0)),
        Field::ShallowWater(q) => Some(min_component(q, 0)),
        Field::Acoustics(_) => None,
    };
    Ok(RunOutcome {
        grid,
        field,
        stats,
        errors,
        conservation_drift: drift,
        energy,
        dts,
        wall_time: start.elapsed().as_secs_f64(),
        max_mach,
        scaled_momentum_error,
        pre_run_digest,
        min_density,
    })
}

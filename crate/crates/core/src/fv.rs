//! Dimension-by-dimension finite-volume baselines with Rusanov fluxes.

use rayon::prelude::*;

use crate::boundary::BoundarySpec;
use crate::error::{Error, Result};
use crate::field::{ScalarField, StateField};
use crate::mesh::Grid;
use crate::systems::{Direction, HyperbolicSystem};

/// Default limiter parameter of the generalized minmod slope.
pub const DEFAULT_THETA: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    pub order: u8,
    pub theta: f64,
}

impl ReconstructionConfig {
    pub fn first_order() -> Self {
        ReconstructionConfig {
            order: 1,
            theta: DEFAULT_THETA,
        }
    }

    pub fn second_order(theta: f64) -> Result<Self> {
        let c = ReconstructionConfig { order: 2, theta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order != 1 && self.order != 2 {
            return Err(Error::Config(format!("order must be 1 or 2, got {}", self.order)));
        }
        if !(1.0..=2.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta must lie in [1, 2], got {}", self.theta)));
        }
        Ok(())
    }
}

pub fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Generalized minmod slope, componentwise.
pub fn limited_slope<const N: usize>(
    qm: &[f64; N],
    q0: &[f64; N],
    qp: &[f64; N],
    dx: f64,
    theta: f64,
) -> [f64; N] {
    std::array::from_fn(|k| {
        minmod3(
            theta * (qp[k] - q0[k]) / dx,
            (qp[k] - qm[k]) / (2.0 * dx),
            theta * (q0[k] - qm[k]) / dx,
        )
    })
}

/// Slope of a non-periodic ghost cell: the one-sided difference towards the
/// interior, limited by the slope of the adjacent interior cell.
fn boundary_slope<const N: usize>(
    ghost: &[f64; N],
    inner: &[f64; N],
    inner_slope: &[f64; N],
    h: f64,
    low_side: bool,
    theta: f64,
) -> [f64; N] {
    std::array::from_fn(|k| {
        let d = (if low_side { inner[k] - ghost[k] } else { ghost[k] - inner[k] }) / h;
        minmod3(theta * d, inner_slope[k], inner_slope[k])
    })
}

/// Local Lax-Friedrichs flux with the larger of the two one-sided speeds.
pub fn rusanov_flux<const N: usize, S: HyperbolicSystem<N>>(
    sys: &S,
    ql: &[f64; N],
    qr: &[f64; N],
    dir: Direction,
) -> Result<[f64; N]> {
    let (fl, fr) = (sys.flux(ql, dir)?, sys.flux(qr, dir)?);
    let lam = sys.max_wave_speed(ql)?.max(sys.max_wave_speed(qr)?);
    Ok(std::array::from_fn(|k| {
        0.5 * (fl[k] + fr[k]) - 0.5 * lam * (qr[k] - ql[k])
    }))
}

/// Semi-discrete rate of the baseline scheme. `q` must have its ghost ring filled.
///
/// Second order reconstructs conservative variables. Ghost-cell slopes are the
/// wrapped interior slopes on periodic sides and limited one-sided differences
/// elsewhere, which vanish on transmissive sides.
pub fn fv_rate<const N: usize, S: HyperbolicSystem<N>>(
    grid: &Grid,
    sys: &S,
    q: &StateField<N>,
    bathy: Option<&ScalarField>,
    bc: &BoundarySpec<N>,
    recon: &ReconstructionConfig,
) -> Result<StateField<N>> {
    q.check_shape(grid)?;
    recon.validate()?;
    let (nx, ny) = (grid.nx, grid.ny);
    let second = recon.order == 2;
    let periodic_x = bc.side(crate::boundary::Side::West).is_periodic();
    let periodic_y = bc.side(crate::boundary::Side::South).is_periodic();

    let slope_x = |i: usize, j: usize| -> [f64; N] {
        if !second {
            return [0.0; N];
        }
        if (i == 0 || i == nx + 1) && !periodic_x {
            let (g, n) = if i == 0 { (0, 1) } else { (nx + 1, nx) };
            let inner = limited_slope(q.get(n - 1, j), q.get(n, j), q.get(n + 1, j), grid.dx, recon.theta);
            return boundary_slope(q.get(g, j), q.get(n, j), &inner, grid.dx, i == 0, recon.theta);
        }
        let c = match i {
            0 => nx,
            _ if i == nx + 1 => 1,
            _ => i,
        };
        limited_slope(q.get(c - 1, j), q.get(c, j), q.get(c + 1, j), grid.dx, recon.theta)
    };
    let slope_y = |i: usize, j: usize| -> [f64; N] {
        if !second {
            return [0.0; N];
        }
        if (j == 0 || j == ny + 1) && !periodic_y {
            let (g, n) = if j == 0 { (0, 1) } else { (ny + 1, ny) };
            let inner = limited_slope(q.get(i, n - 1), q.get(i, n), q.get(i, n + 1), grid.dy, recon.theta);
            return boundary_slope(q.get(i, g), q.get(i, n), &inner, grid.dy, j == 0, recon.theta);
        }
        let c = match j {
            0 => ny,
            _ if j == ny + 1 => 1,
            _ => j,
        };
        limited_slope(q.get(i, c - 1), q.get(i, c), q.get(i, c + 1), grid.dy, recon.theta)
    };
    let trace = |qc: &[f64; N], s: &[f64; N], h: f64| -> [f64; N] {
        std::array::from_fn(|k| qc[k] + h * s[k])
    };

    // y-interface fluxes: entry j holds interfaces (i, j + 1/2), i = 1..=nx
    let gy: Vec<Vec<[f64; N]>> = (0..=ny)
        .into_par_iter()
        .map(|j| {
            (1..=nx)
                .map(|i| {
                    let ql = trace(q.get(i, j), &slope_y(i, j), 0.5 * grid.dy);
                    let qr = trace(q.get(i, j + 1), &slope_y(i, j + 1), -0.5 * grid.dy);
                    rusanov_flux(sys, &ql, &qr, Direction::Y).map_err(|e| e.at_cell(i, j))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let rows: Vec<Vec<[f64; N]>> = (1..=ny)
        .into_par_iter()
        .map(|j| {
            let fx = (0..=nx)
                .map(|i| {
                    let ql = trace(q.get(i, j), &slope_x(i, j), 0.5 * grid.dx);
                    let qr = trace(q.get(i + 1, j), &slope_x(i + 1, j), -0.5 * grid.dx);
                    rusanov_flux(sys, &ql, &qr, Direction::X).map_err(|e| e.at_cell(i, j))
                })
                .collect::<Result<Vec<_>>>()?;
            (1..=nx)
                .map(|i| {
                    let s = match bathy {
                        Some(b) => {
                            let dbdx = (b.value(i + 1, j) - b.value(i - 1, j)) / (2.0 * grid.dx);
                            let dbdy = (b.value(i, j + 1) - b.value(i, j - 1)) / (2.0 * grid.dy);
                            sys.bathymetry_source(q.get(i, j), dbdx, dbdy).unwrap_or([0.0; N])
                        }
                        None => [0.0; N],
                    };
                    let (fl, fr) = (&fx[i - 1], &fx[i]);
                    let (gl, gr) = (&gy[j - 1][i - 1], &gy[j][i - 1]);
                    Ok(std::array::from_fn(|k| {
                        -(fr[k] - fl[k]) / grid.dx - (gr[k] - gl[k]) / grid.dy + s[k]
                    }))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rate = StateField::zeros(grid);
    for (j, row) in rows.into_iter().enumerate() {
        for (i, v) in row.into_iter().enumerate() {
            rate.set(i + 1, j + 1, v);
        }
    }
    Ok(rate)
}

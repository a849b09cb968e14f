use rayon::prelude::*;

use super::corner::{cell_rate, corner_average, CornerResidual, CornerTerms};
use super::{GfOptions, PointValues};
use crate::boundary::{copy_transmissive, BoundarySpec};
use crate::error::Result;
use crate::field::{ScalarField, StateField};
use crate::mesh::Grid;
use crate::systems::HyperbolicSystem;

/// Global fluxes on the interior and first ghost ring.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalFluxField<const N: usize> {
    pub f: StateField<N>,
    pub g: StateField<N>,
    pub r: StateField<N>,
    /// `ℱ = F + G - R`.
    pub total: StateField<N>,
}

/// Builds `F`, `G`, `R` and `ℱ` by trapezoidal sweeps starting from zero on
/// the low ghost layer.
///
/// Bathymetry increments are accumulated along each row (column) and added to
/// the x- (y-) flux before the sweep. Transmissive sides then overwrite their
/// ghosts with the adjacent interior values.
pub fn compute_global_fluxes<const N: usize>(
    grid: &Grid,
    pv: &PointValues<N>,
    bc: &BoundarySpec<N>,
) -> GlobalFluxField<N> {
    let (nx, ny) = (grid.nx, grid.ny);
    let (hx, hy) = (0.5 * grid.dx, 0.5 * grid.dy);

    let mut ft = pv.f.clone();
    if let Some(inc) = &pv.incx {
        for j in 0..=ny + 1 {
            let mut acc = [0.0; N];
            for i in 1..=nx + 1 {
                let d = inc.get(i, j);
                let v = ft.get_mut(i, j);
                for k in 0..N {
                    acc[k] += d[k];
                    v[k] += acc[k];
                }
            }
        }
    }
    let mut gt = pv.g.clone();
    if let Some(inc) = &pv.incy {
        for i in 0..=nx + 1 {
            let mut acc = [0.0; N];
            for j in 1..=ny + 1 {
                let d = inc.get(i, j);
                let v = gt.get_mut(i, j);
                for k in 0..N {
                    acc[k] += d[k];
                    v[k] += acc[k];
                }
            }
        }
    }

    let mut f = StateField::zeros(grid);
    for j in 1..=ny + 1 {
        for i in 0..=nx + 1 {
            let (prev, a, b) = (*f.get(i, j - 1), ft.get(i, j - 1), ft.get(i, j));
            f.set(i, j, std::array::from_fn(|k| prev[k] + hy * (a[k] + b[k])));
        }
    }

    let mut g = StateField::zeros(grid);
    g.par_rows_mut(|j, row| {
        let src = gt.row(j);
        for i in 1..=nx + 1 {
            let prev = row[i - 1];
            row[i] = std::array::from_fn(|k| prev[k] + hx * (src[i - 1][k] + src[i][k]));
        }
    });

    let mut r = StateField::zeros(grid);
    if let Some(s) = &pv.s {
        let c = 0.25 * grid.cell_area();
        for j in 1..=ny + 1 {
            for i in 1..=nx + 1 {
                let (a, b, d) = (*r.get(i - 1, j), *r.get(i, j - 1), *r.get(i - 1, j - 1));
                let (s00, s10, s01, s11) =
                    (s.get(i - 1, j - 1), s.get(i, j - 1), s.get(i - 1, j), s.get(i, j));
                r.set(
                    i,
                    j,
                    std::array::from_fn(|k| {
                        a[k] + b[k] - d[k] + c * (s00[k] + s10[k] + s01[k] + s11[k])
                    }),
                );
            }
        }
    }

    copy_transmissive(grid, bc, &mut [&mut f, &mut g, &mut r]);
    let mut total = f.clone();
    total.axpy(1.0, &g);
    total.axpy(-1.0, &r);
    GlobalFluxField { f, g, r, total }
}

/// Semi-discrete rate `dq/dt` of the global-flux scheme, recursive assembly.
///
/// `q` must have its ghost ring filled for `bc`.
pub fn gf_rate<const N: usize, S: HyperbolicSystem<N>>(
    grid: &Grid,
    sys: &S,
    q: &StateField<N>,
    bathy: Option<&ScalarField>,
    bc: &BoundarySpec<N>,
    opts: &GfOptions,
) -> Result<StateField<N>> {
    let pv = PointValues::build(grid, sys, q, bathy, opts.source)?;
    gf_rate_from_point_values(grid, sys, q, &pv, bc, opts)
}

/// Recursive assembly from precomputed point values.
pub fn gf_rate_from_point_values<const N: usize, S: HyperbolicSystem<N>>(
    grid: &Grid,
    sys: &S,
    q: &StateField<N>,
    pv: &PointValues<N>,
    bc: &BoundarySpec<N>,
    opts: &GfOptions,
) -> Result<StateField<N>> {
    let gf = compute_global_fluxes(grid, pv, bc);
    let corners: Vec<Vec<CornerTerms<N>>> = (0..=grid.ny)
        .into_par_iter()
        .map(|j| {
            (0..=grid.nx)
                .map(|i| {
                    let cr = CornerResidual::from_global_flux(grid, sys, q, &gf, i, j, opts)?;
                    let (ax, by) = cr.upwind_terms(grid);
                    Ok(CornerTerms {
                        fbar: corner_average(&gf.total, i, j),
                        ax,
                        by,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_rate(grid, &corners))
}

pub(crate) fn assemble_rate<const N: usize>(
    grid: &Grid,
    corners: &[Vec<CornerTerms<N>>],
) -> StateField<N> {
    let mut rate = StateField::zeros(grid);
    rate.par_rows_mut(|j, row| {
        if j == 0 || j > grid.ny {
            return;
        }
        for (i, v) in row.iter_mut().enumerate().take(grid.nx + 1).skip(1) {
            *v = cell_rate(corners, grid, i, j);
        }
    });
    rate
}

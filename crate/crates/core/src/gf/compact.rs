use rayon::prelude::*;

use super::corner::{CornerResidual, CornerTerms};
use super::recursive::assemble_rate;
use super::{GfOptions, PointValues};
use crate::boundary::BoundarySpec;
use crate::error::{Error, Result};
use crate::field::{ScalarField, StateField};
use crate::mesh::Grid;
use crate::systems::HyperbolicSystem;

/// Corner residual from point values only, without forming `ℱ`.
pub fn corner_residual_compact<const N: usize, S: HyperbolicSystem<N>>(
    grid: &Grid,
    sys: &S,
    q: &StateField<N>,
    pv: &PointValues<N>,
    i: usize,
    j: usize,
    opts: &GfOptions,
) -> Result<CornerResidual<N>> {
    let (hx, hy) = (0.5 * grid.dx, 0.5 * grid.dy);
    let (dx0, dx1) = (pv.diff_x(i, j), pv.diff_x(i, j + 1));
    let (dy0, dy1) = (pv.diff_y(i, j), pv.diff_y(i + 1, j));
    let phi_f = std::array::from_fn(|k| hy * (dx0[k] + dx1[k]));
    let phi_g = std::array::from_fn(|k| hx * (dy0[k] + dy1[k]));
    let c = -0.25 * grid.cell_area();
    let (s00, s10, s01, s11) = (
        pv.source(i, j),
        pv.source(i + 1, j),
        pv.source(i, j + 1),
        pv.source(i + 1, j + 1),
    );
    let phi_r = std::array::from_fn(|k| c * (s00[k] + s10[k] + s01[k] + s11[k]));
    CornerResidual::assemble(grid, sys, q, i, j, phi_f, phi_g, phi_r, opts)
}

/// Semi-discrete rate of the global-flux scheme, compact 3×3 assembly.
///
/// Equal to [`super::gf_rate`] whenever ghost point values come from ghost
/// states (periodic and Dirichlet sides). Transmissive sides act on `ℱ`
/// itself and are rejected.
pub fn gf_rate_compact<const N: usize, S: HyperbolicSystem<N>>(
    grid: &Grid,
    sys: &S,
    q: &StateField<N>,
    bathy: Option<&ScalarField>,
    bc: &BoundarySpec<N>,
    opts: &GfOptions,
) -> Result<StateField<N>> {
    let pv = PointValues::build(grid, sys, q, bathy, opts.source)?;
    gf_rate_compact_from_point_values(grid, sys, q, &pv, bc, opts)
}

pub fn gf_rate_compact_from_point_values<const N: usize, S: HyperbolicSystem<N>>(
    grid: &Grid,
    sys: &S,
    q: &StateField<N>,
    pv: &PointValues<N>,
    bc: &BoundarySpec<N>,
    opts: &GfOptions,
) -> Result<StateField<N>> {
    if bc.has_transmissive() {
        return Err(Error::Unsupported(
            "compact assembly does not implement transmissive global-flux ghosts".into(),
        ));
    }
    let corners: Vec<Vec<CornerTerms<N>>> = (0..=grid.ny)
        .into_par_iter()
        .map(|j| {
            (0..=grid.nx)
                .map(|i| {
                    let cr = corner_residual_compact(grid, sys, q, pv, i, j, opts)?;
                    let (ax, by) = cr.upwind_terms(grid);
                    Ok(CornerTerms {
                        fbar: [0.0; N],
                        ax,
                        by,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rate = assemble_rate(grid, &corners);
    rate.par_rows_mut(|j, row| {
        if j == 0 || j > grid.ny {
            return;
        }
        for (i, v) in row.iter_mut().enumerate().take(grid.nx + 1).skip(1) {
            let c = central(grid, pv, i, j);
            for k in 0..N {
                v[k] += c[k];
            }
        }
    });
    Ok(rate)
}

/// `-(1/Δx) <[[f]]_i>_j - (1/Δy) [[<g>_i]]_j + <<s>_i>_j`, with bathymetry
/// increments included in the flux jumps.
fn central<const N: usize>(grid: &Grid, pv: &PointValues<N>, i: usize, j: usize) -> [f64; N] {
    let jump_x = |jj: usize| {
        let (a, b) = (pv.diff_x(i - 1, jj), pv.diff_x(i, jj));
        std::array::from_fn::<f64, N, _>(|k| 0.5 * (a[k] + b[k]))
    };
    let jump_y = |ii: usize| {
        let (a, b) = (pv.diff_y(ii, j - 1), pv.diff_y(ii, j));
        std::array::from_fn::<f64, N, _>(|k| 0.5 * (a[k] + b[k]))
    };
    let (xm, x0, xp) = (jump_x(j - 1), jump_x(j), jump_x(j + 1));
    let (ym, y0, yp) = (jump_y(i - 1), jump_y(i), jump_y(i + 1));
    let mut s = [0.0; N];
    if pv.s.is_some() {
        for (dj, wj) in [(0, 1.0), (1, 2.0), (2, 1.0)] {
            for (di, wi) in [(0, 1.0), (1, 2.0), (2, 1.0)] {
                let v = pv.source(i + di - 1, j + dj - 1);
                for k in 0..N {
                    s[k] += wi * wj * v[k] / 16.0;
                }
            }
        }
    }
    std::array::from_fn(|k| {
        -0.25 * (xm[k] + 2.0 * x0[k] + xp[k]) / grid.dx - 0.25 * (ym[k] + 2.0 * y0[k] + yp[k]) / grid.dy
            + s[k]
    })
}

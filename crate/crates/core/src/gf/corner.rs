use super::{GfOptions, GlobalFluxField};
use crate::error::{CellIndex, Error, Result};
use crate::field::StateField;
use crate::linalg::{matvec, Matrix};
use crate::mesh::{corner_normal, CornerNormal, Grid};
use crate::systems::{Direction, HyperbolicSystem};

/// Dual-cell residual at corner `(i + 1/2, j + 1/2)` and the data needed for
/// its dissipation.
///
/// `phi_r` is stored with the sign it enters `ℱ`, so `phi = phi_f + phi_g + phi_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerResidual<const N: usize> {
    pub phi: [f64; N],
    pub phi_f: [f64; N],
    pub phi_g: [f64; N],
    pub phi_r: [f64; N],
    pub qbar: [f64; N],
    pub jx: Matrix<N>,
    pub jy: Matrix<N>,
    pub alpha: f64,
    pub delta: f64,
}

impl<const N: usize> CornerResidual<N> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble<S: HyperbolicSystem<N>>(
        grid: &Grid,
        sys: &S,
        q: &StateField<N>,
        i: usize,
        j: usize,
        phi_f: [f64; N],
        phi_g: [f64; N],
        phi_r: [f64; N],
        opts: &GfOptions,
    ) -> Result<Self> {
        let qbar = corner_average(q, i, j);
        let at = |e: Error| e.at_cell(i, j);
        let lambda = sys.max_wave_speed(&qbar).map_err(at)?;
        if !lambda.is_finite() {
            return Err(Error::NonFiniteSpeed {
                cell: CellIndex { i, j },
            });
        }
        Ok(CornerResidual {
            phi: std::array::from_fn(|k| phi_f[k] + phi_g[k] + phi_r[k]),
            phi_f,
            phi_g,
            phi_r,
            qbar,
            jx: sys.jacobian(&qbar, Direction::X).map_err(at)?,
            jy: sys.jacobian(&qbar, Direction::Y).map_err(at)?,
            alpha: opts.alpha(lambda),
            delta: grid.characteristic_length(),
        })
    }

    /// Residual from the mixed second differences of a global-flux field.
    pub fn from_global_flux<S: HyperbolicSystem<N>>(
        grid: &Grid,
        sys: &S,
        q: &StateField<N>,
        gf: &GlobalFluxField<N>,
        i: usize,
        j: usize,
        opts: &GfOptions,
    ) -> Result<Self> {
        let r = mixed_difference(&gf.r, i, j);
        Self::assemble(
            grid,
            sys,
            q,
            i,
            j,
            mixed_difference(&gf.f, i, j),
            mixed_difference(&gf.g, i, j),
            r.map(|v| -v),
            opts,
        )
    }

    /// The x and y parts of the dissipation for normal `(+1, +1)`:
    /// `(alpha Δ / 4)(J^x / Δx) Φ` and `(alpha Δ / 4)(J^y / Δy) Φ`.
    pub(crate) fn upwind_terms(&self, grid: &Grid) -> ([f64; N], [f64; N]) {
        let c = 0.25 * self.alpha * self.delta;
        let a = matvec(&self.jx, &self.phi).map(|v| c * v / grid.dx);
        let b = matvec(&self.jy, &self.phi).map(|v| c * v / grid.dy);
        (a, b)
    }
}

/// Streamline-upwind corner dissipation `(alpha Δ/4)(n_x J^x/Δx + n_y J^y/Δy) Φ`.
pub fn supg_dissipation<const N: usize>(
    cr: &CornerResidual<N>,
    n: CornerNormal,
    grid: &Grid,
) -> [f64; N] {
    let (a, b) = cr.upwind_terms(grid);
    std::array::from_fn(|k| n.x() * a[k] + n.y() * b[k])
}

/// Corner flux of corner `(i + 1/2, j + 1/2)` seen from cell `(i + ell, j + r)`.
pub fn corner_flux<const N: usize>(
    cr: &CornerResidual<N>,
    gf: &GlobalFluxField<N>,
    grid: &Grid,
    i: usize,
    j: usize,
    orientation: (u8, u8),
) -> [f64; N] {
    let n = corner_normal(orientation.0, orientation.1);
    let fbar = corner_average(&gf.total, i, j);
    let d = supg_dissipation(cr, n, grid);
    std::array::from_fn(|k| fbar[k] * n.nscalar() + d[k])
}

#[inline]
pub(crate) fn corner_average<const N: usize>(a: &StateField<N>, i: usize, j: usize) -> [f64; N] {
    let (p, q, r, s) = (a.get(i, j), a.get(i + 1, j), a.get(i, j + 1), a.get(i + 1, j + 1));
    std::array::from_fn(|k| 0.25 * (p[k] + q[k] + r[k] + s[k]))
}

#[inline]
pub(crate) fn mixed_difference<const N: usize>(a: &StateField<N>, i: usize, j: usize) -> [f64; N] {
    let (p, q, r, s) = (a.get(i, j), a.get(i + 1, j), a.get(i, j + 1), a.get(i + 1, j + 1));
    std::array::from_fn(|k| s[k] - r[k] - q[k] + p[k])
}

/// Per-corner quantities entering the cell update.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CornerTerms<const N: usize> {
    pub fbar: [f64; N],
    pub ax: [f64; N],
    pub by: [f64; N],
}

/// Sum of the four oriented corner fluxes of cell `(i, j)`, scaled into a rate.
///
/// `corners[j][i]` holds corner `(i + 1/2, j + 1/2)`.
#[inline]
pub(crate) fn cell_rate<const N: usize>(
    corners: &[Vec<CornerTerms<N>>],
    grid: &Grid,
    i: usize,
    j: usize,
) -> [f64; N] {
    // (corner i, corner j, ell, r) for the four corners of the cell
    let touch = [(i, j, 0, 0), (i - 1, j, 1, 0), (i, j - 1, 0, 1), (i - 1, j - 1, 1, 1)];
    let mut sum = [0.0; N];
    for (ci, cj, ell, r) in touch {
        let c = &corners[cj][ci];
        let n = corner_normal(ell, r);
        for k in 0..N {
            sum[k] += c.fbar[k] * n.nscalar() + n.x() * c.ax[k] + n.y() * c.by[k];
        }
    }
    let inv = -1.0 / grid.cell_area();
    sum.map(|v| v * inv)
}

//! Standalone periodic 1D reference formulas used to check the 2D schemes.

use crate::error::{Error, Result};
use crate::gf::GfOptions;
use crate::linalg::matvec;
use crate::systems::{Direction, HyperbolicSystem};

/// A periodic line of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Line1D<const N: usize> {
    pub dx: f64,
    pub cells: Vec<[f64; N]>,
}

impl<const N: usize> Line1D<N> {
    pub fn new(dx: f64, cells: Vec<[f64; N]>) -> Result<Self> {
        if !(dx > 0.0) || cells.len() < 2 {
            return Err(Error::InvalidGrid("line needs dx > 0 and at least 2 cells".into()));
        }
        Ok(Line1D { dx, cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }
}

/// First-order Rusanov rate along `x` on a periodic line.
pub fn rusanov_1d_update<const N: usize, S: HyperbolicSystem<N>>(
    line: &Line1D<N>,
    sys: &S,
) -> Result<Vec<[f64; N]>> {
    let n = line.len();
    let mut flux = Vec::with_capacity(n);
    for i in 0..n {
        let (ql, qr) = (&line.cells[i], &line.cells[line.next(i)]);
        let (fl, fr) = (sys.flux(ql, Direction::X)?, sys.flux(qr, Direction::X)?);
        let lam = sys.max_wave_speed(ql)?.max(sys.max_wave_speed(qr)?);
        flux.push(std::array::from_fn::<f64, N, _>(|k| {
            0.5 * (fl[k] + fr[k]) - 0.5 * lam * (qr[k] - ql[k])
        }));
    }
    Ok((0..n)
        .map(|i| {
            let (a, b) = (&flux[(i + n - 1) % n], &flux[i]);
            std::array::from_fn(|k| -(b[k] - a[k]) / line.dx)
        })
        .collect())
}

/// Interface fluxes `f_{i+1/2}` of the global-flux scheme in a quasi-1D setting:
/// `(f_{i+1} + f_i)/2 - (alpha/2) J^x (f_{i+1} - f_i - dx/2 (s_{i+1} + s_i))`,
/// with `J^x` and `alpha` taken at the mean of the two states.
///
/// Entry `i` is the interface between cells `i` and `i + 1` (periodic).
pub fn gf_quasi1d_flux<const N: usize, S: HyperbolicSystem<N>>(
    line: &Line1D<N>,
    sys: &S,
    source: Option<&[[f64; N]]>,
    opts: &GfOptions,
) -> Result<Vec<[f64; N]>> {
    let n = line.len();
    if let Some(s) = source {
        if s.len() != n {
            return Err(Error::SizeMismatch(format!("{} source values for {n} cells", s.len())));
        }
    }
    let src = |i: usize| source.map_or([0.0; N], |s| s[i]);
    (0..n)
        .map(|i| {
            let ip = line.next(i);
            let (qa, qb) = (&line.cells[i], &line.cells[ip]);
            let (fa, fb) = (sys.flux(qa, Direction::X)?, sys.flux(qb, Direction::X)?);
            let qbar: [f64; N] = std::array::from_fn(|k| 0.5 * (qa[k] + qb[k]));
            let alpha = opts.alpha(sys.max_wave_speed(&qbar)?);
            let jx = sys.jacobian(&qbar, Direction::X)?;
            let (sa, sb) = (src(i), src(ip));
            let res: [f64; N] =
                std::array::from_fn(|k| fb[k] - fa[k] - 0.5 * line.dx * (sb[k] + sa[k]));
            let d = matvec(&jx, &res);
            Ok(std::array::from_fn(|k| 0.5 * (fb[k] + fa[k]) - 0.5 * alpha * d[k]))
        })
        .collect()
}

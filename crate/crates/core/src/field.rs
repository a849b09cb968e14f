//! Cell-centered fields with a ghost halo.

use crate::error::{Error, Result};
use crate::mesh::Grid;

/// A cell-centered field of `N`-component vectors, including ghost layers.
///
/// Indices are 1-based for interior cells; `0` and `nx + 1` address the first
/// ghost ring. Storage is row-major with `j` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField<const N: usize> {
    nx: usize,
    ny: usize,
    ghost: usize,
    data: Vec<[f64; N]>,
}

/// A scalar cell-centered field (bathymetry and similar auxiliaries).
pub type ScalarField = StateField<1>;

impl<const N: usize> StateField<N> {
    pub fn zeros(grid: &Grid) -> Self {
        Self::filled(grid, [0.0; N])
    }

    pub fn filled(grid: &Grid, value: [f64; N]) -> Self {
        let w = grid.nx + 2 * grid.ghost;
        let h = grid.ny + 2 * grid.ghost;
        StateField {
            nx: grid.nx,
            ny: grid.ny,
            ghost: grid.ghost,
            data: vec![value; w * h],
        }
    }

    /// Samples `f(x, y)` at every cell center, ghosts included.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64, f64) -> [f64; N]) -> Self {
        let mut out = Self::zeros(grid);
        let g = grid.ghost as isize;
        for j in (1 - g)..=(grid.ny as isize + g) {
            for i in (1 - g)..=(grid.nx as isize + g) {
                let x = grid.x0 + (i as f64 - 0.5) * grid.dx;
                let y = grid.y0 + (j as f64 - 0.5) * grid.dy;
                let k = out.raw_index(i, j);
                out.data[k] = f(x, y);
            }
        }
        out
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    fn raw_index(&self, i: isize, j: isize) -> usize {
        let g = self.ghost as isize;
        let w = self.nx as isize + 2 * g;
        ((j + g - 1) * w + (i + g - 1)) as usize
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.nx + 1 && j <= self.ny + 1);
        let w = self.nx + 2 * self.ghost;
        (j + self.ghost - 1) * w + (i + self.ghost - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &[f64; N] {
        &self.data[self.index(i, j)]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut [f64; N] {
        let k = self.index(i, j);
        &mut self.data[k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: [f64; N]) {
        let k = self.index(i, j);
        self.data[k] = v;
    }

    /// Interior cells in row-major order (`j` outer), with their indices.
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize, &[f64; N])> + '_ {
        (1..=self.ny).flat_map(move |j| (1..=self.nx).map(move |i| (i, j, self.get(i, j))))
    }

    /// Row `j` of the first-ring-extended field, `i = 0..=nx+1`.
    pub fn row(&self, j: usize) -> &[[f64; N]] {
        let start = self.index(0, j);
        &self.data[start..start + self.nx + 2]
    }

    pub fn row_mut(&mut self, j: usize) -> &mut [[f64; N]] {
        let start = self.index(0, j);
        let nx = self.nx;
        &mut self.data[start..start + nx + 2]
    }

    /// Runs `f(j, row)` over rows `j = 0..=ny+1` in parallel; `row` spans `i = 0..=nx+1`.
    pub fn par_rows_mut(&mut self, f: impl Fn(usize, &mut [[f64; N]]) + Sync + Send) {
        use rayon::prelude::*;
        let g = self.ghost;
        let w = self.nx + 2 * g;
        let ny = self.ny;
        let nx = self.nx;
        self.data
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(r, chunk)| {
                if r + 1 < g || r + 1 - g > ny + 1 {
                    return;
                }
                f(r + 1 - g, &mut chunk[g - 1..g + nx + 1]);
            });
    }

    pub fn same_shape<const M: usize>(&self, other: &StateField<M>) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.ghost == other.ghost
    }

    pub fn check_shape(&self, grid: &Grid) -> Result<()> {
        if self.nx != grid.nx || self.ny != grid.ny || self.ghost != grid.ghost {
            return Err(Error::SizeMismatch(format!(
                "field is {}x{} (ghost {}), grid is {}x{} (ghost {})",
                self.nx, self.ny, self.ghost, grid.nx, grid.ny, grid.ghost
            )));
        }
        Ok(())
    }

    /// `self += s * other` on every stored cell.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            for k in 0..N {
                a[k] += s * b[k];
            }
        }
    }

    /// Componentwise sum over interior cells (sequential, row-major).
    pub fn interior_sum(&self) -> [f64; N] {
        let mut s = [0.0; N];
        for (_, _, v) in self.interior() {
            for k in 0..N {
                s[k] += v[k];
            }
        }
        s
    }

    /// Max |value| over interior cells, per component.
    pub fn interior_max_abs(&self) -> [f64; N] {
        let mut m = [0.0_f64; N];
        for (_, _, v) in self.interior() {
            for k in 0..N {
                m[k] = m[k].max(v[k].abs());
            }
        }
        m
    }

    pub fn all_finite(&self) -> bool {
        self.interior().all(|(_, _, v)| v.iter().all(|x| x.is_finite()))
    }

    /// Extract component `k` as a scalar field.
    pub fn component(&self, k: usize) -> ScalarField {
        StateField {
            nx: self.nx,
            ny: self.ny,
            ghost: self.ghost,
            data: self.data.iter().map(|v| [v[k]]).collect(),
        }
    }

    /// Applies `f` to every stored value (ghosts included).
    pub fn map<const M: usize>(&self, f: impl FnMut(&[f64; N]) -> [f64; M]) -> StateField<M> {
        StateField {
            nx: self.nx,
            ny: self.ny,
            ghost: self.ghost,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl ScalarField {
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)[0]
    }
}

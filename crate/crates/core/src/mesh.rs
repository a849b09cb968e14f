//! Uniform Cartesian grid geometry.
//!
//! Cells are addressed with 1-based indices `i in 1..=nx`, `j in 1..=ny`; the
//! first ghost ring sits at `0` and `nx + 1` (resp. `ny + 1`). Corner
//! `(i + 1/2, j + 1/2)` is addressed by the index pair `(i, j)` of its
//! lower-left cell, so corners run over `0..=nx` × `0..=ny`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub dx: f64,
    pub dy: f64,
    pub ghost: usize,
}

impl Grid {
    /// Builds a grid over `[x0, x1] × [y0, y1]` with `nx × ny` cells.
    pub fn new(nx: usize, ny: usize, bounds: [f64; 4], ghost: usize) -> Result<Self> {
        let [x0, x1, y0, y1] = bounds;
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells per direction, got {nx}x{ny}"
            )));
        }
        if !(x1 > x0) || !(y1 > y0) || !bounds.iter().all(|b| b.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "non-positive extent [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        if ghost < 1 {
            return Err(Error::InvalidGrid("ghost width must be at least 1".into()));
        }
        Ok(Grid {
            nx,
            ny,
            x0,
            x1,
            y0,
            y1,
            dx: (x1 - x0) / nx as f64,
            dy: (y1 - y0) / ny as f64,
            ghost,
        })
    }

    pub fn square(n: usize, bounds: [f64; 4]) -> Result<Self> {
        Self::new(n, n, bounds, 1)
    }

    pub fn bounds(&self) -> [f64; 4] {
        [self.x0, self.x1, self.y0, self.y1]
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Characteristic mesh size `sqrt((dx^2 + dy^2) / 2)`.
    pub fn characteristic_length(&self) -> f64 {
        ((self.dx * self.dx + self.dy * self.dy) / 2.0).sqrt()
    }

    /// x-coordinate of the center of column `i` (ghost columns included).
    #[inline]
    pub fn xc(&self, i: usize) -> f64 {
        self.x0 + (i as f64 - 0.5) * self.dx
    }

    #[inline]
    pub fn yc(&self, j: usize) -> f64 {
        self.y0 + (j as f64 - 0.5) * self.dy
    }

    #[inline]
    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (self.xc(i), self.yc(j))
    }

    /// Interior cell containing the point, if any.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if x < self.x0 || x > self.x1 || y < self.y0 || y > self.y1 {
            return None;
        }
        let i = (((x - self.x0) / self.dx).floor() as usize + 1).min(self.nx);
        let j = (((y - self.y0) / self.dy).floor() as usize + 1).min(self.ny);
        Some((i, j))
    }

    /// Position of corner `(i + 1/2, j + 1/2)`.
    pub fn corner_position(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.dx, self.y0 + j as f64 * self.dy)
    }

    /// The four cells sharing corner `(i + 1/2, j + 1/2)`, ordered by `(ell, r)`
    /// as `(0,0), (1,0), (0,1), (1,1)`.
    pub fn corner_cells(&self, i: usize, j: usize) -> [(usize, usize); 4] {
        [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
    }

    /// Same domain, `factor` times more cells per direction.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Grid::new(self.nx * factor, self.ny * factor, self.bounds(), self.ghost)
    }
}

/// Normal at a corner pointing into one of its four cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerNormal {
    pub nx: i8,
    pub ny: i8,
}

impl CornerNormal {
    /// Product of the two components.
    #[inline]
    pub fn nscalar(self) -> f64 {
        (self.nx * self.ny) as f64
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.nx as f64
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.ny as f64
    }
}

/// Normal of corner `(i + 1/2, j + 1/2)` towards cell `(i + ell, j + r)`.
///
/// # Panics
/// If `ell` or `r` is not 0 or 1.
pub fn corner_normal(ell: u8, r: u8) -> CornerNormal {
    assert!(ell <= 1 && r <= 1, "corner offsets must be 0 or 1");
    CornerNormal {
        nx: if ell == 1 { 1 } else { -1 },
        ny: if r == 1 { 1 } else { -1 },
    }
}

/// The four `(ell, r)` orientations in the order used throughout the crate.
pub const ORIENTATIONS: [(u8, u8); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

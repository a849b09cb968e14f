//! Ghost-cell filling for state fields and global-flux fields.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{ScalarField, StateField};
use crate::mesh::Grid;

/// State prescribed on a Dirichlet side, as a function of the ghost-cell center.
pub type StateFn<const N: usize> = Arc<dyn Fn(f64, f64) -> [f64; N] + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryKind<const N: usize> {
    Periodic,
    Dirichlet(StateFn<N>),
    Transmissive,
}

impl<const N: usize> BoundaryKind<N> {
    pub fn dirichlet(f: impl Fn(f64, f64) -> [f64; N] + Send + Sync + 'static) -> Self {
        BoundaryKind::Dirichlet(Arc::new(f))
    }

    pub fn constant(q: [f64; N]) -> Self {
        Self::dirichlet(move |_, _| q)
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, BoundaryKind::Periodic)
    }

    pub fn is_transmissive(&self) -> bool {
        matches!(self, BoundaryKind::Transmissive)
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundaryKind::Periodic => "periodic",
            BoundaryKind::Dirichlet(_) => "dirichlet",
            BoundaryKind::Transmissive => "transmissive",
        }
    }
}

impl<const N: usize> fmt::Debug for BoundaryKind<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    West,
    East,
    South,
    North,
}

/// Boundary conditions on the four sides of a rectangle.
#[derive(Debug, Clone)]
pub struct BoundarySpec<const N: usize> {
    west: BoundaryKind<N>,
    east: BoundaryKind<N>,
    south: BoundaryKind<N>,
    north: BoundaryKind<N>,
}

impl<const N: usize> BoundarySpec<N> {
    pub fn new(
        west: BoundaryKind<N>,
        east: BoundaryKind<N>,
        south: BoundaryKind<N>,
        north: BoundaryKind<N>,
    ) -> Result<Self> {
        if west.is_periodic() != east.is_periodic() {
            return Err(Error::Config("periodic west/east sides must be paired".into()));
        }
        if south.is_periodic() != north.is_periodic() {
            return Err(Error::Config("periodic south/north sides must be paired".into()));
        }
        Ok(BoundarySpec {
            west,
            east,
            south,
            north,
        })
    }

    pub fn periodic() -> Self {
        BoundarySpec {
            west: BoundaryKind::Periodic,
            east: BoundaryKind::Periodic,
            south: BoundaryKind::Periodic,
            north: BoundaryKind::Periodic,
        }
    }

    pub fn uniform(kind: BoundaryKind<N>) -> Result<Self> {
        Self::new(kind.clone(), kind.clone(), kind.clone(), kind)
    }

    pub fn side(&self, side: Side) -> &BoundaryKind<N> {
        match side {
            Side::West => &self.west,
            Side::East => &self.east,
            Side::South => &self.south,
            Side::North => &self.north,
        }
    }

    pub fn is_fully_periodic(&self) -> bool {
        self.west.is_periodic() && self.south.is_periodic()
    }

    pub fn has_transmissive(&self) -> bool {
        [&self.west, &self.east, &self.south, &self.north]
            .iter()
            .any(|k| k.is_transmissive())
    }

    pub fn dirichlet_sides(&self) -> usize {
        [&self.west, &self.east, &self.south, &self.north]
            .iter()
            .filter(|k| matches!(k, BoundaryKind::Dirichlet(_)))
            .count()
    }

    /// Non-fatal remarks about the setup.
    ///
    /// More than two Dirichlet sides over-constrain discrete equilibria of the
    /// global-flux scheme; unsteady runs may still use them.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let d = self.dirichlet_sides();
        if d > 2 {
            w.push(format!(
                "{d} dirichlet sides: exact discrete steady states are over-constrained"
            ));
        }
        w
    }

    pub fn describe(&self) -> String {
        format!(
            "west={} east={} south={} north={}",
            self.west.name(),
            self.east.name(),
            self.south.name(),
            self.north.name()
        )
    }
}

/// Fills the first ghost ring of a state field.
///
/// West/east ghosts are filled over interior rows first; south/north ghosts
/// then cover every column including the ghost columns, so ghost corners
/// follow the y-side rule.
pub fn fill_state_ghosts<const N: usize>(
    grid: &Grid,
    q: &mut StateField<N>,
    bc: &BoundarySpec<N>,
) {
    let (nx, ny) = (grid.nx, grid.ny);
    for j in 1..=ny {
        let y = grid.yc(j);
        let west = match &bc.west {
            BoundaryKind::Periodic => *q.get(nx, j),
            BoundaryKind::Dirichlet(f) => f(grid.x0 - 0.5 * grid.dx, y),
            BoundaryKind::Transmissive => *q.get(1, j),
        };
        let east = match &bc.east {
            BoundaryKind::Periodic => *q.get(1, j),
            BoundaryKind::Dirichlet(f) => f(grid.x1 + 0.5 * grid.dx, y),
            BoundaryKind::Transmissive => *q.get(nx, j),
        };
        q.set(0, j, west);
        q.set(nx + 1, j, east);
    }
    for i in 0..=nx + 1 {
        let x = grid.x0 + (i as f64 - 0.5) * grid.dx;
        let south = match &bc.south {
            BoundaryKind::Periodic => *q.get(i, ny),
            BoundaryKind::Dirichlet(f) => f(x, grid.y0 - 0.5 * grid.dy),
            BoundaryKind::Transmissive => *q.get(i, 1),
        };
        let north = match &bc.north {
            BoundaryKind::Periodic => *q.get(i, 1),
            BoundaryKind::Dirichlet(f) => f(x, grid.y1 + 0.5 * grid.dy),
            BoundaryKind::Transmissive => *q.get(i, ny),
        };
        q.set(i, 0, south);
        q.set(i, ny + 1, north);
    }
}

/// Fills ghosts of an auxiliary scalar field (bathymetry).
///
/// Periodic sides wrap; other sides keep whatever was sampled there, since
/// auxiliary fields are given analytically.
pub fn fill_scalar_ghosts<const N: usize>(grid: &Grid, b: &mut ScalarField, bc: &BoundarySpec<N>) {
    let (nx, ny) = (grid.nx, grid.ny);
    if bc.west.is_periodic() {
        for j in 1..=ny {
            let w = *b.get(nx, j);
            let e = *b.get(1, j);
            b.set(0, j, w);
            b.set(nx + 1, j, e);
        }
    }
    if bc.south.is_periodic() {
        for i in 0..=nx + 1 {
            let s = *b.get(i, ny);
            let n = *b.get(i, 1);
            b.set(i, 0, s);
            b.set(i, ny + 1, n);
        }
    }
}

/// Copies global-flux values into the ghosts of transmissive sides.
///
/// `fields` holds every per-cell quantity that must follow the rule (the
/// global flux and, optionally, its parts). West/east copies run over all
/// rows first, then south/north over all columns, so a doubly transmissive
/// ghost corner takes the value of its diagonal interior neighbour.
pub fn copy_transmissive<const N: usize, const M: usize>(
    grid: &Grid,
    bc: &BoundarySpec<M>,
    fields: &mut [&mut StateField<N>],
) {
    let (nx, ny) = (grid.nx, grid.ny);
    for f in fields.iter_mut() {
        for j in 0..=ny + 1 {
            if bc.west.is_transmissive() {
                let v = *f.get(1, j);
                f.set(0, j, v);
            }
            if bc.east.is_transmissive() {
                let v = *f.get(nx, j);
                f.set(nx + 1, j, v);
            }
        }
        for i in 0..=nx + 1 {
            if bc.south.is_transmissive() {
                let v = *f.get(i, 1);
                f.set(i, 0, v);
            }
            if bc.north.is_transmissive() {
                let v = *f.get(i, ny);
                f.set(i, ny + 1, v);
            }
        }
    }
}

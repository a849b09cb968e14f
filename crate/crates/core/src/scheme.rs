//! A spatial discretization bound to a grid, system and boundary setup.

use std::str::FromStr;

use crate::boundary::{fill_scalar_ghosts, fill_state_ghosts, BoundarySpec};
use crate::error::{Error, Result};
use crate::field::{ScalarField, StateField};
use crate::fv::{fv_rate, ReconstructionConfig};
use crate::gf::{gf_rate, gf_rate_compact, GfOptions};
use crate::mesh::Grid;
use crate::systems::HyperbolicSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Gf,
    Fv1,
    Fv2,
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gf" => Ok(SchemeKind::Gf),
            "fv1" => Ok(SchemeKind::Fv1),
            "fv2" => Ok(SchemeKind::Fv2),
            _ => Err(Error::Config(format!("unknown scheme '{s}' (gf|fv1|fv2)"))),
        }
    }
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Gf => "gf",
            SchemeKind::Fv1 => "fv1",
            SchemeKind::Fv2 => "fv2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Gf(GfOptions),
    /// Compact assembly of the global-flux scheme (periodic and Dirichlet sides only).
    GfCompact(GfOptions),
    Fv(ReconstructionConfig),
}

impl Scheme {
    pub fn from_kind(kind: SchemeKind, theta: f64) -> Result<Self> {
        Ok(match kind {
            SchemeKind::Gf => Scheme::Gf(GfOptions::default()),
            SchemeKind::Fv1 => Scheme::Fv(ReconstructionConfig::first_order()),
            SchemeKind::Fv2 => Scheme::Fv(ReconstructionConfig::second_order(theta)?),
        })
    }
}

pub struct Discretization<'a, const N: usize, S: HyperbolicSystem<N>> {
    pub grid: &'a Grid,
    pub sys: &'a S,
    pub bc: BoundarySpec<N>,
    pub bathymetry: Option<ScalarField>,
    pub scheme: Scheme,
}

impl<'a, const N: usize, S: HyperbolicSystem<N>> Discretization<'a, N, S> {
    pub fn new(
        grid: &'a Grid,
        sys: &'a S,
        bc: BoundarySpec<N>,
        bathymetry: Option<ScalarField>,
        scheme: Scheme,
    ) -> Self {
        let bathymetry = bathymetry.map(|mut b| {
            fill_scalar_ghosts(grid, &mut b, &bc);
            b
        });
        Discretization {
            grid,
            sys,
            bc,
            bathymetry,
            scheme,
        }
    }

    /// Sets the speed scale of the alpha floor, for global-flux schemes.
    pub fn with_reference_speed(mut self, speed: f64) -> Self {
        match &mut self.scheme {
            Scheme::Gf(o) | Scheme::GfCompact(o) => o.reference_speed = speed,
            Scheme::Fv(_) => {}
        }
        self
    }

    /// Copy of `q` with its ghost ring filled.
    pub fn with_ghosts(&self, q: &StateField<N>) -> StateField<N> {
        let mut q = q.clone();
        fill_state_ghosts(self.grid, &mut q, &self.bc);
        q
    }

    pub fn rate(&self, q: &StateField<N>) -> Result<StateField<N>> {
        let q = self.with_ghosts(q);
        let b = self.bathymetry.as_ref();
        match &self.scheme {
            Scheme::Gf(o) => gf_rate(self.grid, self.sys, &q, b, &self.bc, o),
            Scheme::GfCompact(o) => gf_rate_compact(self.grid, self.sys, &q, b, &self.bc, o),
            Scheme::Fv(r) => fv_rate(self.grid, self.sys, &q, b, &self.bc, r),
        }
    }
}

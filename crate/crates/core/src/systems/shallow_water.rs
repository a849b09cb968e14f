use super::{Direction, HyperbolicSystem, SystemKind, GRAVITY};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Shallow water equations over bathymetry, `q = (h, hu, hv)`.
///
/// Primitive variables are `(h, u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShallowWater {
    pub g: f64,
}

impl Default for ShallowWater {
    fn default() -> Self {
        ShallowWater { g: GRAVITY }
    }
}

impl ShallowWater {
    pub fn new(g: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::Config(format!("gravity must be positive, got {g}")));
        }
        Ok(ShallowWater { g })
    }

    fn velocity(&self, q: &[f64; 3]) -> Result<(f64, f64)> {
        let h = q[0];
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::inadmissible("non-positive water height", q));
        }
        if !q[1].is_finite() || !q[2].is_finite() {
            return Err(Error::inadmissible("non-finite discharge", q));
        }
        Ok((q[1] / h, q[2] / h))
    }
}

impl HyperbolicSystem<3> for ShallowWater {
    fn kind(&self) -> SystemKind {
        SystemKind::ShallowWater
    }

    fn component_names(&self) -> [&'static str; 3] {
        ["h", "hu", "hv"]
    }

    fn check(&self, q: &[f64; 3]) -> Result<()> {
        self.velocity(q).map(|_| ())
    }

    fn flux(&self, q: &[f64; 3], dir: Direction) -> Result<[f64; 3]> {
        let (u, v) = self.velocity(q)?;
        let [h, mx, my] = *q;
        let hydro = 0.5 * self.g * h * h;
        Ok(match dir {
            Direction::X => [mx, mx * u + hydro, mx * v],
            Direction::Y => [my, my * u, my * v + hydro],
        })
    }

    fn jacobian(&self, q: &[f64; 3], dir: Direction) -> Result<Matrix<3>> {
        let (u, v) = self.velocity(q)?;
        let gh = self.g * q[0];
        Ok(match dir {
            Direction::X => [[0.0, 1.0, 0.0], [gh - u * u, 2.0 * u, 0.0], [-u * v, v, u]],
            Direction::Y => [[0.0, 0.0, 1.0], [-u * v, v, u], [gh - v * v, 0.0, 2.0 * v]],
        })
    }

    fn max_wave_speed(&self, q: &[f64; 3]) -> Result<f64> {
        let (u, v) = self.velocity(q)?;
        Ok(u.abs().max(v.abs()) + (self.g * q[0]).sqrt())
    }

    fn to_conservative(&self, prim: &[f64; 3]) -> Result<[f64; 3]> {
        let [h, u, v] = *prim;
        if !(h > 0.0) {
            return Err(Error::inadmissible("non-positive water height", prim));
        }
        Ok([h, h * u, h * v])
    }

    fn to_primitive(&self, q: &[f64; 3]) -> Result<[f64; 3]> {
        let (u, v) = self.velocity(q)?;
        Ok([q[0], u, v])
    }

    fn swap_xy(&self, q: &[f64; 3]) -> [f64; 3] {
        [q[0], q[2], q[1]]
    }

    fn bathymetry_increment(
        &self,
        qa: &[f64; 3],
        qb: &[f64; 3],
        ba: f64,
        bb: f64,
        dir: Direction,
    ) -> Option<[f64; 3]> {
        let inc = self.g * 0.5 * (qa[0] + qb[0]) * (bb - ba);
        Some(match dir {
            Direction::X => [0.0, inc, 0.0],
            Direction::Y => [0.0, 0.0, inc],
        })
    }

    fn bathymetry_source(&self, q: &[f64; 3], dbdx: f64, dbdy: f64) -> Option<[f64; 3]> {
        let gh = self.g * q[0];
        Some([0.0, -gh * dbdx, -gh * dbdy])
    }
}

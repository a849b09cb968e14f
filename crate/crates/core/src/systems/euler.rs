use super::{Direction, HyperbolicSystem, SystemKind, GAMMA};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Compressible Euler equations for a perfect gas, `q = (rho, rho u, rho v, rho E)`.
///
/// Primitive variables are `(rho, u, v, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler {
    pub gamma: f64,
}

impl Default for Euler {
    fn default() -> Self {
        Euler { gamma: GAMMA }
    }
}

impl Euler {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::Config(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Euler { gamma })
    }

    /// Velocity and pressure of an admissible state.
    fn velocity_pressure(&self, q: &[f64; 4]) -> Result<(f64, f64, f64)> {
        let [rho, mx, my, e] = *q;
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::inadmissible("non-positive density", q));
        }
        let u = mx / rho;
        let v = my / rho;
        let internal = e - 0.5 * (mx * u + my * v);
        if !(internal > 0.0) || !internal.is_finite() {
            return Err(Error::inadmissible("non-positive internal energy", q));
        }
        Ok((u, v, (self.gamma - 1.0) * internal))
    }

    pub fn pressure(&self, q: &[f64; 4]) -> Result<f64> {
        self.velocity_pressure(q).map(|(_, _, p)| p)
    }

    pub fn sound_speed(&self, q: &[f64; 4]) -> Result<f64> {
        let (_, _, p) = self.velocity_pressure(q)?;
        Ok((self.gamma * p / q[0]).sqrt())
    }
}

impl HyperbolicSystem<4> for Euler {
    fn kind(&self) -> SystemKind {
        SystemKind::Euler
    }

    fn component_names(&self) -> [&'static str; 4] {
        ["rho", "rhou", "rhov", "rhoE"]
    }

    fn check(&self, q: &[f64; 4]) -> Result<()> {
        self.velocity_pressure(q).map(|_| ())
    }

    fn flux(&self, q: &[f64; 4], dir: Direction) -> Result<[f64; 4]> {
        let (u, v, p) = self.velocity_pressure(q)?;
        let [_, mx, my, e] = *q;
        Ok(match dir {
            Direction::X => [mx, mx * u + p, mx * v, (e + p) * u],
            Direction::Y => [my, my * u, my * v + p, (e + p) * v],
        })
    }

    fn jacobian(&self, q: &[f64; 4], dir: Direction) -> Result<Matrix<4>> {
        let (u, v, p) = self.velocity_pressure(q)?;
        let g1 = self.gamma - 1.0;
        let h = (q[3] + p) / q[0];
        let k = 0.5 * g1 * (u * u + v * v);
        Ok(match dir {
            Direction::X => [
                [0.0, 1.0, 0.0, 0.0],
                [k - u * u, (3.0 - self.gamma) * u, -g1 * v, g1],
                [-u * v, v, u, 0.0],
                [u * (k - h), h - g1 * u * u, -g1 * u * v, self.gamma * u],
            ],
            Direction::Y => [
                [0.0, 0.0, 1.0, 0.0],
                [-u * v, v, u, 0.0],
                [k - v * v, -g1 * u, (3.0 - self.gamma) * v, g1],
                [v * (k - h), -g1 * u * v, h - g1 * v * v, self.gamma * v],
            ],
        })
    }

    fn max_wave_speed(&self, q: &[f64; 4]) -> Result<f64> {
        let (u, v, p) = self.velocity_pressure(q)?;
        Ok(u.abs().max(v.abs()) + (self.gamma * p / q[0]).sqrt())
    }

    fn to_conservative(&self, prim: &[f64; 4]) -> Result<[f64; 4]> {
        let [rho, u, v, p] = *prim;
        if !(rho > 0.0) || !(p > 0.0) {
            return Err(Error::inadmissible("non-positive density or pressure", prim));
        }
        Ok([
            rho,
            rho * u,
            rho * v,
            p / (self.gamma - 1.0) + 0.5 * rho * (u * u + v * v),
        ])
    }

    fn to_primitive(&self, q: &[f64; 4]) -> Result<[f64; 4]> {
        let (u, v, p) = self.velocity_pressure(q)?;
        Ok([q[0], u, v, p])
    }

    fn swap_xy(&self, q: &[f64; 4]) -> [f64; 4] {
        [q[0], q[2], q[1], q[3]]
    }
}

use super::{Direction, HyperbolicSystem, SystemKind};
use crate::error::Result;
use crate::linalg::Matrix;

/// Linear acoustics with unit sound speed, `q = (u, v, p)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Acoustics;

impl HyperbolicSystem<3> for Acoustics {
    fn kind(&self) -> SystemKind {
        SystemKind::Acoustics
    }

    fn component_names(&self) -> [&'static str; 3] {
        ["u", "v", "p"]
    }

    fn check(&self, _q: &[f64; 3]) -> Result<()> {
        Ok(())
    }

    fn flux(&self, q: &[f64; 3], dir: Direction) -> Result<[f64; 3]> {
        let [u, v, p] = *q;
        Ok(match dir {
            Direction::X => [p, 0.0, u],
            Direction::Y => [0.0, p, v],
        })
    }

    fn jacobian(&self, _q: &[f64; 3], dir: Direction) -> Result<Matrix<3>> {
        Ok(match dir {
            Direction::X => [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            Direction::Y => [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
        })
    }

    fn max_wave_speed(&self, _q: &[f64; 3]) -> Result<f64> {
        Ok(1.0)
    }

    fn to_conservative(&self, prim: &[f64; 3]) -> Result<[f64; 3]> {
        Ok(*prim)
    }

    fn to_primitive(&self, q: &[f64; 3]) -> Result<[f64; 3]> {
        Ok(*q)
    }

    fn swap_xy(&self, q: &[f64; 3]) -> [f64; 3] {
        [q[1], q[0], q[2]]
    }
}

//! PDE system models: conservative fluxes, analytic Jacobians and wave speeds.

mod acoustics;
mod euler;
mod shallow_water;

pub use acoustics::Acoustics;
pub use euler::Euler;
pub use shallow_water::ShallowWater;

use crate::error::Result;
use crate::linalg::Matrix;

/// Default gravity for shallow water runs.
pub const GRAVITY: f64 = 9.812;
/// Default ratio of specific heats for the Euler equations.
pub const GAMMA: f64 = 1.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Acoustics,
    Euler,
    ShallowWater,
}

impl SystemKind {
    pub fn n_eq(self) -> usize {
        match self {
            SystemKind::Acoustics | SystemKind::ShallowWater => 3,
            SystemKind::Euler => 4,
        }
    }
}

/// A 2D hyperbolic system `q_t + f(q)_x + g(q)_y = s` with `N` conservative components.
///
/// All evaluations are pure functions of the state. Inadmissible states are
/// reported as [`crate::Error::Inadmissible`] rather than producing NaN.
pub trait HyperbolicSystem<const N: usize>: Send + Sync {
    fn kind(&self) -> SystemKind;

    /// Names of the conservative components, used for output headers.
    fn component_names(&self) -> [&'static str; N];

    fn check(&self, q: &[f64; N]) -> Result<()>;

    fn flux(&self, q: &[f64; N], dir: Direction) -> Result<[f64; N]>;

    /// Analytic Jacobian of `flux` with respect to the conservative variables.
    fn jacobian(&self, q: &[f64; N], dir: Direction) -> Result<Matrix<N>>;

    /// Largest characteristic speed over both directions.
    fn max_wave_speed(&self, q: &[f64; N]) -> Result<f64>;

    fn to_conservative(&self, prim: &[f64; N]) -> Result<[f64; N]>;

    fn to_primitive(&self, q: &[f64; N]) -> Result<[f64; N]>;

    /// Relabels the state under the reflection `x <-> y`.
    fn swap_xy(&self, q: &[f64; N]) -> [f64; N];

    /// Hydrostatic bathymetry increment `g (h_a + h_b)/2 (b_b - b_a)` between two
    /// neighbouring cells along `dir`, folded into the momentum flux of that
    /// direction. `None` for systems without a bathymetry source.
    fn bathymetry_increment(
        &self,
        _qa: &[f64; N],
        _qb: &[f64; N],
        _ba: f64,
        _bb: f64,
        _dir: Direction,
    ) -> Option<[f64; N]> {
        None
    }

    /// Pointwise source `-g h grad b`, for systems that have one.
    fn bathymetry_source(&self, _q: &[f64; N], _dbdx: f64, _dbdy: f64) -> Option<[f64; N]> {
        None
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Central finite-difference Jacobian of the flux.
    pub fn fd_jacobian<const N: usize, S: HyperbolicSystem<N>>(
        sys: &S,
        q: &[f64; N],
        dir: Direction,
        step: f64,
    ) -> Matrix<N> {
        let mut m = [[0.0; N]; N];
        for c in 0..N {
            let h = step * q[c].abs().max(1.0);
            let mut qp = *q;
            let mut qm = *q;
            qp[c] += h;
            qm[c] -= h;
            let fp = sys.flux(&qp, dir).unwrap();
            let fm = sys.flux(&qm, dir).unwrap();
            for r in 0..N {
                m[r][c] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        m
    }

    /// Largest eigenvalue modulus, from a dense complex eigen-decomposition.
    pub fn spectral_radius<const N: usize>(m: &Matrix<N>) -> f64 {
        let dm = nalgebra::DMatrix::from_fn(N, N, |r, c| m[r][c]);
        dm.complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    fn random_euler(rng: &mut impl Rng) -> [f64; 4] {
        let prim = [
            rng.gen_range(0.1..5.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.1..5.0),
        ];
        Euler::default().to_conservative(&prim).unwrap()
    }

    fn random_swe(rng: &mut impl Rng) -> [f64; 3] {
        let h: f64 = rng.gen_range(0.1..5.0);
        [h, h * rng.gen_range(-3.0..3.0), h * rng.gen_range(-3.0..3.0)]
    }

    #[test]
    fn flux_examples() {
        let a = Acoustics;
        assert_eq!(a.flux(&[0.0, 0.0, 1.0], Direction::X).unwrap(), [1.0, 0.0, 0.0]);
        let e = Euler::default();
        let q = e.to_conservative(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        for (a, b) in q.iter().zip([1.0, 0.0, 0.0, 2.5]) {
            assert!(close(*a, b, 1e-15));
        }
        let f = e.flux(&[1.0, 0.0, 0.0, 2.5], Direction::X).unwrap();
        for (a, b) in f.iter().zip([0.0, 1.0, 0.0, 0.0]) {
            assert!(close(*a, b, 1e-15));
        }
        let s = ShallowWater::default();
        let f = s.flux(&[2.0, 6.0, 0.0], Direction::X).unwrap();
        assert!(close(f[1], 37.624, 1e-14));
        assert_eq!((f[0], f[2]), (6.0, 0.0));
    }

    #[test]
    fn jacobian_examples() {
        let a = Acoustics.jacobian(&[3.0, -1.0, 2.0], Direction::X).unwrap();
        assert_eq!(a, [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let s = ShallowWater::default().jacobian(&[1.0, 0.0, 0.0], Direction::X).unwrap();
        assert_eq!(s, [[0.0, 1.0, 0.0], [GRAVITY, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let e = Euler::default();
        let q = [1.0, 0.0, 0.0, 2.5];
        for dir in [Direction::X, Direction::Y] {
            let an = e.jacobian(&q, dir).unwrap();
            let fd = fd_jacobian(&e, &q, dir, 1e-7);
            for r in 0..4 {
                for c in 0..4 {
                    assert!(close(an[r][c], fd[r][c], 1e-6));
                }
            }
        }
    }

    #[test]
    fn wave_speed_examples() {
        assert_eq!(Acoustics.max_wave_speed(&[5.0, 1.0, -2.0]).unwrap(), 1.0);
        let c = Euler::default().max_wave_speed(&[1.0, 0.0, 0.0, 2.5]).unwrap();
        assert!((c - 1.18322).abs() < 1e-5);
        let c = ShallowWater::default().max_wave_speed(&[1.0, 0.0, 0.0]).unwrap();
        assert!((c - 3.13241).abs() < 1e-5);
    }

    #[test]
    fn inadmissible_states_are_rejected() {
        let e = Euler::default();
        assert!(e.flux(&[-1.0, 0.0, 0.0, 1.0], Direction::X).is_err());
        assert!(e.flux(&[1.0, 3.0, 0.0, 1.0], Direction::X).is_err());
        let s = ShallowWater::default();
        assert!(s.max_wave_speed(&[0.0, 0.0, 0.0]).is_err());
        assert!(s.to_conservative(&[-1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn primitive_round_trip() {
        let s = ShallowWater::default();
        assert_eq!(s.to_conservative(&[2.0, 3.0, 0.0]).unwrap(), [2.0, 6.0, 0.0]);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let e = Euler::default();
        for _ in 0..100 {
            let q = random_euler(&mut rng);
            let back = e.to_conservative(&e.to_primitive(&q).unwrap()).unwrap();
            for k in 0..4 {
                assert!(close(q[k], back[k], 1e-14));
            }
            let q = random_swe(&mut rng);
            let back = s.to_conservative(&s.to_primitive(&q).unwrap()).unwrap();
            for k in 0..3 {
                assert!(close(q[k], back[k], 1e-14));
            }
        }
    }

    fn check_jacobian_and_spectrum<const N: usize, S: HyperbolicSystem<N>>(
        sys: &S,
        states: &[[f64; N]],
        tol: f64,
    ) {
        for q in states {
            let lam = sys.max_wave_speed(q).unwrap();
            for dir in [Direction::X, Direction::Y] {
                let an = sys.jacobian(q, dir).unwrap();
                let fd = fd_jacobian(sys, q, dir, 1e-7);
                let scale = an.iter().flatten().fold(1.0_f64, |m, x| m.max(x.abs()));
                for r in 0..N {
                    for c in 0..N {
                        assert!(
                            (an[r][c] - fd[r][c]).abs() <= tol * scale,
                            "{:?} {q:?} ({r},{c}): {} vs {}",
                            sys.kind(),
                            an[r][c],
                            fd[r][c]
                        );
                    }
                }
                assert!(spectral_radius(&an) <= lam + 1e-10);
            }
        }
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let e: Vec<_> = (0..100).map(|_| random_euler(&mut rng)).collect();
        check_jacobian_and_spectrum(&Euler::default(), &e, 1e-6);
        let s: Vec<_> = (0..100).map(|_| random_swe(&mut rng)).collect();
        check_jacobian_and_spectrum(&ShallowWater::default(), &s, 1e-6);
        // linear system: columns of the Jacobian are the fluxes of unit vectors
        for _ in 0..100 {
            let q: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            for dir in [Direction::X, Direction::Y] {
                let an = Acoustics.jacobian(&q, dir).unwrap();
                for c in 0..3 {
                    let mut e = [0.0; 3];
                    e[c] = 1.0;
                    let col = Acoustics.flux(&e, dir).unwrap();
                    for r in 0..3 {
                        assert_eq!(an[r][c], col[r]);
                    }
                }
                assert!(spectral_radius(&an) <= 1.0 + 1e-10);
            }
        }
    }

    fn check_swap<const N: usize, S: HyperbolicSystem<N>>(sys: &S, q: &[f64; N]) {
        let fx = sys.flux(q, Direction::X).unwrap();
        let gy = sys.flux(&sys.swap_xy(q), Direction::Y).unwrap();
        assert_eq!(sys.swap_xy(&fx), gy);
    }

    #[test]
    fn rotational_symmetry() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..50 {
            check_swap(&Euler::default(), &random_euler(&mut rng));
            check_swap(&ShallowWater::default(), &random_swe(&mut rng));
            check_swap(&Acoustics, &[rng.gen(), rng.gen(), rng.gen()]);
        }
    }
}

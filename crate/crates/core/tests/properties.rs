use gflux::boundary::{fill_state_ghosts, BoundaryKind, BoundarySpec};
use gflux::cases::CaseSpec;
use gflux::diagnostics::{build_operator_set, reflection_asymmetry};
use gflux::fv::{fv_rate, rusanov_flux, ReconstructionConfig};
use gflux::gf::{
    compute_global_fluxes, corner_flux, gf_rate, gf_rate_compact_from_point_values, gf_rate_from_point_values,
    CornerResidual, GfOptions, PointValues,
};
use gflux::mesh::ORIENTATIONS;
use gflux::oracle1d::{gf_quasi1d_flux, rusanov_1d_update, Line1D};
use gflux::run::{run_case, RunOptions};
use gflux::scheme::SchemeKind;
use gflux::systems::{Acoustics, Direction, Euler, HyperbolicSystem, ShallowWater};
use gflux::{Grid, StateField};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn acoustic_state(rng: &mut StdRng) -> [f64; 3] {
    [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
}

fn euler_state(rng: &mut StdRng) -> [f64; 4] {
    let prim = [
        rng.gen_range(0.5..2.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(0.5..2.0),
    ];
    Euler::default().to_conservative(&prim).unwrap()
}

/// States close to a common base, so that limited traces stay admissible.
fn mild_euler_state(rng: &mut StdRng) -> [f64; 4] {
    let prim = [
        rng.gen_range(0.9..1.1),
        rng.gen_range(-0.3..0.3),
        rng.gen_range(-0.3..0.3),
        rng.gen_range(0.9..1.1),
    ];
    Euler::default().to_conservative(&prim).unwrap()
}

fn swe_state(rng: &mut StdRng) -> [f64; 3] {
    let h = rng.gen_range(0.5..2.0);
    [h, h * rng.gen_range(-1.0..1.0), h * rng.gen_range(-1.0..1.0)]
}

fn random_field<const N: usize>(
    grid: &Grid,
    rng: &mut StdRng,
    state: fn(&mut StdRng) -> [f64; N],
    bc: &BoundarySpec<N>,
) -> StateField<N> {
    let mut q = StateField::from_fn(grid, |_, _| state(rng));
    fill_state_ghosts(grid, &mut q, bc);
    q
}

fn max_abs<const N: usize>(q: &StateField<N>) -> f64 {
    q.interior_max_abs().iter().cloned().fold(0.0, f64::max)
}

fn max_diff<const N: usize>(a: &StateField<N>, b: &StateField<N>) -> f64 {
    a.interior()
        .flat_map(|(i, j, v)| (0..N).map(move |k| (v[k] - b.get(i, j)[k]).abs()))
        .fold(0.0, f64::max)
}

fn grid(nx: usize, ny: usize) -> Grid {
    Grid::new(nx, ny, [0.0, 1.0, 0.0, ny as f64 / nx as f64], 1).unwrap()
}

fn check_corner_conservation<const N: usize, S: HyperbolicSystem<N>>(
    sys: &S,
    g: &Grid,
    rng: &mut StdRng,
    state: fn(&mut StdRng) -> [f64; N],
) {
    let bc = BoundarySpec::periodic();
    let q = random_field(g, rng, state, &bc);
    let pv = PointValues::fluxes(g, sys, &q).unwrap();
    let gf = compute_global_fluxes(g, &pv, &bc);
    let opts = GfOptions::default();
    for j in 0..=g.ny {
        for i in 0..=g.nx {
            let cr = CornerResidual::from_global_flux(g, sys, &q, &gf, i, j, &opts).unwrap();
            let fl: Vec<[f64; N]> = ORIENTATIONS.iter().map(|&o| corner_flux(&cr, &gf, g, i, j, o)).collect();
            let scale = fl.iter().flatten().fold(1.0f64, |a, b| a.max(b.abs()));
            for k in 0..N {
                let s: f64 = fl.iter().map(|f| f[k]).sum();
                assert!(s.abs() <= 1e-12 * scale, "corner ({i},{j}) component {k}: {s}");
            }
        }
    }
}

fn check_compact_equivalence<const N: usize, S: HyperbolicSystem<N>>(
    sys: &S,
    g: &Grid,
    rng: &mut StdRng,
    state: fn(&mut StdRng) -> [f64; N],
) {
    let bc = BoundarySpec::periodic();
    let q = random_field(g, rng, state, &bc);
    let mut s = StateField::from_fn(g, |_, _| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
    fill_state_ghosts(g, &mut s, &bc);
    let pv = PointValues::fluxes(g, sys, &q).unwrap().with_source(s);
    let opts = GfOptions::default();
    let a = gf_rate_from_point_values(g, sys, &q, &pv, &bc, &opts).unwrap();
    let b = gf_rate_compact_from_point_values(g, sys, &q, &pv, &bc, &opts).unwrap();
    let d = max_diff(&a, &b);
    assert!(d <= 1e-12 * max_abs(&a).max(1.0), "recursive vs compact differ by {d}");
}

fn check_jacobian<const N: usize, S: HyperbolicSystem<N>>(sys: &S, q: &[f64; N]) {
    for dir in [Direction::X, Direction::Y] {
        let jac = sys.jacobian(q, dir).unwrap();
        for c in 0..N {
            let h = 1e-6 * q[c].abs().max(1.0);
            let (mut qp, mut qm) = (*q, *q);
            qp[c] += h;
            qm[c] -= h;
            let (fp, fm) = (sys.flux(&qp, dir).unwrap(), sys.flux(&qm, dir).unwrap());
            for r in 0..N {
                let fd = (fp[r] - fm[r]) / (2.0 * h);
                let err = (fd - jac[r][c]).abs();
                assert!(err <= 1e-6 * jac[r][c].abs().max(1.0), "d f{r} / d q{c}: {fd} vs {}", jac[r][c]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(100) })]

    #[test]
    fn corner_fluxes_sum_to_zero(seed in any::<u64>(), nx in 3usize..8, ny in 3usize..8) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = grid(nx, ny);
        check_corner_conservation(&Acoustics, &g, &mut rng, acoustic_state);
        check_corner_conservation(&Euler::default(), &g, &mut rng, euler_state);
        check_corner_conservation(&ShallowWater::default(), &g, &mut rng, swe_state);
    }

    #[test]
    fn recursive_and_compact_assemblies_agree(seed in any::<u64>(), nx in 3usize..9, ny in 3usize..9) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = grid(nx, ny);
        check_compact_equivalence(&Acoustics, &g, &mut rng, acoustic_state);
        check_compact_equivalence(&Euler::default(), &g, &mut rng, euler_state);
        check_compact_equivalence(&ShallowWater::default(), &g, &mut rng, swe_state);
    }

    #[test]
    fn jacobians_match_finite_differences(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        check_jacobian(&Acoustics, &acoustic_state(&mut rng));
        check_jacobian(&Euler::default(), &euler_state(&mut rng));
        check_jacobian(&ShallowWater::default(), &swe_state(&mut rng));
    }

    #[test]
    fn rusanov_is_consistent(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = Euler::default();
        let q = euler_state(&mut rng);
        for dir in [Direction::X, Direction::Y] {
            prop_assert_eq!(rusanov_flux(&e, &q, &q, dir).unwrap(), e.flux(&q, dir).unwrap());
        }
    }

    #[test]
    fn separable_global_flux_is_stationary(seed in any::<u64>(), nx in 3usize..8, ny in 3usize..8) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = grid(nx, ny);
        let bc = BoundarySpec::periodic();
        let e = Euler::default();
        let q = random_field(&g, &mut rng, euler_state, &bc);
        let rows: Vec<[f64; 4]> = (0..=ny + 1).map(|_| std::array::from_fn(|_| rng.gen_range(-2.0..2.0))).collect();
        let cols: Vec<[f64; 4]> = (0..=nx + 1).map(|_| std::array::from_fn(|_| rng.gen_range(-2.0..2.0))).collect();
        let mut f = StateField::zeros(&g);
        let mut gg = StateField::zeros(&g);
        for j in 0..=ny + 1 {
            for i in 0..=nx + 1 {
                f.set(i, j, rows[j]);
                gg.set(i, j, cols[i]);
            }
        }
        let pv = PointValues { f, g: gg, s: None, incx: None, incy: None };
        let r = gf_rate_from_point_values(&g, &e, &q, &pv, &bc, &GfOptions::default()).unwrap();
        prop_assert!(max_abs(&r) <= 1e-13, "rate {}", max_abs(&r));
    }

    #[test]
    fn gf_and_fv_are_conservative(seed in any::<u64>(), nx in 3usize..9, ny in 3usize..9) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = grid(nx, ny);
        let bc = BoundarySpec::periodic();
        let e = Euler::default();
        let q = random_field(&g, &mut rng, mild_euler_state, &bc);
        let rates = [
            gf_rate(&g, &e, &q, None, &bc, &GfOptions::default()).unwrap(),
            fv_rate(&g, &e, &q, None, &bc, &ReconstructionConfig::first_order()).unwrap(),
            fv_rate(&g, &e, &q, None, &bc, &ReconstructionConfig::second_order(1.3).unwrap()).unwrap(),
        ];
        for r in &rates {
            for k in 0..4 {
                let sum: f64 = r.interior().map(|(_, _, v)| v[k]).sum();
                let abs: f64 = r.interior().map(|(_, _, v)| v[k].abs()).sum();
                prop_assert!(sum.abs() <= 1e-12 * abs.max(1.0), "component {}: {} of {}", k, sum, abs);
            }
        }
    }

    #[test]
    fn schemes_commute_with_reflection(seed in any::<u64>(), n in 3usize..9) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = grid(n, n);
        let bc = BoundarySpec::periodic();
        let e = Euler::default();
        let q = random_field(&g, &mut rng, mild_euler_state, &bc);
        let mut qs = StateField::zeros(&g);
        for j in 0..=n + 1 {
            for i in 0..=n + 1 {
                qs.set(j, i, e.swap_xy(q.get(i, j)));
            }
        }
        let schemes: [&dyn Fn(&StateField<4>) -> StateField<4>; 3] = [
            &|q| gf_rate(&g, &e, q, None, &bc, &GfOptions::default()).unwrap(),
            &|q| fv_rate(&g, &e, q, None, &bc, &ReconstructionConfig::first_order()).unwrap(),
            &|q| fv_rate(&g, &e, q, None, &bc, &ReconstructionConfig::second_order(1.3).unwrap()).unwrap(),
        ];
        for rate in schemes {
            let (a, b) = (rate(&q), rate(&qs));
            let scale = max_abs(&a).max(1.0);
            for (i, j, v) in a.interior() {
                let w = e.swap_xy(b.get(j, i));
                for k in 0..4 {
                    prop_assert!((v[k] - w[k]).abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn stabilization_form_is_negative_sum_of_squares(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let ops = build_operator_set(8).unwrap();
        let mut draw = || (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
        let (u, v, p) = (draw(), draw(), draw());
        let form = ops.stabilization_energy_form(&u, &v, &p).unwrap();
        let squares = ops.stabilization_sum_of_squares(&u, &v, &p).unwrap();
        prop_assert!(form <= 0.0);
        prop_assert!((form - squares).abs() <= 1e-12 * squares.abs(), "{} vs {}", form, squares);
    }

    #[test]
    fn y_constant_data_reduces_to_one_dimension(seed in any::<u64>(), n in 3usize..10) {
        let mut rng = StdRng::seed_from_u64(seed);
        check_quasi1d(&Acoustics, n, &mut rng, acoustic_state);
        check_quasi1d(&Euler::default(), n, &mut rng, euler_state);
        check_quasi1d(&ShallowWater::default(), n, &mut rng, swe_state);
    }

    #[test]
    fn transmissive_sides_have_no_boundary_residual(seed in any::<u64>(), nx in 3usize..8, ny in 3usize..8) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = grid(nx, ny);
        let bc = BoundarySpec::uniform(BoundaryKind::Transmissive).unwrap();
        let e = Euler::default();
        let q = random_field(&g, &mut rng, euler_state, &bc);
        let pv = PointValues::fluxes(&g, &e, &q).unwrap();
        let gf = compute_global_fluxes(&g, &pv, &bc);
        let opts = GfOptions::default();
        for j in 0..=ny {
            for i in 0..=nx {
                if i == 0 || j == 0 || i == nx || j == ny {
                    let cr = CornerResidual::from_global_flux(&g, &e, &q, &gf, i, j, &opts).unwrap();
                    prop_assert!(cr.phi.iter().all(|v| v.abs() <= 1e-13), "corner ({},{}): {:?}", i, j, cr.phi);
                }
            }
        }
    }
}

fn check_quasi1d<const N: usize, S: HyperbolicSystem<N>>(
    sys: &S,
    n: usize,
    rng: &mut StdRng,
    state: fn(&mut StdRng) -> [f64; N],
) {
    let line: Vec<[f64; N]> = (0..n).map(|_| state(rng)).collect();
    let g = Grid::new(n, 4, [0.0, 1.0, 0.0, 4.0 / n as f64], 1).unwrap();
    let bc = BoundarySpec::periodic();
    let mut q = StateField::from_fn(&g, |_, _| [0.0; N]);
    for j in 1..=g.ny {
        for i in 1..=n {
            q.set(i, j, line[i - 1]);
        }
    }
    fill_state_ghosts(&g, &mut q, &bc);
    let l1 = Line1D::new(g.dx, line).unwrap();

    let opts = GfOptions::default();
    let r = gf_rate(&g, sys, &q, None, &bc, &opts).unwrap();
    let flux = gf_quasi1d_flux(&l1, sys, None, &opts).unwrap();
    let scale = flux.iter().flatten().fold(1.0f64, |a, b| a.max(b.abs())) / g.dx;
    for j in 1..=g.ny {
        for i in 1..=n {
            let (fl, fr) = (&flux[(i + n - 2) % n], &flux[i - 1]);
            for k in 0..N {
                let expect = -(fr[k] - fl[k]) / g.dx;
                let got = r.get(i, j)[k];
                assert!((got - expect).abs() <= 1e-13 * scale, "GF cell {i}: {got} vs {expect}");
            }
        }
    }

    let r = fv_rate(&g, sys, &q, None, &bc, &ReconstructionConfig::first_order()).unwrap();
    let expect = rusanov_1d_update(&l1, sys).unwrap();
    let scale = expect.iter().flatten().fold(1.0f64, |a, b| a.max(b.abs()));
    for j in 1..=g.ny {
        for i in 1..=n {
            for k in 0..N {
                let (got, want) = (r.get(i, j)[k], expect[i - 1][k]);
                assert!((got - want).abs() <= 1e-14 * scale, "FV-1 cell {i}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn acoustic_run_conserves_totals() {
    let spec: CaseSpec = "acoustic_vortex".parse().unwrap();
    let mut opts = RunOptions::new(SchemeKind::Gf, 10.0);
    opts.time.max_steps = 100;
    let out = run_case(&spec, 20, 20, &opts, |_, _, _| {}).unwrap();
    assert_eq!(out.stats.steps, 100);
    assert!(out.conservation_drift.iter().all(|d| *d <= 1e-12), "{:?}", out.conservation_drift);
}

#[test]
fn low_mach_vortex_reaches_target_mach() {
    for ma in [1e-2, 1e-4, 1e-6] {
        let mut spec: CaseSpec = "euler_vortex".parse().unwrap();
        spec.set_param("mach", ma).unwrap();
        let g = spec.grid(40, 40).unwrap();
        let gflux::cases::CaseSetup::Euler(s) = spec.init_case(&g).unwrap() else {
            panic!("euler case expected");
        };
        let m = CaseSpec::max_mach(&s.q).unwrap();
        assert!((m / ma - 1.0).abs() <= 0.05, "target {ma}, got {m}");
    }
}

#[test]
fn sod_run_is_reflection_symmetric() {
    let spec: CaseSpec = "sod_circular".parse().unwrap();
    let opts = RunOptions::new(SchemeKind::Gf, 0.05);
    let out = run_case(&spec, 30, 30, &opts, |_, _, _| {}).unwrap();
    let gflux::run::Field::Euler(q) = &out.field else {
        panic!("euler field expected");
    };
    assert!(reflection_asymmetry(&Euler::default(), q).unwrap() <= 1e-12);
}

//! Error norms, convergence orders, conservation and energy audits, and the
//! periodic operator algebra of the acoustic energy estimate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::StateField;
use crate::mesh::Grid;
use crate::systems::HyperbolicSystem;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
}

/// Per-component `sqrt(dx dy Σ e²)` and `max |e|` over interior cells.
pub fn error_norms<const N: usize>(
    q: &StateField<N>,
    reference: &StateField<N>,
    grid: &Grid,
) -> Result<ErrorNorms> {
    q.check_shape(grid)?;
    reference.check_shape(grid)?;
    let mut sq = [0.0; N];
    let mut linf = [0.0f64; N];
    for ((_, _, a), (_, _, b)) in q.interior().zip(reference.interior()) {
        for k in 0..N {
            let e = a[k] - b[k];
            sq[k] += e * e;
            linf[k] = linf[k].max(e.abs());
        }
    }
    Ok(ErrorNorms {
        l2: sq.iter().map(|s| (s * grid.cell_area()).sqrt()).collect(),
        linf: linf.to_vec(),
    })
}

/// `log2(e_coarse / e_fine)` for a factor-2 refinement.
pub fn observed_order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

/// `‖q_k - ref_k‖∞ / ‖ref_k‖∞`.
pub fn scaled_linf_error<const N: usize>(q: &StateField<N>, reference: &StateField<N>, k: usize) -> f64 {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for ((_, _, a), (_, _, b)) in q.interior().zip(reference.interior()) {
        num = num.max((a[k] - b[k]).abs());
        den = den.max(b[k].abs());
    }
    num / den
}

/// `dx dy Σ (u² + v² + p²) / 2`.
pub fn acoustic_energy(q: &StateField<3>, grid: &Grid) -> f64 {
    grid.cell_area() * q.interior().map(|(_, _, s)| 0.5 * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2])).sum::<f64>()
}

/// Largest `|q(i, j) - swap(q(j, i))|` over interior cells of a square grid.
pub fn reflection_asymmetry<const N: usize, S: HyperbolicSystem<N>>(sys: &S, q: &StateField<N>) -> Result<f64> {
    if q.nx() != q.ny() {
        return Err(Error::SizeMismatch(format!("reflection needs a square grid, got {}x{}", q.nx(), q.ny())));
    }
    let mut m: f64 = 0.0;
    for (i, j, a) in q.interior() {
        let b = sys.swap_xy(q.get(j, i));
        for k in 0..N {
            m = m.max((a[k] - b[k]).abs());
        }
    }
    Ok(m)
}

/// Tracks `Σ q̄` over a run.
#[derive(Debug, Clone)]
pub struct ConservationAudit<const N: usize> {
    initial: [f64; N],
    drift: [f64; N],
}

impl<const N: usize> ConservationAudit<N> {
    pub fn new(q0: &StateField<N>) -> Self {
        ConservationAudit {
            initial: q0.interior_sum(),
            drift: [0.0; N],
        }
    }

    pub fn observe(&mut self, q: &StateField<N>) {
        let s = q.interior_sum();
        for k in 0..N {
            let d = (s[k] - self.initial[k]).abs() / self.initial[k].abs().max(1.0);
            self.drift[k] = self.drift[k].max(d);
        }
    }

    /// Largest relative drift seen so far, per component.
    pub fn drift(&self) -> [f64; N] {
        self.drift
    }
}

/// Max relative drift of a sequence of component sums against the first.
pub fn conservation_audit<const N: usize>(sums: &[[f64; N]]) -> [f64; N] {
    let mut out = [0.0; N];
    if let Some(first) = sums.first() {
        for s in sums {
            for k in 0..N {
                out[k] = f64::max(out[k], (s[k] - first[k]).abs() / first[k].abs().max(1.0));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyCheck {
    pub monotone: bool,
    /// Largest `E(t + dt) - E(t) - 2 λ² dt E(t)` over steps; positive means violated.
    pub worst_excess: f64,
}

/// Checks `E(t + dt) <= E(t) + C dt² E(t)` with `C = 2 λ² / dt`.
pub fn energy_monotone(energies: &[f64], dts: &[f64], lambda: f64) -> EnergyCheck {
    let mut worst = f64::NEG_INFINITY;
    for (w, dt) in energies.windows(2).zip(dts) {
        let bound = 2.0 * lambda * lambda * dt * w[0];
        worst = worst.max(w[1] - w[0] - bound);
    }
    EnergyCheck {
        monotone: worst <= 0.0,
        worst_excess: if worst.is_finite() { worst } else { 0.0 },
    }
}

/// Square dense matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense { n, a: vec![0.0; n * n] }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.n + c]
    }

    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * self.n + c] = v;
    }

    /// Circulant with `row0[k]` on offset `k`.
    fn circulant(n: usize, row0: &[(usize, f64)]) -> Self {
        let mut m = Dense::zeros(n);
        for r in 0..n {
            for &(k, v) in row0 {
                m.set(r, (r + k) % n, v);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Dense::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        Dense {
            n: self.n,
            a: self.a.iter().map(|v| v * s).collect(),
        }
    }

    pub fn matmul(&self, o: &Dense) -> Self {
        let n = self.n;
        let mut m = Dense::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..n {
                    m.a[r * n + c] += a * o.get(k, c);
                }
            }
        }
        m
    }

    /// `self ⊗ o`; the first factor acts on the slow index.
    pub fn kron(&self, o: &Dense) -> Self {
        let (n, m) = (self.n, o.n);
        let mut k = Dense::zeros(n * m);
        for a in 0..n {
            for c in 0..n {
                let s = self.get(a, c);
                if s == 0.0 {
                    continue;
                }
                for b in 0..m {
                    for d in 0..m {
                        k.set(a * m + b, c * m + d, s * o.get(b, d));
                    }
                }
            }
        }
        k
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Periodic difference and average matrices and their tensor compositions, at unit spacing.
///
/// Grid functions are flattened as `i * n + j`, `i` along x.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub n: usize,
    pub d_plus: Dense,
    pub d_minus: Dense,
    pub m_plus: Dense,
    pub m_minus: Dense,
    pub dx_bar: Dense,
    pub dy_bar: Dense,
    pub dxx_bar: Dense,
    pub dyy_bar: Dense,
    pub dxy: Dense,
}

pub fn build_operator_set(n: usize) -> Result<OperatorSet> {
    if n < 3 {
        return Err(Error::SizeMismatch(format!("operator set needs n >= 3, got {n}")));
    }
    let d_plus = Dense::circulant(n, &[(0, -1.0), (1, 1.0)]);
    let m_plus = Dense::circulant(n, &[(0, 0.5), (1, 0.5)]);
    let d_minus = d_plus.transpose().scale(-1.0);
    let m_minus = m_plus.transpose();
    let dm = d_plus.matmul(&m_minus);
    let mm = m_plus.matmul(&m_minus);
    let dd = d_plus.matmul(&d_minus);
    Ok(OperatorSet {
        n,
        dx_bar: dm.kron(&mm),
        dy_bar: mm.kron(&dm),
        dxx_bar: dd.kron(&mm),
        dyy_bar: mm.kron(&dd),
        dxy: dm.kron(&dm),
        d_plus,
        d_minus,
        m_plus,
        m_minus,
    })
}

impl OperatorSet {
    fn check(&self, fields: &[&[f64]]) -> Result<()> {
        let len = self.n * self.n;
        for f in fields {
            if f.len() != len {
                return Err(Error::SizeMismatch(format!("field of length {} for n = {}", f.len(), self.n)));
            }
        }
        Ok(())
    }

    /// `pᵀD̄ₓₓp + pᵀD̄ᵧᵧp + uᵀD̄ₓₓu + uᵀDₓᵧv + vᵀDₓᵧu + vᵀD̄ᵧᵧv`.
    pub fn stabilization_energy_form(&self, u: &[f64], v: &[f64], p: &[f64]) -> Result<f64> {
        self.check(&[u, v, p])?;
        Ok(dot(p, &self.dxx_bar.apply(p))
            + dot(p, &self.dyy_bar.apply(p))
            + dot(u, &self.dxx_bar.apply(u))
            + dot(u, &self.dxy.apply(v))
            + dot(v, &self.dxy.apply(u))
            + dot(v, &self.dyy_bar.apply(v)))
    }

    /// `-‖(D⊗M)p‖² - ‖(M⊗D)p‖² - ‖(D⊗M)u + (M⊗D)v‖²` with `D = D₋`, `M = M₋`.
    pub fn stabilization_sum_of_squares(&self, u: &[f64], v: &[f64], p: &[f64]) -> Result<f64> {
        self.check(&[u, v, p])?;
        let dm = self.d_minus.kron(&self.m_minus);
        let md = self.m_minus.kron(&self.d_minus);
        let (a, b) = (dm.apply(p), md.apply(p));
        let div: Vec<f64> = dm.apply(u).iter().zip(md.apply(v)).map(|(x, y)| x + y).collect();
        Ok(-dot(&a, &a) - dot(&b, &b) - dot(&div, &div))
    }

    /// Rate of the 9-point acoustic scheme in matrix form, returned as `(u, v, p)` rates.
    pub fn acoustic_rate(
        &self,
        dx: f64,
        dy: f64,
        alpha_delta: f64,
        u: &[f64],
        v: &[f64],
        p: &[f64],
    ) -> Result<[Vec<f64>; 3]> {
        self.check(&[u, v, p])?;
        let c = 0.5 * alpha_delta;
        let (ax, ay) = (1.0 / dx, 1.0 / dy);
        let (axx, ayy, axy) = (ax * ax, ay * ay, ax * ay);
        let zip = |terms: Vec<(f64, Vec<f64>)>| -> Vec<f64> {
            (0..u.len()).map(|k| terms.iter().map(|(s, t)| s * t[k]).sum()).collect()
        };
        let du = zip(vec![
            (-ax, self.dx_bar.apply(p)),
            (c * axx, self.dxx_bar.apply(u)),
            (c * axy, self.dxy.apply(v)),
        ]);
        let dv = zip(vec![
            (-ay, self.dy_bar.apply(p)),
            (c * axy, self.dxy.apply(u)),
            (c * ayy, self.dyy_bar.apply(v)),
        ]);
        let dp = zip(vec![
            (-ax, self.dx_bar.apply(u)),
            (-ay, self.dy_bar.apply(v)),
            (c * axx, self.dxx_bar.apply(p)),
            (c * ayy, self.dyy_bar.apply(p)),
        ]);
        Ok([du, dv, dp])
    }
}

/// Flattens one component of the interior as `(i - 1) * ny + (j - 1)`.
pub fn flatten_component<const N: usize>(q: &StateField<N>, k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(q.nx() * q.ny());
    for i in 1..=q.nx() {
        for j in 1..=q.ny() {
            out.push(q.get(i, j)[k]);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelResult {
    pub nx: usize,
    pub ny: usize,
    pub errors: ErrorNorms,
    pub conservation_drift: Vec<f64>,
    pub steps: usize,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub case: String,
    pub scheme: String,
    pub components: Vec<String>,
    pub levels: Vec<LevelResult>,
    pub config_hash: String,
}

impl ConvergenceReport {
    /// Orders between consecutive levels, `None` unless the pair is a 2× refinement.
    pub fn orders(&self, component: usize, linf: bool) -> Vec<Option<f64>> {
        self.levels
            .windows(2)
            .map(|w| {
                if w[1].nx != 2 * w[0].nx || w[1].ny != 2 * w[0].ny {
                    return None;
                }
                let pick = |l: &LevelResult| if linf { l.errors.linf[component] } else { l.errors.l2[component] };
                Some(observed_order(pick(&w[0]), pick(&w[1])))
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Orders {
            component: String,
            l2: Vec<Option<f64>>,
            linf: Vec<Option<f64>>,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            report: &'a ConvergenceReport,
            orders: Vec<Orders>,
        }
        let orders = self
            .components
            .iter()
            .enumerate()
            .map(|(k, c)| Orders {
                component: c.clone(),
                l2: self.orders(k, false),
                linf: self.orders(k, true),
            })
            .collect();
        Ok(serde_json::to_string_pretty(&Out { report: self, orders })?)
    }

    /// Component-major table: one row per component and mesh.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# config_hash={}\n", self.config_hash);
        s.push_str("component,nx,ny,l2,order_l2,linf,order_linf\n");
        let fmt = |o: Option<f64>| o.map_or(String::new(), |v| format!("{v:.4}"));
        for (k, c) in self.components.iter().enumerate() {
            let (o2, oi) = (self.orders(k, false), self.orders(k, true));
            for (n, l) in self.levels.iter().enumerate() {
                let (a, b) = if n == 0 { (None, None) } else { (o2[n - 1], oi[n - 1]) };
                s.push_str(&format!(
                    "{c},{},{},{:.6e},{},{:.6e},{}\n",
                    l.nx,
                    l.ny,
                    l.errors.l2[k],
                    fmt(a),
                    l.errors.linf[k],
                    fmt(b)
                ));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let g = Grid::square(4, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let a = StateField::<2>::from_fn(&g, |x, y| [x, y]);
        let e = error_norms(&a, &a, &g).unwrap();
        assert_eq!(e.l2, vec![0.0, 0.0]);
        let mut b = a.clone();
        b.axpy(1.0, &StateField::filled(&g, [0.3, -0.3]));
        let e = error_norms(&b, &a, &g).unwrap();
        assert!((e.l2[0] - 0.3).abs() < 1e-15 && (e.linf[1] - 0.3).abs() < 1e-15);
        assert_eq!(observed_order(0.4, 0.1), 2.0);
    }

    #[test]
    fn energy_examples() {
        let g = Grid::square(5, [0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(acoustic_energy(&StateField::zeros(&g), &g), 0.0);
        let q = StateField::filled(&g, [0.0, 0.0, 1.0]);
        assert!((acoustic_energy(&q, &g) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn operator_matrices() {
        let o = build_operator_set(3).unwrap();
        assert_eq!(&o.d_plus.a[0..3], &[-1.0, 1.0, 0.0]);
        assert_eq!(o.d_minus, o.d_plus.transpose().scale(-1.0));
        assert_eq!(o.m_plus.matmul(&o.d_plus), o.d_plus.matmul(&o.m_plus));
        assert!(build_operator_set(2).is_err());
    }

    #[test]
    fn dx_bar_stencil() {
        let n = 5;
        let o = build_operator_set(n).unwrap();
        let at = |i: usize, j: usize| o.dx_bar.get(2 * n + 2, i * n + j);
        assert_eq!((at(3, 3), at(3, 2), at(3, 1)), (0.125, 0.25, 0.125));
        assert_eq!((at(1, 3), at(1, 2), at(1, 1)), (-0.125, -0.25, -0.125));
        assert_eq!((at(2, 1), at(2, 2), at(2, 3)), (0.0, 0.0, 0.0));
    }

    #[test]
    fn form_kernel() {
        let o = build_operator_set(6).unwrap();
        let z = vec![0.0; 36];
        assert_eq!(o.stabilization_energy_form(&z, &z, &z).unwrap(), 0.0);
        let p = vec![2.0; 36];
        assert!(o.stabilization_energy_form(&z, &z, &p).unwrap().abs() < 1e-14);
        assert!(o.stabilization_energy_form(&z, &z, &p[..10]).is_err());
    }

    #[test]
    fn audit_examples() {
        assert_eq!(conservation_audit(&[[1.0, 2.0], [1.0, 2.0]]), [0.0, 0.0]);
        let d = conservation_audit(&[[4.0], [4.0 + 4e-10]]);
        assert!((d[0] - 1e-10).abs() < 1e-15);
        let c = energy_monotone(&[1.0, 0.9, 0.95], &[0.1, 0.1], 0.0);
        assert!(!c.monotone);
        assert!(energy_monotone(&[1.0, 0.99, 0.98], &[0.1, 0.1], 1.0).monotone);
    }

    #[test]
    fn report_orders_and_csv() {
        let lvl = |n: usize, e: f64| LevelResult {
            nx: n,
            ny: n,
            errors: ErrorNorms { l2: vec![e], linf: vec![2.0 * e] },
            conservation_drift: vec![0.0],
            steps: 1,
            wall_time: 0.0,
        };
        let r = ConvergenceReport {
            case: "c".into(),
            scheme: "gf".into(),
            components: vec!["u".into()],
            levels: vec![lvl(10, 0.4), lvl(20, 0.1), lvl(30, 0.05)],
            config_hash: "abc".into(),
        };
        assert_eq!(r.orders(0, false), vec![Some(2.0), None]);
        let csv = r.to_csv();
        assert!(csv.starts_with("# config_hash=abc\n"));
        assert!(csv.contains("u,20,20,1.000000e-1,2.0000"));
        assert!(r.to_json().unwrap().contains("\"orders\""));
    }
}

//! Fixed-size vector helpers for state vectors and Jacobians.

pub type Vector<const N: usize> = [f64; N];
pub type Matrix<const N: usize> = [[f64; N]; N];

#[inline]
pub fn add<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> Vector<N> {
    std::array::from_fn(|k| a[k] + b[k])
}

#[inline]
pub fn sub<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> Vector<N> {
    std::array::from_fn(|k| a[k] - b[k])
}

#[inline]
pub fn scale<const N: usize>(s: f64, a: &Vector<N>) -> Vector<N> {
    std::array::from_fn(|k| s * a[k])
}

#[inline]
pub fn axpy<const N: usize>(y: &mut Vector<N>, s: f64, x: &Vector<N>) {
    for k in 0..N {
        y[k] += s * x[k];
    }
}

#[inline]
pub fn matvec<const N: usize>(m: &Matrix<N>, v: &Vector<N>) -> Vector<N> {
    std::array::from_fn(|r| (0..N).map(|c| m[r][c] * v[c]).sum())
}

/// `a * ma + b * mb`, entrywise.
#[inline]
pub fn mat_combine<const N: usize>(a: f64, ma: &Matrix<N>, b: f64, mb: &Matrix<N>) -> Matrix<N> {
    std::array::from_fn(|r| std::array::from_fn(|c| a * ma[r][c] + b * mb[r][c]))
}

pub fn max_abs<const N: usize>(v: &Vector<N>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

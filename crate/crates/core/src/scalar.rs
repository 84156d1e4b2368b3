use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numerical kernels are generic over.
///
/// Implemented for `f32` and `f64`. The dense eigensolve is the only
/// operation that needs per-type code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Eigen-decomposition of a dense symmetric matrix stored column-major.
    ///
    /// Returns ascending eigenvalues and the column-major matrix of
    /// orthonormal eigenvectors, or `None` if the backend fails.
    fn symmetric_eigen(n: usize, a: &[Self]) -> Option<(Vec<Self>, Vec<Self>)>;

    /// Lossy conversion from `f64`, used for literals.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable literal")
    }

    /// Lossy conversion to `f64`, used for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn faer_symmetric_eigen<E>(n: usize, a: &[E]) -> Option<(Vec<E>, Vec<E>)>
where
    E: faer::RealField + Copy + Float,
{
    if a.len() != n * n {
        return None;
    }
    if n == 0 {
        return Some((Vec::new(), Vec::new()));
    }
    let m = faer::Mat::<E>::from_fn(n, n, |i, j| a[i + j * n]);
    let evd = m.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s.read(i).partial_cmp(&s.read(j)).unwrap_or(std::cmp::Ordering::Equal));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &c in &order {
        let v = s.read(c);
        if !Float::is_finite(v) {
            return None;
        }
        values.push(v);
        for r in 0..n {
            vectors.push(u.read(r, c));
        }
    }
    Some((values, vectors))
}

impl Real for f64 {
    fn symmetric_eigen(n: usize, a: &[Self]) -> Option<(Vec<Self>, Vec<Self>)> {
        faer_symmetric_eigen(n, a)
    }
}

impl Real for f32 {
    fn symmetric_eigen(n: usize, a: &[Self]) -> Option<(Vec<Self>, Vec<Self>)> {
        faer_symmetric_eigen(n, a)
    }
}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

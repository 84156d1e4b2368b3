use crate::cover_green::{mu_k, ZetaField};
use crate::error::{Error, Result};
use crate::graph::{for_each_nb_path, Graph, PathSet};
use crate::quantization::Observable;
use crate::scalar::{creal, czero, Real, C};

use super::transfer::{inner_mu, transfer_apply, Transfer};

/// Edge weight `|Im zeta_x(y)| / |zeta_x(y)|^2` at the oriented edge `x -> y`.
fn edge_weight<T: Real>(zf: &ZetaField<T>, x: usize, y: usize) -> T {
    let z = zf.z(x, y);
    z.im.abs() / z.norm_sqr()
}

/// `<A, B>_gamma = (1/N) sum_{B_k} w(x_1 -> x_0) conj(A) B w(x_{k-1} -> x_k)`,
/// `k >= 1`, conjugate-linear in `A`.
pub fn inner_gamma<T: Real>(zf: &ZetaField<T>, a: &Observable<T>, b: &Observable<T>) -> Result<C<T>> {
    let k = a.k();
    if k == 0 || b.k() != k {
        return Err(Error::InvalidConfig("inner product needs equal lengths k >= 1".into()));
    }
    let mut s = czero();
    a.for_each(|p, va| {
        let vb = b.value(p);
        let wl = edge_weight(zf, p[1], p[0]);
        let wr = edge_weight(zf, p[k - 1], p[k]);
        s = s + va.conj() * vb * (wl * wr);
    });
    Ok(s / T::lit(zf.graph().n() as f64))
}

/// `||K||_gamma`.
pub fn norm_gamma<T: Real>(zf: &ZetaField<T>, a: &Observable<T>) -> Result<T> {
    Ok(inner_gamma(zf, a, a)?.re.max(T::zero()).sqrt())
}

/// `(Z K)(x_0..x_k) = zeta_{x_0}(x_1) .. zeta_{x_{k-1}}(x_k) K(x_0..x_k)`.
pub fn apply_z<T: Real>(zf: &ZetaField<T>, k: &Observable<T>) -> Result<Observable<T>> {
    k.map(|p, v| v * forward_product(zf, p))
}

/// Exact inverse of [`apply_z`]; `zeta` never vanishes in the lower half-plane.
pub fn apply_z_inv<T: Real>(zf: &ZetaField<T>, k: &Observable<T>) -> Result<Observable<T>> {
    k.map(|p, v| v / forward_product(zf, p))
}

/// `(m K)(x_0..x_k) = m_{x_0} K(x_0..x_k)`.
pub fn apply_m<T: Real>(zf: &ZetaField<T>, k: &Observable<T>) -> Result<Observable<T>> {
    k.map(|p, v| v * zf.m[p[0]])
}

fn forward_product<T: Real>(zf: &ZetaField<T>, p: &[usize]) -> C<T> {
    p.windows(2).fold(creal(T::one()), |a, w| a * zf.z(w[0], w[1]))
}

fn backward_product<T: Real>(zf: &ZetaField<T>, p: &[usize]) -> C<T> {
    p.windows(2).fold(creal(T::one()), |a, w| a * zf.z(w[1], w[0]))
}

/// `R_{n,r}: H_k -> H_{n+k}`,
/// `(R K)(x_0..x_{n+k}) = conj(zeta_{x_1}(x_0) .. zeta_{x_{n-r}}(x_{n-r-1}))
/// K(x_{n-r}..x_{n-r+k}) zeta_{x_{n-r+k}}(x_{n-r+k+1}) .. zeta_{x_{n+k-1}}(x_{n+k})`.
pub fn apply_r<T: Real>(zf: &ZetaField<T>, n: usize, r: usize, k: &Observable<T>) -> Result<Observable<T>> {
    if r > n {
        return Err(Error::InvalidConfig(format!("R_(n,r) needs r <= n, got n={n}, r={r}")));
    }
    let kk = k.k();
    let s = n - r;
    Observable::from_fn(zf.graph(), n + kk, |p| {
        let left = backward_product(zf, &p[..=s]).conj();
        let right = forward_product(zf, &p[s + kk..]);
        left * k.value(&p[s..=s + kk]) * right
    })
}

/// The pieces of the reconciliation of `<R_{n,r} K, R_{n,r'} K>_gamma`.
#[derive(Debug, Clone, Copy)]
pub struct InvarianceTerms<T> {
    /// Brute-force `<R_{n,r} K, R_{n,r'} K>_gamma` over `B_{n+k}`.
    pub direct: C<T>,
    /// Reduced sum over `B_{k+r-r'}`.
    pub main: C<T>,
    /// The explicit `eta`-remainder.
    pub remainder: C<T>,
}

struct Core<'a, T> {
    zf: &'a ZetaField<T>,
    obs: &'a Observable<T>,
    n: usize,
    r: usize,
    rp: usize,
    k: usize,
}

impl<T: Real> Core<'_, T> {
    fn left(&self) -> usize {
        self.n - self.r
    }

    fn right(&self) -> usize {
        self.n - self.rp + self.k
    }

    /// Shared factor; `x(i)` returns the vertex at global position `i`.
    fn value(&self, x: &[usize], off: usize) -> C<T> {
        let at = |i: usize| x[i - off];
        let (l, rr, k) = (self.left(), self.right(), self.k);
        let kl = self.obs.value(&x[l - off..=l + k - off]);
        let kr = self.obs.value(&x[self.n - self.rp - off..=rr - off]);
        let mut p1 = creal(T::one());
        for i in l + k..rr {
            p1 = p1 * self.zf.z(at(i), at(i + 1));
        }
        let mut p2 = creal(T::one());
        for i in l + 1..=self.n - self.rp {
            p2 = p2 * self.zf.z(at(i), at(i - 1));
        }
        (kl * p1).conj() * p2.conj() * kr
    }
}

fn sum_paths<T: Real, F: FnMut(&[usize]) -> C<T>>(g: &Graph, len: usize, mut f: F) -> C<T> {
    let mut s = czero();
    for_each_nb_path(g, len, |p| s = s + f(p));
    s
}

/// Evaluate both sides of the reduction of `<R_{n,r} K, R_{n,r'} K>_gamma`
/// for `1 <= r' <= r <= n`: `direct = main - remainder`.
pub fn invariance_terms<T: Real>(
    zf: &ZetaField<T>,
    obs: &Observable<T>,
    n: usize,
    r: usize,
    rp: usize,
) -> Result<InvarianceTerms<T>> {
    let k = obs.k();
    if k == 0 || rp == 0 || rp > r || r > n {
        return Err(Error::InvalidConfig(format!(
            "need k >= 1 and 1 <= r' <= r <= n, got k={k}, n={n}, r={r}, r'={rp}"
        )));
    }
    let g = zf.graph();
    let inv_n = T::one() / T::lit(g.n() as f64);
    let eta = zf.eta();
    let rk = apply_r(zf, n, r, obs)?;
    let rpk = apply_r(zf, n, rp, obs)?;
    let direct = inner_gamma(zf, &rk, &rpk)?;

    let core = Core { zf, obs, n, r, rp, k };
    let (l, rr, total) = (core.left(), core.right(), n + k);

    let main = sum_paths(g, rr - l, |p| {
        let wl = edge_weight(zf, p[1], p[0]);
        let wr = edge_weight(zf, p[rr - l - 1], p[rr - l]);
        core.value(p, l) * (wl * wr)
    }) * inv_n;

    let mut remainder = czero();
    for s in 1..=l {
        remainder = remainder
            + sum_paths(g, total - s, |p| {
                let at = |i: usize| p[i - s];
                let mut wgt = T::one();
                for i in s..l {
                    wgt = wgt * zf.z(at(i + 1), at(i)).norm_sqr();
                }
                for i in rr..total - 1 {
                    wgt = wgt * zf.z(at(i), at(i + 1)).norm_sqr();
                }
                wgt = wgt * zf.z(at(total - 1), at(total)).im.abs();
                core.value(p, s) * wgt
            });
    }
    for sp in rr..total {
        remainder = remainder
            + sum_paths(g, sp - l, |p| {
                let at = |i: usize| p[i - l];
                let mut wgt = edge_weight(zf, at(l + 1), at(l));
                for i in rr..sp {
                    wgt = wgt * zf.z(at(i), at(i + 1)).norm_sqr();
                }
                core.value(p, l) * wgt
            });
    }
    remainder = remainder * (eta * inv_n);
    Ok(InvarianceTerms { direct, main, remainder })
}

/// `(1/N) <S_u^{d} (m K), m K>_{mu_k}`, the transfer-operator form of the
/// main term when the kernel is replaced by `Z K`.
pub fn transfer_main_term<T: Real>(zf: &ZetaField<T>, obs: &Observable<T>, d: usize) -> Result<C<T>> {
    let k = obs.k();
    let mu = mu_k(zf, k)?;
    let paths: &PathSet = &mu.paths;
    let mk: Vec<C<T>> = paths.iter().map(|p| obs.value(p) * zf.m[p[0]]).collect();
    let mut cur = mk.clone();
    for _ in 0..d {
        cur = transfer_apply(zf, Transfer::Phased, paths, &cur)?;
    }
    Ok(inner_mu(&mu.mu, &cur, &mk) / T::lit(zf.graph().n() as f64))
}

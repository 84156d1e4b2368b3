use crate::cover_green::ZetaField;
use crate::error::{Error, Result};
use crate::graph::PathSet;
use crate::scalar::{creal, czero, Real, C};

/// The three path-shift operators on `H_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transfer {
    /// Shift towards the origin with weights `|Im zeta|`.
    Forward,
    /// `Forward` with the unimodular phases `conj(u)`.
    Phased,
    /// Adjoint of `Forward` in `l^2(mu_k)`: shift towards the terminus.
    Adjoint,
}

/// Apply a transfer operator to a function on `paths = B_k`, `k >= 1`.
///
/// `Forward`: `(S f)(x_0..x_k) = xi(x_1 -> x_0) sum_{y ~ x_0, y != x_1}
/// |Im zeta_{x_0}(y)| f(y, x_0, .., x_{k-1})`.
pub fn transfer_apply<T: Real>(zf: &ZetaField<T>, which: Transfer, paths: &PathSet, f: &[C<T>]) -> Result<Vec<C<T>>> {
    let k = paths.k();
    if k == 0 {
        return Err(Error::InvalidConfig("transfer operators act on k >= 1".into()));
    }
    if f.len() != paths.len() {
        return Err(Error::DimensionMismatch {
            expected: paths.len(),
            got: f.len(),
        });
    }
    let g = zf.graph();
    let mut out = Vec::with_capacity(paths.len());
    let mut buf = vec![0usize; k + 1];
    for p in paths.iter() {
        let mut s = czero();
        match which {
            Transfer::Forward | Transfer::Phased => {
                let (x0, x1) = (p[0], p[1]);
                let pref = zf.xi[g.edge_id(x1, x0).expect("edge")];
                buf[1..].copy_from_slice(&p[..k]);
                for e in g.out_edges(x0) {
                    let y = g.terminus(e);
                    if y == x1 {
                        continue;
                    }
                    buf[0] = y;
                    let idx = paths.index_of(&buf).expect("shifted path");
                    let wgt = creal(zf.zeta[e].im.abs());
                    let wgt = if which == Transfer::Phased { wgt * zf.u[e].conj() } else { wgt };
                    s = s + wgt * f[idx];
                }
                out.push(s * pref);
            }
            Transfer::Adjoint => {
                let (a, b) = (p[k - 1], p[k]);
                let pref = zf.xi[g.edge_id(a, b).expect("edge")];
                buf[..k].copy_from_slice(&p[1..]);
                for e in g.out_edges(b) {
                    let y = g.terminus(e);
                    if y == a {
                        continue;
                    }
                    buf[k] = y;
                    let idx = paths.index_of(&buf).expect("shifted path");
                    s = s + f[idx] * zf.zeta[e].im.abs();
                }
                out.push(s * pref);
            }
        }
    }
    Ok(out)
}

/// Row sums of `Forward` or `Adjoint` (sums of the nonnegative kernel).
pub fn transfer_row_sums<T: Real>(zf: &ZetaField<T>, which: Transfer, paths: &PathSet) -> Result<Vec<T>> {
    let ones = vec![creal(T::one()); paths.len()];
    let which = if which == Transfer::Phased { Transfer::Forward } else { which };
    Ok(transfer_apply(zf, which, paths, &ones)?.into_iter().map(|c| c.re).collect())
}

/// Predicted row sum: `1 - eta xi(x_1 -> x_0)` for `Forward`,
/// `1 - eta xi(x_{k-1} -> x_k)` for `Adjoint`.
pub fn predicted_row_sum<T: Real>(zf: &ZetaField<T>, which: Transfer, p: &[usize]) -> T {
    let g = zf.graph();
    let k = p.len() - 1;
    let e = match which {
        Transfer::Adjoint => g.edge_id(p[k - 1], p[k]),
        _ => g.edge_id(p[1], p[0]),
    }
    .expect("edge");
    T::one() - zf.eta() * zf.xi[e]
}

/// `<f, g>_mu = sum mu conj(f) g`.
pub fn inner_mu<T: Real>(mu: &[T], f: &[C<T>], g: &[C<T>]) -> C<T> {
    mu.iter()
        .zip(f.iter().zip(g))
        .fold(czero(), |s, (&m, (&a, &b))| s + a.conj() * b * m)
}

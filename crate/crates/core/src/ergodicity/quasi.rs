use crate::cover_green::ZetaField;
use crate::error::Result;
use crate::graph::Graph;
use crate::scalar::{creal, cx, czero, Real, C};
use crate::spectral::EigenSystem;

use super::policy::ZetaPolicy;

/// Edge functions attached to one eigenpair at `gamma_j = lambda_j + i eta_0`.
///
/// All four vectors are indexed by oriented edge id.
#[derive(Debug, Clone)]
pub struct NbQuasiEigenvectors<T> {
    pub j: usize,
    pub lambda: T,
    pub gamma: C<T>,
    pub psi: Vec<T>,
    pub f: Vec<C<T>>,
    pub f_star: Vec<C<T>>,
    pub g: Vec<C<T>>,
    pub g_star: Vec<C<T>>,
}

impl<T: Real> NbQuasiEigenvectors<T> {
    /// Build from an eigenpair and a field solved at `lambda + i eta_0`.
    pub fn from_field(j: usize, lambda: T, psi: &[T], zf: &ZetaField<T>) -> Self {
        let g = zf.graph();
        let e = g.edges();
        let b = g.num_oriented_edges();
        let mut f = Vec::with_capacity(b);
        let mut gg = Vec::with_capacity(b);
        for id in 0..b {
            let (x0, x1) = (e.origin[id], e.terminus[id]);
            let z = zf.zeta[id];
            f.push(creal(psi[x1]) / z - creal(psi[x0]));
            gg.push(creal(psi[x1]) / z.conj() - creal(psi[x0]));
        }
        let f_star = (0..b).map(|id| f[e.reversal[id]]).collect();
        let g_star = (0..b).map(|id| gg[e.reversal[id]]).collect();
        NbQuasiEigenvectors {
            j,
            lambda,
            gamma: zf.gamma,
            psi: psi.to_vec(),
            f,
            f_star,
            g: gg,
            g_star,
        }
    }

    pub fn eta(&self) -> T {
        self.gamma.im
    }

    pub fn sup_norm_f(&self) -> T {
        self.f.iter().fold(T::zero(), |a, v| a.max(v.norm()))
    }
}

/// Quasi-eigenvectors for every `j` with `lambda_j` in the open interval.
pub fn build_quasi_eigenvectors<T: Real>(
    g: &Graph,
    w: &crate::ensembles::Potential<T>,
    es: &EigenSystem<T>,
    policy: &ZetaPolicy<T>,
    eta0: T,
    interval: (T, T),
) -> Result<Vec<NbQuasiEigenvectors<T>>> {
    let js = es.indices_in(interval.0, interval.1);
    let lambdas: Vec<T> = js.iter().map(|&j| es.values[j]).collect();
    policy.for_each_gamma(g, w, &lambdas, eta0, |i, zf| {
        let j = js[i];
        Ok(NbQuasiEigenvectors::from_field(j, es.values[j], es.vector(j), zf))
    })
}

/// Sup-norm residuals of `B(zeta f) = f - i eta tau_+ psi` and
/// `B*(iota zeta f*) = f* - i eta tau_- psi`.
///
/// `zeta` must be the field the vectors were built from.
pub fn quasi_eigen_residual<T: Real>(v: &NbQuasiEigenvectors<T>, zf: &ZetaField<T>) -> (T, T) {
    let g = zf.graph();
    let e = g.edges();
    let ieta = cx(T::zero(), v.eta());
    let mut r1 = T::zero();
    let mut r2 = T::zero();
    for id in 0..g.num_oriented_edges() {
        let (x0, x1) = (e.origin[id], e.terminus[id]);
        // successors of x0 -> x1
        let mut s: C<T> = czero();
        for succ in g.out_edges(x1) {
            if e.terminus[succ] != x0 {
                s = s + zf.zeta[succ] * v.f[succ];
            }
        }
        let rhs = v.f[id] - ieta * v.psi[x1];
        r1 = r1.max((s - rhs).norm());
        // predecessors of x0 -> x1: edges y -> x0 with y != x1
        let mut s2: C<T> = czero();
        for out in g.out_edges(x0) {
            let y = e.terminus[out];
            if y != x1 {
                let pred = e.reversal[out];
                s2 = s2 + zf.zeta[out] * v.f_star[pred];
            }
        }
        let rhs2 = v.f_star[id] - ieta * v.psi[x0];
        r2 = r2.max((s2 - rhs2).norm());
    }
    (r1, r2)
}

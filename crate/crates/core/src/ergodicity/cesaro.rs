use std::sync::Arc;

use crate::cover_green::ZetaField;
use crate::error::{Error, Result};
use crate::graph::PathSet;
use crate::quantization::Observable;
use crate::scalar::{creal, czero, Real, C};

/// Edges whose `T` or `T~` denominator is closer to zero than this are flagged.
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Oriented edges at which the `T`-type denominators nearly vanish.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DegenerateEdges {
    /// `| |zeta_{x_0}(x_1) zeta_{x_1}(x_0)|^2 - 1 | < threshold`.
    pub t: Vec<usize>,
    /// `| conj(zeta_{x_1}(x_0)) zeta_{x_0}(x_1) + 1 | < threshold`.
    pub t_tilde: Vec<usize>,
}

/// Operators on vertex, edge and path functions at one field, with the
/// averaging horizon `T` of the Cesaro sums.
///
/// Vertex functions are indexed by vertex, edge functions by oriented edge id.
#[derive(Debug, Clone, Copy)]
pub struct CesaroOperators<'a, T> {
    zf: &'a ZetaField<T>,
    horizon: usize,
    threshold: f64,
}

impl<'a, T: Real> CesaroOperators<'a, T> {
    pub fn new(zf: &'a ZetaField<T>, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidConfig("horizon T must be >= 1".into()));
        }
        Ok(CesaroOperators {
            zf,
            horizon,
            threshold: DEFAULT_DEGENERACY_THRESHOLD,
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn field(&self) -> &ZetaField<T> {
        self.zf
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `(P_gamma J)(x) = N(x)^{-1} sum_{y~x} N(y) J(y) / d(y)`.
    pub fn p_gamma(&self, j: &[C<T>]) -> Vec<C<T>> {
        let g = self.zf.graph();
        let nn = &self.zf.n_gamma;
        (0..g.n())
            .map(|x| {
                let s = g.neighbors(x).iter().fold(czero(), |a, &y| {
                    a + j[y] * (nn[y] / T::lit(g.degree(y) as f64))
                });
                s / nn[x]
            })
            .collect()
    }

    /// `S_T = (1/T) sum_{s=0}^{T-1} (T-s) P_gamma^s`.
    pub fn s_t(&self, j: &[C<T>]) -> Vec<C<T>> {
        let t = self.horizon;
        let mut acc = vec![czero(); j.len()];
        let mut cur = j.to_vec();
        for s in 0..t {
            let w = T::lit((t - s) as f64);
            for (a, c) in acc.iter_mut().zip(&cur) {
                *a = *a + *c * w;
            }
            if s + 1 < t {
                cur = self.p_gamma(&cur);
            }
        }
        let inv = T::one() / T::lit(t as f64);
        acc.into_iter().map(|a| a * inv).collect()
    }

    /// `S~_T = (1/T) sum_{s=1}^{T} P_gamma^s`.
    pub fn s_tilde_t(&self, j: &[C<T>]) -> Vec<C<T>> {
        let mut acc = vec![czero(); j.len()];
        let mut cur = j.to_vec();
        for _ in 0..self.horizon {
            cur = self.p_gamma(&cur);
            for (a, c) in acc.iter_mut().zip(&cur) {
                *a = *a + *c;
            }
        }
        let inv = T::one() / T::lit(self.horizon as f64);
        acc.into_iter().map(|a| a * inv).collect()
    }

    fn l_generic(&self, j: &[C<T>], tilde: bool) -> Vec<C<T>> {
        let zf = self.zf;
        let g = zf.graph();
        let e = g.edges();
        (0..g.num_oriented_edges())
            .map(|id| {
                let (x0, x1) = (e.origin[id], e.terminus[id]);
                let a = zf.zeta[id];
                let b = zf.zeta[e.reversal[id]];
                let two_m = zf.m[x0] * T::lit(2.0);
                let pref = a.norm_sqr() / two_m.norm_sqr();
                let den = if tilde { a * b.conj() } else { a.conj() * b };
                let first = j[x0] / zf.n_gamma[x1];
                let second = j[x1] / (den * zf.n_gamma[x0]);
                (first - second) * pref
            })
            .collect()
    }

    /// `(L J)(x_0,x_1) = |zeta_{x_0}(x_1)|^2/|2 m_{x_0}|^2 (J(x_0)/N(x_1)
    /// - J(x_1)/(conj(zeta_{x_0}(x_1)) zeta_{x_1}(x_0) N(x_0)))`.
    pub fn l(&self, j: &[C<T>]) -> Vec<C<T>> {
        self.l_generic(j, false)
    }

    /// `L` with the denominator `zeta_{x_0}(x_1) conj(zeta_{x_1}(x_0))`.
    pub fn l_tilde(&self, j: &[C<T>]) -> Vec<C<T>> {
        self.l_generic(j, true)
    }

    /// Flag near-singular edges for both `T` variants.
    pub fn degenerate_edges(&self) -> DegenerateEdges {
        let zf = self.zf;
        let e = zf.graph().edges();
        let mut out = DegenerateEdges::default();
        for id in 0..e.len() {
            let a = zf.zeta[id];
            let b = zf.zeta[e.reversal[id]];
            let c = (a * b).norm_sqr();
            if (c - T::one()).abs().as_f64() < self.threshold {
                out.t.push(id);
            }
            if (b.conj() * a + T::one()).norm().as_f64() < self.threshold {
                out.t_tilde.push(id);
            }
        }
        out
    }

    fn check_support(&self, k: &[C<T>], bad: &[usize], value: impl Fn(usize) -> f64) -> Result<()> {
        let e = self.zf.graph().edges();
        for &id in bad {
            if k[id] != czero() || k[e.reversal[id]] != czero() {
                return Err(Error::DegenerateDenominator {
                    edge: id,
                    value: value(id),
                    threshold: self.threshold,
                });
            }
        }
        Ok(())
    }

    /// `(T K)(x_0,x_1) = c/(c-1) (-K(x_0,x_1)/(conj(a) b) + K(x_1,x_0))` with
    /// `a = zeta_{x_0}(x_1)`, `b = zeta_{x_1}(x_0)`, `c = |ab|^2`.
    ///
    /// Flagged edges must carry `K = 0` in both orientations and map to `0`.
    pub fn t_op(&self, k: &[C<T>]) -> Result<Vec<C<T>>> {
        let zf = self.zf;
        let e = zf.graph().edges();
        let bad = self.degenerate_edges().t;
        self.check_support(k, &bad, |id| {
            ((zf.zeta[id] * zf.zeta[e.reversal[id]]).norm_sqr() - T::one()).as_f64()
        })?;
        Ok((0..e.len())
            .map(|id| {
                if bad.binary_search(&id).is_ok() {
                    return czero();
                }
                let rev = e.reversal[id];
                let a = zf.zeta[id];
                let b = zf.zeta[rev];
                let c = (a * b).norm_sqr();
                (-k[id] / (a.conj() * b) + k[rev]) * (c / (c - T::one()))
            })
            .collect())
    }

    /// `(T~ K)(x_0,x_1) = conj(b) a / (conj(b) a + 1) K(x_0,x_1)`.
    pub fn t_tilde(&self, k: &[C<T>]) -> Result<Vec<C<T>>> {
        let zf = self.zf;
        let e = zf.graph().edges();
        let bad = self.degenerate_edges().t_tilde;
        self.check_support(k, &bad, |id| {
            (zf.zeta[e.reversal[id]].conj() * zf.zeta[id] + T::one()).norm().as_f64()
        })?;
        Ok((0..e.len())
            .map(|id| {
                if bad.binary_search(&id).is_ok() {
                    return czero();
                }
                let p = zf.zeta[e.reversal[id]].conj() * zf.zeta[id];
                p / (p + T::one()) * k[id]
            })
            .collect())
    }

    /// `(O h)(x) = sum_{y~x} h(y,x)/zeta_y(x) + sum_{y~x} h(x,y)/conj(zeta_y(x))`.
    fn fold_edges(&self, h: &[C<T>]) -> Vec<C<T>> {
        let zf = self.zf;
        let g = zf.graph();
        let e = g.edges();
        let mut out = vec![czero(); g.n()];
        for id in 0..e.len() {
            let (a, b) = (e.origin[id], e.terminus[id]);
            out[b] = out[b] + h[id] / zf.zeta[id];
            out[a] = out[a] + h[id] / zf.zeta[e.reversal[id]].conj();
        }
        out
    }

    /// `O_1 K`, built from `T K`.
    pub fn o1(&self, k: &[C<T>]) -> Result<Vec<C<T>>> {
        Ok(self.fold_edges(&self.t_op(k)?))
    }

    /// `O~_1 K`, built from `T~ K`.
    pub fn o1_tilde(&self, k: &[C<T>]) -> Result<Vec<C<T>>> {
        Ok(self.fold_edges(&self.t_tilde(k)?))
    }

    fn require_m(&self, k: &Observable<T>) -> Result<usize> {
        let m = k.k();
        if m < 2 {
            return Err(Error::InvalidConfig(format!("operator needs m >= 2, got {m}")));
        }
        Ok(m)
    }

    /// `(U_m K)(x_0..x_m) = conj(zeta_{x_1}(x_0)) zeta_{x_{m-1}}(x_m) K`.
    pub fn u_m(&self, k: &Observable<T>) -> Result<Observable<T>> {
        let m = self.require_m(k)?;
        let zf = self.zf;
        k.map(|p, v| zf.z(p[1], p[0]).conj() * zf.z(p[m - 1], p[m]) * v)
    }

    /// `O_m K` on `B_{m-1}`.
    pub fn o_m(&self, k: &Observable<T>) -> Result<Observable<T>> {
        let m = self.require_m(k)?;
        let zf = self.zf;
        let g = zf.graph();
        let target = Arc::new(PathSet::new(g, m - 1)?);
        let mut vals = vec![czero(); target.len()];
        k.for_each(|p, v| {
            let i = target.index_of(&p[1..]).expect("suffix path");
            vals[i] = vals[i] + zf.z(p[1], p[0]).conj() * v;
            let i = target.index_of(&p[..m]).expect("prefix path");
            vals[i] = vals[i] + v * zf.z(p[m - 1], p[m]);
        });
        Observable::dense(g, target, vals)
    }

    /// `P_m K` on `B_{m-2}`.
    pub fn p_m(&self, k: &Observable<T>) -> Result<Observable<T>> {
        let m = self.require_m(k)?;
        let zf = self.zf;
        let g = zf.graph();
        let target = Arc::new(PathSet::new(g, m - 2)?);
        let mut vals = vec![czero(); target.len()];
        k.for_each(|p, v| {
            let i = target.index_of(&p[1..m]).expect("inner path");
            vals[i] = vals[i] + zf.z(p[1], p[0]).conj() * v * zf.z(p[m - 1], p[m]);
        });
        Observable::dense(g, target, vals)
    }

    /// `(Y K)(x) = d(x)/N(x) * sum_y N(y) K(y) / sum_y d(y)`.
    pub fn y(&self, k: &[C<T>]) -> Vec<C<T>> {
        let zf = self.zf;
        let g = zf.graph();
        let num = k
            .iter()
            .zip(&zf.n_gamma)
            .fold(czero(), |a, (&v, &n)| a + v * n);
        let dsum = T::lit((0..g.n()).map(|x| g.degree(x)).sum::<usize>() as f64);
        (0..g.n())
            .map(|x| num * (T::lit(g.degree(x) as f64) / (zf.n_gamma[x] * dsum)))
            .collect()
    }
}

/// Edge function as an `H_1` observable; oriented edge ids follow the
/// lexicographic order of `B_1`.
pub fn edge_observable<T: Real>(zf: &ZetaField<T>, h: &[C<T>]) -> Result<Observable<T>> {
    let g = zf.graph();
    Observable::dense(g, Arc::new(PathSet::new(g, 1)?), h.to_vec())
}

/// Vertex function times the degree.
pub fn times_degree<T: Real>(zf: &ZetaField<T>, j: &[C<T>]) -> Vec<C<T>> {
    let g = zf.graph();
    j.iter()
        .enumerate()
        .map(|(x, &v)| v * creal(T::lit(g.degree(x) as f64)))
        .collect()
}

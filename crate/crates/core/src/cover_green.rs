//! Cavity values on the universal cover: the fixed point on oriented edges,
//! tree Green functions along non-backtracking paths, the exact identities
//! they satisfy, and the path measures built from them.

use std::sync::Arc;

use crate::ensembles::Potential;
use crate::error::{Error, Result};
use crate::graph::{Graph, NbPath, PathSet};
use crate::scalar::{cx, czero, Real, C};

/// Default iteration cap for one Picard solve.
pub const DEFAULT_MAX_ITER: usize = 2_000_000;

/// Solved cavity field at one spectral parameter.
///
/// The value stored at oriented edge `e = (w -> v)` is `zeta_w(v)`: the
/// negative diagonal Green value at `v` on the cover with the branch through
/// `w` removed.
#[derive(Debug, Clone)]
pub struct ZetaField<T> {
    graph: Graph,
    potential: Vec<T>,
    pub gamma: C<T>,
    pub zeta: Vec<C<T>>,
    /// `2 m_v = gamma - W(v) - sum_{u~v} zeta_v(u)`, stored as `m_v`.
    pub m: Vec<C<T>>,
    /// `Im(-1/(2 m_v))`, the cover diagonal spectral weight.
    pub n_gamma: Vec<T>,
    /// `conj(zeta)/zeta` per edge.
    pub u: Vec<C<T>>,
    /// `|zeta|^2/|Im zeta|` per edge.
    pub xi: Vec<T>,
    /// Largest fixed-point residual over edges.
    pub solve_residual: T,
    pub iterations: usize,
}

/// Knobs of the Picard solver.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<T> {
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> SolveOptions<T> {
    pub fn new(tol: T) -> Self {
        SolveOptions {
            tol,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Solve the cavity fixed point at `gamma` by Picard iteration from `-i`.
pub fn solve_zeta<T: Real>(g: &Graph, w: &Potential<T>, gamma: C<T>, tol: T) -> Result<ZetaField<T>> {
    solve_zeta_from(g, w, gamma, SolveOptions::new(tol), None)
}

/// Picard solve with an optional warm start.
pub fn solve_zeta_from<T: Real>(
    g: &Graph,
    w: &Potential<T>,
    gamma: C<T>,
    opts: SolveOptions<T>,
    init: Option<&[C<T>]>,
) -> Result<ZetaField<T>> {
    if !(gamma.im > T::zero()) {
        return Err(Error::RealAxisParameter {
            im: gamma.im.as_f64(),
        });
    }
    if w.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: w.len(),
        });
    }
    let b = g.num_oriented_edges();
    let mut z: Vec<C<T>> = match init {
        Some(v) => {
            if v.len() != b {
                return Err(Error::DimensionMismatch {
                    expected: b,
                    got: v.len(),
                });
            }
            if let Some(e) = v.iter().position(|z| !(z.im < T::zero())) {
                return Err(Error::HalfPlaneViolation {
                    edge: e,
                    im: v[e].im.as_f64(),
                });
            }
            v.to_vec()
        }
        None => vec![cx(T::zero(), -T::one()); b],
    };
    let mut next = vec![czero(); b];
    let mut last_step = T::infinity();
    for it in 1..=opts.max_iter {
        let mut step = T::zero();
        for e in 0..b {
            let v = g.terminus(e);
            let back = g.reverse(e);
            let mut s = czero();
            for f in g.out_edges(v) {
                if f != back {
                    s = s + z[f];
                }
            }
            let nz = (gamma - cx(w.values[v], T::zero()) - s).inv();
            if !(nz.im < T::zero()) {
                return Err(Error::HalfPlaneViolation {
                    edge: e,
                    im: nz.im.as_f64(),
                });
            }
            step = step.max((nz - z[e]).norm());
            next[e] = nz;
        }
        std::mem::swap(&mut z, &mut next);
        last_step = step;
        if step < opts.tol {
            let res = recursion_residual(g, w, gamma, &z);
            if res < opts.tol {
                return Ok(ZetaField::assemble(g, w, gamma, z, res, it));
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        eta: gamma.im.as_f64(),
        last_step: last_step.as_f64(),
    })
}

fn recursion_residual<T: Real>(g: &Graph, w: &Potential<T>, gamma: C<T>, z: &[C<T>]) -> T {
    let mut worst = T::zero();
    for e in 0..z.len() {
        let v = g.terminus(e);
        let back = g.reverse(e);
        let mut s = czero();
        for f in g.out_edges(v) {
            if f != back {
                s = s + z[f];
            }
        }
        let r = gamma - cx(w.values[v], T::zero()) - s - z[e].inv();
        worst = worst.max(r.norm());
    }
    worst
}

/// Solve at `lambda + i eta_target` along the ladder `eta = 1, 1/2, 1/4, ...`,
/// warm-starting each rung from the previous one.
pub fn continuation_solve<T: Real>(
    g: &Graph,
    w: &Potential<T>,
    lambda: T,
    eta_target: T,
    tol: T,
) -> Result<ZetaField<T>> {
    continuation_solve_with(g, w, lambda, eta_target, SolveOptions::new(tol))
}

pub fn continuation_solve_with<T: Real>(
    g: &Graph,
    w: &Potential<T>,
    lambda: T,
    eta_target: T,
    opts: SolveOptions<T>,
) -> Result<ZetaField<T>> {
    if !(eta_target > T::zero()) {
        return Err(Error::RealAxisParameter {
            im: eta_target.as_f64(),
        });
    }
    let half = T::lit(0.5);
    let mut rungs = Vec::new();
    let mut eta = T::one();
    while eta > eta_target {
        rungs.push(eta);
        eta = eta * half;
    }
    rungs.push(eta_target);
    // intermediate rungs only need to land in the basin of the next one
    let loose = SolveOptions {
        tol: opts.tol.max(T::lit(1e-8)),
        max_iter: opts.max_iter,
    };
    let mut prev: Option<ZetaField<T>> = None;
    let last = rungs.len() - 1;
    for (i, &eta) in rungs.iter().enumerate() {
        let o = if i == last { opts } else { loose };
        let init = prev.as_ref().map(|f| f.zeta.as_slice());
        prev = Some(solve_zeta_from(g, w, cx(lambda, eta), o, init)?);
    }
    Ok(prev.expect("at least one rung"))
}

impl<T: Real> ZetaField<T> {
    fn assemble(
        g: &Graph,
        w: &Potential<T>,
        gamma: C<T>,
        zeta: Vec<C<T>>,
        solve_residual: T,
        iterations: usize,
    ) -> Self {
        let two = T::lit(2.0);
        let m: Vec<C<T>> = (0..g.n())
            .map(|v| {
                let s = g.out_edges(v).fold(czero(), |a, e| a + zeta[e]);
                (gamma - cx(w.values[v], T::zero()) - s) / two
            })
            .collect();
        let n_gamma = m.iter().map(|&mv| (-(mv * two).inv()).im).collect();
        let u = zeta.iter().map(|&z| z.conj() / z).collect();
        let xi = zeta.iter().map(|&z| z.norm_sqr() / z.im.abs()).collect();
        ZetaField {
            graph: g.clone(),
            potential: w.values.clone(),
            gamma,
            zeta,
            m,
            n_gamma,
            u,
            xi,
            solve_residual,
            iterations,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn potential(&self) -> &[T] {
        &self.potential
    }

    pub fn eta(&self) -> T {
        self.gamma.im
    }

    /// `zeta_w(v)` for adjacent `w, v`.
    #[inline]
    pub fn z(&self, w: usize, v: usize) -> C<T> {
        self.zeta[self.graph.edge_id(w, v).expect("adjacent vertices")]
    }

    /// Cover diagonal Green value `-1/(2 m_v)`.
    pub fn diag_green(&self, v: usize) -> C<T> {
        -(self.m[v] * T::lit(2.0)).inv()
    }

    /// Green function between the lifted endpoints of a non-backtracking path.
    pub fn green(&self, p: &[usize]) -> C<T> {
        let mut prod = cx(T::one(), T::zero());
        for w in p.windows(2) {
            prod = prod * self.z(w[1], w[0]);
        }
        -prod / (self.m[*p.last().expect("nonempty path")] * T::lit(2.0))
    }

    /// `Im G` along the path.
    pub fn psi(&self, p: &[usize]) -> T {
        self.green(p).im
    }

    /// Checks the half-plane invariants and returns the first failure.
    pub fn check_invariants(&self) -> Result<()> {
        for (e, z) in self.zeta.iter().enumerate() {
            if !(z.im < T::zero()) {
                return Err(Error::HalfPlaneViolation {
                    edge: e,
                    im: z.im.as_f64(),
                });
            }
        }
        for (v, mv) in self.m.iter().enumerate() {
            if !(mv.im > T::zero()) || !(self.n_gamma[v] > T::zero()) {
                return Err(Error::HalfPlaneViolation {
                    edge: v,
                    im: mv.im.as_f64(),
                });
            }
        }
        Ok(())
    }
}

/// Covering-tree Green function along `p`.
pub fn tree_green<T: Real>(zf: &ZetaField<T>, p: &NbPath) -> C<T> {
    zf.green(&p.vertices)
}

/// Maximum absolute residual of each exact identity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IdentityResiduals {
    pub recursion: f64,
    pub edge_ratio: f64,
    pub edge_difference: f64,
    pub path_factorization: f64,
    pub path_symmetry: f64,
    pub successor_imaginary_sum: f64,
    pub path_imaginary_part: f64,
    pub edge_spectral_weight: f64,
    pub path_spectral_weight: f64,
}

impl IdentityResiduals {
    pub fn named(&self) -> [(&'static str, f64); 9] {
        [
            ("recursion", self.recursion),
            ("edge_ratio", self.edge_ratio),
            ("edge_difference", self.edge_difference),
            ("path_factorization", self.path_factorization),
            ("path_symmetry", self.path_symmetry),
            ("successor_imaginary_sum", self.successor_imaginary_sum),
            ("path_imaginary_part", self.path_imaginary_part),
            ("edge_spectral_weight", self.edge_spectral_weight),
            ("path_spectral_weight", self.path_spectral_weight),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().fold(0.0f64, |a, &(_, v)| a.max(v))
    }

    pub fn merge(&mut self, o: &IdentityResiduals) {
        self.recursion = self.recursion.max(o.recursion);
        self.edge_ratio = self.edge_ratio.max(o.edge_ratio);
        self.edge_difference = self.edge_difference.max(o.edge_difference);
        self.path_factorization = self.path_factorization.max(o.path_factorization);
        self.path_symmetry = self.path_symmetry.max(o.path_symmetry);
        self.successor_imaginary_sum = self.successor_imaginary_sum.max(o.successor_imaginary_sum);
        self.path_imaginary_part = self.path_imaginary_part.max(o.path_imaginary_part);
        self.edge_spectral_weight = self.edge_spectral_weight.max(o.edge_spectral_weight);
        self.path_spectral_weight = self.path_spectral_weight.max(o.path_spectral_weight);
    }
}

/// Residuals of the edge identities over all edges and the path identities
/// over `sample` (paths of length at least 1; shorter ones are skipped).
pub fn identity_residuals<T: Real>(zf: &ZetaField<T>, sample: &[NbPath]) -> IdentityResiduals {
    let g = zf.graph();
    let eta = zf.eta();
    let two = T::lit(2.0);
    let mut r = IdentityResiduals::default();
    let upd = |slot: &mut f64, v: T| *slot = slot.max(v.as_f64());
    for e in 0..g.num_oriented_edges() {
        let (w, v) = (g.origin(e), g.terminus(e));
        let back = g.reverse(e);
        let zwv = zf.zeta[e];
        let zvw = zf.zeta[back];
        let mut succ = czero();
        let mut succ_im = T::zero();
        for f in g.out_edges(v) {
            if f != back {
                succ = succ + zf.zeta[f];
                succ_im = succ_im + zf.zeta[f].im.abs();
            }
        }
        let g3 = zf.gamma - cx(zf.potential[v], T::zero()) - succ - zwv.inv();
        upd(&mut r.recursion, g3.norm());
        upd(&mut r.edge_ratio, (zwv - zf.m[w] / zf.m[v] * zvw).norm());
        upd(&mut r.edge_difference, (zwv.inv() - zvw - zf.m[v] * two).norm());
        upd(&mut r.successor_imaginary_sum, (succ_im - (zwv.im.abs() / zwv.norm_sqr() - eta)).abs());
        // (v0, v1) = (w, v)
        let p11 = zf.psi(&[v]);
        let p10 = zf.psi(&[v, w]);
        let p01 = zf.psi(&[w, v]);
        let p00 = zf.psi(&[w]);
        let lhs = cx(p11, T::zero()) - zwv.conj() * p10 - zwv * p01 + cx(zwv.norm_sqr() * p00, T::zero());
        upd(&mut r.edge_spectral_weight, (lhs - cx(zwv.im.abs(), T::zero())).norm());
    }
    for p in sample {
        let v = &p.vertices;
        let k = v.len() - 1;
        if k == 0 {
            continue;
        }
        let full = zf.green(v);
        let head = zf.green(&v[..k]);
        let tail = zf.green(&v[1..]);
        let first = zf.z(v[1], v[0]);
        let last = zf.z(v[k - 1], v[k]);
        upd(&mut r.path_factorization, (full - first * tail).norm().max((full - last * head).norm()));
        let mut rev = v.clone();
        rev.reverse();
        upd(&mut r.path_symmetry, (full - zf.green(&rev)).norm());
        let path_imaginary_part = cx(full.im, T::zero()) - last * head.im - head.conj() * last.im;
        upd(&mut r.path_imaginary_part, path_imaginary_part.norm());
        // inner path (v_1; v_{k-1}); for k = 1 it runs back from v_1 to v_0
        let inner = if k == 1 {
            zf.psi(&[v[1], v[0]])
        } else {
            zf.psi(&v[1..k])
        };
        let fc = first.conj();
        let pi2 = cx(full.im, T::zero()) - fc * tail.im - last * head.im + fc * last * inner;
        upd(&mut r.path_spectral_weight, pi2.norm());
    }
    r
}

/// The measure `mu_k` on `B_k` together with its compatibility defects.
#[derive(Debug, Clone)]
pub struct NbMeasure<T> {
    pub k: usize,
    pub paths: Arc<PathSet>,
    pub mu: Vec<T>,
    pub total_mass: T,
    /// `mu_{k-1}(x_0;x_{k-1}) - sum_{x_k} mu_k(x_0;x_k)` on `B_{k-1}`; empty for `k = 1`.
    pub compat_defect: Vec<T>,
    /// `mu_{k-1}(x_1;x_k) - sum_{x_0} mu_k(x_0;x_k)` on `B_{k-1}`; empty for `k = 1`.
    pub inv_defect: Vec<T>,
    /// Index set of the defects (`B_{k-1}`), absent for `k = 1`.
    pub defect_paths: Option<Arc<PathSet>>,
}

/// `mu_k` at one path (`k >= 1`).
pub fn mu_value<T: Real>(zf: &ZetaField<T>, p: &[usize]) -> T {
    let k = p.len() - 1;
    let z10 = zf.z(p[1], p[0]);
    let z01 = zf.z(p[0], p[1]);
    let first = z10.im.abs() / (zf.m[p[1]] * z01).norm_sqr();
    let mut prod = T::one();
    for w in p.windows(2) {
        prod = prod * zf.z(w[0], w[1]).norm_sqr();
    }
    let zl = zf.z(p[k - 1], p[k]);
    first * prod * zl.im.abs() / zl.norm_sqr()
}

/// Build `mu_k` over `B_k` and both compatibility defects.
pub fn mu_k<T: Real>(zf: &ZetaField<T>, k: usize) -> Result<NbMeasure<T>> {
    if k == 0 {
        return Err(Error::InvalidConfig("mu_k needs k >= 1".into()));
    }
    let g = zf.graph();
    let paths = Arc::new(PathSet::new(g, k)?);
    let mu: Vec<T> = paths.iter().map(|p| mu_value(zf, p)).collect();
    let total_mass = mu.iter().copied().sum();
    if k == 1 {
        return Ok(NbMeasure {
            k,
            paths,
            mu,
            total_mass,
            compat_defect: Vec::new(),
            inv_defect: Vec::new(),
            defect_paths: None,
        });
    }
    let lower = Arc::new(PathSet::new(g, k - 1)?);
    let mut compat: Vec<T> = lower.iter().map(|p| mu_value(zf, p)).collect();
    let mut inv = compat.clone();
    for (i, p) in paths.iter().enumerate() {
        let h = lower.index_of(&p[..k]).expect("head is a path");
        let t = lower.index_of(&p[1..]).expect("tail is a path");
        compat[h] = compat[h] - mu[i];
        inv[t] = inv[t] - mu[i];
    }
    Ok(NbMeasure {
        k,
        paths,
        mu,
        total_mass,
        compat_defect: compat,
        inv_defect: inv,
        defect_paths: Some(lower),
    })
}

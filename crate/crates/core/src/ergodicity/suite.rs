use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::cover_green::ZetaField;
use crate::ensembles::{stream_rng, Potential, Stream};
use crate::error::Result;
use crate::graph::{Graph, PathSet};
use crate::quantization::{kb_matrix_element, kg_matrix_element, Observable};
use crate::scalar::{cx, czero, Real, C};
use crate::spectral::EigenSystem;

use super::averages::{vertex_average, weighted_average};
use super::policy::ZetaPolicy;
use super::quasi::NbQuasiEigenvectors;
use super::cesaro::{edge_observable, times_degree, CesaroOperators};

/// What to sample in [`identity_suite`].
#[derive(Debug, Clone, Serialize)]
pub struct SuiteSamples {
    /// Number of eigenpairs used, spread evenly over the spectrum.
    pub eigenpairs: usize,
    /// Random operands drawn per eigenpair.
    pub operands: usize,
    /// Horizon `T` of the Cesaro sums.
    pub horizon: usize,
    /// Path lengths `m >= 2` for the `U_m` relation.
    pub lengths: Vec<usize>,
    pub seed: u64,
}

impl Default for SuiteSamples {
    fn default() -> Self {
        SuiteSamples {
            eigenpairs: 6,
            operands: 2,
            horizon: 3,
            lengths: vec![2, 3],
            seed: 0,
        }
    }
}

/// Largest scaled residual of each relation over all samples.
///
/// A relation `lhs = rhs` built from terms `t_i` is scored as
/// `|lhs - rhs| / (1 + sum |t_i|)`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteResiduals {
    pub vertex_step: f64,
    pub telescoping: f64,
    pub edge_step: f64,
    pub edge_step_reflected: f64,
    pub path_step: Vec<(usize, f64)>,
    pub averaging: f64,
    pub averaging_reflected: f64,
    pub path_averaging: Vec<(usize, f64)>,
    /// Oriented edges excluded because a `T` denominator nearly vanished.
    pub degenerate_edges: usize,
    pub evaluations: usize,
}

impl SuiteResiduals {
    pub fn named(&self) -> Vec<(String, f64)> {
        let mut v = vec![
            ("vertex_step".to_string(), self.vertex_step),
            ("telescoping".to_string(), self.telescoping),
            ("edge_step".to_string(), self.edge_step),
            ("edge_step_reflected".to_string(), self.edge_step_reflected),
        ];
        for (m, r) in &self.path_step {
            v.push((format!("path_step_m{m}"), *r));
        }
        v.push(("averaging".to_string(), self.averaging));
        v.push(("averaging_reflected".to_string(), self.averaging_reflected));
        for (m, r) in &self.path_averaging {
            v.push((format!("path_averaging_m{m}"), *r));
        }
        v
    }

    pub fn max(&self) -> f64 {
        self.named().iter().fold(0.0, |a, (_, r)| a.max(*r))
    }

    pub fn merge(&mut self, o: &SuiteResiduals) {
        self.vertex_step = self.vertex_step.max(o.vertex_step);
        self.telescoping = self.telescoping.max(o.telescoping);
        self.edge_step = self.edge_step.max(o.edge_step);
        self.edge_step_reflected = self.edge_step_reflected.max(o.edge_step_reflected);
        self.averaging = self.averaging.max(o.averaging);
        self.averaging_reflected = self.averaging_reflected.max(o.averaging_reflected);
        merge_list(&mut self.path_step, &o.path_step);
        merge_list(&mut self.path_averaging, &o.path_averaging);
        self.degenerate_edges += o.degenerate_edges;
        self.evaluations += o.evaluations;
    }
}

fn merge_list(a: &mut Vec<(usize, f64)>, b: &[(usize, f64)]) {
    for &(m, r) in b {
        match a.iter_mut().find(|(k, _)| *k == m) {
            Some(e) => e.1 = e.1.max(r),
            None => a.push((m, r)),
        }
    }
}

fn scaled<T: Real>(lhs: C<T>, rhs: C<T>, terms: &[C<T>]) -> f64 {
    let scale = 1.0 + terms.iter().map(|t| t.norm().as_f64()).sum::<f64>();
    (lhs - rhs).norm().as_f64() / scale
}

fn random_unit<T: Real, R: Rng>(rng: &mut R) -> C<T> {
    // uniform in the unit disc
    let r: f64 = rng.random::<f64>().sqrt();
    let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    cx(T::lit(r * th.cos()), T::lit(r * th.sin()))
}

/// Evenly spread sample of `count` indices out of `0..n`.
pub fn spread_indices(n: usize, count: usize) -> Vec<usize> {
    if count >= n {
        return (0..n).collect();
    }
    let mut v: Vec<usize> = (0..count)
        .map(|i| ((i as f64 + 0.5) * n as f64 / count as f64) as usize)
        .collect();
    v.dedup();
    v
}

/// Evaluate every step-5 relation at one eigenpair and field.
pub fn cesaro_residuals<T: Real>(
    v: &NbQuasiEigenvectors<T>,
    zf: &ZetaField<T>,
    samples: &SuiteSamples,
    stream_index: u64,
) -> Result<SuiteResiduals> {
    let g = zf.graph();
    let ops = CesaroOperators::new(zf, samples.horizon)?;
    let e = g.edges();
    let degenerate = ops.degenerate_edges();
    let mut rng = stream_rng(samples.seed, Stream::Observable, stream_index);
    let psi: Vec<C<T>> = v.psi.iter().map(|&x| cx(x, T::zero())).collect();
    let mut out = SuiteResiduals {
        degenerate_edges: degenerate.t.len() + degenerate.t_tilde.len(),
        ..Default::default()
    };
    let kg_vertex = |a: &[C<T>]| -> C<T> {
        a.iter()
            .zip(&psi)
            .fold(czero(), |s, (&val, &p)| s + p.conj() * val * p)
    };
    for _ in 0..samples.operands {
        // vertex-function relations
        let j: Vec<C<T>> = (0..g.n()).map(|_| random_unit(&mut rng)).collect();
        let lj = edge_observable(zf, &ops.l(&j))?;
        let ltj = edge_observable(zf, &ops.l_tilde(&j))?;
        let a = kb_matrix_element(&lj, &v.f_star, &v.f)?;
        let b = kb_matrix_element(&ltj, &v.g_star, &v.g)?;
        let dj = times_degree(zf, &j);
        let pdj = ops.p_gamma(&dj);
        let diff: Vec<C<T>> = dj.iter().zip(&pdj).map(|(&x, &y)| x - y).collect();
        let rhs = cx(T::zero(), T::lit(2.0)) * kg_vertex(&diff);
        out.vertex_step = out.vertex_step.max(scaled(a - b, rhs, &[a, b, rhs]));

        let st = ops.s_t(&j);
        let pst = ops.p_gamma(&st);
        let stt = ops.s_tilde_t(&j);
        for x in 0..g.n() {
            let rebuilt = st[x] - pst[x] + stt[x];
            let r = scaled(rebuilt, j[x], &[st[x], pst[x], stt[x]]);
            out.telescoping = out.telescoping.max(r);
        }

        // edge relations, K zeroed on flagged edges
        let mut k1: Vec<C<T>> = (0..e.len()).map(|_| random_unit(&mut rng)).collect();
        for &id in degenerate.t.iter().chain(&degenerate.t_tilde) {
            k1[id] = czero();
            k1[e.reversal[id]] = czero();
        }
        let k1_obs = edge_observable(zf, &k1)?;
        let kk = kg_matrix_element(&k1_obs, &psi, &psi);
        let avg_k = weighted_average(std::slice::from_ref(&k1_obs), zf);

        let tk = edge_observable(zf, &ops.t_op(&k1)?)?;
        let lhs = kb_matrix_element(&tk, &v.f_star, &v.f)?;
        let o1 = ops.o1(&k1)?;
        let ok = kg_vertex(&o1);
        out.edge_step = out.edge_step.max(scaled(lhs, kk - ok, &[lhs, kk, ok]));
        let avg_o1 = vertex_average(&o1, zf);
        out.averaging = out.averaging.max(scaled(avg_o1, avg_k, &[avg_o1, avg_k]));

        let ttk = edge_observable(zf, &ops.t_tilde(&k1)?)?;
        let lhs = kb_matrix_element(&ttk, &v.f_star, &v.f)?;
        let o1t = ops.o1_tilde(&k1)?;
        let okt = kg_vertex(&o1t);
        out.edge_step_reflected = out
            .edge_step_reflected
            .max(scaled(lhs, kk - okt, &[lhs, kk, okt]));
        let avg_o1t = vertex_average(&o1t, zf);
        out.averaging_reflected = out.averaging_reflected.max(scaled(avg_o1t, avg_k, &[avg_o1t, avg_k]));

        // longer paths
        for &m in &samples.lengths {
            let paths = Arc::new(PathSet::new(g, m)?);
            let vals = (0..paths.len()).map(|_| random_unit(&mut rng)).collect();
            let km = Observable::dense(g, paths, vals)?;
            let um = ops.u_m(&km)?;
            let om = ops.o_m(&km)?;
            let pm = ops.p_m(&km)?;
            let lhs = kb_matrix_element(&um, &v.f_star, &v.f)?;
            let a = kg_matrix_element(&km, &psi, &psi);
            let b = kg_matrix_element(&om, &psi, &psi);
            let c = kg_matrix_element(&pm, &psi, &psi);
            let r = scaled(lhs, a - b + c, &[lhs, a, b, c]);
            merge_list(&mut out.path_step, &[(m, r)]);

            let avg = weighted_average(std::slice::from_ref(&km), zf);
            let avg_o = weighted_average(std::slice::from_ref(&om), zf);
            let avg_p = weighted_average(std::slice::from_ref(&pm), zf);
            let r = scaled(avg, avg_o - avg_p, &[avg, avg_o, avg_p]);
            merge_list(&mut out.path_averaging, &[(m, r)]);
        }
        out.evaluations += 1;
    }
    Ok(out)
}

/// Run the step-5 relations over a spread of eigenpairs of one instance.
pub fn identity_suite<T: Real>(
    g: &Graph,
    w: &Potential<T>,
    es: &EigenSystem<T>,
    policy: &ZetaPolicy<T>,
    eta0: T,
    samples: &SuiteSamples,
) -> Result<SuiteResiduals> {
    let js = spread_indices(es.n(), samples.eigenpairs);
    let lambdas: Vec<T> = js.iter().map(|&j| es.values[j]).collect();
    let parts = policy.for_each_gamma(g, w, &lambdas, eta0, |i, zf| {
        let j = js[i];
        let v = NbQuasiEigenvectors::from_field(j, es.values[j], es.vector(j), zf);
        cesaro_residuals(&v, zf, samples, j as u64)
    })?;
    let mut out = SuiteResiduals::default();
    for p in &parts {
        out.merge(p);
    }
    Ok(out)
}

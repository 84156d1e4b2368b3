use serde::Serialize;

use crate::cover_green::ZetaField;
use crate::ensembles::Potential;
use crate::error::Result;
use crate::graph::Graph;
use crate::quantization::{kb_family, kg_diagonal, Observable};
use crate::scalar::{czero, Real, C};
use crate::spectral::EigenSystem;

use super::averages::weighted_average;
use super::policy::ZetaPolicy;
use super::quasi::NbQuasiEigenvectors;

/// Eigenvalues closer than this count as one cluster in the multiplicity record.
pub const MULTIPLICITY_TOL: f64 = 1e-8;

/// Per-eigenvalue and aggregate variance values.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub interval: (f64, f64),
    pub eta0: f64,
    pub n: usize,
    pub indices: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub terms: Vec<f64>,
    /// `<K>_{gamma_j}` per entry when centering was requested.
    pub averages: Option<Vec<(f64, f64)>>,
    pub multiplicities: Vec<usize>,
    pub aggregate: f64,
    pub centered: bool,
    pub observable_id: String,
    pub policy: String,
}

impl VarianceReport {
    fn assemble<T: Real>(
        es: &EigenSystem<T>,
        interval: (T, T),
        eta0: T,
        indices: Vec<usize>,
        terms: Vec<f64>,
        averages: Option<Vec<(f64, f64)>>,
        centered: bool,
        policy: &ZetaPolicy<T>,
    ) -> Self {
        let n = es.n();
        let aggregate = terms.iter().sum::<f64>() / n as f64;
        VarianceReport {
            interval: (interval.0.as_f64(), interval.1.as_f64()),
            eta0: eta0.as_f64(),
            n,
            lambdas: indices.iter().map(|&j| es.values[j].as_f64()).collect(),
            multiplicities: indices
                .iter()
                .map(|&j| es.multiplicity(j, T::lit(MULTIPLICITY_TOL)))
                .collect(),
            indices,
            terms,
            averages,
            aggregate,
            centered,
            observable_id: String::new(),
            policy: policy.describe(),
        }
    }

    pub fn with_observable_id(mut self, id: impl Into<String>) -> Self {
        self.observable_id = id.into();
        self
    }

    /// CSV rows `j,lambda_j,term,centered_flag`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,lambda_j,term,centered_flag\n");
        for ((j, l), t) in self.indices.iter().zip(&self.lambdas).zip(&self.terms) {
            s.push_str(&format!("{j},{l:.17e},{t:.17e},{}\n", u8::from(self.centered)));
        }
        s
    }
}

/// `(1/N) sum_{lambda_j in I} |<psi_j, K_G psi_j> - c_j ||psi_j||^2|`, with
/// `c_j = <K>_{gamma_j}` when `centered` and `0` otherwise.
#[allow(clippy::too_many_arguments)]
pub fn quantum_variance<T: Real>(
    g: &Graph,
    w: &Potential<T>,
    es: &EigenSystem<T>,
    obs: &[Observable<T>],
    policy: &ZetaPolicy<T>,
    interval: (T, T),
    eta0: T,
    centered: bool,
) -> Result<VarianceReport> {
    let js = es.indices_in(interval.0, interval.1);
    let raw: Vec<C<T>> = js
        .iter()
        .map(|&j| {
            let psi = es.vector(j);
            obs.iter().fold(czero(), |a, o| a + kg_diagonal(o, psi))
        })
        .collect();
    let (terms, averages) = if centered {
        let lambdas: Vec<T> = js.iter().map(|&j| es.values[j]).collect();
        let avgs = policy.for_each_gamma(g, w, &lambdas, eta0, |_, zf| Ok(weighted_average(obs, zf)))?;
        let terms = raw
            .iter()
            .zip(&js)
            .zip(&avgs)
            .map(|((&r, &j), &c)| {
                let norm2: T = es.vector(j).iter().map(|&v| v * v).sum();
                (r - c * norm2).norm().as_f64()
            })
            .collect();
        let averages = avgs.iter().map(|c| (c.re.as_f64(), c.im.as_f64())).collect();
        (terms, Some(averages))
    } else {
        (raw.iter().map(|r| r.norm().as_f64()).collect(), None)
    };
    Ok(VarianceReport::assemble(es, interval, eta0, js, terms, averages, centered, policy))
}

/// Which pair of quasi-eigenvectors enters the non-backtracking variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbPairing {
    /// `<f*, K_B f>`.
    Plain,
    /// `<g*, K_B g>`.
    Conjugate,
}

/// `(1/N) sum_{lambda_j in I} |<f_j*, K^{gamma_j}_B f_j>|`.
///
/// `obs_gamma` builds the observable family at each solved field; every
/// member needs `k >= 1`.
#[allow(clippy::too_many_arguments)]
pub fn nb_variance<T, F>(
    g: &Graph,
    w: &Potential<T>,
    es: &EigenSystem<T>,
    obs_gamma: F,
    policy: &ZetaPolicy<T>,
    interval: (T, T),
    eta0: T,
    pairing: NbPairing,
) -> Result<VarianceReport>
where
    T: Real,
    F: Fn(&ZetaField<T>) -> Result<Vec<Observable<T>>> + Sync,
{
    let js = es.indices_in(interval.0, interval.1);
    let lambdas: Vec<T> = js.iter().map(|&j| es.values[j]).collect();
    let terms = policy.for_each_gamma(g, w, &lambdas, eta0, |i, zf| {
        let j = js[i];
        let v = NbQuasiEigenvectors::from_field(j, es.values[j], es.vector(j), zf);
        let fam = obs_gamma(zf)?;
        let val = match pairing {
            NbPairing::Plain => kb_family(&fam, &v.f_star, &v.f)?,
            NbPairing::Conjugate => kb_family(&fam, &v.g_star, &v.g)?,
        };
        Ok(val.norm().as_f64())
    })?;
    Ok(VarianceReport::assemble(es, interval, eta0, js, terms, None, false, policy))
}

//! The variance-versus-size protocol: random regular graphs, optional
//! i.i.d. disorder, a random half-size vertex set, and the centred quantum
//! variance of its indicator.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ensembles::{
    expander_gap, random_regular, random_subset, sample_potential, BaseDistribution, EnsembleConfig,
};
use crate::ergodicity::{quantum_variance, ZetaPolicy};
use crate::error::{Error, Result};
use crate::quantization::Observable;
use crate::scalar::{creal, czero};
use crate::spectral::{eigensystem, DEFAULT_RESIDUAL_TOL};

/// Parameters of one variance-versus-size sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub degree: usize,
    pub disorder: f64,
    pub base: BaseDistribution,
    pub interval: (f64, f64),
    pub eta0: f64,
    pub zeta_tol: f64,
    pub chunk: usize,
    /// Instances whose expander gap falls below this are flagged.
    pub gap_threshold: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            sizes: vec![250, 500, 1000, 2000],
            seeds: (1..=5).collect(),
            degree: 3,
            disorder: 0.0,
            base: BaseDistribution::Uniform,
            interval: (-2.5, 2.5),
            eta0: 0.1,
            zeta_tol: 1e-10,
            chunk: 32,
            gap_threshold: 0.01,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.seeds.is_empty() {
            return Err(Error::InvalidConfig("empty size ladder or seed list".into()));
        }
        if !(self.eta0 > 0.0 && self.eta0 < 1.0) {
            return Err(Error::InvalidConfig(format!("eta0 = {} outside (0, 1)", self.eta0)));
        }
        if !(self.interval.0 < self.interval.1) {
            return Err(Error::InvalidConfig(format!("empty interval {:?}", self.interval)));
        }
        let a = self.disorder * self.base.support_bound();
        let edge = self.degree as f64 + a;
        if self.interval.0 < -edge || self.interval.1 > edge {
            return Err(Error::InvalidConfig(format!(
                "interval {:?} leaves [-{edge}, {edge}]",
                self.interval
            )));
        }
        if !(self.zeta_tol > 0.0) || self.chunk == 0 {
            return Err(Error::InvalidConfig("zeta_tol and chunk must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome for one `(N, seed)` instance.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceResult {
    pub n: usize,
    pub seed: u64,
    /// Centred variance of the half-set indicator.
    pub variance: f64,
    pub eigenvalues_in_interval: usize,
    pub average_min: f64,
    pub average_max: f64,
    pub average_mean: f64,
    pub expander_gap: f64,
    pub gap_flagged: bool,
    pub eigensolve_seconds: f64,
    pub variance_seconds: f64,
    /// Per-eigenvalue terms and averages, for the CSV.
    pub lambdas: Vec<f64>,
    pub terms: Vec<f64>,
    pub averages: Vec<f64>,
    pub indices: Vec<usize>,
    pub multiplicities: Vec<usize>,
}

/// Run one instance of the protocol.
pub fn run_instance(cfg: &ProtocolConfig, n: usize, seed: u64) -> Result<InstanceResult> {
    let ens = EnsembleConfig::regular(n, cfg.degree, seed).with_disorder(cfg.disorder, cfg.base.clone());
    let g = random_regular(&ens)?;
    let w = sample_potential::<f64>(&g, &ens);
    let t0 = Instant::now();
    let es = eigensystem(&g, &w, DEFAULT_RESIDUAL_TOL)?;
    let eigensolve_seconds = t0.elapsed().as_secs_f64();
    let gap = if cfg.disorder == 0.0 {
        // H = A is (q+1) P; the top eigenvalue is simple on a connected graph
        let d = cfg.degree as f64;
        1.0 - es.values[..n - 1].iter().fold(0.0f64, |m, &v| m.max((v / d).abs()))
    } else {
        expander_gap::<f64>(&g)?
    };
    let subset = random_subset(n, n / 2, seed);
    let mut a = vec![czero(); n];
    for &x in &subset {
        a[x] = creal(1.0);
    }
    let obs = vec![Observable::vertex_function(&g, &a)?];
    let mut policy = ZetaPolicy::exact(cfg.zeta_tol);
    policy.chunk = cfg.chunk;
    let t1 = Instant::now();
    let rep = quantum_variance(&g, &w, &es, &obs, &policy, cfg.interval, cfg.eta0, true)?;
    let variance_seconds = t1.elapsed().as_secs_f64();
    let averages: Vec<f64> = rep.averages.clone().unwrap_or_default().iter().map(|c| c.0).collect();
    let (mn, mx, sum) = averages
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(a, b, s), &v| (a.min(v), b.max(v), s + v));
    Ok(InstanceResult {
        n,
        seed,
        variance: rep.aggregate,
        eigenvalues_in_interval: rep.indices.len(),
        average_min: mn,
        average_max: mx,
        average_mean: if averages.is_empty() { f64::NAN } else { sum / averages.len() as f64 },
        expander_gap: gap,
        gap_flagged: gap < cfg.gap_threshold,
        eigensolve_seconds,
        variance_seconds,
        lambdas: rep.lambdas,
        terms: rep.terms,
        averages,
        indices: rep.indices,
        multiplicities: rep.multiplicities,
    })
}

/// Median of a nonempty list.
pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Decrease test on the per-size medians.
#[derive(Debug, Clone, Serialize)]
pub struct TrendVerdict {
    pub medians: Vec<f64>,
    /// Last median over first median.
    pub ratio: f64,
    /// Number of consecutive increases.
    pub inversions: usize,
    pub pass: bool,
}

/// Pass when `last <= max_ratio * first` and at most `allowed_inversions`
/// consecutive medians increase.
pub fn trend_verdict(medians: &[f64], max_ratio: f64, allowed_inversions: usize) -> TrendVerdict {
    let ratio = medians.last().copied().unwrap_or(f64::NAN) / medians.first().copied().unwrap_or(f64::NAN);
    let inversions = medians.windows(2).filter(|w| w[1] > w[0]).count();
    TrendVerdict {
        medians: medians.to_vec(),
        ratio,
        inversions,
        pass: ratio <= max_ratio && inversions <= allowed_inversions,
    }
}

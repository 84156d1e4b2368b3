//! Empirical spectral measures against tree expectations, Green-diagonal
//! averages and the distribution of the Green weights.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cover_green::ZetaField;
use crate::ensembles::{stream_rng, BaseDistribution, Stream};
use crate::error::{Error, Result};
use crate::graph::for_each_nb_path;
use crate::scalar::Real;
use crate::spectral::EigenSystem;

/// Discrete probability measure with an attached smoothing scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    /// Sorted ascending.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub eta: f64,
}

impl EmpiricalMeasure {
    /// `(1/N) sum_j delta_{lambda_j}`.
    pub fn from_eigenvalues<T: Real>(es: &EigenSystem<T>, eta: f64) -> Self {
        let mut points: Vec<f64> = es.values.iter().map(|v| v.as_f64()).collect();
        points.sort_by(f64::total_cmp);
        let n = points.len();
        EmpiricalMeasure {
            points,
            weights: vec![1.0 / n as f64; n],
            eta,
        }
    }

    /// Normalised by the total weight, so constants integrate exactly.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mass: f64 = self.weights.iter().sum();
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum::<f64>() / mass
    }

    /// Mass of `(-inf, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let i = self.points.partition_point(|&p| p <= x);
        self.weights[..i].iter().sum()
    }

    /// Cauchy-smoothed density at `x`.
    pub fn smoothed_density(&self, x: f64) -> f64 {
        let e = self.eta;
        self.expectation(|p| e / PI / ((x - p).powi(2) + e * e))
    }
}

/// Kolmogorov–Smirnov distance between the measure and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(m: &EmpiricalMeasure, cdf: F) -> f64 {
    let mut below = 0.0;
    let mut worst = 0.0f64;
    for (&x, &w) in m.points.iter().zip(&m.weights) {
        let f = cdf(x);
        let above = below + w;
        worst = worst.max((f - below).abs()).max((above - f).abs());
        below = above;
    }
    worst
}

/// Spectral density of the (q+1)-regular tree.
pub fn kesten_mckay_density(q: usize, lambda: f64) -> f64 {
    let qf = q as f64;
    let edge = 4.0 * qf - lambda * lambda;
    if edge <= 0.0 {
        return 0.0;
    }
    (qf + 1.0) * edge.sqrt() / (TAU * ((qf + 1.0).powi(2) - lambda * lambda))
}

// density * d(lambda) after lambda = 2 sqrt(q) sin(theta)
fn km_angular_weight(q: f64, theta: f64) -> f64 {
    let c = theta.cos();
    let s = theta.sin();
    (q + 1.0) * 4.0 * q * c * c / (TAU * ((q + 1.0).powi(2) - 4.0 * q * s * s))
}

const MAX_DEPTH: u32 = 48;
const MIN_DEPTH: u32 = 5;

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // a few forced levels so that oscillating integrands are not missed
        if depth == 0 || (depth <= MAX_DEPTH - MIN_DEPTH && delta.abs() <= 15.0 * tol) {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Kesten–McKay cumulative distribution.
pub fn kesten_mckay_cdf(q: usize, lambda: f64) -> f64 {
    let qf = q as f64;
    let r = 2.0 * qf.sqrt();
    if lambda <= -r {
        return 0.0;
    }
    if lambda >= r {
        return 1.0;
    }
    let theta = (lambda / r).asin();
    adaptive_simpson(&|t| km_angular_weight(qf, t), -PI / 2.0, theta, 1e-13)
}

/// `int f d(rho_KM)`.
pub fn kesten_mckay_expectation<F: Fn(f64) -> f64>(q: usize, f: F) -> f64 {
    let qf = q as f64;
    let r = 2.0 * qf.sqrt();
    adaptive_simpson(&|t| f(r * t.sin()) * km_angular_weight(qf, t), -PI / 2.0, PI / 2.0, 1e-13)
}

/// Cavity value of the (q+1)-regular tree with zero potential:
/// the root of `q z^2 - gamma z + 1 = 0` in the lower half-plane.
pub fn regular_tree_zeta(q: usize, gamma: Complex64) -> Complex64 {
    let qf = q as f64;
    let disc = (gamma * gamma - 4.0 * qf).sqrt();
    let a = (gamma + disc) / (2.0 * qf);
    let b = (gamma - disc) / (2.0 * qf);
    if a.im < b.im {
        a
    } else {
        b
    }
}

/// Root diagonal Green value of the (q+1)-regular tree.
pub fn regular_tree_green(q: usize, gamma: Complex64) -> Complex64 {
    -1.0 / (gamma - (q as f64 + 1.0) * regular_tree_zeta(q, gamma))
}

/// Bounded test functions on the real line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Constant { value: f64 },
    /// `exp(-(x - center)^2 / (2 width^2))`.
    Gaussian { center: f64, width: f64 },
    /// Indicator of `[a, b]` convolved with a unit-mass Gaussian of the given width.
    SmoothedIndicator { a: f64, b: f64, width: f64 },
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TestFunction::Constant { value } => value,
            TestFunction::Gaussian { center, width } => (-(x - center).powi(2) / (2.0 * width * width)).exp(),
            TestFunction::SmoothedIndicator { a, b, width } => {
                let s = width * std::f64::consts::SQRT_2;
                0.5 * (libm::erf((x - a) / s) - libm::erf((x - b) / s))
            }
        }
    }

    /// `int f(x) e^{-ikx} dx`; `None` when it is not a function.
    pub fn fourier(&self, k: f64) -> Option<Complex64> {
        match *self {
            TestFunction::Constant { .. } => None,
            TestFunction::Gaussian { center, width } => Some(
                Complex64::from_polar(width * TAU.sqrt() * (-0.5 * width * width * k * k).exp(), -k * center),
            ),
            TestFunction::SmoothedIndicator { a, b, width } => {
                let damp = (-0.5 * width * width * k * k).exp();
                if k == 0.0 {
                    return Some(Complex64::new(damp * (b - a), 0.0));
                }
                let num = Complex64::from_polar(1.0, -k * a) - Complex64::from_polar(1.0, -k * b);
                Some(num / Complex64::new(0.0, k) * damp)
            }
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            TestFunction::Constant { .. } => 0.0,
            TestFunction::Gaussian { width, .. } | TestFunction::SmoothedIndicator { width, .. } => width,
        }
    }

    fn support_hint(&self) -> (f64, f64) {
        match *self {
            TestFunction::Constant { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            TestFunction::Gaussian { center, width } => (center - 12.0 * width, center + 12.0 * width),
            TestFunction::SmoothedIndicator { a, b, width } => (a - 12.0 * width, b + 12.0 * width),
        }
    }

    /// The function `phi` with `phi * P_eta = f`, `P_eta` the Cauchy kernel,
    /// evaluated at `t` by quadrature of `f^(k) e^{eta |k|}`.
    pub fn deconvolved(&self, eta: f64, t: f64) -> Option<f64> {
        let w = self.scale();
        if w <= 0.0 {
            return None;
        }
        // beyond kmax the integrand is below exp(-32)
        let kmax = (eta + (eta * eta + 64.0 * w * w).sqrt()) / (w * w);
        let steps = 4000usize;
        let h = kmax / steps as f64;
        let mut s = 0.0;
        for i in 0..=steps {
            let k = i as f64 * h;
            let fk = self.fourier(k)?;
            // real f: contributions of k and -k combine to 2 Re
            let v = (fk * Complex64::from_polar((eta * k).exp(), k * t)).re;
            let c = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += c * v;
        }
        Some(s * h / 3.0 * 2.0 / TAU)
    }
}

/// How the tree side of a comparison is computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeOracle {
    /// Zero potential: quadrature against the Kesten–McKay law.
    KestenMcKay { q: usize },
    /// I.i.d. potential: population dynamics for the cavity law.
    PopulationDynamics(PopulationConfig),
}

/// Parameters of the population-dynamics estimator.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationConfig {
    pub q: usize,
    pub disorder: f64,
    pub base: BaseDistribution,
    /// Total pool size, split evenly over `shards` independent populations.
    pub pool: usize,
    pub shards: usize,
    /// Imaginary part at which the cavity law is sampled.
    pub eta: f64,
    /// Sweeps from the cold start at the first grid point.
    pub burn_in: usize,
    /// Sweeps between consecutive grid points.
    pub sweeps: usize,
    /// Energy grid spacing.
    pub grid_step: f64,
    pub seed: u64,
}

impl PopulationConfig {
    pub fn new(q: usize, disorder: f64, base: BaseDistribution, seed: u64) -> Self {
        PopulationConfig {
            q,
            disorder,
            base,
            pool: 100_000,
            shards: 8,
            eta: 0.05,
            burn_in: 300,
            sweeps: 6,
            grid_step: 0.0125,
            seed,
        }
    }
}

/// Pointwise estimates of `E Im G(o, o; t + i eta) / pi` on an energy grid.
#[derive(Debug, Clone, Serialize)]
pub struct PopulationDensity {
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    /// Standard error of each grid value.
    pub stderr: Vec<f64>,
    pub eta: f64,
    pub samples_per_point: usize,
}

/// Run population dynamics along `[lo, hi]`.
pub fn population_density(cfg: &PopulationConfig, lo: f64, hi: f64) -> Result<PopulationDensity> {
    if cfg.q < 2 || cfg.shards == 0 || cfg.pool < cfg.shards || !(cfg.eta > 0.0) || !(cfg.grid_step > 0.0) {
        return Err(Error::InvalidConfig(format!("population dynamics config {cfg:?}")));
    }
    let points = ((hi - lo) / cfg.grid_step).ceil() as usize + 1;
    if points > 1_000_000 {
        return Err(Error::OracleBudgetExceeded(format!("{points} grid points")));
    }
    let grid: Vec<f64> = (0..points).map(|i| lo + i as f64 * cfg.grid_step).collect();
    let per = cfg.pool / cfg.shards;
    let shards: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.shards)
        .into_par_iter()
        .map(|s| run_shard(cfg, &grid, per, s as u64))
        .collect();
    let m = (per * cfg.shards) as f64;
    let mut mean = vec![0.0; points];
    let mut stderr = vec![0.0; points];
    for i in 0..points {
        let sum: f64 = shards.iter().map(|(a, _)| a[i]).sum();
        let sq: f64 = shards.iter().map(|(_, b)| b[i]).sum();
        let mu = sum / m;
        let var = (sq / m - mu * mu).max(0.0) * m / (m - 1.0);
        mean[i] = mu / PI;
        stderr[i] = (var / m).sqrt() / PI;
    }
    Ok(PopulationDensity {
        grid,
        mean,
        stderr,
        eta: cfg.eta,
        samples_per_point: per * cfg.shards,
    })
}

// returns per-grid-point (sum Im G, sum (Im G)^2) over the shard's root samples
fn run_shard(cfg: &PopulationConfig, grid: &[f64], size: usize, shard: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = stream_rng(cfg.seed, Stream::Oracle, shard);
    let mut pool = vec![Complex64::new(0.0, -1.0); size];
    let draw_w = |rng: &mut rand_chacha::ChaCha20Rng| cfg.disorder * cfg.base.sample(rng);
    let mut sums = Vec::with_capacity(grid.len());
    let mut squares = Vec::with_capacity(grid.len());
    for (gi, &t) in grid.iter().enumerate() {
        let gamma = Complex64::new(t, cfg.eta);
        let sweeps = if gi == 0 { cfg.burn_in } else { cfg.sweeps };
        for _ in 0..sweeps {
            for i in 0..size {
                let mut s = Complex64::new(0.0, 0.0);
                for _ in 0..cfg.q {
                    s += pool[rng.random_range(0..size)];
                }
                let w = draw_w(&mut rng);
                pool[i] = 1.0 / (gamma - w - s);
            }
        }
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..size {
            let mut s = Complex64::new(0.0, 0.0);
            for _ in 0..=cfg.q {
                s += pool[rng.random_range(0..size)];
            }
            let w = draw_w(&mut rng);
            let g = -1.0 / (gamma - w - s);
            a += g.im;
            b += g.im * g.im;
        }
        sums.push(a);
        squares.push(b);
    }
    (sums, squares)
}

/// Finite-graph average against a tree expectation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralComparison {
    /// `(1/N) sum_j f(lambda_j)`.
    pub finite: f64,
    /// Tree-side estimate of `E <delta_o, f(H) delta_o>`.
    pub tree: f64,
    /// Monte-Carlo standard error of `tree` (zero for closed forms).
    pub stderr: f64,
}

/// Compare `(1/N) sum_j f(lambda_j)` with the tree expectation of `f`.
///
/// With population dynamics the smoothing by `eta` is undone exactly by
/// integrating the sampled density against the deconvolved test function.
pub fn empirical_vs_tree<T: Real>(es: &EigenSystem<T>, f: &TestFunction, oracle: &TreeOracle) -> Result<SpectralComparison> {
    let em = EmpiricalMeasure::from_eigenvalues(es, 0.0);
    let finite = em.expectation(|x| f.eval(x));
    if let TestFunction::Constant { value } = *f {
        return Ok(SpectralComparison {
            finite,
            tree: value,
            stderr: 0.0,
        });
    }
    match oracle {
        TreeOracle::KestenMcKay { q } => Ok(SpectralComparison {
            finite,
            tree: kesten_mckay_expectation(*q, |x| f.eval(x)),
            stderr: 0.0,
        }),
        TreeOracle::PopulationDynamics(cfg) => {
            let (lo, hi) = f.support_hint();
            let dens = population_density(cfg, lo, hi)?;
            let (tree, stderr) = integrate_deconvolved(f, &dens)?;
            Ok(SpectralComparison { finite, tree, stderr })
        }
    }
}

/// `int phi(t) rho_eta(t) dt` by Simpson's rule on the density grid, with a
/// standard error that treats grid points as fully correlated.
pub fn integrate_deconvolved(f: &TestFunction, dens: &PopulationDensity) -> Result<(f64, f64)> {
    let n = dens.grid.len();
    if n < 3 {
        return Err(Error::InvalidConfig("density grid too short".into()));
    }
    // Simpson needs an odd point count; drop the last point otherwise
    let n = if n % 2 == 0 { n - 1 } else { n };
    let h = dens.grid[1] - dens.grid[0];
    let (mut s, mut e) = (0.0, 0.0);
    for i in 0..n {
        let phi = f
            .deconvolved(dens.eta, dens.grid[i])
            .ok_or_else(|| Error::InvalidConfig("test function has no Fourier transform".into()))?;
        let c = if i == 0 || i == n - 1 { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        s += c * phi * dens.mean[i];
        e += c * phi.abs() * dens.stderr[i];
    }
    Ok((s * h / 3.0, e * h / 3.0))
}

/// `(1/N) sum_x N_gamma(x)`.
pub fn green_diagonal_average<T: Real>(zf: &ZetaField<T>) -> T {
    let n = T::lit(zf.n_gamma.len() as f64);
    zf.n_gamma.iter().copied().sum::<T>() / n
}

/// Raw values `N Phi(x, y)` over non-backtracking paths of length `k` and the
/// functional `(1/N) sum F(N Phi)`.
#[derive(Debug, Clone, Serialize)]
pub struct PhiHistogram {
    pub k: usize,
    pub value: f64,
    pub samples: Vec<f64>,
}

/// `(1/N) sum_x sum_{d(x,y) = k} F(N Phi_gamma(x, y))` on the cover.
pub fn phi_histogram<T: Real, F: Fn(f64) -> f64>(zf: &ZetaField<T>, k: usize, f: F) -> Result<PhiHistogram> {
    let g = zf.graph();
    let count = crate::graph::count_nb_paths(g, k);
    if count > crate::graph::DEFAULT_PATH_CAP as u128 {
        return Err(Error::PathBudgetExceeded {
            k,
            count,
            cap: crate::graph::DEFAULT_PATH_CAP,
        });
    }
    let n = g.n() as f64;
    let mass: f64 = zf.n_gamma.iter().map(|v| v.as_f64()).sum();
    let mut samples = Vec::with_capacity(count as usize);
    for_each_nb_path(g, k, |p| samples.push(n * zf.green(p).im.as_f64() / mass));
    let value = samples.iter().map(|&v| f(v)).sum::<f64>() / n;
    Ok(PhiHistogram { k, value, samples })
}

/// Equal-width histogram `(bin centre, weight)` with weights summing to 1.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = values.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + (i as f64 + 0.5) * width, c as f64 / total))
        .collect()
}

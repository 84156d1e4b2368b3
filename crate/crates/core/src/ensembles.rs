//! Random graphs, random potentials and checks of the standing assumptions.
//!
//! Randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! the 64-bit master seed; each purpose reads its own ChaCha stream, so
//! graph, potential and subset draws never interfere.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, build_graph_with_degree_bounds, injectivity_radius_capped, Graph};
use crate::scalar::Real;

/// Default number of full restarts allowed to the pairing model.
pub const DEFAULT_MAX_RESTARTS: usize = 1000;

/// Independent random streams derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Graph = 1,
    Potential = 2,
    Subset = 3,
    Observable = 4,
    Oracle = 5,
    Sample = 6,
}

/// Generator for `purpose` and sub-index `index` under `seed`.
pub fn stream_rng(seed: u64, purpose: Stream, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 40) ^ index);
    rng
}

/// Single-site law before scaling by the disorder strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "values")]
pub enum BaseDistribution {
    /// Uniform on [-1, 1].
    Uniform,
    /// +1 or -1 with probability 1/2.
    Bernoulli,
    /// Uniform over a finite list of values.
    Discrete(Vec<f64>),
}

impl BaseDistribution {
    /// Smallest `a` with support in `[-a, a]`.
    pub fn support_bound(&self) -> f64 {
        match self {
            BaseDistribution::Uniform | BaseDistribution::Bernoulli => 1.0,
            BaseDistribution::Discrete(v) => v.iter().fold(0.0f64, |a, x| a.max(x.abs())),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            BaseDistribution::Uniform => rng.random_range(-1.0..=1.0),
            BaseDistribution::Bernoulli => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            BaseDistribution::Discrete(v) => v[rng.random_range(0..v.len())],
        }
    }
}

/// Parameters of the random (q+1)-regular Anderson ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n: usize,
    pub degree: usize,
    #[serde(default)]
    pub disorder: f64,
    #[serde(default = "default_base")]
    pub base: BaseDistribution,
    #[serde(default)]
    pub seed: u64,
}

fn default_base() -> BaseDistribution {
    BaseDistribution::Uniform
}

impl EnsembleConfig {
    pub fn regular(n: usize, degree: usize, seed: u64) -> Self {
        EnsembleConfig {
            n,
            degree,
            disorder: 0.0,
            base: BaseDistribution::Uniform,
            seed,
        }
    }

    pub fn with_disorder(mut self, disorder: f64, base: BaseDistribution) -> Self {
        self.disorder = disorder;
        self.base = base;
        self
    }

    /// Potential bound `A = eps * a_nu`.
    pub fn potential_bound(&self) -> f64 {
        self.disorder * self.base.support_bound()
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 3 {
            return Err(Error::InvalidConfig(format!("degree {} < 3", self.degree)));
        }
        if (self.n * self.degree) % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "N(q+1) = {} is odd",
                self.n * self.degree
            )));
        }
        if self.n <= self.degree {
            return Err(Error::InvalidConfig(format!(
                "N = {} must exceed the degree {}",
                self.n, self.degree
            )));
        }
        if !(self.disorder >= 0.0) || !self.disorder.is_finite() {
            return Err(Error::InvalidConfig(format!("disorder {}", self.disorder)));
        }
        if let BaseDistribution::Discrete(v) = &self.base {
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidConfig("empty or non-finite discrete law".into()));
            }
        }
        Ok(())
    }
}

/// On-site potential `W` with its bound `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T> {
    pub values: Vec<T>,
    pub bound: T,
}

impl<T: Real> Potential<T> {
    pub fn zero(n: usize) -> Self {
        Potential {
            values: vec![T::zero(); n],
            bound: T::zero(),
        }
    }

    pub fn constant(n: usize, c: T) -> Self {
        Potential {
            values: vec![c; n],
            bound: c.abs(),
        }
    }

    /// Wraps explicit values, taking the bound as their sup norm.
    pub fn from_values(values: Vec<T>) -> Self {
        let bound = values.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
        Potential { values, bound }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn content_hash(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for v in &self.values {
            v.as_f64().to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// Uniform-ish simple connected (q+1)-regular graph from the pairing model.
pub fn random_regular(cfg: &EnsembleConfig) -> Result<Graph> {
    random_regular_with_budget(cfg, DEFAULT_MAX_RESTARTS)
}

pub fn random_regular_with_budget(cfg: &EnsembleConfig, max_restarts: usize) -> Result<Graph> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, Stream::Graph, 0);
    let d = cfg.degree;
    let mut points: Vec<usize> = (0..cfg.n).flat_map(|x| std::iter::repeat_n(x, d)).collect();
    for _ in 0..max_restarts {
        points.shuffle(&mut rng);
        let edges: Vec<(usize, usize)> = points.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        if let Ok(g) = build_graph_with_degree_bounds(&edges, cfg.n, d, d) {
            return Ok(g);
        }
    }
    Err(Error::RejectionBudgetExceeded {
        restarts: max_restarts,
    })
}

/// Simple connected graph with i.i.d. degrees uniform in `[dmin, dmax]`.
///
/// Pairs half-edges one at a time, redrawing a pair that would create a
/// loop or a repeated edge; a stuck or disconnected attempt restarts.
pub fn random_degree_bounded(n: usize, dmin: usize, dmax: usize, seed: u64) -> Result<Graph> {
    if dmin < 3 || dmax < dmin || n <= dmax {
        return Err(Error::InvalidConfig(format!(
            "degree range [{dmin}, {dmax}] with N = {n}"
        )));
    }
    let mut rng = stream_rng(seed, Stream::Graph, 1);
    for _ in 0..DEFAULT_MAX_RESTARTS {
        let mut deg: Vec<usize> = (0..n).map(|_| rng.random_range(dmin..=dmax)).collect();
        if deg.iter().sum::<usize>() % 2 == 1 {
            let x = rng.random_range(0..n);
            deg[x] = if deg[x] < dmax { deg[x] + 1 } else { deg[x] - 1 };
        }
        if let Some(edges) = pair_without_collisions(&deg, &mut rng) {
            if let Ok(g) = build_graph(&edges, n) {
                return Ok(g);
            }
        }
    }
    Err(Error::RejectionBudgetExceeded {
        restarts: DEFAULT_MAX_RESTARTS,
    })
}

fn pair_without_collisions<R: Rng>(deg: &[usize], rng: &mut R) -> Option<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = deg
        .iter()
        .enumerate()
        .flat_map(|(x, &d)| std::iter::repeat_n(x, d))
        .collect();
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(points.len() / 2);
    while !points.is_empty() {
        let mut placed = false;
        for _ in 0..100 {
            let i = rng.random_range(0..points.len());
            let j = rng.random_range(0..points.len());
            let (u, v) = (points[i], points[j]);
            if i == j || u == v || seen.contains(&(u.min(v), u.max(v))) {
                continue;
            }
            seen.insert((u.min(v), u.max(v)));
            edges.push((u, v));
            let (hi, lo) = (i.max(j), i.min(j));
            points.swap_remove(hi);
            points.swap_remove(lo);
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    Some(edges)
}

/// I.i.d. potential with law `nu` scaled by the disorder strength.
pub fn sample_potential<T: Real>(g: &Graph, cfg: &EnsembleConfig) -> Potential<T> {
    let bound = T::lit(cfg.potential_bound());
    if cfg.disorder == 0.0 {
        return Potential {
            values: vec![T::zero(); g.n()],
            bound,
        };
    }
    let mut rng = stream_rng(cfg.seed, Stream::Potential, 0);
    let values = (0..g.n())
        .map(|_| T::lit(cfg.disorder * cfg.base.sample(&mut rng)))
        .collect();
    Potential { values, bound }
}

/// Spectral gap of the simple random walk: `1 - max |mu|` over eigenvalues
/// `mu != 1`. Nonpositive for bipartite graphs.
pub fn expander_gap<T: Real>(g: &Graph) -> Result<T> {
    let n = g.n();
    let mut a = vec![T::zero(); n * n];
    let sq: Vec<T> = (0..n).map(|x| T::lit(g.degree(x) as f64).sqrt()).collect();
    for x in 0..n {
        for &y in g.neighbors(x) {
            a[x + y * n] = T::one() / (sq[x] * sq[y]);
        }
    }
    let (vals, _) = T::symmetric_eigen(n, &a)
        .ok_or_else(|| Error::EigensolveFailure("random-walk matrix".into()))?;
    // connected: the top eigenvalue 1 is simple and sits last
    let nontrivial = vals[..n - 1].iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    Ok(T::one() - nontrivial)
}

/// Fraction of vertices with injectivity radius `< r`, for `r = 1..=r_max`.
pub fn bst_profile(g: &Graph, r_max: usize) -> Vec<f64> {
    let radii: Vec<usize> = (0..g.n())
        .map(|x| injectivity_radius_capped(g, x, r_max))
        .collect();
    (1..=r_max)
        .map(|r| radii.iter().filter(|&&rho| rho < r).count() as f64 / g.n() as f64)
        .collect()
}

/// Random subset of `size` vertices drawn from the subset stream.
pub fn random_subset(n: usize, size: usize, seed: u64) -> Vec<usize> {
    let mut rng = stream_rng(seed, Stream::Subset, 0);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let mut out = idx[..size.min(n)].to_vec();
    out.sort_unstable();
    out
}

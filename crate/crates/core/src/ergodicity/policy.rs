use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::cover_green::{continuation_solve_with, solve_zeta_from, SolveOptions, ZetaField, DEFAULT_MAX_ITER};
use crate::ensembles::Potential;
use crate::error::Result;
use crate::graph::Graph;
use crate::scalar::{cx, Real};

/// How spectral parameters `gamma_j = lambda_j + i eta_0` are resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaMode {
    /// A separate solve at every `gamma_j`.
    Exact,
    /// Solve on a grid of the given spacing and reuse the nearest node.
    /// Approximate; never used for identity checks.
    CoarseGrid { spacing: f64 },
}

/// In-memory store of solved fields keyed by instance and parameter.
#[derive(Debug, Default)]
pub struct ZetaCache<T> {
    map: Mutex<HashMap<(u64, u64, u64, u64, u64), Arc<ZetaField<T>>>>,
}

impl<T: Real> ZetaCache<T> {
    pub fn new() -> Self {
        ZetaCache {
            map: Mutex::new(HashMap::new()),
        }
    }

    fn key(g: &Graph, w: &Potential<T>, lambda: T, eta: T, tol: T) -> (u64, u64, u64, u64, u64) {
        (
            g.content_hash(),
            w.content_hash(),
            lambda.as_f64().to_bits(),
            eta.as_f64().to_bits(),
            tol.as_f64().to_bits(),
        )
    }

    pub fn get(&self, g: &Graph, w: &Potential<T>, lambda: T, eta: T, tol: T) -> Option<Arc<ZetaField<T>>> {
        self.map
            .lock()
            .expect("cache lock")
            .get(&Self::key(g, w, lambda, eta, tol))
            .cloned()
    }

    pub fn insert(&self, g: &Graph, w: &Potential<T>, lambda: T, eta: T, tol: T, f: Arc<ZetaField<T>>) {
        self.map
            .lock()
            .expect("cache lock")
            .insert(Self::key(g, w, lambda, eta, tol), f);
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Strategy for obtaining the field at each `gamma_j`.
///
/// Parameters are split into fixed-size chunks; chunks run in parallel and
/// each chunk warm-starts along its sorted `lambda_j`. The chunking does not
/// depend on the thread count, so results are identical for any pool size.
#[derive(Debug, Clone)]
pub struct ZetaPolicy<T> {
    pub tol: T,
    pub max_iter: usize,
    pub chunk: usize,
    pub mode: GammaMode,
    pub cache: Option<Arc<ZetaCache<T>>>,
}

impl<T: Real> ZetaPolicy<T> {
    pub fn exact(tol: T) -> Self {
        ZetaPolicy {
            tol,
            max_iter: DEFAULT_MAX_ITER,
            chunk: 32,
            mode: GammaMode::Exact,
            cache: None,
        }
    }

    pub fn with_cache(mut self, cache: Arc<ZetaCache<T>>) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn describe(&self) -> String {
        match self.mode {
            GammaMode::Exact => format!("exact gamma_j, tol {:e}, chunk {}", self.tol.as_f64(), self.chunk),
            GammaMode::CoarseGrid { spacing } => {
                format!("coarse grid {spacing}, tol {:e}", self.tol.as_f64())
            }
        }
    }

    fn target(&self, lambda: T) -> T {
        match self.mode {
            GammaMode::Exact => lambda,
            GammaMode::CoarseGrid { spacing } => {
                let s = T::lit(spacing);
                (lambda / s).round() * s
            }
        }
    }

    fn solve(
        &self,
        g: &Graph,
        w: &Potential<T>,
        lambda: T,
        eta: T,
        warm: Option<&ZetaField<T>>,
    ) -> Result<Arc<ZetaField<T>>> {
        if let Some(c) = &self.cache {
            if let Some(f) = c.get(g, w, lambda, eta, self.tol) {
                return Ok(f);
            }
        }
        let opts = SolveOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        };
        let f = match warm {
            Some(prev) => match solve_zeta_from(g, w, cx(lambda, eta), opts, Some(&prev.zeta)) {
                Ok(f) => f,
                Err(_) => continuation_solve_with(g, w, lambda, eta, opts)?,
            },
            None => continuation_solve_with(g, w, lambda, eta, opts)?,
        };
        let f = Arc::new(f);
        if let Some(c) = &self.cache {
            c.insert(g, w, lambda, eta, self.tol, f.clone());
        }
        Ok(f)
    }

    /// Solve at `lambda_i + i eta` for every entry and feed each field to `f`,
    /// collecting results in input order. `lambdas` should be sorted.
    pub fn for_each_gamma<R, F>(&self, g: &Graph, w: &Potential<T>, lambdas: &[T], eta: T, f: F) -> Result<Vec<R>>
    where
        R: Send,
        F: Fn(usize, &ZetaField<T>) -> Result<R> + Sync,
    {
        let chunk = self.chunk.max(1);
        let starts: Vec<usize> = (0..lambdas.len()).step_by(chunk).collect();
        let parts: Vec<Result<Vec<R>>> = starts
            .par_iter()
            .map(|&s| {
                let end = (s + chunk).min(lambdas.len());
                let mut out = Vec::with_capacity(end - s);
                let mut prev: Option<Arc<ZetaField<T>>> = None;
                for (i, &lambda) in lambdas.iter().enumerate().take(end).skip(s) {
                    let target = self.target(lambda);
                    let field = match &prev {
                        Some(p) if p.gamma.re == target => p.clone(),
                        _ => self.solve(g, w, target, eta, prev.as_deref())?,
                    };
                    out.push(f(i, &field)?);
                    prev = Some(field);
                }
                Ok(out)
            })
            .collect();
        let mut all = Vec::with_capacity(lambdas.len());
        for p in parts {
            all.extend(p?);
        }
        Ok(all)
    }
}

//! Path kernels `K in H_k` and their quantizations `K_G` (on vertex
//! functions) and `K_B` (on oriented-edge functions).

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{for_each_nb_path, is_nb_path, Graph, PathSet};
use crate::scalar::{cx, czero, Real, C};

type Rule<T> = Arc<dyn Fn(&[usize]) -> C<T> + Send + Sync>;

#[derive(Clone)]
enum Values<T> {
    Dense { paths: Arc<PathSet>, values: Vec<C<T>> },
    Rule(Rule<T>),
}

/// A complex kernel on the non-backtracking paths of length `k`.
///
/// Stored densely over a materialised `B_k`, or as a rule evaluated on the
/// fly when `B_k` is too large to hold.
#[derive(Clone)]
pub struct Observable<T> {
    k: usize,
    graph: Graph,
    values: Values<T>,
    pub sup_bound: T,
}

impl<T: Real> std::fmt::Debug for Observable<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Observable")
            .field("k", &self.k)
            .field("dense", &matches!(self.values, Values::Dense { .. }))
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

/// A sum of observables of possibly different lengths.
pub type ObservableFamily<T> = Vec<Observable<T>>;

impl<T: Real> Observable<T> {
    /// Dense observable over `paths`.
    pub fn dense(g: &Graph, paths: Arc<PathSet>, values: Vec<C<T>>) -> Result<Self> {
        if values.len() != paths.len() {
            return Err(Error::DimensionMismatch {
                expected: paths.len(),
                got: values.len(),
            });
        }
        let sup_bound = values.iter().fold(T::zero(), |a, v| a.max(v.norm()));
        Ok(Observable {
            k: paths.k(),
            graph: g.clone(),
            values: Values::Dense { paths, values },
            sup_bound,
        })
    }

    /// Dense observable materialised from a rule.
    pub fn from_fn<F: Fn(&[usize]) -> C<T>>(g: &Graph, k: usize, f: F) -> Result<Self> {
        let paths = Arc::new(PathSet::new(g, k)?);
        Self::from_fn_on(g, paths, f)
    }

    pub fn from_fn_on<F: Fn(&[usize]) -> C<T>>(g: &Graph, paths: Arc<PathSet>, f: F) -> Result<Self> {
        let values = paths.iter().map(&f).collect();
        Self::dense(g, paths, values)
    }

    /// Rule-based observable; `sup_bound` is trusted.
    pub fn rule<F>(g: &Graph, k: usize, sup_bound: T, f: F) -> Self
    where
        F: Fn(&[usize]) -> C<T> + Send + Sync + 'static,
    {
        Observable {
            k,
            graph: g.clone(),
            values: Values::Rule(Arc::new(f)),
            sup_bound,
        }
    }

    pub fn constant(g: &Graph, k: usize, c: C<T>) -> Result<Self> {
        Self::from_fn(g, k, |_| c)
    }

    /// Vertex function as an `H_0` observable.
    pub fn vertex_function(g: &Graph, a: &[C<T>]) -> Result<Self> {
        let paths = Arc::new(PathSet::new(g, 0)?);
        Self::dense(g, paths, a.to_vec())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.values, Values::Dense { .. })
    }

    pub fn paths(&self) -> Option<&Arc<PathSet>> {
        match &self.values {
            Values::Dense { paths, .. } => Some(paths),
            Values::Rule(_) => None,
        }
    }

    pub fn dense_values(&self) -> Option<&[C<T>]> {
        match &self.values {
            Values::Dense { values, .. } => Some(values),
            Values::Rule(_) => None,
        }
    }

    /// Value at a path; zero for sequences that are not paths of `B_k`.
    pub fn value(&self, p: &[usize]) -> C<T> {
        if p.len() != self.k + 1 {
            return czero();
        }
        match &self.values {
            Values::Dense { paths, values } => paths.index_of(p).map(|i| values[i]).unwrap_or_else(czero),
            Values::Rule(f) => {
                if is_nb_path(&self.graph, p) {
                    f(p)
                } else {
                    czero()
                }
            }
        }
    }

    /// Visit `(path, value)` in lexicographic path order.
    pub fn for_each<F: FnMut(&[usize], C<T>)>(&self, mut f: F) {
        match &self.values {
            Values::Dense { paths, values } => {
                for (p, &v) in paths.iter().zip(values) {
                    f(p, v);
                }
            }
            Values::Rule(rule) => for_each_nb_path(&self.graph, self.k, |p| f(p, rule(p))),
        }
    }

    /// Materialise as a dense observable.
    pub fn to_dense(&self) -> Result<Self> {
        match &self.values {
            Values::Dense { .. } => Ok(self.clone()),
            Values::Rule(rule) => Self::from_fn(&self.graph, self.k, |p| rule(p)),
        }
    }

    /// Pointwise map into a new dense observable over the same paths.
    pub fn map<F: Fn(&[usize], C<T>) -> C<T>>(&self, f: F) -> Result<Self> {
        let d = self.to_dense()?;
        let paths = d.paths().expect("dense").clone();
        let values = paths
            .iter()
            .zip(d.dense_values().expect("dense"))
            .map(|(p, &v)| f(p, v))
            .collect();
        Self::dense(&self.graph, paths, values)
    }

    pub fn scale(&self, c: C<T>) -> Result<Self> {
        self.map(|_, v| v * c)
    }

    /// Interchange text: header `k <k> <count>`, then `x_0 .. x_k re im` rows.
    pub fn to_text(&self) -> String {
        let mut rows = Vec::new();
        self.for_each(|p, v| rows.push((p.to_vec(), v)));
        let mut s = String::new();
        let _ = writeln!(s, "k {} {}", self.k, rows.len());
        for (p, v) in rows {
            for x in &p {
                let _ = write!(s, "{x} ");
            }
            let _ = writeln!(s, "{:e} {:e}", v.re.as_f64(), v.im.as_f64());
        }
        s
    }

    /// Parse the interchange text; paths not listed get value zero.
    pub fn from_text(g: &Graph, text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[0] != "k" {
            return Err(Error::Parse(format!("bad header '{header}'")));
        }
        let k: usize = h[1].parse().map_err(|e| Error::Parse(format!("{e}")))?;
        let count: usize = h[2].parse().map_err(|e| Error::Parse(format!("{e}")))?;
        let paths = Arc::new(PathSet::new(g, k)?);
        let mut values = vec![czero(); paths.len()];
        let mut seen = 0;
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != k + 3 {
                return Err(Error::Parse(format!("row '{line}' has wrong width")));
            }
            let p: Vec<usize> = toks[..=k]
                .iter()
                .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{e}"))))
                .collect::<Result<_>>()?;
            let re: f64 = toks[k + 1].parse().map_err(|e| Error::Parse(format!("{e}")))?;
            let im: f64 = toks[k + 2].parse().map_err(|e| Error::Parse(format!("{e}")))?;
            let i = paths
                .index_of(&p)
                .ok_or_else(|| Error::Parse(format!("{p:?} is not a non-backtracking path")))?;
            values[i] = cx(T::lit(re), T::lit(im));
            seen += 1;
        }
        if seen != count {
            return Err(Error::Parse(format!("header announces {count} rows, found {seen}")));
        }
        Self::dense(g, paths, values)
    }
}

/// Lift a kernel on vertex pairs to the family `K_k(x_0;x_k) = kernel(x_0, x_k)`
/// for `k = 0..=range`.
pub fn lift_kernel<T: Real, F>(kernel: F, range: usize, g: &Graph) -> Result<ObservableFamily<T>>
where
    F: Fn(usize, usize) -> C<T>,
{
    let mut out = Vec::with_capacity(range + 1);
    for k in 0..=range {
        let paths = Arc::new(PathSet::new(g, k)?);
        let mut values = Vec::with_capacity(paths.len());
        for p in paths.iter() {
            let v = kernel(p[0], p[k]);
            if v.norm() > T::one() + T::epsilon() {
                return Err(Error::SupBoundViolated {
                    value: v.norm().as_f64(),
                    bound: 1.0,
                });
            }
            values.push(v);
        }
        out.push(Observable::dense(g, paths, values)?);
    }
    Ok(out)
}

/// `<phi1, K_G phi2> = sum_{B_k} conj(phi1(x_0)) K(x_0;x_k) phi2(x_k)`.
pub fn kg_matrix_element<T: Real>(obs: &Observable<T>, phi1: &[C<T>], phi2: &[C<T>]) -> C<T> {
    let k = obs.k();
    let mut s = czero();
    obs.for_each(|p, v| s = s + phi1[p[0]].conj() * v * phi2[p[k]]);
    s
}

/// Real-vector version of [`kg_matrix_element`] with `phi1 = phi2 = psi`.
pub fn kg_diagonal<T: Real>(obs: &Observable<T>, psi: &[T]) -> C<T> {
    let k = obs.k();
    let mut s = czero();
    obs.for_each(|p, v| s = s + v * (psi[p[0]] * psi[p[k]]));
    s
}

/// `<f1, K_B f2> = sum_{B_k} conj(f1(x_0,x_1)) K(x_0;x_k) f2(x_{k-1},x_k)`.
pub fn kb_matrix_element<T: Real>(obs: &Observable<T>, f1: &[C<T>], f2: &[C<T>]) -> Result<C<T>> {
    let k = obs.k();
    if k == 0 {
        return Err(Error::KZeroNotEdgeBased);
    }
    let g = obs.graph();
    let mut s = czero();
    obs.for_each(|p, v| {
        let a = g.edge_id(p[0], p[1]).expect("edge");
        let b = g.edge_id(p[k - 1], p[k]).expect("edge");
        s = s + f1[a].conj() * v * f2[b];
    });
    Ok(s)
}

/// Sum of [`kg_matrix_element`] over a family.
pub fn kg_family<T: Real>(fam: &[Observable<T>], phi1: &[C<T>], phi2: &[C<T>]) -> C<T> {
    fam.iter().fold(czero(), |a, o| a + kg_matrix_element(o, phi1, phi2))
}

/// Sum of [`kb_matrix_element`] over a family; every member needs `k >= 1`.
pub fn kb_family<T: Real>(fam: &[Observable<T>], f1: &[C<T>], f2: &[C<T>]) -> Result<C<T>> {
    let mut s = czero();
    for o in fam {
        s = s + kb_matrix_element(o, f1, f2)?;
    }
    Ok(s)
}

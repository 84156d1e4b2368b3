//! Finite-graph operators `H = A + W` and `P`, their eigensystems and the
//! finite Green function.

use std::io::{Read, Write};

use crate::ensembles::Potential;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{cx, czero, Real, C};

/// Largest `N` accepted by the dense solver.
pub const DEFAULT_SIZE_CAP: usize = 5000;

/// Default relative residual tolerance.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;

/// Real orthonormal eigenpairs of `H`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem<T> {
    pub values: Vec<T>,
    // column-major: vector j occupies vectors[j*n..(j+1)*n]
    vectors: Vec<T>,
    pub residual_tol: T,
    /// Largest `||H psi - lambda psi|| / ||H||` over all pairs.
    pub max_residual: T,
    n: usize,
}

impl<T: Real> EigenSystem<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vector(&self, j: usize) -> &[T] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }

    /// Indices `j` with `lambda_j` in the open interval `(a, b)`.
    pub fn indices_in(&self, a: T, b: T) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| self.values[j] > a && self.values[j] < b)
            .collect()
    }

    /// Size of the cluster of eigenvalues within `tol` of `lambda_j`.
    pub fn multiplicity(&self, j: usize, tol: T) -> usize {
        let l = self.values[j];
        self.values.iter().filter(|&&v| (v - l).abs() <= tol).count()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let s: T = self
                    .vector(i)
                    .iter()
                    .zip(self.vector(j))
                    .map(|(&a, &b)| a * b)
                    .sum();
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Versioned little-endian binary dump of `(lambda, Psi)` as `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.residual_tol.as_f64().to_le_bytes())?;
        w.write_all(&self.max_residual.as_f64().to_le_bytes())?;
        for v in self.values.iter().chain(self.vectors.iter()) {
            w.write_all(&v.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Parse("not an eigensystem dump".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != DUMP_VERSION {
            return Err(Error::Parse(format!("unsupported dump version {version}")));
        }
        let mut b8 = [0u8; 8];
        let mut read_u64 = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        };
        let n = read_u64(&mut r)? as usize;
        let residual_tol = T::lit(f64::from_bits(read_u64(&mut r)?));
        let max_residual = T::lit(f64::from_bits(read_u64(&mut r)?));
        let read_vals = |r: &mut R, count: usize| -> Result<Vec<T>> {
            (0..count)
                .map(|_| {
                    let mut b = [0u8; 8];
                    r.read_exact(&mut b)?;
                    Ok(T::lit(f64::from_le_bytes(b)))
                })
                .collect()
        };
        let values = read_vals(&mut r, n)?;
        let vectors = read_vals(&mut r, n * n)?;
        Ok(EigenSystem {
            values,
            vectors,
            residual_tol,
            max_residual,
            n,
        })
    }
}

const DUMP_MAGIC: &[u8; 8] = b"QERGOEIG";
const DUMP_VERSION: u32 = 1;

/// Dense column-major matrix of `H = A + W`.
pub fn hamiltonian_matrix<T: Real>(g: &Graph, w: &Potential<T>) -> Vec<T> {
    let n = g.n();
    let mut h = vec![T::zero(); n * n];
    for x in 0..n {
        for &y in g.neighbors(x) {
            h[x + y * n] = T::one();
        }
        h[x + x * n] = w.values[x];
    }
    h
}

/// Apply `H = A + W` to a real vector.
pub fn apply_hamiltonian<T: Real>(g: &Graph, w: &Potential<T>, f: &[T]) -> Vec<T> {
    (0..g.n())
        .map(|x| w.values[x] * f[x] + g.neighbors(x).iter().map(|&y| f[y]).sum::<T>())
        .collect()
}

/// Full eigensystem of `H` with residual check at relative tolerance `tol`.
pub fn eigensystem<T: Real>(g: &Graph, w: &Potential<T>, tol: T) -> Result<EigenSystem<T>> {
    eigensystem_capped(g, w, tol, DEFAULT_SIZE_CAP)
}

pub fn eigensystem_capped<T: Real>(
    g: &Graph,
    w: &Potential<T>,
    tol: T,
    size_cap: usize,
) -> Result<EigenSystem<T>> {
    let n = g.n();
    if n > size_cap {
        return Err(Error::SizeCapExceeded { n, cap: size_cap });
    }
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: w.len(),
        });
    }
    let h = hamiltonian_matrix(g, w);
    let (values, vectors) = T::symmetric_eigen(n, &h)
        .ok_or_else(|| Error::EigensolveFailure("dense symmetric solve".into()))?;
    // ||H|| <= D + A bounds the operator norm
    let norm = T::lit(g.max_degree() as f64) + w.bound.max(w.values.iter().fold(T::zero(), |a, &v| a.max(v.abs())));
    let mut max_residual = T::zero();
    for j in 0..n {
        let psi = &vectors[j * n..(j + 1) * n];
        let hpsi = apply_hamiltonian(g, w, psi);
        let r = hpsi
            .iter()
            .zip(psi)
            .map(|(&a, &b)| (a - values[j] * b).powi(2))
            .sum::<T>()
            .sqrt();
        max_residual = max_residual.max(r / norm);
    }
    if !(max_residual <= tol) {
        return Err(Error::EigensolveFailure(format!(
            "residual {max_residual:e} above tolerance {tol:e}"
        )));
    }
    Ok(EigenSystem {
        values,
        vectors,
        residual_tol: tol,
        max_residual,
        n,
    })
}

/// `g^z(x, y) = sum_j psi_j(x) psi_j(y) / (lambda_j - z)`.
pub fn finite_green<T: Real>(es: &EigenSystem<T>, x: usize, y: usize, z: C<T>) -> Result<C<T>> {
    if z.im == T::zero() {
        return Err(Error::RealAxisParameter { im: 0.0 });
    }
    let mut s = czero();
    for j in 0..es.n() {
        let v = es.vector(j);
        let num = v[x] * v[y];
        s = s + cx(num, T::zero()) / (cx(es.values[j], T::zero()) - z);
    }
    Ok(s)
}

/// Dense row-major matrix, used for small operators.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, f: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * f[j]).sum())
            .collect()
    }
}

/// Simple random walk `(Pf)(x) = d(x)^{-1} sum_{y~x} f(y)`.
pub fn laplacian_matrix<T: Real>(g: &Graph) -> DenseMatrix<T> {
    let n = g.n();
    let mut data = vec![T::zero(); n * n];
    for x in 0..n {
        let inv = T::one() / T::lit(g.degree(x) as f64);
        for &y in g.neighbors(x) {
            data[x * n + y] = inv;
        }
    }
    DenseMatrix { n, data }
}

/// Sparse application of `P`.
pub fn apply_laplacian<T: Real>(g: &Graph, f: &[T]) -> Vec<T> {
    (0..g.n())
        .map(|x| {
            g.neighbors(x).iter().map(|&y| f[y]).sum::<T>() / T::lit(g.degree(x) as f64)
        })
        .collect()
}

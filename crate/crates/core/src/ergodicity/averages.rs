use crate::cover_green::ZetaField;
use crate::graph::PathSet;
use crate::quantization::Observable;
use crate::scalar::{czero, Real, C};

/// `sum_x N_gamma(x)`, the denominator of the weights.
pub fn green_mass<T: Real>(zf: &ZetaField<T>) -> T {
    zf.n_gamma.iter().copied().sum()
}

/// `Phi(x_0..x_k) = Im G(x_0..x_k) / sum_x N_gamma(x)` for each path.
pub fn phi_weights<T: Real>(zf: &ZetaField<T>, paths: &PathSet) -> Vec<T> {
    let mass = green_mass(zf);
    paths.iter().map(|p| zf.green(p).im / mass).collect()
}

/// `<K>_gamma = sum_k sum_{B_k} K(path) Phi(path)`.
pub fn weighted_average<T: Real>(fam: &[Observable<T>], zf: &ZetaField<T>) -> C<T> {
    let mass = green_mass(zf);
    let mut s = czero();
    for obs in fam {
        obs.for_each(|p, v| s = s + v * zf.green(p).im);
    }
    s / mass
}

/// Weighted average of a vertex function: `sum_x a(x) N(x) / sum_x N(x)`.
pub fn vertex_average<T: Real>(a: &[C<T>], zf: &ZetaField<T>) -> C<T> {
    let mass = green_mass(zf);
    a.iter()
        .zip(&zf.n_gamma)
        .fold(czero(), |s, (&v, &n)| s + v * n)
        / mass
}

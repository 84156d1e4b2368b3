//! Green functions on covering trees, non-backtracking quantization and
//! quantum-variance functionals for Schrödinger operators `H = A + W` on
//! large finite graphs.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the usual double-precision choice.

pub mod cover_green;
pub mod diagnostics;
pub mod ensembles;
pub mod ergodicity;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod quantization;
pub mod scalar;
pub mod spectral;

pub use cover_green::{
    continuation_solve, identity_residuals, mu_k, solve_zeta, tree_green, IdentityResiduals, NbMeasure,
    ZetaField,
};
pub use ensembles::{random_regular, sample_potential, BaseDistribution, EnsembleConfig, Potential};
pub use error::{Error, Result};
pub use graph::{build_graph, enumerate_nb_paths, Graph, NbPath, PathSet};
pub use quantization::{Observable, ObservableFamily};
pub use scalar::{Real, C};
pub use spectral::{eigensystem, EigenSystem};

pub type ZetaField64 = ZetaField<f64>;
pub type ZetaField32 = ZetaField<f32>;
pub type Potential64 = Potential<f64>;
pub type Potential32 = Potential<f32>;
pub type EigenSystem64 = EigenSystem<f64>;
pub type EigenSystem32 = EigenSystem<f32>;
pub type Observable64 = Observable<f64>;
pub type Observable32 = Observable<f32>;
pub type NbMeasure64 = NbMeasure<f64>;
pub type C64 = C<f64>;
pub type C32 = C<f32>;

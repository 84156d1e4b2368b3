//! Quasi-eigenvectors, quantum variances, weighted averages and the path
//! operators whose exact relations drive the ergodicity argument.

mod averages;
mod invariance;
mod policy;
mod quasi;
mod cesaro;
mod suite;
mod transfer;
mod variance;

pub use averages::{green_mass, phi_weights, vertex_average, weighted_average};
pub use invariance::{
    apply_m, apply_r, apply_z, apply_z_inv, inner_gamma, invariance_terms, norm_gamma, transfer_main_term,
    InvarianceTerms,
};
pub use policy::{GammaMode, ZetaCache, ZetaPolicy};
pub use quasi::{build_quasi_eigenvectors, quasi_eigen_residual, NbQuasiEigenvectors};
pub use cesaro::{edge_observable, times_degree, DegenerateEdges, CesaroOperators, DEFAULT_DEGENERACY_THRESHOLD};
pub use suite::{identity_suite, spread_indices, cesaro_residuals, SuiteResiduals, SuiteSamples};
pub use transfer::{inner_mu, predicted_row_sum, transfer_apply, transfer_row_sums, Transfer};
pub use variance::{nb_variance, quantum_variance, NbPairing, VarianceReport, MULTIPLICITY_TOL};

//! Estimation of an entropic entanglement parameter for bipartite quantum states.
//!
//! The central quantity is a nested optimization: the supremum over von Neumann
//! measurements of the gap between the minimum measurement (Klein) entropy over
//! product states and the measurement entropy of the state itself. Positivity of
//! the estimate certifies entanglement; the crate also computes every applicable
//! closed-form upper and lower bound so estimates ship with a consistency sandwich.
//!
//! Modules follow the pipeline:
//!
//! - [`state`]: bipartite pure/mixed state types, Schmidt decomposition, partial trace.
//! - [`entropy`]: Shannon/von Neumann entropies, coherent information, trace distance.
//! - [`measurement`]: rank-1 projective bases, Klein entropy, Bell and
//!   Schmidt-coefficient-preserving bases, angle parameterization of bases.
//! - [`product_opt`]: the inner minimization over product states, capped-entropy
//!   minima, the 2-qubit product-in-a-plane solver, and brute-force grid oracles.
//! - [`engine`]: the outer measurement search, bound reports, robustness checks.
//! - [`families`]: generators for isotropic, Bell-diagonal, and random state families.
//! - [`io`]: JSON schemas for states, measurements, and reports.
//! - [`suites`]: randomized property batteries used by the verification CLI.

#![forbid(unsafe_code)]

pub mod engine;
pub mod entropy;
pub mod error;
pub mod families;
pub mod io;
pub mod measurement;
pub mod optimize;
pub mod product_opt;
pub mod state;
pub mod suites;

pub use engine::{
    analytic_eparam, bounds_report, eparam_fixed_measurement, estimate_eparam,
    estimate_eparam_seeded, fixed_measurement_continuity_check, is_bell_diagonal, lower_bounds,
    max_min_product_entropy, robustness_check, upper_bounds, BoundsReport, ContinuityReport,
    EParamReport, LowerBounds, RobustnessReport, SupInfReport, UpperBounds, QUTRIT_SUP_INF,
};
pub use entropy::{
    binary_entropy, coherent_information, shannon_entropy, trace_norm_distance,
    von_neumann_entropy,
};
pub use error::{Error, Result};
pub use families::{
    bell_diagonal, isotropic, isotropic_crossing_p, isotropic_entropy, max_entangled,
    random_product_pure, random_separable, FamilySpec,
};
pub use measurement::{
    bell_basis, decode_measurement, eigenbasis_measurement, encode_measurement, klein_entropy,
    klein_entropy_pure, schmidt_preserving_eigenbasis, Measurement, MeasurementParams,
};
pub use optimize::OptimizationConfig;
pub use product_opt::{
    brute_force_min_products, max_outcome_probability_over_grid, max_product_overlap,
    min_entropy_capped, min_entropy_with_caps, min_klein_entropy_over_products,
    product_in_2d_subspace, InnerMinResult, ProductState,
};
pub use state::{
    haar_random_pure, partial_trace, schmidt_decompose, CMatrix, CVector, DensityMatrix, Dims,
    PureState, SchmidtDecomposition, Subsystem, C64,
};

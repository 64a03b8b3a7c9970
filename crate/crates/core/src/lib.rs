//! Partial-entropy entanglement measure for multipartite qubit pure states.
//!
//! The crate computes every reduced density matrix of an N-qubit pure state,
//! their von Neumann entropies, the genuine-entanglement measure η, and the
//! finest partition of the particles into mutually unentangled blocks. It can
//! also maximize η over the amplitudes on a fixed support pattern.
//!
//! ```
//! use etameasure::{classify, ghz_state, Verdict};
//!
//! let c = classify(&ghz_state(3).unwrap()).unwrap();
//! assert_eq!(c.verdict, Verdict::GenuinelyEntangled);
//! assert!((c.eta - 1.0).abs() < 1e-10);
//! ```

pub mod entropy;
pub mod error;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod reduction;
pub mod state;
pub mod table1;

pub use entropy::{
    classify, classify_with, eta_measure, eta_measure_with, extract_factors, extract_factors_with,
    factor_tolerance, factorization_oracle, factorization_oracle_with, full_report,
    full_report_with, partial_entropy, von_neumann_entropy, Block, Classification, EntropyReport,
    MeasureOptions, Verdict, EPS_ZERO,
};
pub use error::{Error, Result};
pub use linalg::{hermitian_eigen, hermitian_eigenvalues, singular_values, SquareMatrix};
pub use optimize::{eta_objective, maximize_eta, OptimizationResult};
pub use reduction::{
    enumerate_all, enumerate_subsets, partial_trace, reduced_spectrum, DensityMatrix,
    ReductionScope, SubsetMask,
};
pub use state::{
    build_state, embed_product, ghz_state, random_on_support, random_state, w_family_state,
    BasisTerm, PureState, SupportPattern,
};
pub use table1::{basis_label_map, reproduce_table1, Case, Table1Row};

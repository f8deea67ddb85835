//! Modular theory and non-commutative L_p norms for Gibbs states on matrix
//! algebras, with numerical checks of the multi-insertion Hölder inequality.
//!
//! The GNS space of a state with density `ρ` on `M_d` is realized as the
//! Hilbert–Schmidt space: vectors are `d×d` matrices, `Ω = ρ^{1/2}`, the algebra
//! acts by left multiplication and its commutant by right multiplication.

pub mod error;
pub mod harness;
pub mod holder_verify;
pub mod nclp;
pub mod record;
pub mod seed;
pub mod spectral;
pub mod standard_form;

pub use error::{Error, Result};
pub use holder_verify::{
    araki_bound_check, exponent_rule, finite_trace_holder_check, holder_check, multi_correlation, InsertionTuple,
    SplitSpec,
};
pub use nclp::{am_norm, kms_norm, kms_norm_analytic, phi_from_cone_vector, BoundKind, NormEstimate, OptConfig};
pub use record::{RecordMeta, VerificationRecord};
pub use spectral::{eig_hermitian, fractional_power, ComplexMatrix, SpectralDecomposition, SupportPolicy};
pub use standard_form::{GibbsEnsemble, StateFunctional};

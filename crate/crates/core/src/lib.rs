//! Quasi-lattice ordered monoids, discrete product systems over them, the
//! Wick algebra of covariant Toeplitz monomials and a truncated Fock
//! representation used as a numerical oracle.

pub mod error;
pub mod monoid;
pub mod product_system;

pub use error::{Error, Result};
pub use monoid::{DirectSumImage, Factor, FactorKind, Join, Letter, Monoid, MonoidElement, MonoidKind, Scalar, Truncation};
pub use product_system::{
    Aligned, BasisLabel, Dim, FiberDim, FiberOperator, FiberVector, OperatorKind, ProductSystem, SystemStyle, C64,
    PRUNE_TOL,
};
pub mod linalg;
pub mod wick;

pub use linalg::{NormEstimate, SparseMatrix};
pub use wick::{
    covariance_check_symbolic, norm_diagonal, rho_of_compact, wick_multiply, Computed, DiagonalNormCertificate,
    MonomialKey, WickElement,
};
pub mod fock;
pub mod sample;

pub use fock::{
    aperiodic_residual, aperiodic_search, faithfulness_condition, killing_witness_search, CuntzFamilyRep, Deviation,
    FaithfulnessReport, FamilyKind, FockBasis, FockOperator, FockRep, KillingWitness, Representation,
};

//! Exact-arithmetic computer algebra for degree-k derived Poisson algebras:
//! graded linear algebra with Koszul signs, L-infinity axiom checkers,
//! homotopy transfer along semifull contractions, Lie-pair constructions,
//! shifted polyvector fields, and a weight-truncated Fedosov-type
//! resolution, all over the rationals.

pub mod algebra;
pub mod fedosov;
pub mod graded;
pub mod linalg;
pub mod liepair;
pub mod linf;
pub mod polyvec;
pub mod scalar;
pub mod serial;
pub mod transfer;

pub use algebra::{FreeGCA, GradedAlgebra};
pub use graded::{
    canonicalize_word, decalage, inverse_decalage, koszul_sign, Error, GradedBasisSpace, MultiMap,
    Result, SymWord, Symmetry, Vec1,
};
pub use linf::{
    check_jacobi, check_leibniz, check_morphism, cohomology_with_bracket, exp_coderivation,
    Bracket, CheckConfig, DerivedPoissonStructure, LInfStructure, MorphismData, Report, Violation,
};
pub use scalar::Scalar;
pub use transfer::{
    perturb_contraction, transfer_structure, validate_contraction, ComplexSide, Contraction,
    LinMap, Perturbation,
};

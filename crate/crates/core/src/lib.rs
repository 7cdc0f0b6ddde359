//! Workbench for finite algebras of binary relations in reduct signatures.
//!
//! The crate is organised around five layers:
//!
//! - [`signature`]: which operation and constant symbols an algebra or a
//!   representation is expected to respect.
//! - [`algebra`]: abstract finite algebras given by operation tables, with
//!   structural validation and the derived notions used everywhere else
//!   (diversity, domain/range elements, the i-relation, ⊟/⊡ classes,
//!   normality, idempotents).
//! - [`relations`]: concrete binary relations over a finite base set, the
//!   predicates on them, and closure generation of concrete algebras.
//! - [`representation`]: verification of candidate representations and the
//!   transformations on them (quotient, symmetric interior, inflation, and
//!   the injectivization pipeline), plus the idempotent fixed-point finder
//!   and the strong-complement check.
//! - [`repsearch`] and [`partial_group`]: the two bounded decision
//!   procedures — searching for a representation over base sizes `1..=k`,
//!   and searching for an embedding of a partial group into a finite group
//!   realised as permutations of `1..=k` points.
//!
//! Everything is immutable after construction and deterministic; bounded
//! searches report "not found up to the bound", never a negative answer to
//! the unbounded question.

pub mod algebra;
pub mod instances;
pub mod partial_group;
pub mod relations;
pub mod representation;
pub mod repsearch;
pub mod signature;

pub use algebra::{AnalysisReport, FiniteAlgebra, LawViolation};
pub use relations::{Complementation, ConcreteAlgebra, Relation};
pub use representation::{IRoute, Representation, VerificationReport, VerifyOptions};
pub use signature::{SigSymbol, Signature};

//! Exact symbolic algebra for the regularity structure of the open KPZ
//! equation: trees and their degrees, the coproduct and structure group,
//! the renormalisation maps and the constants of the renormalised equation.

pub mod combination;
pub mod coproduct;
pub mod degree;
pub mod parse;
pub mod picard;
pub mod poly;
pub mod renorm;
pub mod sectors;
pub mod structure_group;
pub mod tables;
pub mod tree;
pub mod verify;

pub use combination::{TensorElement, TreeCombination};
pub use coproduct::{coproduct, coproduct_with, counit, PrimeRule};
pub use degree::ExactDegree;
pub use picard::{picard_dw, picard_w, q_leq0_nonlinearity, renorm_constants, PicardOptions, RenormConstants};
pub use poly::{rat, Monomial, Poly, Rational};
pub use renorm::{renormalize, renormalize_with, Expansion, RenormParams};
pub use sectors::{sector_exponents, SectorRow};
pub use structure_group::{check_structure_group, compose_gamma, gamma_f, CharacterF, StructureGroupReport};
pub use tables::{basis_w, DiagramTable};
pub use tree::Tree;
pub use verify::{verify_tables, VerificationReport};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("cannot parse {input:?}: {message}")]
    Parse { input: String, message: String },
    #[error("diagram table line {line}: {message}")]
    Table { line: usize, message: String },
    #[error("{tree} is outside the domain of the coproduct: {reason}")]
    OutsideDomain { tree: String, reason: String },
    #[error("{0} is not a generator of T+")]
    UnknownGenerator(String),
    #[error("abstract derivative is not defined on {0}")]
    NotDifferentiable(String),
    #[error("no composed character reproduces {tree}: residual {residual}")]
    Composition { tree: String, residual: String },
    #[error("renormalised nonlinearity has the wrong shape: residual {0}")]
    ShapeMismatch(String),
    #[error("unknown diagram {0}")]
    UnknownDiagram(String),
}

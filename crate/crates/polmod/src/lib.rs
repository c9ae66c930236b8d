//! Exact computation of polarization modules generated by families of
//! polynomials in an `ℓ × n` matrix of variables, their graded
//! `S_n × GL_ℓ` characters, and the degree-2/3 classification machinery.

pub mod closure;
pub mod exceptions;
pub mod expr;
pub mod frobenius;
pub mod matrix;
pub mod polyring;
pub mod symfunc;

pub use closure::{polarization_module, GeneratorFamily, GradedSpan};
pub use exceptions::{classify, ClassTag, ProjectivePoint3};
pub use expr::{Expr, Generator};
pub use frobenius::{frobenius_series, hilbert_series, oracle_series, FrobeniusSeries, OracleKind};
pub use polyring::{MultiDegree, Permutation, Poly, Q};
pub use symfunc::{Basis, Partition, SymSeries};

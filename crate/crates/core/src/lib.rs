//! Complexity invariants of finite and periodic edge-weighted graphs:
//! Laplacian determinant polynomials, torsion and tree complexity of finite
//! quotients, and Mahler measures.

pub mod error;
pub mod graph;
pub mod laurent;
pub mod lehmer;
pub mod linalg;
pub mod mahler;
pub mod oracles;
pub mod quotient;
pub mod report;

pub use error::{Error, ErrorKind, Result};
pub use graph::{ComponentInfo, EdgeOrbit, PeriodicGraph};
pub use laurent::{ExponentVector, LaurentMatrix, LaurentPoly};
pub use linalg::{IntegerMatrix, SmithForm};

pub use mahler::{MahlerMethod, MahlerResult};
pub use quotient::{
    complexity, quotient_graph, ComplexityReport, FiniteQuotientGraph, GrowthSeries, LatticeFamily,
    LatticeSpec,
};

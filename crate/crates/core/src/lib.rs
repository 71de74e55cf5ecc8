//! Reliability of series and parallel systems with dependent components.
//!
//! Joint lifetimes are described by a copula (or survival copula) over
//! exponential or Weibull marginals. The crate computes system aging
//! functions, the error made by assuming independence, and numerically
//! certified stochastic orderings between the dependent and independent
//! systems.

pub mod assessment;
pub mod copulas;
pub mod error;
pub mod marginals;
pub mod numeric;
pub mod oracle;
pub mod ordering;
pub mod report;
pub mod systems;
pub mod table1;

pub use assessment::{Assessment, ErrorReport, Measure, SystemPair, Verdict};
pub use copulas::{CopulaSpec, Family, FamilyKind, HinzmannForm};
pub use error::{Error, Result, Violation};
pub use marginals::{Lifetime, MarginalModel};
pub use ordering::{Monotonicity, MonotonicityVerdict, OrderingVerdict, RatioKind, Relation};
pub use systems::{BlockBasu, Coupling, Mode, ReliabilityCurve, Structure, SystemSpec};

//! Simulator of gradient descent carried out on block-encoded iterates.
//!
//! [`polyfunc`] and [`chebyshev`] describe objectives, [`blockcalc`] holds
//! the block-encoding calculus, [`descent`] runs both engines on it and
//! [`oracle`] is the plain floating-point reference.

pub mod blockcalc;
pub mod chebyshev;
pub mod descent;
pub mod oracle;
pub mod polyfunc;

pub use blockcalc::{AuditLog, BlockEncoding, BlockError, ResourceCounter};
pub use chebyshev::{ChebError, ChebyshevPoly, NamedFunction, ScalarFunction, SeparableObjective};
pub use descent::{DescentConfig, DescentError, DescentTrace, Mode};
pub use oracle::{classical_gd, Differentiable, OracleTrace};
pub use polyfunc::{MonomialTerm, ObjectiveFunction, PolyError};

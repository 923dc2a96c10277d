//! Exact Fourier–Motzkin elimination over rate systems whose constants are
//! linear combinations of information symbols.

pub mod builtin;
pub mod elim;
pub mod equiv;
pub mod expr;
pub mod lp;
pub mod system;

pub use builtin::Builtin;
pub use elim::{eliminate, eliminate_all, prune};
pub use equiv::{bind_joint, max_objective, numeric_equiv, random_bindings, Binding, EquivReport, LpSummary};
pub use expr::{InfoSymbol, Inequality, LinearExpr};
pub use lp::{maximize, LpOutcome};
pub use system::RateSystem;

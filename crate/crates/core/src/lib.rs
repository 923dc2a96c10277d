//! Achievable rates of the two-relay network with relay-to-sender feedback.
//!
//! The crate evaluates and optimizes two achievable-rate expressions (a
//! compress-and-forward scheme and a combined decode/compress-and-forward
//! scheme), reproduces the Fourier–Motzkin reduction of their proof-side
//! inequality systems with exact arithmetic, and simulates the
//! compress-and-forward scheme at toy block lengths.

pub mod error;
pub mod fm;
pub mod info;
pub mod io;
pub mod network;
pub mod optimize;
pub mod pmf;
pub mod random;
pub mod rate_region;
pub mod sim;
pub mod terms;
pub mod var;

pub use error::{Error, Result};
pub use info::{entropy, mutual_info, InfoEval, InfoQuery};
pub use network::{assemble_joint_t1, assemble_joint_t2, BscLinks, NetworkChannel, Sizes, T1Law, T2Law};
pub use pmf::{Alphabet, CondPmf, Diagnostics, JointPmf};
pub use var::{Var, VarSet};

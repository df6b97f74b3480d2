//! Solver plumbing shared by the transport, gradient and flow modules.

pub mod linalg;
pub mod lp;
pub mod prox;

pub use lp::{lp_solve, LpProblem, LpSolution, LpStatus};
pub use prox::{prox_solve, ConvexProblem, LinearConstraint, ProxCertificate, ProxSolution, Term};

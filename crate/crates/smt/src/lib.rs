//! Finite-domain formulas, their SMT-LIB2 rendering, and a session with an external solver.

pub mod formula;
pub mod lower;
pub mod session;
pub mod sexpr;

pub use formula::{
    and, and2, at_most_one, eq, eval, exactly_one, ff, forall, implies, ite, le, lex_le, lt, neq,
    not, or, or2, substitute, tt, Sort, Term, Value, VarId, VarPool,
};
pub use lower::QuantifierLowering;
pub use session::{replay, Model, SatResult, Session, SmtError, SolverConfig, SOLVER_ENV};

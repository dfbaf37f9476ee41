//! Generalized symbolic regression: discovers relations of the form
//! g(y) = f(x), where both sides are weighted sums of matrix-encoded basis
//! functions. A genetic-programming loop searches over basis sets while a
//! unit-norm constrained Lasso (solved by ADMM) fits the weights, so every
//! candidate's coefficients come from convex machinery rather than from the
//! evolutionary search itself.
//!
//! Start with the runnable examples:
//!
//! * `encode_decode` — the integer-matrix encoding of basis functions
//! * `fit_relation` — the constrained-Lasso solver on a planted relation
//! * `run_benchmark` — one full engine run on a named benchmark
//! * `predict` — inverting g to predict y on fresh inputs
//! * `verify_expression` — numeric equivalence checking of a written relation
//! * `suite` — multi-run aggregation into recovery/RMSE tables
//! * `libraries` — the benchmark registry and its transformation libraries

pub mod admm;
pub mod benchmarks;
pub mod cli;
pub mod encoding;
pub mod eval;
pub mod expr;
pub mod gp;
pub mod linalg;
pub mod recovery;

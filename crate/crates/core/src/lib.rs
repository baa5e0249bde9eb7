//! Intersection cuts for submodular and submodular-supermodular binary programs.
//!
//! The crate is organised bottom-up:
//!
//! - [`submodular`]: value oracles (graph cut, multilinear, log-det, modular) and
//!   the sign-split decomposition of multilinear polynomials;
//! - [`envelope`]: greedy vertices and the extended envelope `F(x) = max sigma(pi) x`;
//! - [`sfree`]: free sets (envelope epigraphs, lifted splits, reverse-linearized
//!   sets, cover relaxations) together with brute-force verification;
//! - [`simplex_lp`]: a dense bounded-variable simplex solver that exposes the
//!   corner polyhedron of an optimal basis;
//! - [`cuts`]: step lengths by a hybrid discrete Newton method and cut assembly;
//! - [`models`]: LP relaxations of max-cut and multilinear binary programs;
//! - [`harness`]: the root-node cutting loop, gap metrics and instance generators.

pub mod cuts;
pub mod envelope;
pub mod error;
pub mod formats;
pub mod harness;
pub mod models;
pub mod sfree;
pub mod simplex_lp;
pub mod submodular;

pub use error::{Error, Result};
pub use submodular::{Level, MultilinearFunction, SsFunction, SubmodularOracle, WeightedGraph};

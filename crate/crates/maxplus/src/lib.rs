//! Solvers for d-dimensional (max,+)-convolution, multidimensional
//! knapsack and bounded integer linear programs, together with the
//! brute-force oracles used to verify them.
//!
//! The crate is organised around one value domain: 64-bit integers
//! extended with a `-inf` sentinel ([`mdarray::ExtInt`]), stored in dense
//! row-major arrays ([`mdarray::MDArray`]). On top of that sit
//!
//! * [`maxconv`] — convolution engines (quadratic reference, 1-D
//!   linearization, linear-time concave convolution) and the upper-bound /
//!   superadditivity decision checks,
//! * [`knapsack`] — instance model, brute-force and Bellman oracles, and
//!   the equivalence-class solver over concave per-weight profit
//!   sequences,
//! * [`reductions`] — the constructive reduction ring between the problem
//!   families plus the randomized color-coding pipeline,
//! * [`ilp`] — bounded integer programs: exhaustive oracle, an exact
//!   rational LP relaxation, the proximity-based solver and the
//!   bound-halving divide-and-conquer solver.
//!
//! Every solver is deterministic; randomized operations take an explicit
//! seeded [`reductions::Rng`].

pub mod error;
pub mod ilp;
pub mod knapsack;
pub mod maxconv;
pub mod mdarray;
pub mod reductions;
mod simplex;
mod smawk;

pub use error::{Error, Result};
pub use mdarray::{ExtInt, MDArray, Position, SizeVec};

//! The p-contest: N points on [0,1], the one farthest from p times the
//! barycentre is replaced by a fresh random point at every step.
//!
//! Modules:
//! * [`process`] — the Markov chain, borderless variant, trajectory simulation
//!   and the ruling-order-statistic calculators;
//! * [`cases`] — the normalized-core case analysis and closed-form drift integrals;
//! * [`lyapunov`] — both Lyapunov functions, the N=3 kernel Λ and empirical drift;
//! * [`algebra`] — exact polynomials and the symbolic drift-numerator corpus;
//! * [`certifier`] — the Box method (uniform exact grid) and adaptive subdivision;
//! * [`experiments`] — named Monte Carlo suites built on the above;
//! * [`report`] — CSV/JSONL report writers and run manifests;
//! * [`quadrature`] — the adaptive quadrature oracle.

pub mod algebra;
pub mod cases;
pub mod certifier;
pub mod error;
pub mod experiments;
pub mod lyapunov;
pub mod process;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};

//! Exact multivariate polynomial and rational-function arithmetic, and the
//! symbolic derivation of the drift-numerator corpus.

pub mod corpus;
pub mod parse;
pub mod poly;
pub mod rational_fn;
pub mod transcribed;

pub use corpus::{compare_with_transcription, derive_corpus, CorpusComparison};
pub use parse::{parse_poly, read_corpus, write_corpus};
pub use poly::{rat, rint, Exps, Poly, Rat, Var, NVARS};
pub use rational_fn::{compose_poly, definite_integral, RationalFn};

//! Exact Haar-state integration over the free orthogonal and free unitary
//! quantum groups `O_N^+` and `U_N^+`, their free-probability limits, and the
//! rapid-decay constants controlling operator norms by `L^p` norms.
//!
//! Exact values are [`num_rational::BigRational`]s; real quantities are
//! rigorous [`interval::Bracket`]s.

pub mod error;
pub mod freelimit;
pub mod interval;
pub mod linalg;
pub mod ncpoly;
pub mod pairings;
pub mod qnum;
pub mod rapid_decay;
pub mod sweep;
pub mod weingarten;

pub use error::{Error, Result};
pub use interval::Bracket;
pub use ncpoly::{lp_norm, GaussRational, LpNorm, NcPolynomial, State};
pub use pairings::{gram_matrix, Color, GramMatrix, NcPairing};
pub use qnum::{dim_irrep, q_int, QContext};
pub use rapid_decay::{dn_constant, select_p, RDBound, ThreeVertexParams, Truncation};
pub use weingarten::{haar_moment, GeneratorWord, Letter, Model, Weingarten, WeingartenTable};

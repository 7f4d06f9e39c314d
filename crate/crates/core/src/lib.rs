//! Exact calculus of non-Archimedean norms on section rings of polarized
//! toric varieties.
//!
//! * [`fdnorm`]: norms on finite-dimensional spaces (joint bases, relative
//!   spectra, `d_p` metrics, retractions).
//! * [`polytope`]: rational polytopes, concave piecewise-linear functions,
//!   Legendre transforms and concave envelopes.
//! * [`toric`]: toric norms as concave functions or superadditive tables.
//! * [`energy`]: Monge–Ampère energy, its dual via semi-discrete optimal
//!   transport, and the minimum norm.
//!
//! All scalars are exact rationals ([`Q`]); only the transport solver
//! iterates in binary64.

#![allow(clippy::needless_range_loop)]

pub mod energy;
pub mod error;
pub mod fdnorm;
pub mod linalg;
pub mod lp;
pub mod measure;
pub mod poly;
pub mod polytope;
pub mod rational;
pub mod sampling;
pub mod selftest;
pub mod toric;

pub use error::{Error, Result};
pub use fdnorm::{FiniteDimNorm, JointBasis, RelativeSpectrum};
pub use lp::{Distance, Exponent};
pub use measure::{DiscreteMeasure, PLMeasure1D};
pub use polytope::{AffinePiece, ConcavePLFunction, ConvexPLFunction, RationalPolytope};
pub use rational::{ExtQ, Q};

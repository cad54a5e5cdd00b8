//! Joint estimation of a low-rank symmetric index matrix and an unknown
//! univariate link function.
//!
//! The model is `Y = f(<X, B>) + eps` where `X` and `B` are symmetric `d x d`
//! matrices, `<X, B> = trace(XB)`, `B` has unit Frobenius norm, and `f` is a
//! bounded function on `[-1, 1]` expanded in a trigonometric dictionary. The
//! estimator is a random draw from a tempered (Gibbs) posterior
//! `exp(-lambda * r_n) d(prior)` over the pair `(B, f)`.
//!
//! Module map:
//!
//! * [`manifold`] — orthogonal factors, simplex spectra, unit-norm symmetric
//!   matrices and their sampling.
//! * [`dictionary`] — trigonometric basis, dictionary expansions, weighted
//!   l1 geometry.
//! * [`prior`] — the composite prior: Haar x Dirichlet over matrices, a
//!   geometric mixture of uniform coefficient balls over link functions.
//! * [`datagen`] — synthetic data generation with validity guarantees.
//! * [`risk`] — empirical risk, Monte-Carlo excess risk, the inverse
//!   temperature schedule.
//! * [`sampler`] — Metropolis-Hastings engine with trans-dimensional link
//!   moves, plus exhaustive-grid and discrete-toy validation oracles.
//! * [`diagnostics`] — effective sample size, split-chain scale reduction,
//!   two-sample tests, slope fits.

pub mod datagen;
pub mod diagnostics;
pub mod dictionary;
pub mod error;
pub mod manifold;
pub mod parallel;
pub mod prior;
pub mod risk;
pub mod sampler;
pub mod seed;
pub mod special;

pub use error::{Error, Result};

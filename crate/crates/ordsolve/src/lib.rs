//! Solvers for ordered and minimum-norm optimization on unrelated-machine
//! load balancing and k-clustering.
//!
//! The library covers six objective regimes on both problems: Top-ℓ, ordered
//! (non-increasing weight vector), min-max ordered (finite weight family),
//! minimum monotone symmetric norm, multi-budgeted ordered, and simultaneous
//! (globally balanced) optimization. The machinery follows one pipeline:
//! sparsify the weight vector onto a logarithmic position set, guess threshold
//! vectors that estimate the order statistics of the optimal cost vector,
//! solve a strengthened LP relaxation expressed through proxy costs, and round
//! deterministically — either with problem-specific roundings (GAP-style
//! matchings, primal-dual with bi-point rounding) or with a weight-oblivious
//! iterative rounding whose guarantee holds for every sparsified weight
//! simultaneously.
//!
//! All core arithmetic is exact (`num::BigRational`); LP solving is generic
//! over the scalar so a floating-point mode is available as a performance
//! escape hatch. Brute-force oracles for tiny instances live in [`refcli`]
//! together with file formats and the CLI front end.

/// Core problem instances, solutions, cost vectors, and norm evaluation.
pub mod model;

/// Position sets POS and weight sparsification.
pub mod sparsify;

/// Proxy-cost functions h and Prox, and threshold-vector enumeration.
pub mod proxy;

/// Exact-rational simplex producing basic solutions, and iterative rounding.
pub mod lpround;

/// Ball-optimization oracles and the min-norm to min-max ordered reduction.
pub mod normreduce;

/// Load-balancing LPs, roundings, and top-level solvers.
pub mod loadbal;

/// k-Clustering LPs, oblivious rounding, primal-dual, and top-level solvers.
pub mod cluster;

/// Multi-budgeted and simultaneous optimization.
pub mod fairness;

/// Brute-force oracles, file formats, run reports, and CLI plumbing.
pub mod refcli;

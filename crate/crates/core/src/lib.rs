//! Analysis engines for downlink cellular networks with empty-cell shutoff.
//!
//! The crate is `no_std` (it needs `alloc`) and holds only numerics:
//!
//! - [`quad`]: adaptive Gauss–Kronrod quadrature.
//! - [`special`]: the `₂F₁(1, 1; c; z)` evaluator.
//! - [`se`]: analytic average spectral efficiency (exact integral, sparse and
//!   ultra-dense closed forms, multiple access, truncated-integrand lower bound).
//! - [`sim`]: Poisson-network Monte Carlo at a typical user.
//! - [`econ`]: demand, pricing, profit objectives and optimal deployments.
//!
//! All spectral efficiencies are in nats/s/Hz (1 bit ≈ 0.693 nats). Densities
//! are per unit area; the unit itself is left abstract.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod econ;
mod error;
mod math;
pub mod optim;
pub mod quad;
pub mod se;
pub mod sim;
pub mod special;

pub use error::{Error, Result};

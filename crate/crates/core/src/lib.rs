//! Chart-local numerical engine for curvature stacks, Yang-Mills gauge
//! invariants, and renormalized-energy extraction on conformally compact
//! six-manifolds.
//!
//! The crate is organized in layers:
//!
//! * [`jet`] / [`fields`] — exact multivariate Taylor jets and smooth
//!   scalar / metric / connection fields on a chart, plus a finite-difference
//!   oracle used only in tests.
//! * [`tensor`] — dense point tensors with abstract-index bookkeeping
//!   (contraction, raising/lowering, antisymmetrization, fiber traces).
//! * [`geometry`] — Levi-Civita data of a metric at a point: Christoffels,
//!   Riemann, Ricci, Schouten, Weyl, Cotton, plus covariant derivatives and
//!   conformal rescaling.
//! * [`gauge`] — bundle connections: curvature, currents, coupled second
//!   derivatives and the second-order operator acting on closed two-forms.
//! * [`invariants`] — the scalar invariants and operator identities built on
//!   top: Q-curvature, anomaly and renormalized-energy integrands, shift
//!   laws, the modified Schrodinger operator, and boundary lemmas.
//! * [`models`] — concrete metrics and connections: hyperbolic ball,
//!   Schwarzschild-type Einstein chart, the Maxwell two-form solution, the
//!   tractor connection, and a seeded random catalog.
//! * [`quadrature`] — regulated energies over cut-off balls, sphere and bulk
//!   integrals, and finite-part extraction from an epsilon grid.
//! * [`report`] — machine-readable verification records.
//!
//! Core math is generic over the real scalar via num-traits; the concrete
//! `f64` instantiation used by the CLI and test suites is exposed through
//! the aliases below.

pub mod error;
pub mod fields;
pub mod gauge;
pub mod geometry;
pub mod invariants;
pub mod jet;
pub mod models;
pub mod num;
pub mod quadrature;
pub mod report;
pub mod tensor;
#[cfg(test)]
pub(crate) mod testkit;

pub use error::{Error, Result};

/// Default real scalar for the shipped models, CLI and suites.
pub type R64 = f64;
/// Default complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Real jet over the default scalar.
pub type RJet = jet::Jet<R64>;
/// Complex jet over the default scalar.
pub type CJet = jet::Jet<C64>;

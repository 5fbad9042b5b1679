//! Exact computational kernel for Lie algebroids over formal polynomial
//! patches: axiom validation, Chevalley–Eilenberg cohomology, pullbacks and
//! transversals, Čech–de Rham spectral sequences for locally trivial
//! families, parallel transport and monodromy.

pub mod algebroid;
pub mod ce;
pub mod cover;
pub mod exact;
pub mod pullback;
pub mod samples;
pub mod transport;

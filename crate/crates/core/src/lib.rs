//! CR invariants of boundaries of strictly pseudoconvex domains in `C^2`.
//!
//! The crate computes, pointwise along the boundary `M = ∂Ω` of a domain
//! `Ω = {ρ > 0}` given by a real polynomial `ρ`:
//!
//! * Fefferman's approximate Monge-Ampère solution `r` with
//!   `J[r] = 1 + η r^3`, and the obstruction `O = η|_M`
//!   ([`monge_ampere`]);
//! * the Tanaka-Webster invariants of the contact form `θ[r]`: Levi form,
//!   scalar curvature, torsion, sub-Laplacian, the Q-prime curvature
//!   `Q' = ½Δ_b Scal + ¼Scal² − |A|²` and the P-prime operator
//!   ([`pseudoherm`]);
//! * the same `Q'` and `P'` from the Lorentz-Kähler ambient metric
//!   `−i∂∂̄(|z₀|² r)` ([`ambient`]), used as an independent check;
//!
//! and integrates them over `M` ([`quadrature`]): total Q-prime, the
//! first-variation identity, second variations at the sphere and the
//! log coefficient of renormalized volume expansions.
//!
//! Everything is carried in truncated Taylor expansions ([`jet`]) at boundary
//! points; boundary sweeps run in parallel with rayon when the `parallel`
//! feature is enabled (default) and sequentially otherwise.

pub mod ambient;
pub mod config;
pub mod domains;
pub mod error;
pub mod jet;
pub mod monge_ampere;
pub mod par;
pub mod poly;
pub mod pseudoherm;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
pub use jet::{Jet, JetC, JetC6, Var, C64};

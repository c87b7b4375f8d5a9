//! Numerical laboratory for maximally modulated singular convolution operators
//! on the integer lattice ℤⁿ.
//!
//! The central object is the maximal operator
//!
//! ```text
//! 𝒞f(x) = sup_λ | Σ_{y ∈ ℤⁿ∖{0}} f(x−y) e(λ|y|^{2d}) K(y) |,      e(t) = e^{2πit},
//! ```
//!
//! where `K` is a Calderón–Zygmund kernel truncated to finitely many dyadic
//! scales.  The crate provides the pieces needed to study this operator at
//! desk scale:
//!
//! * [`lattice`] — finitely supported / periodic lattice functions, discrete
//!   Fourier transforms, convolution and ℓ^p norms;
//! * [`arithmetic`] — continued-fraction rational approximation, Farey sets,
//!   major-arc membership certificates and denominator bookkeeping;
//! * [`kernels`] — built-in singular kernels, their smooth dyadic partition,
//!   nested radial cutoffs and a band-limited mollifier;
//! * [`expsum`] — complete Gauss-type sums with exact modular phases and
//!   weighted Weyl sums over convex lattice regions, with decay probes;
//! * [`multiplier`] — discrete symbols, oscillatory-integral symbols, and the
//!   major-arc assembly (arc pieces, sharp truncations, error terms, bands);
//! * [`operator`] — the maximal operator itself with a certified modulation
//!   grid, a variable-coefficient parabola analogue, TT*-composition kernels
//!   with exceptional-set scans, and empirical norm-ratio tables;
//! * [`decay`] — measured decay tables with least-squares model fits and a
//!   deterministic CSV export;
//! * [`quadrature`] — adaptive Gauss–Kronrod integration with a refinement
//!   certificate, tuned for oscillatory phases;
//! * [`phase`] — exact-as-possible reduction of phases mod 1 (rational phases
//!   are exact, real phases use compensated products).
//!
//! All randomized helpers take explicit seeds and every reduction has a fixed,
//! documented order, so repeated runs produce identical bytes.

pub mod arithmetic;
pub mod decay;
pub mod error;
pub mod expsum;
pub mod kernels;
pub mod lattice;
pub mod multiplier;
pub mod operator;
pub mod phase;
pub mod quadrature;

pub use error::{Error, Result};

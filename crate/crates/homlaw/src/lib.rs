//! Exact computation on homomorphism-defined classes of finite digraphs.
//!
//! The library computes, at desk scale and with exact arithmetic wherever a
//! number is asserted:
//!
//! - homomorphisms, cores, automorphisms, and dismantling retractions
//!   ([`hom`]);
//! - the quadratic edge-density maximum over the probability simplex and the
//!   clique-structure of its maximizers ([`density`]);
//! - duals of finite sets of oriented trees: the digraph `D` with
//!   `Forb(F) = CSP(D)`, built, core-reduced, and re-validated against a
//!   brute-force oracle on every build ([`dual`]);
//! - exact counts and uniform samplers for template-coloured digraphs
//!   ([`colored`]);
//! - first-order evaluation and exact/sampled sentence frequencies
//!   ([`logic`]);
//! - the classification pipelines that name the almost-sure theory (or
//!   mixture of 0-1 laws) of a class ([`theory`]).
//!
//! Everything is deterministic: searches are lexicographic, samplers take
//! explicit seeds and use a fixed, documented generator, and parallel
//! reductions are order-independent.

pub mod bits;
pub mod colored;
pub mod density;
pub mod dual;
pub mod error;
pub mod graph;
pub mod hom;
pub mod io;
pub mod logic;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{Digraph, UGraph};

//! Exact computation with odometers of `Z^d` at finite truncation depth.
//!
//! A scale is a decreasing chain of finite-index sublattices of `Z^d`. The
//! library builds the tower of finite quotients it induces, computes with
//! depth-truncated elements of the topological full group of the
//! associated odometer (piecewise translations and their semidirect
//! factorization), derives the profinite classification invariants of the
//! odometer as a topological group, and decides orbit equivalence and
//! stabilized-automorphism-group isomorphism for pairs of scales. A
//! brute-force oracle validates the structural identities behind the
//! decision procedures on small finite models, including the non-abelian
//! left/right theory.

pub mod catalog;
pub mod cli;
pub mod decide;
pub mod fullgroup;
pub mod invariants;
pub mod lattice;
pub mod oracle;
pub mod scale;
pub mod tower;

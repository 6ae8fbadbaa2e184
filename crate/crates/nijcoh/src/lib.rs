//! Exact verification and computation toolkit for finite-dimensional
//! Nijenhuis algebras, their bimodules, and morphisms.
//!
//! A *Nijenhuis algebra* is an associative algebra `A` equipped with a linear
//! operator `P` satisfying
//!
//! ```text
//! P(x)·P(y) = P( P(x)·y + x·P(y) − P(x·y) )
//! ```
//!
//! This crate provides, entirely over exact arithmetic (ℚ by default):
//!
//! - axiom checkers for algebras, bimodules, morphisms and φ-bimodules, with
//!   localized defect reports ([`algebra`]);
//! - the deformed product `x ·_P y`, triangle actions `⊳`/`⊲`, restriction
//!   along a morphism, and mapping-ring constructions ([`algebra`], [`cct`]);
//! - Hochschild and operator cochain complexes, the chain maps between them,
//!   mapping-cone complexes, assembled coboundary matrices, and cohomology
//!   dimensions ([`cochain`], [`morphism`]);
//! - order-by-order verification, gauge transport, and constructive
//!   trivialization of truncated formal deformations ([`deformation`]);
//! - a symbolic free graded nonsymmetric operad on generators `m_n`, `P_n`
//!   with the minimal-model differential and arity-bounded `∂² = 0` checks
//!   ([`operad`]);
//! - a JSON workspace format and parser shared with the `nijcoh` command-line
//!   tool ([`workspace`]).

pub mod algebra;
pub mod cct;
pub mod cochain;
pub mod deformation;
pub mod field;
pub mod fixtures;
pub mod linalg;
pub mod morphism;
pub mod operad;
pub mod workspace;

pub(crate) mod dense;

//! Decorated ideal triangulations of punctured surfaces, their edge
//! (Ptolemy) and triangle coordinates, and the two quantum dilogarithms
//! that implement flips after quantization.
//!
//! The crate is organised bottom-up:
//!
//! - [`triangulation`]: combinatorics of decorated ideal triangulations,
//!   corner rotations, flips, isomorphisms and move words.
//! - [`classical`]: exact rational coordinate flows (edge coordinates and
//!   per-triangle pairs), the two log-canonical forms, holonomies, Poisson
//!   brackets and the rank report of the Hamiltonian reduction.
//! - [`compact`]: the root-of-unity representation by clock and shift
//!   matrices, the cyclic dilogarithm and the flip intertwiner.
//! - [`qdilog`]: numerical evaluation of the non-compact quantum dilogarithm
//!   by contour quadrature.
//! - [`verify`]: verification suites producing JSON reports, shared by the
//!   CLI and the acceptance tests.
//!
//! All classical arithmetic is exact (`BigRational`); the quantum parts use
//! double precision complex matrices.

pub mod classical;
pub mod compact;
pub mod error;
pub mod exact;
pub mod qdilog;
pub mod scalar;
pub mod triangulation;
pub mod verify;

pub use error::{Error, Result};
pub use triangulation::{DecoratedTriangulation, Move, MoveWord, Relabeling, Side};

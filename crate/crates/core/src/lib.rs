//! Exact-arithmetic laboratory for discrete dynamical systems that exhibit
//! the Devron property: a class of highly singular inputs of a birational
//! map `F` is carried by iterates of `F` onto a class of highly singular
//! inputs of `F^{-1}`, a predictable number of steps away.
//!
//! Five systems are implemented, each over the rationals (or the Gaussian
//! rationals where the geometry needs complex coordinates):
//!
//! * the lattice-periodic octahedron recurrence ([`octahedron`]),
//! * the lattice-periodic Y-system ([`ysystem`]),
//! * the pentagram map, its higher-dimensional and lower analogues
//!   ([`pentagram`]),
//! * bipartite polygon recutting ([`recutting`]),
//! * a bipartite discrete Toda variant on 2-row matrices ([`toda`]).
//!
//! The [`devron`] module provides a system-agnostic harness that iterates
//! any of these, detects singularities exactly, and measures the width of
//! a Devron pair. The [`conjectures`] module runs exact experiments on
//! three systems where the property is observed but unproven. No floating
//! point exists anywhere; every singularity test is an exact zero test.

pub mod conjectures;
pub mod devron;
pub mod field;
pub mod lattice;
pub mod matrix;
pub mod octahedron;
pub mod pentagram;
pub mod proj;
pub mod recutting;
pub mod report;
pub mod rng;
pub mod sixvar;
pub mod toda;
pub mod ysystem;

pub use field::{Field, GaussRat, Rat};
pub use lattice::{Lattice2D, PeriodicMatrix};

#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Harmonic map heat flow from the unit ball `B^3` into the sphere `S^2`.
//!
//! The crate discretizes the ball on a masked Cartesian grid ([`mesh`]),
//! evaluates the static quantities of sphere-valued maps ([`fields`]),
//! generates candidate weak solutions with several flow schemes ([`flow`]) and
//! selects one solution per initial datum by iterated refinement with
//! discounted functionals ([`selection`]). The selection is built so that the
//! chosen trajectories compose as a semiflow, `u(a, t + s) = u(u(a, t), s)`.

pub mod error;
pub mod fields;
pub mod flow;
pub mod maps;
pub mod mesh;
pub mod selection;
pub mod vec3;

pub use error::{Error, ErrorClass, Result};
pub use fields::{DirectorField, ProbeFamily, ProbeFunctional};
pub use flow::{Scheme, SchemeConfig, Trajectory};
pub use mesh::{BallMesh, ScalarField, VectorField};
pub use selection::{Functional, SelectionConfig, SolutionSet};

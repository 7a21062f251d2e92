//! Stokes data of polynomial quadratic differentials and cluster Poisson
//! coordinates on the moduli of framed differentials.
//!
//! A point of `ℂⁿ ∖ Δ` is a normalized polynomial `P`. From it the crate
//! computes the horizontal foliation of `P dz²` and its WKB triangulation,
//! the Sibuya asymptotic values of `y'' = P y`, and the cross-ratio
//! coordinates of the resulting configuration of `n + 3` points in `ℂP¹`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod error;
pub mod foliation;
pub mod main_map;
pub mod ode;
pub mod polynomial;
pub mod projective;
pub mod quad;
pub mod sampling;
pub mod scalar;
pub mod schema;
pub mod stokes;
pub mod svg;
pub mod transport;
pub mod verify;

pub use cluster::{ClusterChart, Configuration, Triangulation};
pub use error::{Error, Result};
pub use foliation::{Trajectory, TrajectoryStructure};
pub use main_map::HbarParam;
pub use polynomial::{Period, Polynomial, RootSet};
pub use projective::{Mobius, ProjPoint};
pub use scalar::Real;
pub use stokes::AsymptoticTuple;

pub type Polynomial64 = Polynomial<f64>;
pub type Polynomial32 = Polynomial<f32>;
pub type ProjPoint64 = ProjPoint<f64>;
pub type Configuration64 = Configuration<f64>;
pub type ClusterChart64 = ClusterChart<f64>;
pub type AsymptoticTuple64 = AsymptoticTuple<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type TrajectoryStructure64 = TrajectoryStructure<f64>;
pub type HbarParam64 = HbarParam<f64>;

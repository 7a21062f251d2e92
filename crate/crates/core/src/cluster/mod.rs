//! Triangulations of the marked disk, quivers with potential, and the
//! cluster Poisson coordinates of point configurations.

pub mod coords;
pub mod exchange;
pub mod quiver;
pub mod triangulation;

pub use coords::{
    chart_coords, cross_ratio, find_generic_triangulation, is_generic, mutate_coords, reconstruct, ClusterChart,
    Configuration, PROJ_TOL,
};
pub use exchange::{exchange_graph, ExchangeGraph};
pub use quiver::{mutate_quiver, potential_of, quiver_of, PotentialCycles, Quiver};
pub use triangulation::{all_triangulations, catalan, Arc, MarkedDisk, Triangulation};

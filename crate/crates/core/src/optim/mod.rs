//! Shared combinatorial optimizers: minimum-cost assignment, greedy maximal
//! independent set, and weighted grid shortest path.

mod hungarian;
mod mis;
mod path;

pub use hungarian::{hungarian, Assignment, CostMatrix};
pub use mis::{greedy_mis, ConflictGraph};
pub use path::{grid_shortest_path, grid_shortest_path_to_set, GridGraph};

//! Courant algebroids as structure data, their axioms, standard models,
//! combinations, connections and Dirac structures.

mod combine;
mod connection;
mod data;
mod dirac;

pub use combine::{dotplus, linear_combination, CourantExtension, CourantSum};
pub use connection::{connection_shift, curvature, Connection};
pub use data::{check_courant, check_courant_morphism, opposite, overline, standard_exact, twist, CourantData};
pub use dirac::{check_dirac, graph_of_morphism, independent_subset, DiracData};

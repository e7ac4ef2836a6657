//! Suzuki-Trotter mapping of quantum chains onto classical replica lattices.
//!
//! A TFIM chain with `n` Trotter slices becomes an `M x n` torus. A
//! Heisenberg chain becomes a chessboard of `2n` slices whose shaded cells
//! carry pair couplings plus one 4-body term each.

mod heisenberg;
mod lattice;
mod tfim;

pub use heisenberg::{
    cell_matrix_elements, heisenberg_cell, map_heisenberg, map_heisenberg_with_field,
    CellMatrixElements, HeisenbergCellCoefficients,
};
pub use lattice::{consolidate, PerpTerm, ReplicaLattice};
pub use tfim::{chain_graph, map_tfim, perp_coupling, replicate_ising};

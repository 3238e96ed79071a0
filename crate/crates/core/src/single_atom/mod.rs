//! The particle coupled to one two-level atom,
//! `H = H_p ⊗ 1 + E b*b + λ(T b* + T* b)`.
//!
//! `H` commutes with `K − b*b` (`K ψ_k = k ψ_k`), so it splits into 2×2
//! sectors `{ψ_k ⊗ |0⟩, ψ_{k+1} ⊗ |1⟩}`. Joint operators are stored as
//! `2W × 2W` matrices with row `2i + a` for `ψ_{k_min + i} ⊗ |a⟩`.

mod heisenberg;
mod joint;
mod propagator;

pub use heisenberg::{heisenberg_maps, position_expectation, position_expectation_bound, HeisenbergComponents};
pub use joint::{AtomGibbs, JointDensityMatrix};
pub use propagator::{
    hamiltonian_blocks, joint_hamiltonian, propagate_closed, propagate_oracle, sector_number,
    single_atom_unitary, SectorBlock,
};

/// Row of `ψ_k ⊗ |a⟩` for window row `i`.
#[inline]
pub(crate) fn joint_index(i: usize, a: usize) -> usize {
    2 * i + a
}

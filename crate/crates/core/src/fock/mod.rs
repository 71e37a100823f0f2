//! The truncated discrete Q-Fock space and the operators acting on it.

pub mod gram;
pub mod ladder;
pub mod operator;
pub mod space;

pub use gram::{p_direct, p_recursive, phi_op, r_op, swap_op, word_product_sparse};
pub use ladder::{
    annihilate, annihilate_basis, annihilation_block, create, create_basis, creation_block, field, field_basis,
    free_annihilation_block, right_annihilate, right_annihilate_basis, right_annihilate_mirror, right_create,
    right_create_basis, right_field, Side,
};
pub use operator::{apply_word, q_adjoint, q_inner, q_norm, FockOperator, FockVector, LevelMap, WordOutcome};
pub use space::{digits_of, multi_index, GramFactor, TruncatedFockSpace, DENSE_LEVEL_CAP, LEVEL_DIM_CAP};

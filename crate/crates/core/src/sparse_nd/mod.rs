//! Sparse and full tensor-product spaces over element keys.

mod eval;
mod key;
mod sampler;
mod space;
mod store;
mod transform;

pub use eval::{
    eval_interp_nd, eval_interp_nd_sided, grid_dump, integrate_nd, interpolant_on_element,
    Evaluator,
};
pub use key::{l1, linf, ElementKey, MultiIndex};
pub use sampler::{collocate, collocate_scalar, sample_element, FnSampler, Sampler, ValueSampler};
pub use space::{
    element_dof, enumerate_full_elements, enumerate_sparse_elements, enumerated_dim,
    full_level_vectors, keys_for_levels, sparse_dim, sparse_level_vectors,
};
pub use store::{ElementStore, LevelLayout, SurplusStore, ValueGridND};
pub use transform::{
    element_surplus, fast_surplus_to_values, fast_surplus_to_values_ordered,
    fast_values_to_surplus, fast_values_to_surplus_ordered,
};

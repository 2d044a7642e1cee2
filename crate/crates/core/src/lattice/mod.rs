//! Binomial tree and finite-difference engines for the equity option.

mod pde;
mod tree;

pub use pde::{predefault_closed_form, solve_predefault_pde, PdeConfig, PdeSolution};
pub use tree::{
    build_tree, tree_price_and_delta, tree_price_and_delta_with, BinomialTree, NodeField,
    TreeOptions,
};

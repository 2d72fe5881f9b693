//! Derivative-free maximization of protocol purity.
//!
//! `simplex` holds the restartable Nelder–Mead core, `decode` maps
//! unconstrained parameters onto valid measurements, and `objectives`
//! wires both to the protocol pipelines.

mod decode;
mod objectives;
mod simplex;

pub use decode::decode_povm;
pub use objectives::{
    optimize_qet2_gibbs, optimize_qet2a, parametrized_unitary, verify_sort_optimality,
};
pub use simplex::{simplex_maximize, OptimizationReport, OptimizerConfig};

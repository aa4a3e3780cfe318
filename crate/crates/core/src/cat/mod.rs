//! Categories of classical and quantum probability distributions.

pub mod classical;
pub mod quantum;

pub use classical::{
    apply, compose, hom_convexity_check, monoidal_product, smash_coproduct, zero_factorization_check, FinProb,
    PointedProbSet, Relabeling, StochasticMatrix,
};
pub use quantum::{channel_compose, choi_apply, cp_check, quantum_hom_convexity_check, tp_check, ChoiMatrix, QuantumObject};

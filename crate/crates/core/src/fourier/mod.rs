//! Fourier analysis on finite product spaces and the soundness-side
//! machinery: low-degree influences, the subcube acceptance test, the
//! `Γ(A)` mean statistics and the influence decoder.

mod accept;
mod decode;
mod invariant;
mod stats;
mod table;

pub use accept::test_accept;
pub use decode::{
    candidate_sets, check_small_set_witness, decode_assignment, expected_ug_value, label_distributions, slice_table,
    DecodeParams, Decoded, LabelDistribution, WitnessCheck,
};
pub use invariant::{is_invariant_and_merge_closed, InvariantClassifier};
pub use stats::{
    apply_tensor_kernel, gamma_mean, mean_statistics, mu_table, tail_fraction, GammaKernel, MeanStatistics, TailReport,
};
pub use table::{
    candidate_set, coordinate_basis, fourier_expand, influence_deg, FourierExpansion, FunctionJson, FunctionTable,
};

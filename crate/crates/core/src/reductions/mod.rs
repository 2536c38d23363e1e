//! The elementary reductions: SSE to min k-cut and to DALkS, MUCHB to
//! biclique, and biclique gap amplification by a randomized graph product.

mod amplify;
mod biclique;
mod dalks;
mod kcut;

pub use amplify::{amplify_biclique, ceil_log2, ceil_pow2, draw_tuple, flatten, Amplified, AmplifyParams};
pub use biclique::{bisection_biclique, reduce_muchb_to_biclique};
pub use dalks::{
    dalks_completeness_density, dalks_soundness_bound, reduce_sse_to_dalks, DalksCompleteness, DalksInstance,
    GadgetMode,
};
pub use kcut::{
    kcut_completeness_partition, kcut_k, kcut_soundness_audit, prefix_large_enough, prefix_union, reduce_sse_to_kcut,
    KcutAudit, KcutAuditor, KcutCompleteness, KcutInstance, KcutSoundnessReport,
};

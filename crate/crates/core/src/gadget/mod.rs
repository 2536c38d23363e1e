//! The SSE to max-uncut-hypergraph-bisection gadget.
//!
//! Vertices are pairs `(A, x) ∈ V^R × Ω^R`. A hyperedge is generated by
//! `A ∼ V^R`, `ℓ` independent noisy walks `A → Ã → B → B̃`, a point
//! `x ∼ Ω^R` and a noise set `D`, and contains `π(B′, x′)` for every walk,
//! `π ∈ Π_{R,k}`, `x′ ∈ C_D(x)` and `B′ ∈ M_{x′}(B̃)`.

mod audit;
mod build;
mod classify;
mod params;
mod space;
mod unweighted;

pub use audit::{completeness_bound, CompletenessAudit};
pub use build::{build_gadget, classifier_measure, ClosureReport, GadgetHypergraph, GadgetMode};
pub use classify::{CompletenessRule, VertexClassifier};
pub use params::{
    c1_closed_form, c1_formula, ceil_log2_pow, default_kappa, delta_window, zeta, GadgetParams, ReductionParams,
    DEFAULT_D, DEFAULT_T,
};
pub use space::{merge_set, subcube, Atom, OmegaBeta, VertexSpace};
pub use unweighted::{to_unweighted, Unweighted};

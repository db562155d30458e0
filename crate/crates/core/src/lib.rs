//! Computational order theory on finite posets: canonical amalgamations of
//! meet- and join-extensions, MacNeille and canonical-extension completions,
//! lifting of maps along extensions, and the staged approximation of free
//! lattices generated by a poset with designated joins and meets.

pub mod amalgamation;
pub mod chain;
pub mod colimit;
pub mod completion;
pub mod error;
pub mod extension;
pub mod format;
pub mod iso;
pub mod lifting;
pub mod map;
pub mod poset;
pub mod quasiorder;
pub mod spec;
mod subsets;
pub mod term;

pub use amalgamation::{
    canonical_amalgamation, canonical_amalgamation_with, check_coherence, dual_amalgamation, galois_quasiorder,
    minimal_relation, product_amalgamation, universal_lift, Amalgamation, ExtensionPolarity, Origin,
};
pub use chain::{build_chain, relative_free_lift, ApproxChain, StageTag};
pub use colimit::{chain_colimit, ChainColimit, ChainColimitSpec};
pub use completion::{
    amalgamation_from_completion, canonical_extension, macneille, verify_density_compactness, CanonicalExtension,
    Completion, DensityReport, Provenance,
};
pub use error::{Error, Result};
pub use extension::{
    filter_extension, generated_d_filter, generated_u_ideal, ideal_extension, is_alpha_supported,
    is_alpha_supported_join, is_join_extension, is_meet_extension, is_ud_morphism, ExtensionMap, SetExtension,
};
pub use iso::{find_isomorphism, find_isomorphism_extending};
pub use lifting::{
    continuity, continuity_join, has_enough_joins, has_enough_meets, is_alpha_continuous, is_beta_continuous_join,
    is_x_morphism, lift_lambda, partial_lift, partial_lift_join, preserves_joins_within, preserves_meets_within,
    Continuity, ContinuityWitness, PartialLift,
};
pub use map::MonotoneMap;
pub use poset::{ElemSet, FinitePoset, ProductShape};
pub use quasiorder::{Quasiorder, Quotient};
pub use spec::{BoundKind, Cardinal, Family, Radius, Specification};
pub use term::{
    compare_in_stage, completeness_gap, correspondent, decide_word_problem, evaluate_in_stage, is_k_complete, parse_term,
    rank, ranks, term_closure, CompletenessGap, Term, Verdict, WordAnswer,
};

/// Resource caps shared by every construction that can blow up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest carrier any construction may produce.
    pub carrier: usize,
    /// Largest carrier accepted by isomorphism search.
    pub isomorphism: usize,
    /// Largest set whose subsets may be enumerated exhaustively.
    pub subsets: usize,
    /// Largest stage of an approximation chain.
    pub stage: usize,
    /// Largest number of filters or ideals enumerated for one extension.
    pub closed_sets: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            carrier: 1_000_000,
            isomorphism: 64,
            subsets: 20,
            stage: 100_000,
            closed_sets: 1_000_000,
        }
    }
}

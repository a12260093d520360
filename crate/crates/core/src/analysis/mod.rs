//! Experiments built on the symbol and Mazur–Tate layers: μ_min, residual
//! congruences with weight 2, the old-space decomposition at level Np^r,
//! invariant tables, and exact identity checks.

pub mod congruence;
pub mod identities;
pub mod oldspace;
pub mod patterns;

pub use crate::modsym::normalize::mu_min;
pub use congruence::{
    find_congruent_weight2, form_id, matching_twists, normalized_forms, sturm_bound, verify_congruence, CommonField,
    CongruenceMatch, CongruenceMode, CongruenceReport, ResidueMap,
};
pub use oldspace::{oldspace_decompose, OldspaceReport};
pub use patterns::{invariant_table, verify_weight2_patterns, InvariantReport, InvariantRow, Pattern, Weight2Report};

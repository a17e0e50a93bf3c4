//! Hall's method for the image of a product of Cantor sets: the set `F₅`
//! and the τ-set property of its gaps, and the maps `H_{R₁,R₂}` whose images
//! `J_{R₁,R₂}` chain together to cover `(1/4, ω₀]`.

pub mod cantor;
pub mod hmap;

pub use cantor::{
    enumerate_gaps, enumerate_gaps_for, f5_endpoints, gap_exact, tau_profile, tau_scan, tau_verify, BoundedCantor, Cylinder, Gap,
    GapId, TauReport, TauSetSystem,
};
pub use hmap::{
    chain_segment, corner_ratio, covering_check, h_exact, h_map, h_point, lemma2_analysis, lemma2_ratio_bound, omega0, phi,
    phi_point, segment_j, CoveringFailure, CoveringReport, Lemma2Analysis, SegmentJ,
};

//! Falsification harnesses: each check evaluates one inequality or identity
//! on sampled maximal functions and returns a [`PropertyReport`] with an
//! explicit slack.

mod checks;
mod continuity;
pub mod fixtures;
mod report;
pub mod sampled;
mod sequence;

pub use checks::{
    check_convex_limit, check_domination, check_finite_intervals, check_lemma6, check_prop5, check_subharmonicity, check_tail_bound,
    check_transfer_identity, check_uniform_bound, check_variation_diminishing, pick_tail_radius, ConvexSample,
    TAIL_RADIUS_LIMIT, VANISHING_FRACTION, VARIATION_RATIO_LIMIT,
};
pub use continuity::{continuity_experiment, continuity_from_profiles, ContinuityReport, ContinuityRow};
pub use report::{fmt17, to_json, PropertyReport, Verdict, Witness};
pub use sequence::{ContinuitySequence, SequenceMode};

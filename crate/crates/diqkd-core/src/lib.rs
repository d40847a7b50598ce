//! Device-independent QKD key-rate bounds for the asymmetric CHSH family
//! with noise preprocessing.
//!
//! The crate computes the tight conditional-entropy bound
//! H(A1|E) >= gbar_{q,alpha}(S_alpha), assembles Devetak-Winter key rates
//! for depolarizing and loss channel models, solves zero-rate thresholds
//! (including the maximal-preprocessing limit q -> 1/2), bounds the
//! min-entropy, and carries a brute-force qubit-attack oracle that checks
//! the analytic bounds independently.
//!
//! The crate is `no_std`-compatible (`alloc` required); all floating-point
//! transcendentals go through `libm`, so results do not depend on the
//! presence of `std`.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

mod math;

pub mod entropy;
pub mod error;
pub mod linalg;
pub mod maxq;
pub mod minentropy;
pub mod models;
pub mod optimize;
pub mod oracle;
mod solve;

pub use entropy::{
    bb84_bound, best_alpha_bound, binary_entropy, entropy_bound, find_s_star, g, g_prime, phi,
    qubit_correlator_bound, BellValue, BoundEvaluation, BoundParams, Branch, EntropyBound,
};
pub use error::{Error, Result};
pub use maxq::{entropy_eps2_coeff, maxq_rate_coeff, shannon_eps2_coeff, EpsilonRate, MaxqBound};
pub use minentropy::{
    guessing_probability_bound, guessing_stitch_point, min_entropy_bound, tsirelson_beta_star,
    tsirelson_i_alpha_beta,
};
pub use models::{
    chsh_small_theta_approx, conditional_shannon, depolarizing_rate, depolarizing_s_alpha,
    devetak_winter, loss_maxent_distribution, loss_maxent_distribution_attenuated,
    loss_maxent_s_alpha, loss_maxent_s_alpha_attenuated, loss_partial_distribution,
    loss_partial_s_alpha, loss_partial_s_alpha_attenuated, preprocess_flip, ChannelModel,
    JointDistribution, RateResult,
};
pub use optimize::{
    find_threshold, maximize_rate, sweep, sweep_row, ChannelParameter, OptimizeFlags,
    OptimizedRate, RateDetail, RateProblem, SweepOutcome, SweepParameter, SweepRow, SweepScenario,
    SweepSpec, ThresholdResult,
};
pub use oracle::{
    attack_entropy_closed_form, attack_entropy_spectral, bb84_attack_entropy, feasibility_check,
    oracle_min_correlator, AttackState, CorrelationMatrix, OracleSearchPoint,
};

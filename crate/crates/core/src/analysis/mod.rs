//! Metrics and statistics used to read experiment outcomes.

pub mod consonance;
pub mod intervals;
pub mod stats;
pub mod survival;
pub mod sync;

pub use consonance::{c_score_mean, scene_consonance_g, SocialConsonance};
pub use intervals::{
    interval_entropy, ji_interval_score, ji_score, nearest_neighbour_ct, pairwise_intervals,
    unique_pitch_bins, IntervalHistogram, JI_SIGMA_CT,
};
pub use stats::{fisher_mean, mean, pearson_r, sd, welch_t, MetricSummary, Welch};
pub use survival::{kaplan_meier, median_split, KmCurve};
pub use sync::{auc_c, order_parameter, plv, vector_strength};

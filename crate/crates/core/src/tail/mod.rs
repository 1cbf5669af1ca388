//! Tail models in quantile form, the extremal family, and exact samplers.

mod gpd;
mod model;
mod rng;
mod sampling;

pub use gpd::{gpd_cdf, gpd_quantile};
pub use model::TailModel;
pub use rng::{uniform_open, RngStream};
pub use sampling::{
    malmquist_spacings, sample_iid, sample_top_log_uniform_order_stats, sample_top_order_stats,
    sample_top_uniform_order_stats,
};

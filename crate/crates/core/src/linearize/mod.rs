//! Koenigs charts, basin extension and sampled conjugacies.

pub mod chart;
pub mod table;

pub use chart::{extend_basin, koenigs, koenigs_arc, ChartPoint, Direction, LinearizationChart};
pub use table::{
    build_conjugacy, build_conjugacy_on, extend_across_kink, slope_ratio, smoothness_report, ConjugacyTable,
    Pairing, PairingInfo, SmoothnessReport,
};

//! Fixed points, periodic orbits, multiplier laws and invariant densities.

pub mod density;
pub mod fixed;
pub mod law;
pub mod periodic;

pub use density::{elliptic_f, elliptic_k, empirical_density, kf_density, kf_mass, DensityHistogram};
pub use fixed::{find_fixed_points, multiplier, FixedPointInfo, Stability};
pub use law::{law_pair, verify_multiplier_law, LawReport, LawRow};
pub use periodic::{find_periodic_orbits_unimodal, lyndon_words, orbit_for_itinerary, PeriodicOrbit, UnimodalShape};

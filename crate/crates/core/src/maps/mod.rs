//! Map abstractions and the built-in catalog.

pub mod catalog;
pub mod family;
pub mod interval;
pub mod mobius;
pub mod piecewise;
pub mod smooth;
pub mod spec;

pub use catalog::{catalog, catalog_make, catalog_make_f64, elliptic_compactification, AnyMap, FamilyInfo};
pub use family::{piecewise_polynomial_family, polynomial_family, Family, PiecewiseFamily, SmoothFamily};
pub use interval::{Endpoint, Interval};
pub use mobius::{conjugate_weight, mobius_conjugate, Mobius};
pub use piecewise::PiecewiseMap1D;
pub use smooth::{Map1D, Param, SmoothMap1D};
pub use spec::MapSpec;

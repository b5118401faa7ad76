pub mod angles;
pub mod continued_fractions;
pub mod constants;
pub mod dd;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod phase;
pub mod probe;
pub mod quad;
pub mod rational;
pub mod scaling;
pub mod series;
pub mod special;
pub mod time;

pub use error::{Error, Result};

pub type Cone64 = probe::Cone<f64>;
pub type Polyline64 = geometry::Polyline<f64>;
pub type Complex64 = num_complex::Complex64;

//! One-dimensional optimal transport, Gaussian transport distances and
//! isoperimetric constants.

mod cheeger;
mod distance;
mod gaussian;
mod map;
mod radial;

pub use cheeger::cheeger_constant;
pub use distance::{
    delta_from_fits, delta_inf, gaussian_fit, gaussian_fit_w2, w1_1d, w2_1d, DeltaInf, GaussianFit,
};
pub use gaussian::{d_f2, w2_gaussian_nd, GaussianW2, ProportionalityGap};
pub use map::{brenier_map_1d, GrowthConstant, MapSample, TransportMap1D};
pub use radial::{radial_profile_map, RadialLaw, RadialMap};

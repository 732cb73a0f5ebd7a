//! Differentiable spherical-harmonics skin shading.
//!
//! The shading model sums a Lambertian diffuse term scaled by ambient
//! occlusion, a translucency-controlled subsurface term, and a
//! Fresnel-weighted specular term, all as dot products between SH light
//! coefficients and per-band kernels. On top of it sit environment-map
//! projection, analytic gradients, an Adam-based inverse-rendering fitter
//! and the file formats used by the `skinshade` command-line tool.

// Index loops mirror the per-band formulas; `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod adam;
pub mod cli;
pub mod envlight;
pub mod fitter;
pub mod gradients;
pub mod reduce;
pub mod sh;
pub mod texio;
pub mod shader;

pub use envlight::{EnvironmentMap, SHLight};
pub use sh::Direction;
pub use shader::{ShadedTexture, ShadingConfig, Texel, TextureMapSet, ViewModel};

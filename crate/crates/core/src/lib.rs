//! Procedural generator of labelled soybean and weed field images.
//!
//! Plants come from parametric L-systems and geometric primitives, fields
//! from agronomic layout distributions, and images from a deterministic
//! software rasterizer that writes aligned colour, semantic, depth, normal
//! and instance channels.

pub mod dataset;
pub mod field;
pub mod geom;
pub mod lsys;
pub mod noise;
pub mod plants;
pub mod render;
pub mod seed;

//! Uniform random toroidal triangulations through decorated unicellular maps.

pub mod closure;
pub mod decomp;
pub mod exact;
pub mod forests;
pub mod harness;
pub mod labels;
pub mod paths;
pub mod rotmap;
pub mod sampler;
pub mod unicell;

//! Exact classification, affine synthesis and numerical audits for actions of
//! Abelian-by-cyclic groups `Z ⋉_A Q^d` on the interval and the circle.

pub mod exactmath;
pub mod groupcore;
pub mod spectral;
pub mod affinerep;
pub mod dynamics1d;
pub mod constructions;
pub mod cli;

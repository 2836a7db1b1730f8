//! Spectral data of doubly periodic planar resistor networks.

pub mod exec;
pub mod fixtures;
pub mod forests;
pub mod graph;
pub mod laplacian;
pub mod laurent;
pub mod spectral;
pub mod temperley;
pub mod ydelta;
pub mod zigzag;

pub use exec::Exec;

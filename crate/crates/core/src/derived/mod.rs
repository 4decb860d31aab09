//! Exact engine for windows of the bounded derived category of a linearly
//! oriented A_n quiver over a prime field.

pub mod backend;
pub mod complex;
pub mod dot;
pub mod interval;
pub mod rep;

pub use backend::{build_window, build_window_with, DerivedBackend, DEFAULT_ORBIT_CAP};
pub use complex::{ChainMap, HomSpace, ProjComplex, Triangle};
pub use dot::render_dot;
pub use interval::{catalog, Interval};
pub use rep::{rep_decompose, QuiverRep};

//! Exact arithmetic toolkit for valuations dominating two-dimensional
//! regular local rings.

pub mod arith;
pub mod ring;
pub mod genseq;
pub mod blowup;
pub mod graded;
pub mod extension;
pub mod fixtures;
pub mod scenario;

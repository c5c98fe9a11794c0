//! Online 3D bin packing under robot-packability constraints.
//!
//! Boxes arrive one at a time and must be dropped into a row of containers
//! modelled as heightmaps: rotation only about the vertical axis, no
//! reshuffling, and every box must rest on a flat base. The crate provides
//!
//! - [`grid`]: the container model and feasibility rules,
//! - [`datagen`]: streams that tile a known number of bins exactly,
//! - [`heuristics`]: First Fit, floor building, column building and WallE,
//! - [`candidates`], [`encoder`] and [`deeprl`]: the corner-candidate value
//!   network policy and its training loop,
//! - [`bench`]: the episode runner, competitive ratio and reports.

pub mod bench;
pub mod candidates;
pub mod datagen;
pub mod deeprl;
pub mod encoder;
pub mod error;
pub mod grid;
pub mod heuristics;
pub mod io;
pub mod policy;

pub use error::{PackError, Result};
pub use grid::{BinDims, BoxDims, ContainerState, MultiBinState, Orientation, Placement};
pub use policy::{Decision, Policy};

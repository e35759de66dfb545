//! Procedural dark-store scene synthesis and mobile-manipulation planning.
//!
//! The crate is organized as a pipeline:
//!
//! 1. [`tensor_field`] + [`layout`] — fixture layout generation guided by a
//!    2D symmetric-traceless tensor field derived from the store walls and
//!    seed fixtures.
//! 2. [`arrangement`] — shelf-board product placement with grid jitter,
//!    vertical stacking, and Poisson front-of-lane depletion.
//! 3. [`lod`] — mesh simplification candidates, Chamfer scoring, Pareto
//!    selection of level-of-detail meshes.
//! 4. [`planner`] — screw-motion / RRT-Connect trajectory generation for a
//!    simplified mobile manipulator.
//! 5. [`task_eval`] — success judging for the benchmark tasks over scene
//!    state snapshots.
//! 6. [`scene`], [`render`], [`actions`] — file formats, SVG drawings, and
//!    action-vector export used by the CLI.
//!
//! Everything is deterministic under a 64-bit root seed; see [`rng`] for the
//! substream derivation scheme.

pub mod actions;
pub mod arrangement;
pub mod canonical;
pub mod catalog;
pub mod config;
pub mod error;
pub mod geometry;
pub mod layout;
pub mod lod;
pub mod planner;
pub mod render;
pub mod rng;
pub mod scene;
pub mod task_eval;
pub mod tensor_field;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

//! The category of finite Kripke frames and p-morphisms.
//!
//! Frames, p-morphisms, limits and colimits, depth-truncated products, logic membership
//! through subreduction, coamalgamation solvers, non-exactness witnesses, and the
//! adjunction between presheaves on finite categories and frames.

pub mod amalgamation;
pub mod census;
pub mod error;
pub mod exactness;
pub mod formula;
pub mod frame_core;
pub mod limits;
pub mod logic;
pub mod pmorph;
pub mod presheaf;
pub mod product;

pub use error::{Budget, Error, Result};
pub use frame_core::{Frame, World, WorldSet};
pub use pmorph::PMorphism;

//! Matrix-free SBP-SAT finite-difference time-domain solver for the 3D
//! Maxwell equations on staggered grids.

pub mod assembled;
pub mod diagnostics;
pub mod dispersion;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod material;
pub mod run;
pub mod sbp;
pub mod scalar;
pub mod solver;
pub mod source;
pub mod yee;

pub use error::{Error, Result};
pub use grid::{Axis, Component, ComponentLayout, Face, FaceSelector, Field3, FieldSet, GridSpec};
pub use material::{CellMaterial, MaterialGrid, NodeMaterial, Region, EPS0, MU0};
pub use sbp::{build_sbp_pair, verify_sbp, NodeGridKind, SbpOperatorPair, SbpReport};
pub use scalar::FieldScalar;
pub use solver::{cfl_max_dt, BoundaryKind, KernelMode, SatConfig, SimulationState, Solver};
pub use source::{ProbeKind, ProbeSpec, SourceSpec, SourceTarget, Waveform};

//! Analysis of dynamical (measurement-based) quantum error-correcting codes.
//!
//! A [`Schedule`] of commuting Pauli measurement rounds drives the evolution of
//! instantaneous stabilizer groups ([`dynamics`]). From that evolution the crate
//! builds detector probes ([`detectors`]), classifies spacetime Pauli errors as
//! detectable, benign or logical failures ([`spacetime`]) and searches for the
//! spacetime code distance ([`distance`]).

pub mod detectors;
pub mod distance;
pub mod dynamics;
pub mod error;
pub mod f2;
pub mod library;
pub mod pauli;
pub mod schedule;
pub mod spacetime;

pub use detectors::{
    ancestry, enumerate_detectors, first_triggered, syndrome, triggered_detectors, Ancestry, DetectorProbe,
};
pub use distance::{correct, instantaneous_distance, spacetime_distance, DistanceResult, Sector};
pub use dynamics::{run_dynamics, Dynamics, DynamicsReport, IsgState};
pub use error::{Error, Result};
pub use f2::{BitVec, Echelon, F2Matrix};
pub use pauli::{Pauli, Pauli1, Sign};
pub use schedule::{Round, Schedule, ScheduleKind};
pub use spacetime::{classify, is_benign, push, BenignGenerator, Classification, SpacetimeError};

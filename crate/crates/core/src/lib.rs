//! Verified numerics for central configurations of the planar four-body
//! problem: exact construction of the Dziobek and Albouy-Chenciner equation
//! systems, outward-rounded interval arithmetic with the Krawczyk
//! existence/uniqueness test, symmetry-aware solution bookkeeping,
//! floating-point continuation in the mass parameter, and rigorous
//! location/classification of fold and pitchfork bifurcations.

pub mod algebraic;
pub mod bifurcation;
pub mod interval;
pub mod polysys;
pub mod solver;
pub mod symmetry;

pub use interval::{Interval, IntervalBox};
pub use polysys::{build_ac, build_dziobek, MassParams, MassPattern, PolySystem, SystemKind};

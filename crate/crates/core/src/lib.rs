//! Bloch states of a particle in a periodic biparabolic potential, with a
//! rectangular Kronig-Penney potential for comparison.
//!
//! All quantities are dimensionless: `z` is the coordinate scaled so the
//! period is `2 pi`, energies are in recoil units. The numerical core is
//! generic over the scalar type (see [`Real`]); the `*64` aliases below fix it
//! to `f64`, which is what the tolerances throughout are calibrated for.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bloch;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod export;
pub mod oracle;
pub mod potential;
pub mod quad;
pub mod real;
pub mod report;
pub mod selfcheck;
pub mod specfun;

pub use basis::{Mode, SolutionPair};
pub use bloch::{anomaly_scan, assemble_state, barrier_probability, evaluate_density, BlochState, DensitySurface};
pub use config::{OutputFormat, RunConfig};
pub use dispersion::{find_bands, quasimomentum_of, rhs_dispersion, Band, EdgeCondition, GQuad};
pub use error::{BlochError, Result};
pub use oracle::{kp_trace_analytic, monodromy_of, Monodromy};
pub use potential::{make_biparabolic, PotentialKind, PotentialSpec, RegionTag};
pub use real::Real;
pub use specfun::SeriesReport;

pub use num_complex::Complex;

pub type PotentialSpec64 = PotentialSpec<f64>;
pub type SolutionPair64 = SolutionPair<f64>;
pub type SeriesReport64 = SeriesReport<f64>;
pub type Band64 = Band<f64>;
pub type GQuad64 = GQuad<f64>;
pub type BlochState64 = BlochState<f64>;
pub type DensitySurface64 = DensitySurface<f64>;
pub type Monodromy64 = Monodromy<f64>;

//! Numerical laboratory for the level-set profile flow of O(3)-symmetric
//! four-dimensional steady gradient Ricci solitons.
//!
//! The crate is organised around a [`RadialProfile`] (the warping radius
//! `F(z)` on one level set), its backward evolution in the level `s`
//! ([`flow`]), the parabolically rescaled deviation `G` and its Hermite
//! modes ([`rescaled`], [`spectral`]), barrier comparison ([`barrier`]),
//! closed-form asymptotic predictors ([`asymptotics`]), the 3d Bryant
//! soliton ([`bryant`]), and deterministic I/O ([`io`]).

pub mod asymptotics;
pub mod barrier;
pub mod bryant;
pub mod config;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod numerics;
pub mod rescaled;
pub mod seeds;
pub mod spectral;

pub use config::RunConfig;
pub use error::{Result, SolabError};
pub use flow::{ErrorModel, FlowTrajectory};
pub use geometry::RadialProfile;
pub use rescaled::RescaledProfile;

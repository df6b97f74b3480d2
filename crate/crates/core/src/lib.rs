//! Finite asymmetric metric measure spaces: slopes, Cheeger energies,
//! q-heat flows, Hopf–Lax semigroups and Wasserstein transport.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod error;
pub mod finsler;
pub mod flow;
pub mod hopflax;
pub mod io;
pub mod numerics;
pub mod scalar;
pub mod slope;
pub mod space;
pub mod transport;

pub use error::{Error, Result};
pub use scalar::{ExtReal, Scalar};

pub type Space = space::FiniteAsymmSpace<f64>;
pub type SpaceF32 = space::FiniteAsymmSpace<f32>;
pub type Field = slope::ScalarField<f64>;
pub type Model = finsler::FinslerModel<f64>;
pub type Trajectory = flow::FlowTrajectory<f64>;
pub type Profile = hopflax::HopfLaxProfile<f64>;
pub type ProbabilityMeasure = transport::Measure<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

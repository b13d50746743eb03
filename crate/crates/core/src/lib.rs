//! Fractional Poincaré constants on unbounded domains: kernel integrals,
//! Gagliardo seminorms, quadrature oracles, the counterexample family,
//! sufficient/necessary condition checks and a discrete eigensolver.

pub mod conditions;
pub mod constants;
pub mod counterexample;
pub mod domain;
pub mod eigen;
pub mod error;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod order;
pub mod quad;
pub mod radius;
pub mod seminorm;
mod tent;

pub use domain::{AxisBox, BoxUnionDomain, Generator, IntervalUnion};
pub use error::{Error, Result};
pub use kernels::{EnergyValue, Method};
pub use order::{FracOrder, Regime};

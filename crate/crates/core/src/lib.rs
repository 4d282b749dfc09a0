//! Numerical library behind the `slc-lab` tool: special Lagrangian curvature
//! operators on symmetric matrices, hyperboloid-model geometry, the barrier
//! bounds for constant-curvature hypersurfaces in hyperbolic ends, Newton and
//! Perron graph solvers, foliation sweeps and a Kulkarni-Pinkall metric
//! sampler.

pub mod barriers;
pub mod error;
pub mod foliation;
pub mod graphsolve;
pub mod hypgeom;
pub mod kpmetric;
pub mod linalg;
pub mod symcurv;
pub mod tolerances;

pub use error::{Error, Result};
pub use symcurv::{AngleParams, Spectrum, SymMatrix};

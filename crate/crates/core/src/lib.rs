//! Randomized Kaczmarz with squared-row-norm sampling, classical and
//! uniform-random Kaczmarz, relaxed Kaczmarz and CGLS, together with the
//! closed-form rate and cost predictors and the instance generators used to
//! compare them.
//!
//! ```
//! use kaczmarz::problems::gaussian_system;
//! use kaczmarz::randsrc::RngStream;
//! use kaczmarz::solvers::{kaczmarz_randomized, SolverOptions, Weighting};
//!
//! let mut rng = RngStream::new(7);
//! let system = gaussian_system(60, 20, &mut rng).unwrap();
//! let opts = SolverOptions { target_error: 1e-8, ..Default::default() };
//! let trace = kaczmarz_randomized(&system, &opts, Weighting::SquaredNorm).unwrap();
//! assert!(trace.reached_tolerance());
//! ```

pub mod error;
pub mod matcore;
pub mod problems;
pub mod randsrc;
pub mod solvers;
pub mod theory;

pub use error::{Error, Result};
pub use matcore::{DenseMatrix, Scalar};
pub use solvers::{IterateTrace, LinearSystem, SolverOptions};

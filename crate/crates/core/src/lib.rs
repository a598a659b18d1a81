//! Spherical and vector spherical harmonic transforms of piecewise
//! polynomial data on θ-φ rectangle partitions, with all element integrals
//! evaluated in closed form, plus exterior scattering solvers for one or
//! several spheres.

// `!(x > 0.0)` style checks are intended: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fields;
pub mod grid;
pub mod multiscatter;
pub mod oracle;
pub mod oscint;
pub mod radial;
pub mod scatter;
pub mod specfun;
pub mod sphtrans;
pub mod vshtrans;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use fields::{Incident, PlaneWave, SphericalWave};
pub use grid::{build_custom_partition, build_uniform_partition, NodalScalarField, NodalVectorField, SphPartition};
pub use multiscatter::{assemble_and_solve, MultiSolution, Scatterer, ScattererSet, TranslationTable};
pub use scatter::{solve_acoustic_single, solve_em_single, AcousticSolution, EmSolution};
pub use sphtrans::{lm_index, sph_forward, SphCoeffs};
pub use vshtrans::{vsh_forward, VshCoeffs};

//! Independent brute-force references: adaptive and tensor quadrature,
//! a Jacobi-polynomial Legendre evaluator, exact Gaunt coefficients, the raw
//! Gaunt-series translation matrix, finite-sum spherical Hankel functions and
//! DFT extraction of trig forms. Nothing here calls the production
//! transform, recurrence or ratio code.

mod gaunt;
mod quad;
mod special;
mod trigdft;

pub use gaunt::{gaunt, wigner_3j};
pub use quad::{gauss_kronrod, quad_sph_coeff, quad_sph_coeffs, quad_vsh_coeffs};
pub use special::{
    legendre_ref_triplet, normalized_legendre_ref, sph_bessel_j_ref, sph_bessel_y_ref, sph_hankel_ref, ylm_ref,
};
pub use trigdft::trig_form_dft;

pub mod separation;
pub use separation::{normalized_translation_direct, separation_matrix_direct};

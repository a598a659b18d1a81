//! Special functions: normalized associated Legendre functions and their
//! trigonometric forms, spherical Bessel/Hankel recurrences, LGL tables.

pub mod bessel;
pub mod legendre;
pub mod lgl;
pub mod trig;

pub use bessel::{
    hankel_log_array, hankel_log_derivative, hankel_ratio_seq, sph_bessel_j, sph_bessel_j_array,
    sph_bessel_j_log_array, sph_bessel_j_ratio, sph_bessel_j_ratios, sph_bessel_j_with_deriv,
};
pub use legendre::{
    assoc_legendre_over_sin_weights, dtheta_assoc_legendre_weights, legendre_p_all,
    normalized_assoc_legendre, plm_table, tri, tri_len, AngularTable,
};
pub use lgl::{gauss_legendre, gauss_lobatto, lgl_basis_table, LegendreCoeffTable};
pub use trig::{trig_form, trig_form_table, ParityClass, TrigForm};

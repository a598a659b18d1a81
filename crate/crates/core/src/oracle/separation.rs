//! Raw addition-theorem coefficients from the Gaunt series. With
//! r_i = r_j + b_ij and r_j < b_ij,
//! h_l(k r_i) Y_l^m(r̂_i) = Σ_{n,s} S_{nl}^{sm}(b_ij) j_n(k r_j) Y_n^s(r̂_j).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gaunt::gaunt;
use super::special::{sph_bessel_j_ref, sph_hankel_ref, ylm_ref};
use crate::error::{Error, Result};

fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub(crate) fn direction_angles(b: [f64; 3]) -> (f64, f64, f64) {
    let r = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    let th = (b[2] / r).clamp(-1.0, 1.0).acos();
    let ph = b[1].atan2(b[0]);
    (r, th, ph)
}

/// S_{nl}^{sm}(b), summed over the exact Gaunt support |l-n| ≤ q ≤ l+n
/// with q ≡ l+n (mod 2).
pub fn separation_matrix_direct(
    b: [f64; 3],
    k: f64,
    n: usize,
    l: usize,
    s: i32,
    m: i32,
) -> Result<Complex64> {
    if s.unsigned_abs() as usize > n || m.unsigned_abs() as usize > l {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (bm, th, ph) = direction_angles(b);
    let mu = s - m;
    let mut acc = Complex64::new(0.0, 0.0);
    let q_lo = l.abs_diff(n).max(mu.unsigned_abs() as usize);
    for q in q_lo..=(l + n) {
        if (q + l + n) % 2 == 1 {
            continue;
        }
        let g = gaunt(l, m, q, mu, n);
        if g == 0.0 {
            continue;
        }
        let h = sph_hankel_ref(q, k * bm);
        if !(h.norm() <= 1e290) {
            return Err(Error::Overflow(format!("|h_{q}({})| exceeds oracle range", k * bm)));
        }
        acc += i_pow(q as i64) * h * ylm_ref(q, mu, th, ph).conj() * g;
    }
    Ok(acc * i_pow(n as i64 - l as i64) * (4.0 * PI))
}

/// Ψ_{nl}^{sm} = S_{nl}^{sm}(b_ij) j_n(k a_j) / h_l(k a_i).
#[allow(clippy::too_many_arguments)]
pub fn normalized_translation_direct(
    b: [f64; 3],
    k: f64,
    a_i: f64,
    a_j: f64,
    n: usize,
    l: usize,
    s: i32,
    m: i32,
) -> Result<Complex64> {
    let sv = separation_matrix_direct(b, k, n, l, s, m)?;
    Ok(sv * sph_bessel_j_ref(n, k * a_j) / sph_hankel_ref(l, k * a_i))
}

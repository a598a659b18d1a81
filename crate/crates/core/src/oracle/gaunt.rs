use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn fact(n: i64) -> BigInt {
    (2..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Wigner 3j symbol through the Racah formula in exact rational arithmetic;
/// only the final square root is taken in floating point.
pub fn wigner_3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if m1 + m2 + m3 != 0
        || m1.abs() > j1
        || m2.abs() > j2
        || m3.abs() > j3
        || j3 < (j1 - j2).abs()
        || j3 > j1 + j2
    {
        return 0.0;
    }
    // Δ² and the factorial prefactor under the square root
    let sq_num = fact(j1 + j2 - j3)
        * fact(j1 - j2 + j3)
        * fact(-j1 + j2 + j3)
        * fact(j1 + m1)
        * fact(j1 - m1)
        * fact(j2 + m2)
        * fact(j2 - m2)
        * fact(j3 + m3)
        * fact(j3 - m3);
    let sq_den = fact(j1 + j2 + j3 + 1);
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = fact(k)
            * fact(j1 + j2 - j3 - k)
            * fact(j1 - m1 - k)
            * fact(j2 + m2 - k)
            * fact(j3 - j2 + m1 + k)
            * fact(j3 - j1 - m2 + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    // value = sign * sum * sqrt(sq_num/sq_den); square and convert once
    let neg = sum.is_negative();
    let sq = &sum * &sum * BigRational::new(sq_num, sq_den);
    let mag = ratio_to_f64(&sq).sqrt();
    let phase = if (j1 - j2 - m3).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    if neg {
        -phase * mag
    } else {
        phase * mag
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // scale to keep both parts in range
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let (n, d) = if shift > 0 {
        (r.numer().clone(), r.denom().clone() << shift as usize)
    } else {
        (r.numer().clone() << (-shift) as usize, r.denom().clone())
    };
    let q = (n / d).to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift as i32)
}

/// ∫ Y_l^m Y_q^μ conj(Y_n^{m+μ}) dS.
pub fn gaunt(l: usize, m: i32, q: usize, mu: i32, n: usize) -> f64 {
    let (l, q, n) = (l as i64, q as i64, n as i64);
    let (m, mu) = (m as i64, mu as i64);
    if m.abs() > l || mu.abs() > q || (m + mu).abs() > n {
        return 0.0;
    }
    let w0 = wigner_3j(l, q, n, 0, 0, 0);
    if w0 == 0.0 {
        return 0.0;
    }
    let w = wigner_3j(l, q, n, m, mu, -m - mu);
    let sign = if (m + mu).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    sign * (((2 * l + 1) * (2 * q + 1) * (2 * n + 1)) as f64 / (4.0 * PI)).sqrt() * w0 * w
}

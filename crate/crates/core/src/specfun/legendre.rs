//! Normalized associated Legendre functions with the Condon-Shortley phase,
//! P̂_l^m(x) such that Y_l^m(θ, φ) = P̂_l^m(cos θ) e^{imφ} is orthonormal.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Flat index of (l, m), 0 ≤ m ≤ l, in a lower-triangular table.
#[inline]
pub fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Number of entries of a triangular table with degrees 0..=l_max.
#[inline]
pub fn tri_len(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 2) / 2
}

fn check_x(x: f64) -> Result<()> {
    if !(x.abs() <= 1.0) {
        return domain(format!("|x| must be at most 1, got {x}"));
    }
    Ok(())
}

/// P̂_l^m(x) by the increasing-degree three-term recurrence at fixed order.
/// Negative orders use P̂_l^{-m} = (-1)^m P̂_l^m.
pub fn normalized_assoc_legendre(l: usize, m: i32, x: f64) -> Result<f64> {
    check_x(x)?;
    let ma = m.unsigned_abs() as usize;
    if ma > l {
        return domain(format!("order {m} exceeds degree {l}"));
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let v = plm_fixed_order(l, ma, x, s);
    Ok(if m < 0 && ma % 2 == 1 { -v } else { v })
}

fn sectorial(m: usize, s: f64) -> f64 {
    let mut p = 0.5 / PI.sqrt();
    for i in 1..=m {
        let fi = i as f64;
        p *= -((2.0 * fi + 1.0) / (2.0 * fi)).sqrt() * s;
    }
    p
}

fn plm_fixed_order(l: usize, m: usize, x: f64, s: f64) -> f64 {
    let pmm = sectorial(m, s);
    if l == m {
        return pmm;
    }
    let mut p0 = pmm;
    let mut p1 = x * ((2 * m + 3) as f64).sqrt() * pmm;
    for ll in m + 2..=l {
        let (a, b) = recurrence_coeffs(ll, m);
        let p2 = a * (x * p1 - b * p0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[inline]
fn recurrence_coeffs(l: usize, m: usize) -> (f64, f64) {
    let lf = l as f64;
    let mf = m as f64;
    let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
    let lm1 = lf - 1.0;
    let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
    (a, b)
}

/// All P̂_l^m(cos θ) for 0 ≤ m ≤ l ≤ l_max, given x = cos θ and s = sin θ.
/// Passing a signed `s` evaluates the analytic continuation s^m·poly(x).
pub fn plm_table(l_max: usize, x: f64, s: f64) -> Vec<f64> {
    let mut out = vec![0.0; tri_len(l_max)];
    let mut pmm = 0.5 / PI.sqrt();
    for m in 0..=l_max {
        if m > 0 {
            let fm = m as f64;
            pmm *= -((2.0 * fm + 1.0) / (2.0 * fm)).sqrt() * s;
        }
        out[tri(m, m)] = pmm;
        if m == l_max {
            break;
        }
        let mut p0 = pmm;
        let mut p1 = x * ((2 * m + 3) as f64).sqrt() * pmm;
        out[tri(m + 1, m)] = p1;
        for l in m + 2..=l_max {
            let (a, b) = recurrence_coeffs(l, m);
            let p2 = a * (x * p1 - b * p0);
            out[tri(l, m)] = p2;
            p0 = p1;
            p1 = p2;
        }
    }
    out
}

/// Terms (order, weight) with dP̂_l^m(cos θ)/dθ = Σ weight · P̂_l^order(cos θ).
///
/// With the Condon-Shortley phase the two-term form reads
/// -c1 P̂_l^{m-1} + c2 P̂_l^{m+1}, c1 = ½√((l+m)(l-m+1)), c2 = ½√((l+m+1)(l-m)).
pub fn dtheta_assoc_legendre_weights(l: usize, m: usize) -> Result<Vec<(i32, f64)>> {
    if l == 0 {
        return domain("derivative of a degree-0 function is identically zero");
    }
    if m > l {
        return domain(format!("order {m} exceeds degree {l}"));
    }
    let lf = l as f64;
    if m == 0 {
        return Ok(vec![(1, (lf * (lf + 1.0)).sqrt())]);
    }
    if m == l {
        return Ok(vec![((l - 1) as i32, -(lf / 2.0).sqrt())]);
    }
    let (c1, c2) = dtheta_coeffs(l, m);
    Ok(vec![(m as i32 - 1, -c1), (m as i32 + 1, c2)])
}

#[inline]
pub(crate) fn dtheta_coeffs(l: usize, m: usize) -> (f64, f64) {
    let lf = l as f64;
    let mf = m as f64;
    (
        0.5 * ((lf + mf) * (lf - mf + 1.0)).sqrt(),
        0.5 * ((lf + mf + 1.0) * (lf - mf)).sqrt(),
    )
}

/// Terms (order, weight) at degree l+1 with
/// P̂_l^m(cos θ)/sin θ = Σ weight · P̂_{l+1}^order(cos θ), valid for m ≥ 1.
pub fn assoc_legendre_over_sin_weights(l: usize, m: usize) -> Result<[(i32, f64); 2]> {
    if m == 0 {
        return domain("P/sin recurrence needs m > 0");
    }
    if m > l {
        return domain(format!("order {m} exceeds degree {l}"));
    }
    let (w1, w2) = over_sin_coeffs(l, m);
    Ok([(m as i32 - 1, w1), (m as i32 + 1, w2)])
}

#[inline]
pub(crate) fn over_sin_coeffs(l: usize, m: usize) -> (f64, f64) {
    let lf = l as f64;
    let mf = m as f64;
    let r = (2.0 * lf + 1.0) / (2.0 * lf + 3.0);
    let c1 = (r * (lf - mf + 1.0) * (lf - mf + 2.0)).sqrt();
    let c2 = (r * (lf + mf + 1.0) * (lf + mf + 2.0)).sqrt();
    let f = -0.5 / mf;
    (f * c1, f * c2)
}

/// Legendre polynomials P_0(x)..P_n(x).
pub fn legendre_p_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 2..=n {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
    }
    p
}

/// Values, θ-derivatives and sin θ-quotients of every P̂_l^m at one colatitude,
/// for 0 ≤ m ≤ l ≤ l_max. The quotient at m = 0 is left at zero (never used).
pub struct AngularTable {
    pub l_max: usize,
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub p_over_sin: Vec<f64>,
}

impl AngularTable {
    pub fn new(l_max: usize, theta: f64) -> Self {
        let (s, x) = theta.sin_cos();
        let ext = plm_table(l_max + 1, x, s);
        let n = tri_len(l_max);
        let mut p = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let mut ps = vec![0.0; n];
        let get = |l: usize, m: i32| -> f64 {
            if m < 0 {
                let v = ext[tri(l, (-m) as usize)];
                if m % 2 != 0 {
                    -v
                } else {
                    v
                }
            } else if m as usize > l {
                0.0
            } else {
                ext[tri(l, m as usize)]
            }
        };
        for l in 0..=l_max {
            for m in 0..=l {
                let i = tri(l, m);
                p[i] = ext[tri(l, m)];
                if l > 0 {
                    let (c1, c2) = dtheta_coeffs(l, m);
                    let mi = m as i32;
                    dp[i] = -c1 * get(l, mi - 1) + c2 * get(l, mi + 1);
                }
                if m > 0 {
                    let (w1, w2) = over_sin_coeffs(l, m);
                    let mi = m as i32;
                    ps[i] = w1 * get(l + 1, mi - 1) + w2 * get(l + 1, mi + 1);
                }
            }
        }
        Self {
            l_max,
            p,
            dp,
            p_over_sin: ps,
        }
    }
}

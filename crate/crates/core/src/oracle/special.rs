use std::f64::consts::PI;

use num_complex::Complex64;
use twofloat::TwoFloat;

fn ln_fact(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn jacobi_sym(n: usize, a: f64, x: f64) -> f64 {
    // P_n^{(a,a)}(x)
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = (a + 1.0) * x;
    for k in 2..=n {
        let kf = k as f64;
        let t = 2.0 * kf + 2.0 * a;
        let c0 = 2.0 * kf * (kf + 2.0 * a) * (t - 2.0);
        let c1 = (t - 1.0) * t * (t - 2.0) * x;
        let c2 = 2.0 * (kf + a - 1.0) * (kf + a - 1.0) * t;
        let p2 = (c1 * p1 - c2 * p0) / c0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// (-1)^m √((2l+1)/4π) √((l-m)!(l+m)!)/(2^m l!)
fn legendre_prefactor(l: usize, m: usize) -> f64 {
    let ln_pref = 0.5 * (((2 * l + 1) as f64) / (4.0 * PI)).ln()
        + 0.5 * (ln_fact(l - m) + ln_fact(l + m))
        - m as f64 * 2f64.ln()
        - ln_fact(l);
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    sign * ln_pref.exp()
}

/// P̂_l^m(cos θ) (Condon-Shortley phase) through the Jacobi polynomial
/// P_{l-m}^{(m,m)}; sin θ enters with its sign so the function of θ extends
/// 2π-periodically.
pub fn normalized_legendre_ref(l: usize, m: usize, theta: f64) -> f64 {
    assert!(m <= l);
    let (s, x) = theta.sin_cos();
    legendre_prefactor(l, m) * s.powi(m as i32) * jacobi_sym(l - m, m as f64, x)
}

/// (P̂_l^m, dP̂_l^m/dθ, P̂_l^m/sin θ) at cos θ; the quotient is 0 for m = 0.
pub fn legendre_ref_triplet(l: usize, m: usize, theta: f64) -> (f64, f64, f64) {
    let (s, x) = theta.sin_cos();
    let n = l - m;
    let a = m as f64;
    let k = legendre_prefactor(l, m);
    let j = jacobi_sym(n, a, x);
    // d/dx P_n^{(a,a)} = (n+2a+1)/2 P_{n-1}^{(a+1,a+1)}
    let dj = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + 2.0 * a + 1.0) * jacobi_sym(n - 1, a + 1.0, x)
    };
    let p = k * s.powi(m as i32) * j;
    let sm1 = if m == 0 { 0.0 } else { s.powi(m as i32 - 1) };
    let dp = k * (a * sm1 * x * j - s.powi(m as i32 + 1) * dj);
    let ps = if m == 0 { 0.0 } else { k * sm1 * j };
    (p, dp, ps)
}

/// Y_l^m(θ, φ) for any |m| ≤ l.
pub fn ylm_ref(l: usize, m: i32, theta: f64, phi: f64) -> Complex64 {
    let ma = m.unsigned_abs() as usize;
    let mut p = normalized_legendre_ref(l, ma, theta);
    if m < 0 && ma % 2 == 1 {
        p = -p;
    }
    Complex64::from_polar(p, m as f64 * phi)
}

/// Upward three-term recurrence f_{n+1} = (2n+1)/z f_n − f_{n−1}.
fn upward(n: usize, z: f64, f0: f64, f1: f64) -> f64 {
    if n == 0 {
        return f0;
    }
    let (mut a, mut b) = (f0, f1);
    for k in 1..n {
        let c = (2 * k + 1) as f64 / z * b - a;
        a = b;
        b = c;
    }
    b
}

/// y_n(z) by upward recurrence, which is stable for the growing solution.
pub fn sph_bessel_y_ref(n: usize, z: f64) -> f64 {
    let (s, c) = z.sin_cos();
    upward(n, z, -c / z, -c / (z * z) - s / z)
}

/// h_n^{(1)} = j_n + i y_n.
pub fn sph_hankel_ref(n: usize, z: f64) -> Complex64 {
    Complex64::new(sph_bessel_j_ref(n, z), sph_bessel_y_ref(n, z))
}

/// j_n(z): power series for z below the order, upward recurrence otherwise
/// (j_n still oscillates there, so the recurrence does not lose accuracy).
/// The series cancels heavily for z near n, so it is summed in double-double.
pub fn sph_bessel_j_ref(n: usize, z: f64) -> f64 {
    if z == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if z >= n as f64 + 1.0 {
        let (s, c) = z.sin_cos();
        return upward(n, z, s / z, s / (z * z) - c / z);
    }
    // z^n/(2n+1)!! Σ_k (-z²/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    let q = TwoFloat::from(z) * z * -0.5;
    let mut term = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    for k in 1..600 {
        term = term * q / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.hi().abs() < 1e-34 * sum.hi().abs() {
            break;
        }
    }
    let mut lead = TwoFloat::from(1.0);
    let mut ln_shift = 0.0;
    for i in 0..=n {
        lead = lead * if i == 0 { 1.0 } else { z } / (2 * i + 1) as f64;
        if lead.hi() < 1e-200 {
            ln_shift += lead.hi().ln();
            lead = TwoFloat::from(1.0);
        }
    }
    let v = f64::from(lead * sum);
    if ln_shift == 0.0 {
        v
    } else {
        (ln_shift + v.abs().ln()).exp() * v.signum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_ref_near_turning_point() {
        // mpmath, rounded to double
        for (n, v) in [(30, 0.028_050_249_547_161_08), (33, 0.007_360_233_668_677_335), (37, 0.000_574_820_650_588_350_9)] {
            let r = sph_bessel_j_ref(n, 30.0);
            assert!((r - v).abs() < 1e-15 * v, "n={n}: {r} vs {v}");
        }
    }

    #[test]
    fn legendre_ref_closed_forms() {
        let th: f64 = 0.7;
        let (s, c) = th.sin_cos();
        assert!((normalized_legendre_ref(0, 0, th) - 0.5 / PI.sqrt()).abs() < 1e-15);
        assert!((normalized_legendre_ref(1, 1, th) + (3.0 / (8.0 * PI)).sqrt() * s).abs() < 1e-15);
        let p20 = (5.0 / (4.0 * PI)).sqrt() * 0.5 * (3.0 * c * c - 1.0);
        assert!((normalized_legendre_ref(2, 0, th) - p20).abs() < 1e-15);
        let p31 = -0.125 * (21.0 / PI).sqrt() * s * (5.0 * c * c - 1.0);
        assert!((normalized_legendre_ref(3, 1, th) - p31).abs() < 1e-15);
    }

    #[test]
    fn triplet_consistency() {
        for &(l, m) in &[(1usize, 0usize), (3, 1), (6, 3), (9, 9)] {
            let th = 0.9;
            let h = 1e-6;
            let (p, dp, ps) = legendre_ref_triplet(l, m, th);
            let fd = (normalized_legendre_ref(l, m, th + h) - normalized_legendre_ref(l, m, th - h))
                / (2.0 * h);
            assert!((dp - fd).abs() < 1e-8);
            if m > 0 {
                assert!((ps * th.sin() - p).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hankel_ref_closed_forms() {
        let z = 2.3;
        let h1 = -Complex64::from_polar(1.0, z) * Complex64::new(z, 1.0) / (z * z);
        assert!((sph_hankel_ref(1, z) - h1).norm() < 1e-15);
        let (s, c) = f64::sin_cos(z);
        assert!((sph_bessel_j_ref(0, z) - s / z).abs() < 1e-15);
        assert!((sph_bessel_j_ref(1, 0.4) - (0.4f64.sin() / 0.16 - 0.4f64.cos() / 0.4)).abs() < 1e-15);
        assert!((sph_bessel_j_ref(1, z) - (s / (z * z) - c / z)).abs() < 1e-15);
    }

    #[test]
    fn hankel_ref_terminating_series() {
        // h_n = (-i)^{n+1} e^{iz}/z Σ_k i^k (n+k)!/(k!(n-k)!) (2z)^{-k}, accurate for n ≲ z
        for &(n, z) in &[(3usize, 7.0), (10, 30.0), (25, 40.0)] {
            let mut sum = Complex64::new(0.0, 0.0);
            let mut t = 1.0;
            let mut ik = Complex64::new(1.0, 0.0);
            for k in 0..=n {
                if k > 0 {
                    let kf = k as f64;
                    t *= (n as f64 + kf) * (n as f64 - kf + 1.0) / (kf * 2.0 * z);
                    ik *= Complex64::i();
                }
                sum += ik * t;
            }
            let pre = Complex64::new(0.0, -1.0).powu(n as u32 + 1);
            let h = pre * Complex64::from_polar(1.0 / z, z) * sum;
            let r = sph_hankel_ref(n, z);
            assert!((h - r).norm() < 1e-13 * r.norm(), "n={n}: {h} vs {r}");
        }
    }

    #[test]
    fn wronskian_at_high_order() {
        // j_n y_{n-1} − j_{n-1} y_n = 1/z², with j_n far below y_n
        for &(n, z) in &[(90usize, 13.5), (180, 45.0), (40, 41.0)] {
            let w = sph_bessel_j_ref(n, z) * sph_bessel_y_ref(n - 1, z) - sph_bessel_j_ref(n - 1, z) * sph_bessel_y_ref(n, z);
            assert!((w * z * z - 1.0).abs() < 1e-10, "n={n}: {}", w * z * z);
        }
    }
}

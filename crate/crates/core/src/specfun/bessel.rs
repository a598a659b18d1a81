//! Spherical Bessel functions of real argument and the ratio recurrences
//! used in place of raw Hankel values.

use num_complex::Complex64;

use crate::error::{Error, Result};

const RESCALE: f64 = 1e200;
const LN_RESCALE: f64 = 460.517_018_598_809_1; // ln(1e200)

/// Arguments below this use the leading power-series term.
const TINY_Z: f64 = 1e-10;

/// Unnormalized backward recurrence. Returns the stored values together with
/// the accumulated log rescaling in effect when each value was stored, and
/// the index used for normalization.
struct Miller {
    stored: Vec<f64>,
    log_scale: Vec<f64>,
    norm: f64,
    norm_idx: usize,
}

impl Miller {
    fn run(n_max: usize, z: f64) -> Self {
        let top = n_max.max(1);
        let start = top + 20usize.max((1.5 * z).ceil() as usize);
        let mut stored = vec![0.0; top + 1];
        let mut log_scale = vec![0.0; top + 1];
        let mut acc = 0.0;
        let mut f_hi = 0.0; // f_{n+1}
        let mut f = 1.0; // f_n
        let mut n = start;
        while n > 0 {
            let f_lo = (2 * n + 1) as f64 / z * f - f_hi;
            f_hi = f;
            f = f_lo;
            n -= 1;
            if f.abs() > RESCALE {
                f /= RESCALE;
                f_hi /= RESCALE;
                acc += LN_RESCALE;
            }
            if n <= top {
                stored[n] = f;
                log_scale[n] = acc;
            }
        }
        let (s, c) = z.sin_cos();
        let j0 = s / z;
        let j1 = s / (z * z) - c / z;
        let (norm_idx, exact) = if j0.abs() >= j1.abs() { (0, j0) } else { (1, j1) };
        let norm = exact / stored[norm_idx];
        Self {
            stored,
            log_scale,
            norm,
            norm_idx,
        }
    }

    fn value(&self, n: usize) -> f64 {
        let shift = self.log_scale[n] - self.log_scale[self.norm_idx];
        self.stored[n] * self.norm * shift.exp()
    }

    fn log_abs(&self, n: usize) -> (f64, f64) {
        let v = self.stored[n] * self.norm;
        let shift = self.log_scale[n] - self.log_scale[self.norm_idx];
        (
            self.stored[n].abs().ln() + self.norm.abs().ln() + shift,
            v.signum(),
        )
    }
}

fn double_factorial_odd_ln(n: usize) -> f64 {
    // ln((2n+1)!!)
    (0..=n).map(|i| ((2 * i + 1) as f64).ln()).sum()
}

/// j_0(z)..j_{n_max}(z) for z ≥ 0.
pub fn sph_bessel_j_array(n_max: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if z < TINY_Z {
        for (n, o) in out.iter_mut().enumerate() {
            *o = (n as f64 * z.ln() - double_factorial_odd_ln(n)).exp();
        }
        return out;
    }
    let m = Miller::run(n_max, z);
    for (n, o) in out.iter_mut().enumerate() {
        *o = m.value(n);
    }
    out
}

pub fn sph_bessel_j(n: usize, z: f64) -> f64 {
    sph_bessel_j_array(n, z)[n]
}

/// (ln|j_n(z)|, sign j_n(z)) for n = 0..=n_max, z > 0. Magnitudes far below
/// the double range are represented without underflow.
pub fn sph_bessel_j_log_array(n_max: usize, z: f64) -> Vec<(f64, f64)> {
    if z < TINY_Z {
        return (0..=n_max)
            .map(|n| (n as f64 * z.ln() - double_factorial_odd_ln(n), 1.0))
            .collect();
    }
    let m = Miller::run(n_max, z);
    (0..=n_max).map(|n| m.log_abs(n)).collect()
}

/// j_n and dj_n/dz for n = 0..=n_max.
pub fn sph_bessel_j_with_deriv(n_max: usize, z: f64) -> (Vec<f64>, Vec<f64>) {
    let j = sph_bessel_j_array(n_max + 1, z);
    let mut d = vec![0.0; n_max + 1];
    d[0] = -j[1];
    for n in 1..=n_max {
        d[n] = if z == 0.0 {
            if n == 1 {
                1.0 / 3.0
            } else {
                0.0
            }
        } else {
            j[n - 1] - (n + 1) as f64 / z * j[n]
        };
    }
    let mut j = j;
    j.truncate(n_max + 1);
    (j, d)
}

/// α_n = j_n(z)/j_{n+1}(z) for n = 0..=n_max by the backward continued
/// fraction for j_{n+1}/j_n.
pub fn sph_bessel_j_ratios(n_max: usize, z: f64) -> Result<Vec<f64>> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("ratio needs z > 0, got {z}")));
    }
    let start = n_max + 20usize.max((1.5 * z).ceil() as usize);
    let mut alpha = vec![0.0; n_max + 1];
    // r = j_{n+1}/j_n
    let mut r = 0.0;
    for n in (0..=start).rev() {
        let a = (2 * n + 3) as f64 / z - r;
        if n <= n_max {
            if !a.is_finite() || a.abs() > 1e300 {
                return Err(Error::Pole(format!(
                    "j_{}({z}) vanishes to working precision",
                    n + 1
                )));
            }
            alpha[n] = a;
        }
        r = 1.0 / a;
    }
    Ok(alpha)
}

pub fn sph_bessel_j_ratio(n: usize, z: f64) -> Result<f64> {
    Ok(sph_bessel_j_ratios(n, z)?[n])
}

/// ρ_l(z) = h_l'(z)/h_l(z), l = 0..=l_max, by forward recurrence.
pub fn hankel_log_derivative(l_max: usize, z: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(l_max + 1);
    let mut rho = Complex64::new(-1.0 / z, 1.0);
    out.push(rho);
    for l in 1..=l_max {
        let lf = l as f64;
        rho = z / (Complex64::from(lf - 1.0) - z * rho) - (lf + 1.0) / z;
        out.push(rho);
    }
    out
}

/// γ_m(z) = h_m(z)/h_{m+1}(z), m = 0..=l_max.
pub fn hankel_ratio_seq(l_max: usize, z: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(l_max + 1);
    let i = Complex64::i();
    let mut g = i * z / (z + i);
    out.push(g);
    for m in 1..=l_max {
        g = 1.0 / (Complex64::from((2 * m + 1) as f64 / z) - g);
        out.push(g);
    }
    out
}

/// Complex logarithms of h_n(z), n = 0..=n_max, accumulated from
/// ln h_0 and the ratios γ so no raw value is formed.
pub fn hankel_log_array(n_max: usize, z: f64) -> Vec<Complex64> {
    let g = hankel_ratio_seq(n_max, z);
    let mut out = Vec::with_capacity(n_max + 1);
    // h_0 = -i e^{iz}/z
    let mut lh = Complex64::new(-z.ln(), z - std::f64::consts::FRAC_PI_2);
    out.push(lh);
    for gi in g.iter().take(n_max) {
        lh -= gi.ln();
        out.push(lh);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn h_direct(n: usize, z: f64) -> Complex64 {
        // finite sum: h_n(z) = (-i)^{n+1} e^{iz}/z Σ_k i^k (n+k)!/(k!(n-k)!) (2z)^{-k}
        let mut s = Complex64::new(0.0, 0.0);
        let mut ik = Complex64::new(1.0, 0.0);
        for k in 0..=n {
            let mut c = 1.0;
            for t in (n - k + 1)..=(n + k) {
                c *= t as f64;
            }
            for t in 1..=k {
                c /= t as f64;
            }
            c /= (2.0 * z).powi(k as i32);
            s += ik * c;
            ik *= Complex64::i();
        }
        let mut pre = Complex64::new(1.0, 0.0);
        for _ in 0..=n {
            pre *= -Complex64::i();
        }
        pre * Complex64::new(0.0, z).exp() / z * s
    }

    #[test]
    fn low_order_closed_forms() {
        assert!(sph_bessel_j(0, PI).abs() < 1e-15);
        assert!((sph_bessel_j(1, 1.0) - 0.3011686789).abs() < 1e-10);
        assert_eq!(sph_bessel_j(0, 0.0), 1.0);
        assert_eq!(sph_bessel_j(3, 0.0), 0.0);
        for &z in &[1.0, 5.0, 37.0, 300.0] {
            let (s, c) = f64::sin_cos(z);
            let j2 = (3.0 / (z * z) - 1.0) * s / z - 3.0 * c / (z * z);
            assert!((sph_bessel_j(2, z) - j2).abs() < 1e-14 * (1.0 + j2.abs()), "z={z}");
        }
    }

    #[test]
    fn deep_underflow_region() {
        let v = sph_bessel_j(90, 13.5);
        assert!(v > 0.0 && v.is_finite());
        let (lg, sg) = sph_bessel_j_log_array(90, 13.5)[90];
        assert_eq!(sg, 1.0);
        assert!((v.ln() - lg).abs() < 1e-10);
        assert!(lg / std::f64::consts::LN_10 > -70.0 && lg / std::f64::consts::LN_10 < -55.0);
        // far beyond the double range
        let (lg, _) = sph_bessel_j_log_array(400, 2.0)[400];
        assert!(lg.is_finite() && lg < -700.0 * std::f64::consts::LN_10);
    }

    #[test]
    fn small_argument_series() {
        let z = 1e-3;
        let j = sph_bessel_j_array(4, z);
        // j_3 ≈ z^3/105 (1 - z^2/18)
        assert!((j[3] / (z * z * z / 105.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn recurrence_consistency_moderate() {
        for &z in &[0.5, 3.0, 20.0, 150.0] {
            let j = sph_bessel_j_array(60, z);
            for n in 1..59 {
                let lhs = j[n - 1] + j[n + 1];
                let rhs = (2 * n + 1) as f64 / z * j[n];
                assert!((lhs - rhs).abs() <= 1e-13 * (j[n - 1].abs() + j[n + 1].abs() + 1e-300));
            }
        }
    }

    #[test]
    fn ratio_examples() {
        let a = sph_bessel_j_ratio(0, PI / 2.0).unwrap();
        assert!((a - PI / 2.0).abs() < 1e-14);
        let a = sph_bessel_j_ratio(3, 1e-3).unwrap();
        assert!((a / (9.0 / 1e-3) - 1.0).abs() < 1e-6);
        let j = sph_bessel_j_array(11, 5.0);
        let a = sph_bessel_j_ratio(10, 5.0).unwrap();
        assert!((a / (j[10] / j[11]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_pole_detected() {
        // j_1 vanishes at the first root of tan z = z
        let mut lo: f64 = 4.4;
        let mut hi: f64 = 4.6;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (mid.tan() - mid) * (lo.tan() - lo) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = 0.5 * (lo + hi);
        let r = sph_bessel_j_ratios(0, z);
        match r {
            Err(Error::Pole(_)) => {}
            Ok(v) => assert!(v[0].abs() > 1e13),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn log_derivative_values() {
        let r = hankel_log_derivative(1, 2.0);
        assert!((r[0] - Complex64::new(-0.5, 1.0)).norm() < 1e-15);
        let r = hankel_log_derivative(1, 1.0);
        assert!((r[1] - Complex64::new(-1.5, 0.5)).norm() < 1e-14);
        for &z in &[1.0, 10.0, 100.0] {
            let r = hankel_log_derivative(500, z);
            for (l, v) in r.iter().enumerate().skip(1) {
                let lf = l as f64;
                assert!(v.re >= -(lf + 1.0) / z - 1e-12 && v.re <= -1.0 / z + 1e-12);
                // Im ρ_l = 1/(z|h_l|)², which underflows to zero at large l
                assert!(v.im >= 0.0 && v.im <= 1.0);
            }
        }
    }

    #[test]
    fn ratio_seq_values() {
        let g = hankel_ratio_seq(0, 1.0);
        assert!((g[0] - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        let g = hankel_ratio_seq(200, 10.0);
        assert!((g[200].norm() / (10.0 / 401.0) - 1.0).abs() < 0.01);
        let g = hankel_ratio_seq(5, 20.0);
        let d = h_direct(5, 20.0) / h_direct(6, 20.0);
        assert!((g[5] - d).norm() < 1e-12 * d.norm());
    }

    #[test]
    fn ratio_and_log_derivative_agree() {
        for &z in &[0.5, 5.0, 50.0] {
            let r = hankel_log_derivative(80, z);
            let g = hankel_ratio_seq(80, z);
            for m in 1..=80 {
                let lhs = z * r[m] + (m + 1) as f64;
                let rhs = z * g[m - 1];
                assert!((lhs - rhs).norm() <= 1e-12 * (z * r[m]).norm(), "z={z} m={m} {lhs} {rhs}");
            }
        }
    }

    #[test]
    fn hankel_logs() {
        let l = hankel_log_array(8, 3.0);
        for n in 0..=8 {
            let d = h_direct(n, 3.0);
            assert!((l[n].exp() - d).norm() < 1e-12 * d.norm());
        }
    }

    #[test]
    fn derivative_values() {
        let (j, d) = sph_bessel_j_with_deriv(3, 2.0);
        let h = 1e-6;
        for n in 0..=3 {
            let fd = (sph_bessel_j(n, 2.0 + h) - sph_bessel_j(n, 2.0 - h)) / (2.0 * h);
            assert!((d[n] - fd).abs() < 1e-8);
            assert!(j[n].is_finite());
        }
    }
}

//! Closed-form oscillatory integrals against Legendre polynomials:
//!
//! ∫_{-1}^{1} P_n(x) e^{-i(λx+ρ)} dx = 2 i^{-n} e^{-iρ} j_n(λ),
//!
//! its cosine/sine parts C_n, S_n, and the integrals P^n_lm, Q^n_lm of
//! P_n(x) P̂_l^m(cos(λx+ρ)) without and with the sin(λx+ρ) weight.

use num_complex::Complex64;

use crate::specfun::{sph_bessel_j_array, ParityClass, TrigForm};

/// i^{-n} by n mod 4.
#[inline]
pub fn i_pow_neg(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// i^n by n mod 4.
#[inline]
pub fn i_pow(n: usize) -> Complex64 {
    i_pow_neg(n).conj()
}

/// j_n(λ) for n ≤ n_max at signed λ, via j_n(-λ) = (-1)^n j_n(λ).
fn bessel_signed(n_max: usize, lambda: f64) -> Vec<f64> {
    let mut j = sph_bessel_j_array(n_max, lambda.abs());
    if lambda < 0.0 {
        for (n, v) in j.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    j
}

pub fn legendre_fourier(n: usize, lambda: f64, rho: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, -rho);
    if lambda == 0.0 {
        return if n == 0 { 2.0 * e } else { Complex64::new(0.0, 0.0) };
    }
    let j = bessel_signed(n, lambda)[n];
    2.0 * i_pow_neg(n) * e * j
}

/// (C_n, S_n) = (∫P_n cos(λx+ρ), ∫P_n sin(λx+ρ)).
pub fn cs_integrals(n: usize, lambda: f64, rho: f64) -> (f64, f64) {
    let (c, s) = cs_integrals_all(n, lambda, rho);
    (c[n], s[n])
}

/// C_0..C_{n_max} and S_0..S_{n_max} at one (λ, ρ).
pub fn cs_integrals_all(n_max: usize, lambda: f64, rho: f64) -> (Vec<f64>, Vec<f64>) {
    let mut c = vec![0.0; n_max + 1];
    let mut s = vec![0.0; n_max + 1];
    if lambda == 0.0 {
        c[0] = 2.0 * rho.cos();
        s[0] = 2.0 * rho.sin();
        return (c, s);
    }
    // identities C(-λ,-ρ) = C(λ,ρ), S(-λ,-ρ) = -S(λ,ρ) keep the Bessel argument positive
    let (lam, rh, flip) = if lambda < 0.0 {
        (-lambda, -rho, -1.0)
    } else {
        (lambda, rho, 1.0)
    };
    let j = sph_bessel_j_array(n_max, lam);
    let e = Complex64::from_polar(1.0, -rh);
    for n in 0..=n_max {
        let v = 2.0 * i_pow_neg(n) * e * j[n];
        c[n] = v.re;
        s[n] = -v.im * flip;
    }
    (c, s)
}

/// P^n_lm(λ, ρ) = ∫ P_n(x) P̂_l^m(cos(λx+ρ)) dx.
pub fn p_integral(tf: &TrigForm, n: usize, lambda: f64, rho: f64) -> f64 {
    let cosine = tf.class.is_cosine();
    let mut acc = 0.0;
    for k in tf.ascending_order() {
        let f = tf.frequency(k) as f64;
        let (c, s) = cs_integrals(n, f * lambda, f * rho);
        acc += tf.coeff(k) * if cosine { c } else { s };
    }
    acc
}

/// Q^n_lm(λ, ρ) = ∫ P_n(x) P̂_l^m(cos(λx+ρ)) sin(λx+ρ) dx.
pub fn q_integral(tf: &TrigForm, n: usize, lambda: f64, rho: f64) -> f64 {
    let mut acc = 0.0;
    for k in tf.ascending_order() {
        let f = tf.frequency(k) as f64;
        let term = match tf.class {
            ParityClass::EvenEven | ParityClass::OddEven => {
                // cos(fθ) sin θ = ½[sin((f+1)θ) - sin((f-1)θ)]
                let hi = cs_integrals(n, (f + 1.0) * lambda, (f + 1.0) * rho).1;
                let lo = if f == 0.0 {
                    -hi
                } else {
                    cs_integrals(n, (f - 1.0) * lambda, (f - 1.0) * rho).1
                };
                0.5 * (hi - lo)
            }
            ParityClass::EvenOdd | ParityClass::OddOdd => {
                // sin(fθ) sin θ = ½[cos((f-1)θ) - cos((f+1)θ)]
                let lo = cs_integrals(n, (f - 1.0) * lambda, (f - 1.0) * rho).0;
                let hi = cs_integrals(n, (f + 1.0) * lambda, (f + 1.0) * rho).0;
                0.5 * (lo - hi)
            }
        };
        acc += tf.coeff(k) * term;
    }
    acc
}

/// Lagrange-weighted moments for one interval with half-width `half` and
/// midpoint `mid`: for each integer frequency p in 0..=p_max and LGL basis
/// index j, Cv[p][j] = Σ_n v_jn C_n(p·half, p·mid) and likewise Sv.
/// Equivalently ∫ l_j(x) cos/sin(p(half·x + mid)) dx.
pub struct LagrangeMoments {
    pub np: usize,
    pub cv: Vec<f64>,
    pub sv: Vec<f64>,
}

impl LagrangeMoments {
    pub fn new(v: &[f64], n: usize, half: f64, mid: f64, p_max: usize) -> Self {
        let np = n + 1;
        let mut cv = vec![0.0; (p_max + 1) * np];
        let mut sv = vec![0.0; (p_max + 1) * np];
        for p in 0..=p_max {
            let pf = p as f64;
            let (c, s) = cs_integrals_all(n, pf * half, pf * mid);
            for j in 0..np {
                let row = &v[j * np..(j + 1) * np];
                let mut ac = 0.0;
                let mut as_ = 0.0;
                for k in 0..np {
                    ac += row[k] * c[k];
                    as_ += row[k] * s[k];
                }
                cv[p * np + j] = ac;
                sv[p * np + j] = as_;
            }
        }
        Self { np, cv, sv }
    }

    #[inline]
    pub fn c(&self, p: usize) -> &[f64] {
        &self.cv[p * self.np..(p + 1) * self.np]
    }

    #[inline]
    pub fn s(&self, p: usize) -> &[f64] {
        &self.sv[p * self.np..(p + 1) * self.np]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{gauss_kronrod, normalized_legendre_ref};
    use crate::specfun::{legendre_p_all, trig_form};
    use std::f64::consts::PI;

    fn quad_cs(n: usize, lam: f64, rho: f64) -> (f64, f64) {
        let c = gauss_kronrod(|x| legendre_p_all(n, x)[n] * (lam * x + rho).cos(), -1.0, 1.0, 1e-15);
        let s = gauss_kronrod(|x| legendre_p_all(n, x)[n] * (lam * x + rho).sin(), -1.0, 1.0, 1e-15);
        (c, s)
    }

    #[test]
    fn fourier_examples() {
        assert_eq!(legendre_fourier(1, 0.0, 0.7), Complex64::new(0.0, 0.0));
        assert!(legendre_fourier(0, PI, 0.0).norm() < 1e-15);
        let v = legendre_fourier(1, 1.0, 0.0);
        assert!(v.re.abs() < 1e-16 && (v.im + 0.6023373578).abs() < 1e-10);
        let (c, s) = quad_cs(1, 1.0, 0.0);
        assert!((v - Complex64::new(c, -s)).norm() < 1e-14);
        for &(n, lam, rho) in &[(3usize, 0.8, 0.2), (4, -1.7, 2.0)] {
            let a = legendre_fourier(n, lam, rho);
            let b = legendre_fourier(n, -lam, -rho);
            assert!((a.conj() - b).norm() < 1e-15);
        }
    }

    #[test]
    fn cs_examples() {
        let (c, s) = cs_integrals(0, 0.0, 0.4);
        assert_eq!((c, s), (2.0 * 0.4f64.cos(), 2.0 * 0.4f64.sin()));
        assert_eq!(cs_integrals(2, 0.0, 1.3), (0.0, 0.0));
        let (c, s) = cs_integrals(3, 2.5, 0.3);
        let (qc, qs) = quad_cs(3, 2.5, 0.3);
        assert!((c - qc).abs() < 1e-14 && (s - qs).abs() < 1e-14);
        let (c2, s2) = cs_integrals(3, -2.5, -0.3);
        assert!((c2 - c).abs() < 1e-16 && (s2 + s).abs() < 1e-16);
    }

    #[test]
    fn p_and_q_small_cases() {
        let t00 = trig_form(0, 0).unwrap();
        let v = p_integral(&t00, 0, 0.0, 0.0);
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-15);
        let t10 = trig_form(1, 0).unwrap();
        let v = p_integral(&t10, 2, PI / 4.0, PI / 2.0);
        let want = t10.coeffs[0] * cs_integrals(2, PI / 4.0, PI / 2.0).0;
        assert!((v - want).abs() < 1e-16);
        let v = q_integral(&t00, 0, PI / 2.0, PI / 2.0);
        assert!((v - 1.0 / (2.0 * PI.sqrt()) * 4.0 / PI).abs() < 1e-14);
        // whole θ range as a single element: ∫_0^π P̂_2^1 sin θ dθ (n = 0)
        let t21 = trig_form(2, 1).unwrap();
        let q = q_integral(&t21, 0, PI / 2.0, PI / 2.0) * PI / 2.0;
        let want = gauss_kronrod(
            |th| normalized_legendre_ref(2, 1, th) * th.sin(),
            0.0,
            PI,
            1e-15,
        );
        assert!((q - want).abs() < 1e-13);
    }

    #[test]
    fn p_q_against_quadrature() {
        let cases = [(7usize, 3usize, 4usize, 0.42, 1.1), (12, 5, 3, 0.7, 2.0), (20, 0, 6, 1.3, 0.4)];
        for &(l, m, n, lam, rho) in &cases {
            let tf = trig_form(l, m).unwrap();
            let wp = gauss_kronrod(
                |x| legendre_p_all(n, x)[n] * normalized_legendre_ref(l, m, lam * x + rho),
                -1.0,
                1.0,
                1e-15,
            );
            let wq = gauss_kronrod(
                |x| {
                    let th = lam * x + rho;
                    legendre_p_all(n, x)[n] * normalized_legendre_ref(l, m, th) * th.sin()
                },
                -1.0,
                1.0,
                1e-15,
            );
            assert!((p_integral(&tf, n, lam, rho) - wp).abs() < 1e-13, "P l={l} m={m}");
            assert!((q_integral(&tf, n, lam, rho) - wq).abs() < 1e-13, "Q l={l} m={m}");
        }
    }

    #[test]
    fn k0_term_identity() {
        // S(λ,ρ) - S(-λ,-ρ) = 2S(λ,ρ): naive negative-argument evaluation agrees
        for n in 0..6 {
            let (_, s) = cs_integrals(n, 0.9, 0.6);
            let j = sph_bessel_j_array(n, 0.9)[n] * if n % 2 == 1 { -1.0 } else { 1.0 };
            let neg = -(2.0 * i_pow_neg(n) * Complex64::from_polar(1.0, 0.6) * j).im;
            assert!((s - neg - 2.0 * s).abs() < 1e-15);
        }
    }

    #[test]
    fn moments_match_direct_sums() {
        let t = crate::specfun::lgl_basis_table(6).unwrap();
        let mo = LagrangeMoments::new(&t.v, 6, 0.3, 1.0, 5);
        for p in 0..=5 {
            for j in 0..7 {
                let (c, s) = cs_integrals_all(6, p as f64 * 0.3, p as f64 * 1.0);
                let dc: f64 = (0..7).map(|n| t.v(j, n) * c[n]).sum();
                let ds: f64 = (0..7).map(|n| t.v(j, n) * s[n]).sum();
                assert!((mo.c(p)[j] - dc).abs() < 1e-15);
                assert!((mo.s(p)[j] - ds).abs() < 1e-15);
            }
        }
    }
}

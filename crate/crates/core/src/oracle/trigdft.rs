use std::f64::consts::PI;

use super::special::normalized_legendre_ref;
use crate::specfun::{ParityClass, TrigForm};

/// Trig-form coefficients of P̂_l^m(cos θ) by a direct DFT of the
/// 2π-periodic Jacobi evaluation on `samples` equispaced points
/// (exact once samples > 2l + 1).
pub fn trig_form_dft(l: usize, m: usize, samples: usize) -> TrigForm {
    assert!(m <= l && samples > 2 * l + 1);
    let class = ParityClass::of(l, m);
    let f: Vec<(f64, f64)> = (0..samples)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / samples as f64;
            (th, normalized_legendre_ref(l, m, th))
        })
        .collect();
    let (k_min, k_max) = match class {
        ParityClass::EvenEven => (0, l / 2),
        ParityClass::EvenOdd => (1, l / 2),
        _ => (1, l.div_ceil(2)),
    };
    let even_freq = l % 2 == 0;
    let coeffs = (k_min..=k_max)
        .map(|k| {
            let fr = if even_freq { 2 * k } else { 2 * k - 1 } as f64;
            let s: f64 = f
                .iter()
                .map(|&(th, v)| if class.is_cosine() { v * (fr * th).cos() } else { v * (fr * th).sin() })
                .sum();
            if fr == 0.0 {
                s / samples as f64
            } else {
                2.0 * s / samples as f64
            }
        })
        .collect();
    TrigForm { l, m, class, k_min, coeffs }
}

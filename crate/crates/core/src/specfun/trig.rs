//! Finite Fourier series of P̂_l^m(cos θ) in θ.
//!
//! Depending on the parities of l and m the function is a cosine series in
//! even/odd multiples of θ or a sine series. Coefficients are generated from
//! the top frequency l downwards by the three-term recurrence obtained from
//! the associated Legendre equation.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParityClass {
    /// l even, m even: Σ_{k=0}^{l/2} A^k cos(2kθ)
    EvenEven,
    /// l even, m odd: Σ_{k=1}^{l/2} A^k sin(2kθ)
    EvenOdd,
    /// l odd, m even: Σ_{k=1}^{(l+1)/2} A^k cos((2k-1)θ)
    OddEven,
    /// l odd, m odd: Σ_{k=1}^{(l+1)/2} A^k sin((2k-1)θ)
    OddOdd,
}

impl ParityClass {
    pub fn of(l: usize, m: usize) -> Self {
        match (l % 2, m % 2) {
            (0, 0) => Self::EvenEven,
            (0, _) => Self::EvenOdd,
            (_, 0) => Self::OddEven,
            _ => Self::OddOdd,
        }
    }

    pub fn is_cosine(self) -> bool {
        matches!(self, Self::EvenEven | Self::OddEven)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigForm {
    pub l: usize,
    pub m: usize,
    pub class: ParityClass,
    pub k_min: usize,
    /// A^k for k = k_min..=k_max.
    pub coeffs: Vec<f64>,
}

impl TrigForm {
    pub fn k_max(&self) -> usize {
        self.k_min + self.coeffs.len() - 1
    }

    /// Angular frequency multiplying θ for index k.
    #[inline]
    pub fn frequency(&self, k: usize) -> usize {
        match self.class {
            ParityClass::EvenEven | ParityClass::EvenOdd => 2 * k,
            ParityClass::OddEven | ParityClass::OddOdd => 2 * k - 1,
        }
    }

    pub fn coeff(&self, k: usize) -> f64 {
        if k < self.k_min || k > self.k_max() {
            0.0
        } else {
            self.coeffs[k - self.k_min]
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let cosine = self.class.is_cosine();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let w = self.frequency(self.k_min + i) as f64 * theta;
                if cosine {
                    a * w.cos()
                } else {
                    a * w.sin()
                }
            })
            .sum()
    }

    /// Indices k ordered by increasing |A^k|, for cancellation-aware sums.
    pub fn ascending_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.coeffs.len()).collect();
        idx.sort_by(|&a, &b| self.coeffs[a].abs().total_cmp(&self.coeffs[b].abs()));
        idx.into_iter().map(|i| i + self.k_min).collect()
    }
}

/// ln d_lm with d_lm = Γ(l+½)/π · √((2l+1)/((l-m)!(l+m)!)), built from
/// logs of O(1) ratios so it stays finite for any degree.
pub fn log_leading_magnitude(l: usize, m: usize) -> f64 {
    // d² = (2l+1)/π · B(l,0) · B(l,m), B(l,m) = C(2l, l+m)/4^l
    let mut ln_b0 = 0.0;
    for i in 1..=l {
        ln_b0 += (-1.0 / (2.0 * i as f64)).ln_1p();
    }
    let mut ln_bm = ln_b0;
    for i in 1..=m {
        ln_bm += (-((2 * i - 1) as f64) / ((l + i) as f64)).ln_1p();
    }
    0.5 * (((2 * l + 1) as f64).ln() - std::f64::consts::PI.ln() + ln_b0 + ln_bm)
}

pub fn trig_form(l: usize, m: usize) -> Result<TrigForm> {
    if m > l {
        return domain(format!("order {m} exceeds degree {l}"));
    }
    let class = ParityClass::of(l, m);
    if l == 0 {
        return Ok(TrigForm {
            l,
            m,
            class,
            k_min: 0,
            coeffs: vec![0.5 / std::f64::consts::PI.sqrt()],
        });
    }
    let sign = if m.div_ceil(2) % 2 == 0 { 1.0 } else { -1.0 };
    let lead = sign * log_leading_magnitude(l, m).exp();

    let lam = (l * (l + 1)) as f64;
    let mm4 = 4.0 * (m * m) as f64;
    let n_lo = match class {
        ParityClass::EvenEven => 0,
        ParityClass::EvenOdd => 2,
        _ => 1,
    };
    // by_freq[n] holds the coefficient of frequency n (only matching parity used)
    let mut by_freq = vec![0.0; l + 3];
    by_freq[l] = lead;
    let mut n = l;
    while n >= n_lo + 2 {
        let nf = n as f64;
        let num = (2.0 * lam - 2.0 * nf * nf - mm4) * by_freq[n]
            + ((nf + 2.0) * (nf + 1.0) - lam) * by_freq[n + 2];
        let mut den = (nf - 2.0) * (nf - 1.0) - lam;
        if n == 2 && class == ParityClass::EvenEven {
            // cos(-2θ) folds onto cos(2θ) for the constant term
            den *= 2.0;
        }
        by_freq[n - 2] = -num / den;
        n -= 2;
    }
    let (k_min, k_max) = match class {
        ParityClass::EvenEven => (0, l / 2),
        ParityClass::EvenOdd => (1, l / 2),
        _ => (1, l.div_ceil(2)),
    };
    let mut tf = TrigForm {
        l,
        m,
        class,
        k_min,
        coeffs: Vec::with_capacity(k_max + 1 - k_min),
    };
    for k in k_min..=k_max {
        let f = tf.frequency(k);
        tf.coeffs.push(by_freq[f]);
    }
    Ok(tf)
}

/// Trig forms for every 0 ≤ m ≤ l ≤ l_max in triangular order.
pub fn trig_form_table(l_max: usize) -> Vec<TrigForm> {
    let mut out = Vec::with_capacity(super::tri_len(l_max));
    for l in 0..=l_max {
        for m in 0..=l {
            out.push(trig_form(l, m).expect("valid order"));
        }
    }
    out
}

//! Gauss and Gauss-Lobatto-Legendre point sets, and the Legendre expansion
//! of the Lagrange basis on LGL nodes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// P_n(x), P_{n-1}(x) and P_n'(x).
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64, f64) {
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        0.5 * nf * (nf + 1.0) * x.powi(n as i32 + 1)
    } else {
        nf * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, p0, dp)
}

/// n-point Gauss-Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = -(PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, _, dp) = legendre_with_deriv(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, _, dp) = legendre_with_deriv(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// N+1 Legendre-Gauss-Lobatto nodes (ascending) and weights on [-1, 1].
pub fn gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n + 1];
    let mut w = vec![0.0; n + 1];
    let nf = n as f64;
    x[0] = -1.0;
    x[n] = 1.0;
    let we = 2.0 / (nf * (nf + 1.0));
    w[0] = we;
    w[n] = we;
    for j in 1..=(n - 1) / 2 {
        let jf = j as f64;
        let mut z = -(PI * (jf + 0.25) / nf - 3.0 / (8.0 * nf * PI * (jf + 0.25))).cos();
        for _ in 0..100 {
            // q = P_{N+1} - P_{N-1}, q' = (2N+1) P_N
            let (pn1, pn, _) = legendre_with_deriv(n + 1, z);
            let pm1 = legendre_with_deriv(n - 1, z).0;
            let q = pn1 - pm1;
            let dq = (2.0 * nf + 1.0) * pn;
            let dz = q / dq;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (pn, _, _) = legendre_with_deriv(n, z);
        x[j] = z;
        x[n - j] = -z;
        w[j] = we / (pn * pn);
        w[n - j] = w[j];
    }
    if n % 2 == 0 && n > 0 {
        let (pn, _, _) = legendre_with_deriv(n, 0.0);
        x[n / 2] = 0.0;
        w[n / 2] = we / (pn * pn);
    }
    (x, w)
}

/// LGL nodes, weights and the matrix v with l_i(x) = Σ_n v[i][n] P_n(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendreCoeffTable {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row-major (N+1)×(N+1), v[i*(N+1)+n].
    pub v: Vec<f64>,
}

impl LegendreCoeffTable {
    #[inline]
    pub fn v(&self, i: usize, n: usize) -> f64 {
        self.v[i * (self.n + 1) + n]
    }

    /// Values of every Lagrange basis function at x (barycentric form).
    pub fn lagrange_values(&self, x: f64) -> Vec<f64> {
        let np = self.n + 1;
        let bw = barycentric_weights(&self.nodes);
        let mut out = vec![0.0; np];
        for (i, &xi) in self.nodes.iter().enumerate() {
            if x == xi {
                out[i] = 1.0;
                return out;
            }
        }
        let mut denom = 0.0;
        for i in 0..np {
            let t = bw[i] / (x - self.nodes[i]);
            out[i] = t;
            denom += t;
        }
        for o in out.iter_mut() {
            *o /= denom;
        }
        out
    }
}

pub(crate) fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] /= nodes[j] - nodes[k];
            }
        }
    }
    let scale = w.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    for x in w.iter_mut() {
        *x /= scale;
    }
    w
}

pub fn lgl_basis_table(n: usize) -> Result<LegendreCoeffTable> {
    if n < 1 {
        return domain("LGL degree must be at least 1");
    }
    let (nodes, weights) = gauss_lobatto(n);
    let np = n + 1;
    let mut v = vec![0.0; np * np];
    for i in 0..np {
        let p = super::legendre::legendre_p_all(n, nodes[i]);
        for k in 0..np {
            // discrete norm of P_N under LGL quadrature is 2/N, not 2/(2N+1)
            let g = if k == n { n as f64 } else { (2 * k + 1) as f64 };
            v[i * np + k] = 0.5 * g * weights[i] * p[k];
        }
    }
    Ok(LegendreCoeffTable {
        n,
        nodes,
        weights,
        v,
    })
}

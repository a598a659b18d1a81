use num_complex::Complex64;

use super::special::legendre_ref_triplet;
use crate::grid::{NodalScalarField, NodalVectorField};
use crate::specfun::gauss_legendre;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= tol || err <= 1e-15 * k.abs() || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss-Kronrod (7/15) quadrature with absolute tolerance.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol.max(1e-17), 16)
}

fn lagrange_matrix(nodes: &[f64], pts: &[f64]) -> Vec<f64> {
    let np = nodes.len();
    let mut out = vec![0.0; pts.len() * np];
    for (q, &x) in pts.iter().enumerate() {
        for i in 0..np {
            let mut v = 1.0;
            for k in 0..np {
                if k != i {
                    v *= (x - nodes[k]) / (nodes[i] - nodes[k]);
                }
            }
            out[q * np + i] = v;
        }
    }
    out
}

/// Per element: interpolant values on an nq×nq Gauss grid, as
/// (θ points, θ weights·θ̂, φ points, φ weights·φ̂, values[qφ*nq + qθ]).
struct ElementGrid {
    theta: Vec<f64>,
    wt: Vec<f64>,
    phi: Vec<f64>,
    wp: Vec<f64>,
    vals: Vec<Complex64>,
}

fn element_grids(field: &NodalScalarField, nq: usize) -> Vec<ElementGrid> {
    let p = &field.partition;
    let np = p.n + 1;
    let (x, w) = gauss_legendre(nq);
    let lm = lagrange_matrix(&p.basis.nodes, &x);
    (0..p.elements.len())
        .map(|e| {
            let el = &p.elements[e];
            let u = field.element_values(e);
            // t[i][qθ] = Σ_j u_ij l_j(η_q)
            let mut t = vec![Complex64::new(0.0, 0.0); np * nq];
            for i in 0..np {
                for q in 0..nq {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..np {
                        acc += u[i * np + j] * lm[q * np + j];
                    }
                    t[i * nq + q] = acc;
                }
            }
            let mut vals = vec![Complex64::new(0.0, 0.0); nq * nq];
            for qp in 0..nq {
                for i in 0..np {
                    let li = lm[qp * np + i];
                    for qt in 0..nq {
                        vals[qp * nq + qt] += t[i * nq + qt] * li;
                    }
                }
            }
            ElementGrid {
                theta: x.iter().map(|&e| el.theta_half * e + el.theta_mid).collect(),
                wt: w.iter().map(|&w| w * el.theta_half).collect(),
                phi: x.iter().map(|&e| el.phi_half * e + el.phi_mid).collect(),
                wp: w.iter().map(|&w| w * el.phi_half).collect(),
                vals,
            }
        })
        .collect()
}

/// F[m][qθ] = Σ_qφ wφ e^{-imφ} vals, m = -L..=L stored at m + L.
fn phi_project(g: &ElementGrid, l_max: usize) -> Vec<Complex64> {
    let nq = g.theta.len();
    let nm = 2 * l_max + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); nm * nq];
    for mi in 0..nm {
        let m = mi as f64 - l_max as f64;
        for qp in 0..nq {
            let e = Complex64::from_polar(g.wp[qp], -m * g.phi[qp]);
            for qt in 0..nq {
                out[mi * nq + qt] += e * g.vals[qp * nq + qt];
            }
        }
    }
    out
}

#[inline]
fn flat(l: usize, m: i32) -> usize {
    (l * l + l).wrapping_add_signed(m as isize)
}

/// ∫ u_N conj(Y_l^m) dS for all l ≤ l_max by tensor Gauss quadrature of the
/// nodal interpolant, 4(N + l_max) points per direction per element.
/// Output indexed l² + l + m.
pub fn quad_sph_coeffs(field: &NodalScalarField, l_max: usize) -> Vec<Complex64> {
    let nq = 4 * (field.partition.n + l_max.max(1));
    let mut out = vec![Complex64::new(0.0, 0.0); (l_max + 1) * (l_max + 1)];
    for g in element_grids(field, nq) {
        let f = phi_project(&g, l_max);
        for qt in 0..nq {
            let th = g.theta[qt];
            let w = g.wt[qt] * th.sin();
            for l in 0..=l_max {
                for m in 0..=l {
                    let (p, _, _) = legendre_ref_triplet(l, m, th);
                    let pw = p * w;
                    out[flat(l, m as i32)] += f[(l_max + m) * nq + qt] * pw;
                    if m > 0 {
                        let s = if m % 2 == 1 { -pw } else { pw };
                        out[(l * l + l) - m] += f[(l_max - m) * nq + qt] * s;
                    }
                }
            }
        }
    }
    out
}

pub fn quad_sph_coeff(field: &NodalScalarField, l: usize, m: i32) -> Complex64 {
    quad_sph_coeffs(field, l)[flat(l, m)]
}

/// (ṽ^r, ṽ^(1), ṽ^(2)) with the 1/(l(l+1)) normalization on the tangential
/// families, each indexed l² + l + m.
pub fn quad_vsh_coeffs(
    field: &NodalVectorField,
    l_max: usize,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let nq = 4 * (field.u.partition.n + l_max.max(1));
    let len = (l_max + 1) * (l_max + 1);
    let zero = Complex64::new(0.0, 0.0);
    let (mut r, mut a1, mut a2) = (vec![zero; len], vec![zero; len], vec![zero; len]);
    let gu = element_grids(&field.u, nq);
    let gv = element_grids(&field.v, nq);
    let gw = element_grids(&field.w, nq);
    let im = Complex64::i();
    for ((gu, gv), gw) in gu.iter().zip(&gv).zip(&gw) {
        let fu = phi_project(gu, l_max);
        let fv = phi_project(gv, l_max);
        let fw = phi_project(gw, l_max);
        for qt in 0..nq {
            let th = gu.theta[qt];
            let s = th.sin();
            let w = gu.wt[qt];
            for l in 0..=l_max {
                let inv = if l == 0 { 0.0 } else { 1.0 / (l * (l + 1)) as f64 };
                for ma in 0..=l {
                    let (p, dp, ps) = legendre_ref_triplet(l, ma, th);
                    for sgn in [1i32, -1] {
                        if ma == 0 && sgn < 0 {
                            continue;
                        }
                        let m = sgn * ma as i32;
                        let par = if sgn < 0 && ma % 2 == 1 { -1.0 } else { 1.0 };
                        let mi = (l_max as i32 + m) as usize;
                        let (u, v, wv) = (fu[mi * nq + qt], fv[mi * nq + qt], fw[mi * nq + qt]);
                        let idx = flat(l, m);
                        let mf = m as f64;
                        r[idx] += u * (par * p * s * w);
                        // v·conj(Ψ) sin θ = V dP sin θ - i m W P
                        a1[idx] += (v * (dp * s) - im * mf * wv * (ps * s)) * (par * w * inv);
                        // v·conj(Φ) sin θ = -(i m V P + W dP sin θ)
                        a2[idx] -= (im * mf * v * (ps * s) + wv * (dp * s)) * (par * w * inv);
                    }
                }
            }
        }
    }
    (r, a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_uniform_partition, sample_scalar};
    use std::f64::consts::PI;

    #[test]
    fn kronrod_basic() {
        let v = gauss_kronrod(|x| x.sin(), 0.0, PI, 1e-15);
        assert!((v - 2.0).abs() < 1e-14);
        let v = gauss_kronrod(|x| (50.0 * x).cos() * x * x, -1.0, 1.0, 1e-15);
        let exact = {
            // ∫ x² cos(ax) = [x² sin/a + 2x cos/a² - 2 sin/a³]
            let a: f64 = 50.0;
            let f = |x: f64| x * x * (a * x).sin() / a + 2.0 * x * (a * x).cos() / (a * a)
                - 2.0 * (a * x).sin() / (a * a * a);
            f(1.0) - f(-1.0)
        };
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn constant_field() {
        let p = build_uniform_partition(2, 3, 4).unwrap();
        let f = sample_scalar(|_, _| Complex64::new(1.0, 0.0), &p);
        let a = quad_sph_coeffs(&f, 3);
        assert!((a[0] - Complex64::new(2.0 * PI.sqrt(), 0.0)).norm() < 1e-13);
        for v in &a[1..] {
            assert!(v.norm() < 1e-13);
        }
    }

    #[test]
    fn resolution_convergent() {
        // quadrature doubling on a sampled smooth field changes nothing at 1e-13
        let p = build_uniform_partition(2, 2, 8).unwrap();
        let f = sample_scalar(|th, ph| Complex64::from_polar(1.0, 3.0 * th.cos() + ph.sin()), &p);
        let a = quad_sph_coeffs(&f, 6);
        let b = quad_sph_coeffs(&f, 12);
        for i in 0..a.len() {
            assert!((a[i] - b[i]).norm() < 1e-13);
        }
    }
}

//! Forward vector spherical harmonic transform and VSH synthesis.
//!
//! Basis: Y_l^m e_r, Ψ_l^m = ∇_S Y_l^m, Φ_l^m = Ψ_l^m × e_r, so with
//! s = sin θ,
//! Ψ = e^{imφ}(dP̂ e_θ + im P̂/s e_φ), Φ = e^{imφ}(im P̂/s e_θ − dP̂ e_φ).
//! Tangential coefficients carry the 1/(l(l+1)) normalization, so sampled
//! Ψ_l^m transforms to exactly 1.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::NodalVectorField;
use crate::specfun::legendre::dtheta_coeffs;
use crate::specfun::{tri, AngularTable};
use crate::sphtrans::{accumulate, dot_cr, io_err, lm_index, phi_contract, same_partition, ElemFactorTables};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VshCoeffs {
    pub l_max: usize,
    /// ṽ^r, ṽ^(1), ṽ^(2), each at l² + l + m.
    pub r: Vec<Complex64>,
    pub t1: Vec<Complex64>,
    pub t2: Vec<Complex64>,
}

impl VshCoeffs {
    pub fn zeros(l_max: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); (l_max + 1) * (l_max + 1)];
        Self { l_max, r: z.clone(), t1: z.clone(), t2: z }
    }

    /// Coefficient family 0 (radial), 1 (Ψ) or 2 (Φ).
    pub fn family(&self, f: usize) -> &[Complex64] {
        match f {
            0 => &self.r,
            1 => &self.t1,
            _ => &self.t2,
        }
    }

    pub fn family_mut(&mut self, f: usize) -> &mut Vec<Complex64> {
        match f {
            0 => &mut self.r,
            1 => &mut self.t1,
            _ => &mut self.t2,
        }
    }

    /// max over l ≤ L, |m| ≤ l and the three families of |ṽ − exact|.
    pub fn max_error(&self, exact: &[Vec<Complex64>; 3]) -> f64 {
        let mut e: f64 = 0.0;
        for f in 0..3 {
            for (a, b) in self.family(f).iter().zip(&exact[f]) {
                e = e.max((a - b).norm());
            }
        }
        e
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = std::io::BufWriter::new(w);
        wr.write_all(b"l,m,family,re,im\n").map_err(io_err)?;
        let names = ["r", "1", "2"];
        for l in 0..=self.l_max {
            for m in -(l as i32)..=(l as i32) {
                for (f, name) in names.iter().enumerate() {
                    let v = self.family(f)[lm_index(l, m)];
                    writeln!(wr, "{l},{m},{name},{:e},{:e}", v.re, v.im).map_err(io_err)?;
                }
            }
        }
        wr.flush().map_err(io_err)
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer(w, self).map_err(|e| Error::Format(e.to_string()))
    }
}

/// 𝔡_{l,m,j} = θ̂ ∫ l_j(η) (dP̂_l^m/dθ) sin θ dη from the 𝔟 block of the same
/// θ-row: 𝔡_{l,m} = −c1 𝔟_{l,m−1} + c2 𝔟_{l,m+1}, with 𝔟_{l,−1} = −𝔟_{l,1}.
pub fn d_factors(b: &[f64], np: usize, l_max: usize) -> Vec<f64> {
    let mut d = vec![0.0; b.len()];
    let row = |l: usize, m: usize| &b[tri(l, m) * np..(tri(l, m) + 1) * np];
    for l in 1..=l_max {
        for m in 0..=l {
            let (c1, c2) = dtheta_coeffs(l, m);
            let out = &mut d[tri(l, m) * np..(tri(l, m) + 1) * np];
            if m == 0 {
                let b1 = row(l, 1);
                for j in 0..np {
                    out[j] = (c1 + c2) * b1[j];
                }
                continue;
            }
            let lo = row(l, m - 1);
            for j in 0..np {
                out[j] = -c1 * lo[j];
            }
            if m < l {
                let hi = row(l, m + 1);
                for j in 0..np {
                    out[j] += c2 * hi[j];
                }
            }
        }
    }
    d
}

pub fn vsh_forward(field: &NodalVectorField, l_max: usize) -> Result<VshCoeffs> {
    let tables = ElemFactorTables::with_vector(field.partition(), l_max);
    vsh_forward_with(&tables, field)
}

pub fn vsh_forward_with(tables: &ElemFactorTables, field: &NodalVectorField) -> Result<VshCoeffs> {
    let p = field.partition();
    if !same_partition(&tables.partition, p)
        || !same_partition(p, &field.v.partition)
        || !same_partition(p, &field.w.partition)
    {
        return Err(Error::Dimension("field components and tables disagree on partition".into()));
    }
    let c_rows = tables
        .c
        .as_ref()
        .ok_or_else(|| Error::Dimension("factor tables were built without the 𝔠 blocks".into()))?;
    let l_max = tables.l_max;
    let np = p.n + 1;
    let d_rows: Vec<Vec<f64>> = tables.b.par_iter().map(|b| d_factors(b, np, l_max)).collect();
    let len = (l_max + 1) * (l_max + 1);
    let im = Complex64::i();
    let parts: Vec<[Vec<Complex64>; 3]> = (0..p.elements.len())
        .into_par_iter()
        .map(|e| {
            let a = tables.a_block(e);
            let s = p.elements[e].s;
            let (b, c, d) = (&tables.b[s], &c_rows[s], &d_rows[s]);
            let (up, un) = phi_contract(a, field.u.element_values(e), np, l_max);
            let (vp, vn) = phi_contract(a, field.v.element_values(e), np, l_max);
            let (wp, wn) = phi_contract(a, field.w.element_values(e), np, l_max);
            let zero = Complex64::new(0.0, 0.0);
            let (mut r, mut t1, mut t2) = (vec![zero; len], vec![zero; len], vec![zero; len]);
            for l in 0..=l_max {
                let inv = if l == 0 { 0.0 } else { 1.0 / (l * (l + 1)) as f64 };
                for ma in 0..=l {
                    let k = tri(l, ma);
                    let (bw, cw, dw) = (
                        &b[k * np..(k + 1) * np],
                        &c[k * np..(k + 1) * np],
                        &d[k * np..(k + 1) * np],
                    );
                    for neg in [false, true] {
                        if neg && ma == 0 {
                            continue;
                        }
                        let (gu, gv, gw) = if neg { (&un, &vn, &wn) } else { (&up, &vp, &wp) };
                        let rows = ma * np..(ma + 1) * np;
                        let (gu, gv, gw) = (&gu[rows.clone()], &gv[rows.clone()], &gw[rows]);
                        let m = if neg { -(ma as f64) } else { ma as f64 };
                        let sgn = if neg && ma % 2 == 1 { -1.0 } else { 1.0 };
                        let idx = lm_index(l, m as i32);
                        r[idx] = dot_cr(gu, bw) * sgn;
                        if l > 0 {
                            let vd = dot_cr(gv, dw);
                            let vc = dot_cr(gv, cw);
                            let wd = dot_cr(gw, dw);
                            let wc = dot_cr(gw, cw);
                            t1[idx] = (vd - im * m * wc) * (sgn * inv);
                            t2[idx] = -(im * m * vc + wd) * (sgn * inv);
                        }
                    }
                }
            }
            [r, t1, t2]
        })
        .collect();
    let mut fam: [Vec<Vec<Complex64>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for [r, t1, t2] in parts {
        fam[0].push(r);
        fam[1].push(t1);
        fam[2].push(t2);
    }
    let [fr, f1, f2] = fam;
    let comp = l_max > 100;
    Ok(VshCoeffs {
        l_max,
        r: accumulate(fr, len, comp),
        t1: accumulate(f1, len, comp),
        t2: accumulate(f2, len, comp),
    })
}

/// (Y, Ψ_θ, Ψ_φ) pieces of one mode at one colatitude: returns
/// (P̂, dP̂/dθ, P̂/sin θ) with the (−1)^m reflection for negative orders.
#[inline]
pub(crate) fn mode_parts(tab: &AngularTable, l: usize, m: i32) -> (f64, f64, f64) {
    let ma = m.unsigned_abs() as usize;
    let k = tri(l, ma);
    let s = if m < 0 && ma % 2 == 1 { -1.0 } else { 1.0 };
    (s * tab.p[k], s * tab.dp[k], s * tab.p_over_sin[k])
}

/// Point values of the VSH expansion in spherical components (r, θ, φ).
pub fn vsh_synthesize(coeffs: &VshCoeffs, points: &[(f64, f64)]) -> Vec<[Complex64; 3]> {
    let l_max = coeffs.l_max;
    points
        .par_iter()
        .map(|&(th, ph)| {
            let tab = AngularTable::new(l_max, th);
            let im = Complex64::i();
            let mut out = [Complex64::new(0.0, 0.0); 3];
            for l in 0..=l_max {
                for m in -(l as i32)..=(l as i32) {
                    let idx = lm_index(l, m);
                    let (p, dp, ps) = mode_parts(&tab, l, m);
                    let e = Complex64::from_polar(1.0, m as f64 * ph);
                    let (a, b, c) = (coeffs.r[idx] * e, coeffs.t1[idx] * e, coeffs.t2[idx] * e);
                    let imps = im * (m as f64 * ps);
                    out[0] += a * p;
                    out[1] += b * dp + c * imps;
                    out[2] += b * imps - c * dp;
                }
            }
            out
        })
        .collect()
}

/// Spherical components of Y_l^m e_r, Ψ_l^m, Φ_l^m at one point.
pub fn vsh_basis(l: usize, m: i32, theta: f64, phi: f64) -> [[Complex64; 3]; 3] {
    let tab = AngularTable::new(l, theta);
    let (p, dp, ps) = mode_parts(&tab, l, m);
    let e = Complex64::from_polar(1.0, m as f64 * phi);
    let imps = Complex64::i() * (m as f64 * ps) * e;
    let z = Complex64::new(0.0, 0.0);
    [[e * p, z, z], [z, e * dp, imps], [z, imps, -e * dp]]
}

//! Forward spherical harmonic transform of nodal fields with exact element
//! integrals, and synthesis back to point values.
//!
//! On element e = (s, t) the coefficient splits as
//! ã_l^m += Σ_ij u_ij 𝔞_{m,i}^t 𝔟_{l,m,j}^s, where 𝔞 only depends on the
//! φ-column and 𝔟 only on the θ-row, so both are tabulated once per column
//! and row respectively.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Element, NodalScalarField, SphPartition};
use crate::oscint::LagrangeMoments;
use crate::specfun::{plm_table, tri, tri_len, LegendreCoeffTable, TrigForm};

/// ã_l^m for 0 ≤ |m| ≤ l ≤ L, stored at l² + l + m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphCoeffs {
    pub l_max: usize,
    pub a: Vec<Complex64>,
}

#[inline]
pub fn lm_index(l: usize, m: i32) -> usize {
    (l * l + l).wrapping_add_signed(m as isize)
}

impl SphCoeffs {
    pub fn zeros(l_max: usize) -> Self {
        Self {
            l_max,
            a: vec![Complex64::new(0.0, 0.0); (l_max + 1) * (l_max + 1)],
        }
    }

    #[inline]
    pub fn get(&self, l: usize, m: i32) -> Complex64 {
        self.a[lm_index(l, m)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, m: i32, v: Complex64) {
        self.a[lm_index(l, m)] = v;
    }

    /// max_{|m| ≤ l} |ã_l^m|
    pub fn max_abs_at(&self, l: usize) -> f64 {
        self.a[l * l..(l + 1) * (l + 1)].iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// max over all stored indices of |ã - exact(l, m)|.
    pub fn max_error<F: Fn(usize, i32) -> Complex64>(&self, exact: F) -> f64 {
        let mut e: f64 = 0.0;
        for l in 0..=self.l_max {
            for m in -(l as i32)..=(l as i32) {
                e = e.max((self.get(l, m) - exact(l, m)).norm());
            }
        }
        e
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv_writer(w);
        wr.write_all(b"l,m,re,im\n").map_err(io_err)?;
        for l in 0..=self.l_max {
            for m in -(l as i32)..=(l as i32) {
                let v = self.get(l, m);
                writeln!(wr, "{l},{m},{:e},{:e}", v.re, v.im).map_err(io_err)?;
            }
        }
        wr.flush().map_err(io_err)
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer(w, self).map_err(|e| Error::Format(e.to_string()))
    }
}

fn csv_writer<W: Write>(w: W) -> std::io::BufWriter<W> {
    std::io::BufWriter::new(w)
}

pub(crate) fn io_err(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

/// Trig forms for all (l, m ≥ 0) with their ascending-magnitude summation
/// order.
pub(crate) struct TrigCache {
    pub forms: Vec<TrigForm>,
    pub order: Vec<Vec<usize>>,
}

impl TrigCache {
    pub fn new(l_max: usize) -> Self {
        let lm: Vec<(usize, usize)> = (0..=l_max).flat_map(|l| (0..=l).map(move |m| (l, m))).collect();
        let forms: Vec<TrigForm> = lm
            .into_par_iter()
            .map(|(l, m)| crate::specfun::trig_form(l, m).expect("valid order"))
            .collect();
        let order = forms.par_iter().map(|f| f.ascending_order()).collect();
        Self { forms, order }
    }
}

/// 𝔞_{m,i} = φ̂ ∫ l_i(ξ) e^{-im(φ̂ξ+β)} dξ for m = 0..=L, stored [m*(N+1)+i].
pub fn phi_factors(el: &Element, basis: &LegendreCoeffTable, l_max: usize) -> Vec<Complex64> {
    phi_factors_raw(el.phi_half, el.phi_mid, basis, l_max)
}

fn phi_factors_raw(half: f64, mid: f64, basis: &LegendreCoeffTable, l_max: usize) -> Vec<Complex64> {
    let mom = LagrangeMoments::new(&basis.v, basis.n, half, mid, l_max);
    let np = basis.n + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); (l_max + 1) * np];
    for m in 0..=l_max {
        let (c, s) = (mom.c(m), mom.s(m));
        for i in 0..np {
            out[m * np + i] = Complex64::new(c[i], -s[i]) * half;
        }
    }
    out
}

/// θ-direction factor blocks for one θ-interval: 𝔟 (sin θ weighted) and
/// optionally 𝔠 (unweighted), both stored [tri(l,m)*(N+1)+j].
pub(crate) fn theta_blocks(
    half: f64,
    mid: f64,
    basis: &LegendreCoeffTable,
    trig: &TrigCache,
    l_max: usize,
    with_c: bool,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let np = basis.n + 1;
    let mom = LagrangeMoments::new(&basis.v, basis.n, half, mid, l_max + 1);
    let per_l: Vec<(Vec<f64>, Vec<f64>)> = (0..=l_max)
        .into_par_iter()
        .map(|l| {
            let mut b = vec![0.0; (l + 1) * np];
            let mut c = if with_c { vec![0.0; (l + 1) * np] } else { Vec::new() };
            for m in 0..=l {
                let idx = tri(l, m);
                let tf = &trig.forms[idx];
                let cosine = tf.class.is_cosine();
                let bb = &mut b[m * np..(m + 1) * np];
                for &k in &trig.order[idx] {
                    let a = 0.5 * tf.coeff(k);
                    let f = tf.frequency(k);
                    if cosine {
                        let hi = mom.s(f + 1);
                        if f == 0 {
                            for j in 0..np {
                                bb[j] += a * 2.0 * hi[j];
                            }
                        } else {
                            let lo = mom.s(f - 1);
                            for j in 0..np {
                                bb[j] += a * (hi[j] - lo[j]);
                            }
                        }
                    } else {
                        let hi = mom.c(f + 1);
                        let lo = mom.c(f - 1);
                        for j in 0..np {
                            bb[j] += a * (lo[j] - hi[j]);
                        }
                    }
                }
                for v in bb.iter_mut() {
                    *v *= half;
                }
                if with_c {
                    let cc = &mut c[m * np..(m + 1) * np];
                    for &k in &trig.order[idx] {
                        let a = tf.coeff(k);
                        let f = tf.frequency(k);
                        let src = if cosine { mom.c(f) } else { mom.s(f) };
                        for j in 0..np {
                            cc[j] += a * src[j];
                        }
                    }
                    for v in cc.iter_mut() {
                        *v *= half;
                    }
                }
            }
            (b, c)
        })
        .collect();
    let mut b = Vec::with_capacity(tri_len(l_max) * np);
    let mut c = Vec::with_capacity(if with_c { tri_len(l_max) * np } else { 0 });
    for (bl, cl) in per_l {
        b.extend(bl);
        c.extend(cl);
    }
    (b, with_c.then_some(c))
}

/// 𝔟_{l,m,j} = θ̂ ∫ l_j(η) P̂_l^m(cos θ(η)) sin θ(η) dη for 0 ≤ m ≤ l ≤ L,
/// stored [tri(l,m)*(N+1)+j].
pub fn theta_factors(el: &Element, basis: &LegendreCoeffTable, l_max: usize) -> Vec<f64> {
    let trig = TrigCache::new(l_max);
    theta_blocks(el.theta_half, el.theta_mid, basis, &trig, l_max, false).0
}

/// 𝔠_{l,m,j} = θ̂ ∫ l_j(η) P̂_l^m(cos θ(η)) dη, same layout as 𝔟.
pub fn c_factors(el: &Element, basis: &LegendreCoeffTable, l_max: usize) -> Vec<f64> {
    let trig = TrigCache::new(l_max);
    theta_blocks(el.theta_half, el.theta_mid, basis, &trig, l_max, true).1.unwrap()
}

/// Factor tables for one partition and cutoff: 𝔞 per φ-column, 𝔟 (and 𝔠
/// for vector transforms) per θ-row. Immutable and shareable across fields.
pub struct ElemFactorTables {
    pub partition: Arc<SphPartition>,
    pub l_max: usize,
    pub a: Vec<Vec<Complex64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Option<Vec<Vec<f64>>>,
}

impl ElemFactorTables {
    pub fn new(partition: &Arc<SphPartition>, l_max: usize) -> Self {
        Self::build(partition, l_max, false)
    }

    /// Tables including 𝔠, as needed by the vector transform.
    pub fn with_vector(partition: &Arc<SphPartition>, l_max: usize) -> Self {
        Self::build(partition, l_max, true)
    }

    fn build(partition: &Arc<SphPartition>, l_max: usize, with_c: bool) -> Self {
        let p = partition;
        let trig = TrigCache::new(l_max);
        let a = (0..p.m_phi())
            .into_par_iter()
            .map(|t| {
                let el = &p.elements[t];
                phi_factors_raw(el.phi_half, el.phi_mid, &p.basis, l_max)
            })
            .collect();
        let (b, c): (Vec<_>, Vec<_>) = (0..p.n_theta())
            .map(|s| {
                let el = &p.elements[s * p.m_phi()];
                theta_blocks(el.theta_half, el.theta_mid, &p.basis, &trig, l_max, with_c)
            })
            .unzip();
        Self {
            partition: partition.clone(),
            l_max,
            a,
            b,
            c: if with_c { Some(c.into_iter().map(Option::unwrap).collect()) } else { None },
        }
    }

    #[inline]
    pub fn a_block(&self, e: usize) -> &[Complex64] {
        &self.a[self.partition.elements[e].t]
    }

    #[inline]
    pub fn b_block(&self, e: usize) -> &[f64] {
        &self.b[self.partition.elements[e].s]
    }

    pub fn c_block(&self, e: usize) -> Option<&[f64]> {
        self.c.as_ref().map(|c| c[self.partition.elements[e].s].as_slice())
    }
}

/// G[m][j] = Σ_i 𝔞_{m,i} u_ij (and with conj(𝔞) for negative m), i.e. the
/// φ-contraction of one element, rows m = 0..=L then m = 1..=L negated.
pub(crate) fn phi_contract(
    a: &[Complex64],
    u: &[Complex64],
    np: usize,
    l_max: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let zero = Complex64::new(0.0, 0.0);
    let mut gp = vec![zero; (l_max + 1) * np];
    let mut gn = vec![zero; (l_max + 1) * np];
    for m in 0..=l_max {
        let arow = &a[m * np..(m + 1) * np];
        let (p, n) = (&mut gp[m * np..(m + 1) * np], &mut gn[m * np..(m + 1) * np]);
        for i in 0..np {
            let ai = arow[i];
            let ac = ai.conj();
            let urow = &u[i * np..(i + 1) * np];
            for j in 0..np {
                p[j] += ai * urow[j];
                if m > 0 {
                    n[j] += ac * urow[j];
                }
            }
        }
    }
    (gp, gn)
}

/// Σ_j G[j] w[j]
#[inline]
pub(crate) fn dot_cr(g: &[Complex64], w: &[f64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, &y) in g.iter().zip(w) {
        re += x.re * y;
        im += x.im * y;
    }
    Complex64::new(re, im)
}

/// Neumaier-compensated accumulation of per-element coefficient vectors in
/// element order.
pub(crate) fn accumulate(parts: Vec<Vec<Complex64>>, len: usize, compensated: bool) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut sum = vec![zero; len];
    if !compensated {
        for p in parts {
            for (s, v) in sum.iter_mut().zip(p) {
                *s += v;
            }
        }
        return sum;
    }
    let mut comp = vec![zero; len];
    let step = |s: &mut f64, c: &mut f64, v: f64| {
        let t = *s + v;
        if s.abs() >= v.abs() {
            *c += (*s - t) + v;
        } else {
            *c += (v - t) + *s;
        }
        *s = t;
    };
    for p in parts {
        for ((s, c), v) in sum.iter_mut().zip(comp.iter_mut()).zip(p) {
            step(&mut s.re, &mut c.re, v.re);
            step(&mut s.im, &mut c.im, v.im);
        }
    }
    sum.iter().zip(&comp).map(|(s, c)| s + c).collect()
}

pub(crate) fn same_partition(a: &Arc<SphPartition>, b: &Arc<SphPartition>) -> bool {
    Arc::ptr_eq(a, b) || (a.n == b.n && a.theta_breaks == b.theta_breaks && a.phi_breaks == b.phi_breaks)
}

pub fn sph_forward(field: &NodalScalarField, l_max: usize) -> Result<SphCoeffs> {
    let tables = ElemFactorTables::new(&field.partition, l_max);
    sph_forward_with(&tables, field)
}

/// Forward transform reusing precomputed factor tables.
pub fn sph_forward_with(tables: &ElemFactorTables, field: &NodalScalarField) -> Result<SphCoeffs> {
    if !same_partition(&tables.partition, &field.partition) {
        return Err(Error::Dimension("field and factor tables use different partitions".into()));
    }
    let l_max = tables.l_max;
    let p = &field.partition;
    let np = p.n + 1;
    let len = (l_max + 1) * (l_max + 1);
    let parts: Vec<Vec<Complex64>> = (0..p.elements.len())
        .into_par_iter()
        .map(|e| {
            let (gp, gn) = phi_contract(tables.a_block(e), field.element_values(e), np, l_max);
            let b = tables.b_block(e);
            let mut out = vec![Complex64::new(0.0, 0.0); len];
            for l in 0..=l_max {
                for m in 0..=l {
                    let w = &b[tri(l, m) * np..(tri(l, m) + 1) * np];
                    out[lm_index(l, m as i32)] = dot_cr(&gp[m * np..(m + 1) * np], w);
                    if m > 0 {
                        let v = dot_cr(&gn[m * np..(m + 1) * np], w);
                        out[lm_index(l, -(m as i32))] = if m % 2 == 1 { -v } else { v };
                    }
                }
            }
            out
        })
        .collect();
    Ok(SphCoeffs { l_max, a: accumulate(parts, len, l_max > 100) })
}

/// Σ_{l ≤ L} Σ_{|m| ≤ l} ã_l^m Y_l^m(θ, φ) at each point.
pub fn sph_synthesize(coeffs: &SphCoeffs, points: &[(f64, f64)]) -> Vec<Complex64> {
    let l_max = coeffs.l_max;
    points
        .par_iter()
        .map(|&(th, ph)| {
            let (s, x) = th.sin_cos();
            let p = plm_table(l_max, x, s);
            let e: Vec<Complex64> = (0..=l_max).map(|m| Complex64::from_polar(1.0, m as f64 * ph)).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..=l_max {
                acc += coeffs.get(l, 0) * p[tri(l, 0)];
                for m in 1..=l {
                    let pv = p[tri(l, m)];
                    let neg = coeffs.get(l, -(m as i32)) * e[m].conj();
                    let neg = if m % 2 == 1 { -neg } else { neg };
                    acc += (coeffs.get(l, m as i32) * e[m] + neg) * pv;
                }
            }
            acc
        })
        .collect()
}

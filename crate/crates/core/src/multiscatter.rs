//! Several well-separated sound-soft spheres: normalized translation
//! coefficients from sectorial and degree recurrences, the coupled block
//! system, and total-field evaluation.

use std::f64::consts::PI;

use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use std::sync::Arc;

use crate::fields::{sphere_point, Incident};
use crate::grid::{sample_scalar, NodalScalarField, SphPartition};
use crate::scatter::AcousticSolution;
use crate::specfun::{
    hankel_log_array, hankel_ratio_seq, plm_table, sph_bessel_j_log_array, sph_bessel_j_ratios, tri,
};
use crate::sphtrans::{lm_index, sph_forward, SphCoeffs};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scatterer {
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScattererSet {
    pub items: Vec<Scatterer>,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// (r, θ, φ) of a Cartesian vector.
pub fn to_spherical(v: [f64; 3]) -> (f64, f64, f64) {
    let r = norm(v);
    if r == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    ((r), (v[2] / r).clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

impl ScattererSet {
    pub fn new(items: Vec<Scatterer>) -> Result<Self> {
        let s = Self { items };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.items.is_empty() {
            return domain("empty scatterer set");
        }
        for (i, a) in self.items.iter().enumerate() {
            if !(a.radius > 0.0) {
                return domain(format!("scatterer {i}: radius must be positive"));
            }
            for (j, b) in self.items.iter().enumerate().skip(i + 1) {
                if norm(sub(a.center, b.center)) <= a.radius + b.radius {
                    return domain(format!("scatterers {i} and {j} overlap or touch"));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// b_ij = O_j − O_i, so that r_i = r_j + b_ij.
    pub fn offset(&self, i: usize, j: usize) -> [f64; 3] {
        sub(self.items[j].center, self.items[i].center)
    }
}

fn sign_pow(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Recurrence coefficient b_n^m (zero outside |m| ≤ n, negative for m < 0).
fn coef_b(n: i64, m: i64) -> f64 {
    if n <= 0 || m.abs() > n {
        return 0.0;
    }
    let (nf, mf) = (n as f64, m as f64);
    let v = ((nf - mf - 1.0) * (nf - mf) / ((2.0 * nf - 1.0) * (2.0 * nf + 1.0))).sqrt();
    if m < 0 {
        -v
    } else {
        v
    }
}

/// a_n^m (zero for |m| > n).
fn coef_a(n: i64, m: i64) -> f64 {
    let ma = m.abs();
    if n < 0 || ma > n {
        return 0.0;
    }
    let (nf, mf) = (n as f64, ma as f64);
    ((nf + 1.0 + mf) * (nf + 1.0 - mf) / ((2.0 * nf + 1.0) * (2.0 * nf + 3.0))).sqrt()
}

/// Phase between the Condon–Shortley harmonics used for output and the
/// convention in which the recurrences hold (Y^{−m} = conj Y^m without the
/// (−1)^m): the two differ by (−1)^m for negative orders.
fn eps(m: i64) -> f64 {
    if m < 0 {
        sign_pow(m)
    } else {
        1.0
    }
}

/// Triangular storage over n ≤ n_lim, |s| ≤ n.
#[derive(Clone)]
struct Layer {
    n_lim: i64,
    v: Vec<Complex64>,
}

impl Layer {
    fn zeros(n_lim: i64) -> Self {
        let len = if n_lim < 0 { 0 } else { ((n_lim + 1) * (n_lim + 1)) as usize };
        Self { n_lim, v: vec![Complex64::new(0.0, 0.0); len] }
    }

    #[inline]
    fn get(&self, n: i64, s: i64) -> Complex64 {
        if n < 0 || n > self.n_lim || s.abs() > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.v[(n * n + n + s) as usize]
        }
    }

    #[inline]
    fn set(&mut self, n: i64, s: i64, x: Complex64) {
        self.v[(n * n + n + s) as usize] = x;
    }
}

/// Shared data for one ordered pair: source sphere radius a_i (h-normalized
/// outgoing index l, m), receiving sphere radius a_j (j-normalized regular
/// index n, s).
struct Recurrence {
    l_max: i64,
    n_max: i64,
    alpha: Vec<f64>,
    beta: Vec<Complex64>,
}

impl Recurrence {
    fn new(k: f64, a_src: f64, a_dst: f64, l_max: usize, n_max: usize) -> Result<Self> {
        Ok(Self {
            l_max: l_max as i64,
            n_max: n_max as i64,
            alpha: sph_bessel_j_ratios(n_max + 1, k * a_dst)?,
            beta: hankel_ratio_seq(l_max + 1, k * a_src),
        })
    }

    /// Ψ_{n0}^{s0} seeds, each j_n(ka_j)h_n(kb)/h_0(ka_i) assembled from
    /// logarithms.
    fn seeds(&self, b: [f64; 3], k: f64, a_src: f64, a_dst: f64) -> Layer {
        let n_max = self.n_max as usize;
        let (bm, th, ph) = to_spherical(b);
        let lj = sph_bessel_j_log_array(n_max, k * a_dst);
        let lh = hankel_log_array(n_max, k * bm);
        let lh0 = hankel_log_array(0, k * a_src)[0];
        let (st, ct) = th.sin_cos();
        let p = plm_table(n_max, ct, st);
        let mut out = Layer::zeros(self.n_max);
        let root = (4.0 * PI).sqrt();
        for n in 0..=n_max {
            let (lj_n, sg) = lj[n];
            let mag = (Complex64::from(lj_n) + lh[n] - lh0).exp() * (sg * sign_pow(n as i64) * root);
            for s in -(n as i64)..=(n as i64) {
                // Y^{−s} in the recurrence convention: P̂_n^{|s|} e^{−isφ}
                let y = Complex64::from_polar(p[tri(n, s.unsigned_abs() as usize)], -(s as f64) * ph);
                out.set(n as i64, s, mag * y);
            }
        }
        out
    }

    #[inline]
    fn inv_alpha(&self, n: i64) -> f64 {
        1.0 / self.alpha[n as usize]
    }

    /// One sectorial step: level |m| → |m|+1 for the order sign `pos`.
    fn sectorial_step(&self, prev: &Layer, mm: i64, pos: bool) -> Layer {
        let lim = self.n_max - mm - 1;
        let mut out = Layer::zeros(lim);
        let beta = self.beta[mm as usize];
        let den = coef_b(mm + 1, -mm - 1);
        for n in 0..=lim {
            for s in -n..=n {
                let (t1, t2) = if pos {
                    let a = if n >= 1 { coef_b(n, -s) * self.inv_alpha(n - 1) * prev.get(n - 1, s - 1) } else { 0.0.into() };
                    let b = coef_b(n + 1, s - 1) * self.alpha[n as usize] * prev.get(n + 1, s - 1);
                    (a, b)
                } else {
                    let a = if n >= 1 { coef_b(n, s) * self.inv_alpha(n - 1) * prev.get(n - 1, s + 1) } else { 0.0.into() };
                    let b = coef_b(n + 1, -s - 1) * self.alpha[n as usize] * prev.get(n + 1, s + 1);
                    (a, b)
                };
                out.set(n, s, beta * (t1 - t2) / den);
            }
        }
        out
    }

    /// Sectorial layers Ψ_{n,|m|}^{s,m} for |m| ≤ m_top, indexed by m + m_top.
    fn sectorial(&self, seed: Layer, m_top: i64) -> Vec<Layer> {
        let mut pos = vec![seed.clone()];
        let mut neg = vec![seed];
        for mm in 0..m_top {
            let p = self.sectorial_step(&pos[mm as usize], mm, true);
            let q = self.sectorial_step(&neg[mm as usize], mm, false);
            pos.push(p);
            neg.push(q);
        }
        let mut out: Vec<Layer> = neg.into_iter().skip(1).rev().collect();
        out.extend(pos);
        out
    }

    /// Degree sweep for fixed (s, m): Ψ_{n,l}^{sm} for l = |m|..=l_max and
    /// n ≤ n_keep, as rows [l − |m|][n].
    fn degree_sweep(&self, sec: &Layer, s: i64, m: i64, n_keep: i64) -> Vec<Vec<Complex64>> {
        let ma = m.abs();
        let zero = Complex64::new(0.0, 0.0);
        let lim0 = self.n_max - ma;
        let mut prev = vec![zero; (lim0 + 2) as usize];
        let mut cur: Vec<Complex64> = (0..=lim0).map(|n| sec.get(n, s)).collect();
        let mut rows = Vec::with_capacity((self.l_max - ma + 1).max(0) as usize);
        let keep = |c: &[Complex64]| c[..=(n_keep.min(c.len() as i64 - 1)) as usize].to_vec();
        rows.push(keep(&cur));
        for l in ma..self.l_max {
            let lim = self.n_max - l - 1;
            let bl = self.beta[l as usize];
            let bb = if l >= 1 { self.beta[l as usize - 1] * bl } else { zero };
            let a_prev = coef_a(l - 1, m);
            let den = coef_a(l, m);
            let mut next = vec![zero; (lim + 1) as usize];
            for n in 0..=lim {
                if s.abs() > n {
                    continue;
                }
                let mut v = -coef_a(n, s) * self.alpha[n as usize] * bl * cur[(n + 1) as usize];
                if a_prev != 0.0 {
                    v += a_prev * bb * prev[n as usize];
                }
                if n >= 1 {
                    v += coef_a(n - 1, s) * bl * self.inv_alpha(n - 1) * cur[(n - 1) as usize];
                }
                next[n as usize] = v / den;
            }
            prev = cur;
            cur = next;
            rows.push(keep(&cur));
        }
        rows
    }
}

/// Ψ_{nl}^{sm}(b_ij) for 0 ≤ n, l ≤ L.
#[derive(Debug, Clone)]
pub struct TranslationTable {
    /// source scatterer i
    pub src: usize,
    /// receiving scatterer j
    pub dst: usize,
    pub l_max: usize,
    data: Vec<Complex64>,
}

impl TranslationTable {
    #[inline]
    pub fn get(&self, n: usize, s: i32, l: usize, m: i32) -> Complex64 {
        let w = (self.l_max + 1) * (self.l_max + 1);
        self.data[lm_index(n, s) * w + lm_index(l, m)]
    }

    /// Row-major block with rows (n, s) and columns (l, m), both in
    /// l² + l + m order.
    pub fn block(&self) -> &[Complex64] {
        &self.data
    }
}

/// Normalized coefficients Ψ_{nl}^{sm} = S_{nl}^{sm}(b) j_n(ka_dst)/h_l(ka_src)
/// for all n, l ≤ l_max, with b = O_dst − O_src.
pub fn normalized_translation(b: [f64; 3], k: f64, a_src: f64, a_dst: f64, l_max: usize) -> Result<Vec<Complex64>> {
    if !(k > 0.0) || norm(b) == 0.0 {
        return domain("translation needs k > 0 and a nonzero offset");
    }
    let n_max = 2 * l_max + 2;
    let rec = Recurrence::new(k, a_src, a_dst, l_max, n_max)?;
    let seed = rec.seeds(b, k, a_src, a_dst);
    let lt = l_max as i64;
    let sec = rec.sectorial(seed, lt);
    let w = (l_max + 1) * (l_max + 1);
    let cols: Vec<(i64, i64)> = (-lt..=lt).flat_map(|m| (-lt..=lt).map(move |s| (s, m))).collect();
    let sweeps: Vec<((i64, i64), Vec<Vec<Complex64>>)> = cols
        .par_iter()
        .map(|&(s, m)| ((s, m), rec.degree_sweep(&sec[(m + lt) as usize], s, m, lt)))
        .collect();
    let mut data = vec![Complex64::new(0.0, 0.0); w * w];
    for ((s, m), rows) in sweeps {
        let ph = eps(s) * eps(m);
        for (dl, row) in rows.iter().enumerate() {
            let l = m.unsigned_abs() as usize + dl;
            for (n, v) in row.iter().enumerate() {
                if (s.unsigned_abs() as usize) <= n {
                    data[lm_index(n, s as i32) * w + lm_index(l, m as i32)] = v * ph;
                }
            }
        }
    }
    Ok(data)
}

/// Ψ_{nl}^{s m}(b) along one order column m for n, l ≤ l_max (all s with
/// |s| ≤ s_top), without building the full table. Returned as
/// [s + s_top][l − |m|][n].
pub fn translation_column(
    b: [f64; 3],
    k: f64,
    a_src: f64,
    a_dst: f64,
    l_max: usize,
    m: i32,
    s_top: usize,
) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let n_max = 2 * l_max + 2;
    let rec = Recurrence::new(k, a_src, a_dst, l_max, n_max)?;
    let seed = rec.seeds(b, k, a_src, a_dst);
    let ma = m.unsigned_abs() as i64;
    let sec = rec.sectorial(seed, ma);
    let layer = &sec[(m as i64 + ma) as usize];
    let st = s_top as i64;
    Ok((-st..=st)
        .map(|s| {
            let ph = eps(s) * eps(m as i64);
            rec.degree_sweep(layer, s, m as i64, l_max as i64)
                .into_iter()
                .map(|r| r.into_iter().map(|v| v * ph).collect())
                .collect()
        })
        .collect())
}

pub fn translation_table(set: &ScattererSet, pair: (usize, usize), k: f64, l_max: usize) -> Result<TranslationTable> {
    let (i, j) = pair;
    if i == j || i >= set.len() || j >= set.len() {
        return domain(format!("invalid scatterer pair ({i}, {j})"));
    }
    let data = normalized_translation(set.offset(i, j), k, set.items[i].radius, set.items[j].radius, l_max)?;
    Ok(TranslationTable { src: i, dst: j, l_max, data })
}

#[derive(Debug, Clone)]
pub struct MultiSolution {
    pub set: ScattererSet,
    pub k: f64,
    pub l_max: usize,
    /// A^i per scatterer
    pub coeffs: Vec<SphCoeffs>,
    /// G^i per scatterer
    pub rhs: Vec<SphCoeffs>,
    /// ‖Mx − g‖_∞ / ‖g‖_∞ after the solve
    pub solve_residual: f64,
    parts: Vec<AcousticSolution>,
}

/// Solves the coupled system on the given per-sphere boundary data (nodal
/// fields in each sphere's local angles). The total outgoing field equals the
/// data on every sphere.
pub fn assemble_and_solve(set: &ScattererSet, k: f64, l_max: usize, boundary: &[NodalScalarField]) -> Result<MultiSolution> {
    set.validate()?;
    let mm = set.len();
    if boundary.len() != mm {
        return Err(Error::Dimension(format!("{} boundary fields for {mm} scatterers", boundary.len())));
    }
    let rhs = boundary.iter().map(|f| sph_forward(f, l_max)).collect::<Result<Vec<_>>>()?;
    solve_with_rhs(set, k, l_max, rhs)
}

pub fn solve_with_rhs(set: &ScattererSet, k: f64, l_max: usize, rhs: Vec<SphCoeffs>) -> Result<MultiSolution> {
    let mm = set.len();
    if rhs.len() != mm || rhs.iter().any(|c| c.l_max != l_max) {
        return Err(Error::Dimension("right-hand side does not match the scatterer set".into()));
    }
    let w = (l_max + 1) * (l_max + 1);
    let pairs: Vec<(usize, usize)> = (0..mm).flat_map(|j| (0..mm).filter(move |&i| i != j).map(move |i| (i, j))).collect();
    let tables = pairs
        .par_iter()
        .map(|&p| translation_table(set, p, k, l_max))
        .collect::<Result<Vec<_>>>()?;
    let dim = mm * w;
    let mut mat = Mat::<Complex64>::identity(dim, dim);
    for t in &tables {
        // row block: receiving sphere; column block: source sphere
        let (r0, c0) = (t.dst * w, t.src * w);
        let blk = t.block();
        for r in 0..w {
            for c in 0..w {
                mat[(r0 + r, c0 + c)] = blk[r * w + c];
            }
        }
    }
    let mut g = Mat::<Complex64>::zeros(dim, 1);
    for (i, c) in rhs.iter().enumerate() {
        for (r, v) in c.a.iter().enumerate() {
            g[(i * w + r, 0)] = *v;
        }
    }
    let x = mat.partial_piv_lu().solve(&g);
    if (0..dim).any(|r| !x[(r, 0)].is_finite()) {
        return Err(Error::Singular("coupled scattering matrix is singular".into()));
    }
    let res = &mat * &x - &g;
    let inf = |m: &Mat<Complex64>| (0..m.nrows()).map(|r| m[(r, 0)].norm()).fold(0.0, f64::max);
    let gn = inf(&g);
    let solve_residual = if gn > 0.0 { inf(&res) / gn } else { inf(&res) };
    let coeffs: Vec<SphCoeffs> = (0..mm)
        .map(|i| SphCoeffs { l_max, a: (0..w).map(|r| x[(i * w + r, 0)]).collect() })
        .collect();
    let parts = coeffs
        .iter()
        .zip(&set.items)
        .map(|(c, s)| AcousticSolution::from_coeffs(c.clone(), k, s.radius))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiSolution { set: set.clone(), k, l_max, coeffs, rhs, solve_residual, parts })
}

impl MultiSolution {
    /// Max over spheres and orders of |A_lm^i| at degree l.
    pub fn max_abs_at(&self, l: usize) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs_at(l)).fold(0.0, f64::max)
    }

    pub fn max_rhs_at(&self, l: usize) -> f64 {
        self.rhs.iter().map(|c| c.max_abs_at(l)).fold(0.0, f64::max)
    }

    /// Σ_i U_L^i at Cartesian points outside every sphere.
    pub fn eval_many(&self, pts: &[[f64; 3]]) -> Result<Vec<Complex64>> {
        for p in pts {
            for (i, s) in self.set.items.iter().enumerate() {
                if norm(sub(*p, s.center)) < s.radius * (1.0 - 1e-12) {
                    return domain(format!("point {p:?} inside scatterer {i}"));
                }
            }
        }
        let mut total = vec![Complex64::new(0.0, 0.0); pts.len()];
        for (part, s) in self.parts.iter().zip(&self.set.items) {
            let local: Vec<(f64, f64, f64)> = pts
                .iter()
                .map(|p| {
                    let (r, t, ph) = to_spherical(sub(*p, s.center));
                    (r.max(s.radius), t, ph)
                })
                .collect();
            for (t, v) in total.iter_mut().zip(part.eval_many(&local)?) {
                *t += v;
            }
        }
        Ok(total)
    }

    pub fn eval(&self, x: [f64; 3]) -> Result<Complex64> {
        Ok(self.eval_many(&[x])?[0])
    }

    /// sup |u − g_N| over the given local angles on each sphere.
    pub fn boundary_residual(&self, boundary: &[NodalScalarField], angles: &[(f64, f64)]) -> Result<Vec<f64>> {
        if boundary.len() != self.set.len() {
            return Err(Error::Dimension("one boundary field per scatterer expected".into()));
        }
        self.set
            .items
            .iter()
            .zip(boundary)
            .map(|(s, g)| {
                let pts: Vec<[f64; 3]> = angles
                    .iter()
                    .map(|&(t, ph)| {
                        let d = sphere_point(s.radius, t, ph);
                        [s.center[0] + d[0], s.center[1] + d[1], s.center[2] + d[2]]
                    })
                    .collect();
                let u = self.eval_many(&pts)?;
                Ok(u.iter()
                    .zip(angles)
                    .map(|(v, &(t, ph))| (v - g.eval(t, ph)).norm())
                    .fold(0.0, f64::max))
            })
            .collect()
    }
}

/// Sound-soft traces g = −u_inc on every sphere, sampled in each sphere's
/// local angles on the given partition.
pub fn sound_soft_data(set: &ScattererSet, incident: &Incident, partition: &Arc<SphPartition>) -> Vec<NodalScalarField> {
    set.items
        .iter()
        .map(|s| {
            sample_scalar(
                |t, ph| {
                    let d = sphere_point(s.radius, t, ph);
                    -incident.at([s.center[0] + d[0], s.center[1] + d[1], s.center[2] + d[2]])
                },
                partition,
            )
        })
        .collect()
}

pub fn eval_total_field(sol: &MultiSolution, x: [f64; 3]) -> Result<Complex64> {
    sol.eval(x)
}

/// Deterministic near-uniform points on the unit sphere (golden-angle
/// spiral), avoiding the poles and element seams of uniform partitions.
pub fn spiral_points(count: usize) -> Vec<(f64, f64)> {
    let ga = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let ph = (ga * i as f64).rem_euclid(2.0 * PI);
            (z.acos(), ph)
        })
        .collect()
}

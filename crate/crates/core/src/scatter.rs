//! Single-sphere exterior solvers: sound-soft acoustic and perfectly
//! conducting electromagnetic scattering, the DtN map, and the radial
//! two-point problem left after separating angles.

use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::{NodalScalarField, NodalVectorField};
use crate::radial::{RadialContext, RadialValues};
use crate::specfun::{
    gauss_legendre, hankel_log_array, hankel_log_derivative, legendre_p_all, plm_table, tri,
    AngularTable,
};
use crate::sphtrans::{lm_index, sph_forward, SphCoeffs};
use crate::vshtrans::{mode_parts, vsh_forward, VshCoeffs};

/// Σ_l Σ_m c_lm w_l Y_l^m(θ, φ).
fn synth_weighted(c: &[Complex64], w: &[Complex64], l_max: usize, th: f64, ph: f64) -> Complex64 {
    let (s, x) = th.sin_cos();
    let p = plm_table(l_max, x, s);
    let e: Vec<Complex64> = (0..=l_max).map(|m| Complex64::from_polar(1.0, m as f64 * ph)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..=l_max {
        let mut row = c[lm_index(l, 0)] * p[tri(l, 0)];
        for m in 1..=l {
            let neg = c[lm_index(l, -(m as i32))] * e[m].conj();
            let neg = if m % 2 == 1 { -neg } else { neg };
            row += (c[lm_index(l, m as i32)] * e[m] + neg) * p[tri(l, m)];
        }
        acc += row * w[l];
    }
    acc
}

/// Σ_l Σ_m {c0 w0 Y e_r + c1 w1 Ψ + c2 w2 Φ} in spherical components.
fn vsh_weighted(c: [&[Complex64]; 3], w: [&[Complex64]; 3], l_max: usize, th: f64, ph: f64) -> [Complex64; 3] {
    let tab = AngularTable::new(l_max, th);
    let im = Complex64::i();
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for l in 0..=l_max {
        for m in -(l as i32)..=(l as i32) {
            let idx = lm_index(l, m);
            let (p, dp, ps) = mode_parts(&tab, l, m);
            let e = Complex64::from_polar(1.0, m as f64 * ph);
            let a = c[0][idx] * w[0][l] * e;
            let b = c[1][idx] * w[1][l] * e;
            let d = c[2][idx] * w[2][l] * e;
            let imps = im * (m as f64 * ps);
            out[0] += a * p;
            out[1] += b * dp + d * imps;
            out[2] += b * imps - d * dp;
        }
    }
    out
}

fn check_points(b: f64, pts: &[(f64, f64, f64)]) -> Result<Vec<f64>> {
    pts.iter()
        .map(|&(r, _, _)| if r >= b { Ok(r) } else { domain(format!("radius {r} inside the sphere b={b}")) })
        .collect()
}

#[derive(Debug, Clone)]
pub struct AcousticSolution {
    pub k: f64,
    pub b: f64,
    pub coeffs: SphCoeffs,
    pub radial: RadialContext,
}

/// Expands the Dirichlet trace on r = b; u_L = Σ Û_l^m R_l(r) Y_l^m.
pub fn solve_acoustic_single(boundary: &NodalScalarField, k: f64, b: f64, l_max: usize) -> Result<AcousticSolution> {
    let coeffs = sph_forward(boundary, l_max)?;
    AcousticSolution::from_coeffs(coeffs, k, b)
}

impl AcousticSolution {
    pub fn from_coeffs(coeffs: SphCoeffs, k: f64, b: f64) -> Result<Self> {
        let radial = RadialContext::new(k, b, coeffs.l_max)?;
        Ok(Self { k, b, coeffs, radial })
    }

    pub fn eval(&self, r: f64, theta: f64, phi: f64) -> Result<Complex64> {
        Ok(self.eval_many(&[(r, theta, phi)])?[0])
    }

    /// Field at (r, θ, φ) points; the radial ratios for all points are
    /// computed in one sweep.
    pub fn eval_many(&self, pts: &[(f64, f64, f64)]) -> Result<Vec<Complex64>> {
        let radii = check_points(self.b, pts)?;
        let logs = self.radial.log_ratios_many(&radii)?;
        let l_max = self.coeffs.l_max;
        Ok(pts
            .par_iter()
            .zip(logs)
            .map(|(&(_, th, ph), lg)| {
                let w: Vec<Complex64> = lg.into_iter().map(|v| v.exp()).collect();
                synth_weighted(&self.coeffs.a, &w, l_max, th, ph)
            })
            .collect())
    }

    /// lim r e^{−ikr} u_L(r, θ, φ) = Σ Û (−i)^{l+1}/(k h_l(kb)) Y_l^m.
    /// Experimental: the pattern follows from the asymptotics of h_l only.
    pub fn far_field(&self, theta: f64, phi: f64) -> Complex64 {
        let l_max = self.coeffs.l_max;
        let lh = hankel_log_array(l_max, self.k * self.b);
        let w: Vec<Complex64> = lh
            .iter()
            .enumerate()
            .map(|(l, v)| crate::oscint::i_pow_neg(l + 1) * (-v).exp() / self.k)
            .collect();
        synth_weighted(&self.coeffs.a, &w, l_max, theta, phi)
    }
}

pub fn eval_acoustic(sol: &AcousticSolution, r: f64, theta: f64, phi: f64) -> Result<Complex64> {
    sol.eval(r, theta, phi)
}

/// Tangential trace coefficients (V, W) on the Ψ and Φ bases from a VSH
/// expansion. With Ψ = ∇_S Y and the 1/ϖ_l projection normalization these
/// are the ṽ^(1), ṽ^(2) families unchanged.
pub fn tangential_coeffs(v: &VshCoeffs) -> (Vec<Complex64>, Vec<Complex64>) {
    (v.t1.clone(), v.t2.clone())
}

#[derive(Debug, Clone)]
pub struct EmSolution {
    pub k: f64,
    pub b: f64,
    pub l_max: usize,
    pub v: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub radial: RadialContext,
}

/// Perfect-conductor scattering: the boundary field is the tangential trace
/// to cancel (spherical components on r = b; the radial part is ignored).
pub fn solve_em_single(boundary: &NodalVectorField, k: f64, b: f64, l_max: usize) -> Result<EmSolution> {
    let c = vsh_forward(boundary, l_max)?;
    EmSolution::from_vsh(&c, k, b)
}

impl EmSolution {
    pub fn from_vsh(c: &VshCoeffs, k: f64, b: f64) -> Result<Self> {
        let (v, w) = tangential_coeffs(c);
        let radial = RadialContext::new(k, b, c.l_max)?;
        Ok(Self { k, b, l_max: c.l_max, v, w, radial })
    }

    /// Max over m of (|V_l^m|, |W_l^m|).
    pub fn max_abs_at(&self, l: usize) -> (f64, f64) {
        let r = l * l..(l + 1) * (l + 1);
        let mx = |x: &[Complex64]| x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        (mx(&self.v[r.clone()]), mx(&self.w[r]))
    }

    fn fields_at(&self, rv: &RadialValues, th: f64, ph: f64) -> ([Complex64; 3], [Complex64; 3]) {
        let (k, b, r) = (self.k, self.b, rv.r);
        let ik = Complex64::new(0.0, k);
        let n = self.l_max + 1;
        let varpi = |l: usize| (l * (l + 1)) as f64;
        let mut er = Vec::with_capacity(n);
        let mut et = Vec::with_capacity(n);
        let mut hr = Vec::with_capacity(n);
        let mut ht = Vec::with_capacity(n);
        let mut hp = Vec::with_capacity(n);
        for l in 0..n {
            er.push(rv.breve[l] * (b * varpi(l) / r));
            et.push(rv.tilde[l] * (b / r));
            hr.push(rv.ratio[l] * varpi(l) / (ik * r));
            ht.push(rv.z_num[l] / (ik * r));
            hp.push(-rv.breve[l] * ik * b);
        }
        let e = vsh_weighted([&self.v, &self.v, &self.w], [&er, &et, &rv.ratio], self.l_max, th, ph);
        let h = vsh_weighted([&self.w, &self.w, &self.v], [&hr, &ht, &hp], self.l_max, th, ph);
        (e, h)
    }

    /// (E, H) in spherical components.
    pub fn eval(&self, r: f64, theta: f64, phi: f64) -> Result<([Complex64; 3], [Complex64; 3])> {
        Ok(self.eval_many(&[(r, theta, phi)])?[0])
    }

    pub fn eval_many(&self, pts: &[(f64, f64, f64)]) -> Result<Vec<([Complex64; 3], [Complex64; 3])>> {
        let radii = check_points(self.b, pts)?;
        let vals = self.radial.values_many(&radii)?;
        Ok(pts
            .par_iter()
            .zip(vals)
            .map(|(&(_, th, ph), rv)| self.fields_at(&rv, th, ph))
            .collect())
    }
}

pub fn eval_em(sol: &EmSolution, r: f64, theta: f64, phi: f64) -> Result<([Complex64; 3], [Complex64; 3])> {
    sol.eval(r, theta, phi)
}

/// Coefficients of T_b[u]: mode-wise multiplication by −k ρ_l(kb).
pub fn dtn_apply(coeffs: &SphCoeffs, k: f64, b: f64) -> SphCoeffs {
    let rho = hankel_log_derivative(coeffs.l_max, k * b);
    let mut out = coeffs.clone();
    for l in 0..=coeffs.l_max {
        let f = -k * rho[l];
        for v in &mut out.a[l * l..(l + 1) * (l + 1)] {
            *v *= f;
        }
    }
    out
}

/// Legendre–Galerkin solution of the radial two-point problem.
#[derive(Debug, Clone, Serialize)]
pub struct RadialBvpSolution {
    pub a: f64,
    pub b: f64,
    pub g: Complex64,
    /// Coefficients on P_j + P_{j+1}, j = 0..p−1.
    pub coeffs: Vec<Complex64>,
}

impl RadialBvpSolution {
    pub fn eval(&self, r: f64) -> Complex64 {
        let x = 2.0 * (r - self.a) / (self.b - self.a) - 1.0;
        let p = legendre_p_all(self.coeffs.len(), x);
        let mut u = self.g * (0.5 * (1.0 - x));
        for (j, c) in self.coeffs.iter().enumerate() {
            u += c * (p[j] + p[j + 1]);
        }
        u
    }
}

/// P_j(x) and P_j'(x) for j = 0..=n.
fn legendre_with_derivs(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let p = legendre_p_all(n, x);
    let mut d = vec![0.0; n + 1];
    for j in 1..=n {
        // P'_j = P'_{j-2} + (2j−1) P_{j−1}
        d[j] = (2 * j - 1) as f64 * p[j - 1] + if j >= 2 { d[j - 2] } else { 0.0 };
    }
    (p, d)
}

/// Solves (r²U′)′ + (k²r² − l(l+1))U = F on [a, b] with U(a) = G and
/// U′(b) − kρ_l(kb)U(b) = H, using degree-p polynomials.
#[allow(clippy::too_many_arguments)]
pub fn solve_radial_bvp<F>(l: usize, k: f64, a: f64, b: f64, f: F, g: Complex64, h: Complex64, p: usize) -> Result<RadialBvpSolution>
where
    F: Fn(f64) -> Complex64,
{
    if !(0.0 < a && a < b) || p == 0 {
        return domain(format!("need 0 < a < b and p ≥ 1, got a={a}, b={b}, p={p}"));
    }
    let rho = hankel_log_derivative(l, k * b)[l];
    let varpi = (l * (l + 1)) as f64;
    let hh = 0.5 * (b - a);
    let (xq, wq) = gauss_legendre(p + 8);
    let mut mat = Mat::<Complex64>::zeros(p, p);
    let mut rhs = Mat::<Complex64>::zeros(p, 1);
    // B(U, v) = −∫r²U′v′ + ∫(k²r² − ϖ)Uv + b²kρ U(b)v(b); the lift G(1−x)/2
    // moves to the right-hand side
    for (x, w) in xq.iter().zip(&wq) {
        let r = a + hh * (x + 1.0);
        let (pv, dv) = legendre_with_derivs(p, *x);
        let psi: Vec<f64> = (0..p).map(|j| pv[j] + pv[j + 1]).collect();
        let dpsi: Vec<f64> = (0..p).map(|j| (dv[j] + dv[j + 1]) / hh).collect();
        let stiff = r * r * w * hh;
        let mass = (k * k * r * r - varpi) * w * hh;
        let lift = 0.5 * (1.0 - x);
        let dlift = -0.5 / hh;
        let fr = f(r) * (w * hh);
        for i in 0..p {
            for j in 0..p {
                mat[(i, j)] += Complex64::from(-stiff * dpsi[j] * dpsi[i] + mass * psi[j] * psi[i]);
            }
            rhs[(i, 0)] += fr * psi[i] - g * (-stiff * dlift * dpsi[i] + mass * lift * psi[i]);
        }
    }
    // ψ_j(b) = P_j(1) + P_{j+1}(1) = 2, the lift vanishes at b
    let robin = b * b * k * rho * 4.0;
    for i in 0..p {
        for j in 0..p {
            mat[(i, j)] += robin;
        }
        rhs[(i, 0)] -= Complex64::from(b * b * 2.0) * h;
    }
    let sol = mat.partial_piv_lu().solve(&rhs);
    let coeffs: Vec<Complex64> = (0..p).map(|i| sol[(i, 0)]).collect();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Singular("radial Galerkin system is rank-deficient".into()));
    }
    Ok(RadialBvpSolution { a, b, g, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{em_test_field, sphere_point, PlaneWave, SphericalWave};
    use crate::grid::{
        build_uniform_partition, sample_scalar, sample_vector_cartesian, sample_vector_spherical,
        spherical_to_cartesian,
    };
    use crate::oracle::sph_hankel_ref;
    use crate::vshtrans::vsh_basis;

    fn h_deriv(l: usize, z: f64) -> Complex64 {
        if l == 0 {
            -sph_hankel_ref(1, z)
        } else {
            sph_hankel_ref(l - 1, z) - sph_hankel_ref(l, z) * ((l + 1) as f64 / z)
        }
    }

    #[test]
    fn zero_data_zero_field() {
        let p = build_uniform_partition(2, 2, 6).unwrap();
        let f = NodalScalarField::zeros(p);
        let s = solve_acoustic_single(&f, 3.0, 1.0, 6).unwrap();
        assert_eq!(s.eval(2.0, 0.3, 0.4).unwrap(), Complex64::new(0.0, 0.0));
        assert!(s.eval(0.5, 0.3, 0.4).is_err());
    }

    #[test]
    fn acoustic_matches_analytic_series() {
        let (k, b) = (6.0, 0.5);
        let pw = PlaneWave::new(k, [0.3, -0.5, 0.8]);
        let p = build_uniform_partition(3, 4, 24).unwrap();
        let f = sample_scalar(|t, ph| pw.on_sphere(b, t, ph), &p);
        let l_max = 24;
        let s = solve_acoustic_single(&f, k, b, l_max).unwrap();
        let exact = AcousticSolution::from_coeffs(SphCoeffs { l_max, a: pw.sph_exact(b, l_max) }, k, b).unwrap();
        for &(r, t, ph) in &[(1.0, 0.4, 1.0), (1.0, 2.5, 5.0), (b, 1.1, 0.2)] {
            let u = s.eval(r, t, ph).unwrap();
            let v = exact.eval(r, t, ph).unwrap();
            assert!((u - v).norm() < 1e-12, "{u} vs {v}");
        }
        // trace reproduces the data, and ratios bound the far field
        let u = s.eval(b, 1.1, 0.2).unwrap();
        assert!((u - pw.on_sphere(b, 1.1, 0.2)).norm() < 1e-12);
        let total: f64 = s.coeffs.a.iter().map(|v| v.norm()).sum();
        let far = s.eval(100.0 * b, 0.7, 2.0).unwrap();
        assert!(far.norm() <= total / 100.0);
    }

    #[test]
    fn acoustic_idempotent_projection() {
        let (k, b) = (4.0, 1.0);
        let src = SphericalWave { k, source: [0.0, 2.0, 1.0] };
        let p = build_uniform_partition(2, 4, 26).unwrap();
        let f = sample_scalar(|t, ph| src.on_sphere(b, t, ph), &p);
        let s = solve_acoustic_single(&f, k, b, 12).unwrap();
        let g = sample_scalar(|t, ph| s.eval(b, t, ph).unwrap(), &p);
        let s2 = solve_acoustic_single(&g, k, b, 12).unwrap();
        let d = s.coeffs.max_error(|l, m| s2.coeffs.get(l, m));
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn far_field_limit() {
        let (k, b) = (3.0, 1.0);
        let pw = PlaneWave::new(k, [0.0, 0.0, 1.0]);
        let s = AcousticSolution::from_coeffs(SphCoeffs { l_max: 20, a: pw.sph_exact(b, 20) }, k, b).unwrap();
        let r = 2.0e4;
        let u = s.eval(r, 0.8, 0.3).unwrap() * Complex64::from_polar(r, -k * r);
        let f = s.far_field(0.8, 0.3);
        assert!((u - f).norm() < 1e-3 * f.norm());
    }

    #[test]
    fn dtn_examples() {
        let mut c = SphCoeffs::zeros(10);
        c.set(0, 0, Complex64::new(1.0, 0.0));
        c.set(10, 3, Complex64::new(1.0, 0.0));
        let (k, b) = (30.0, 0.4);
        let t = dtn_apply(&c, k, b);
        assert!((t.get(0, 0) - Complex64::new(1.0 / b, -k)).norm() < 1e-12);
        let z = k * b;
        let direct = -k * h_deriv(10, z) / sph_hankel_ref(10, z);
        assert!((t.get(10, 3) - direct).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn radial_bvp_outgoing() {
        let (l, k, a, b) = (3usize, 10.0, 0.5, 1.0);
        let s = solve_radial_bvp(l, k, a, b, |_| Complex64::new(0.0, 0.0), sph_hankel_ref(l, k * a), Complex64::new(0.0, 0.0), 40).unwrap();
        for &r in &[0.5, 0.63, 0.8, 1.0] {
            let e = sph_hankel_ref(l, k * r);
            assert!((s.eval(r) - e).norm() < 1e-10 * e.norm().max(1.0), "r={r}");
        }
    }

    fn manufactured(l: usize, k: f64, a: f64, b: f64, p: usize) -> f64 {
        let u = |r: f64| Complex64::from((k * r).sin() / r);
        let du = |r: f64| k * (k * r).cos() / r - (k * r).sin() / (r * r);
        let varpi = (l * (l + 1)) as f64;
        let rho = hankel_log_derivative(l, k * b)[l];
        let h = du(b) - k * rho * u(b);
        let s = solve_radial_bvp(l, k, a, b, |r| Complex64::from(-varpi * (k * r).sin() / r), u(a), h, p).unwrap();
        (0..=50)
            .map(|i| {
                let r = a + (b - a) * i as f64 / 50.0;
                (s.eval(r) - u(r)).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn radial_bvp_manufactured_and_p_refinement() {
        assert!(manufactured(2, 8.0, 0.5, 1.5, 40) < 1e-10);
        let errs: Vec<f64> = [6, 10, 14, 18].iter().map(|&p| manufactured(2, 8.0, 0.5, 1.5, p)).collect();
        for w in errs.windows(2) {
            assert!(w[1] < 0.1 * w[0], "{errs:?}");
        }
    }

    #[test]
    fn single_phi_mode_channel() {
        let (k, b) = (5.0, 0.7);
        let p = build_uniform_partition(2, 2, 12).unwrap();
        let f = sample_vector_spherical(|t, ph| vsh_basis(1, 0, t, ph)[2], &p);
        let s = solve_em_single(&f, k, b, 6).unwrap();
        let r = 1.9;
        let r1 = s.radial.outgoing_ratio(1, r).unwrap();
        let (e, _) = s.eval(r, 1.2, 0.4).unwrap();
        let want = vsh_basis(1, 0, 1.2, 0.4)[2];
        for c in 0..3 {
            assert!((e[c] - want[c] * r1).norm() < 1e-12, "{c}");
        }
    }

    #[test]
    fn adapter_single_psi_mode() {
        let p = build_uniform_partition(2, 4, 14).unwrap();
        let f = sample_vector_spherical(|t, ph| vsh_basis(3, -2, t, ph)[1], &p);
        let (v, w) = tangential_coeffs(&vsh_forward(&f, 6).unwrap());
        for (i, (a, b)) in v.iter().zip(&w).enumerate() {
            let want = if i == lm_index(3, -2) { 1.0 } else { 0.0 };
            assert!((a - want).norm() < 1e-12 && b.norm() < 1e-12, "{i}");
        }
    }

    #[test]
    fn em_boundary_trace() {
        let (k, b) = (4.0, 0.5);
        let p = build_uniform_partition(3, 4, 20).unwrap();
        let f = sample_vector_cartesian(|t, ph| em_test_field(k, sphere_point(b, t, ph)), &p);
        let s = solve_em_single(&f, k, b, 22).unwrap();
        for &(t, ph) in &[(0.3, 0.1), (1.4, 2.9), (2.8, 5.5), (1e-3, 1.0)] {
            let (e, _) = s.eval(b, t, ph).unwrap();
            let want = f.eval(t, ph);
            assert!((e[1] - want[1]).norm() < 1e-11 && (e[2] - want[2]).norm() < 1e-11, "({t},{ph})");
        }
    }

    fn to_cart(x: [f64; 3]) -> (f64, f64, f64) {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        (r, (x[2] / r).acos(), x[1].atan2(x[0]))
    }

    #[test]
    fn maxwell_curl_finite_difference() {
        let (k, b) = (5.0, 0.6);
        let p = build_uniform_partition(2, 4, 16).unwrap();
        let f = sample_vector_cartesian(|t, ph| em_test_field(k, sphere_point(b, t, ph)), &p);
        let s = solve_em_single(&f, k, b, 14).unwrap();
        let cart_e = |x: [f64; 3]| {
            let (r, t, ph) = to_cart(x);
            spherical_to_cartesian(t, ph, s.eval(r, t, ph).unwrap().0)
        };
        let x0 = sphere_point(1.7 * b, 1.0, 0.7);
        let h = 1e-4;
        let mut jac = [[Complex64::new(0.0, 0.0); 3]; 3];
        for d in 0..3 {
            let mut xp = x0;
            let mut xm = x0;
            xp[d] += h;
            xm[d] -= h;
            let (ep, em) = (cart_e(xp), cart_e(xm));
            for c in 0..3 {
                jac[c][d] = (ep[c] - em[c]) / (2.0 * h);
            }
        }
        let curl = [jac[2][1] - jac[1][2], jac[0][2] - jac[2][0], jac[1][0] - jac[0][1]];
        let (r, t, ph) = to_cart(x0);
        let hc = spherical_to_cartesian(t, ph, s.eval(r, t, ph).unwrap().1);
        let ik = Complex64::new(0.0, k);
        let scale = hc.iter().map(|v| (ik * v).norm()).fold(0.0, f64::max);
        for c in 0..3 {
            assert!((curl[c] - ik * hc[c]).norm() < 1e-6 * scale, "{c}: {} vs {}", curl[c], ik * hc[c]);
        }
    }
}

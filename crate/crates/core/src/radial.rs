//! Outgoing radial ratios R_l(r) = h_l(kr)/h_l(kb) and the derived
//! Z-ratios, evaluated from the log-derivative ρ_l so that no Hankel value
//! is ever formed.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::specfun::{gauss_legendre, hankel_log_derivative};

const NODES: usize = 16;

/// R_l, R̃_l and R̆_l for every l ≤ l_max at one radius.
#[derive(Debug, Clone)]
pub struct RadialValues {
    pub r: f64,
    pub ratio: Vec<Complex64>,
    /// R_l + rR_l′ = Z_l(kr)/h_l(kb)
    pub z_num: Vec<Complex64>,
    pub tilde: Vec<Complex64>,
    pub breve: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct RadialContext {
    pub k: f64,
    pub b: f64,
    pub l_max: usize,
    pub rho_at_b: Vec<Complex64>,
    refine: usize,
    gl: (Vec<f64>, Vec<f64>),
}

impl RadialContext {
    pub fn new(k: f64, b: f64, l_max: usize) -> Result<Self> {
        if !(k > 0.0 && b > 0.0) {
            return domain(format!("need k > 0 and b > 0, got k={k}, b={b}"));
        }
        Ok(Self {
            k,
            b,
            l_max,
            rho_at_b: hankel_log_derivative(l_max, k * b),
            refine: 1,
            gl: gauss_legendre(NODES),
        })
    }

    /// Splits every panel into `f` pieces (quadrature convergence checks).
    pub fn refined(mut self, f: usize) -> Self {
        self.refine = f.max(1);
        self
    }

    /// Panel step from ξ: at most a quarter wavelength, at most 1/k (the
    /// nearest complex zero of h_1 sits one unit below the real z axis), and
    /// at most ξ/2 to stay clear of the 1/z singularity at the origin.
    fn step(&self, xi: f64) -> f64 {
        let q = (std::f64::consts::FRAC_PI_2 / self.k).min(1.0 / self.k);
        q.min(0.5 * xi) / self.refine as f64
    }

    /// Panel breakpoints b = ξ_0 < ξ_1 < ... covering [b, r_max].
    fn grid(&self, r_max: f64) -> Vec<f64> {
        let mut g = vec![self.b];
        let mut x = self.b;
        while x < r_max {
            x += self.step(x);
            g.push(x);
        }
        g
    }

    /// k ∫_lo^hi ρ_l(kξ) dξ for all l, one 16-node panel.
    fn panel(&self, lo: f64, hi: f64, acc: &mut [Complex64]) {
        let (x, w) = &self.gl;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (xi, wi) in x.iter().zip(w) {
            let rho = hankel_log_derivative(self.l_max, self.k * (mid + half * xi));
            let s = wi * half * self.k;
            for (a, r) in acc.iter_mut().zip(&rho) {
                *a += r * s;
            }
        }
    }

    fn check(&self, r: f64) -> Result<()> {
        if !(r >= self.b) {
            return domain(format!("radius {r} is inside the sphere b={}", self.b));
        }
        Ok(())
    }

    /// ln R_l(r) for all l ≤ l_max.
    pub fn log_ratios(&self, r: f64) -> Result<Vec<Complex64>> {
        Ok(self.log_ratios_many(&[r])?.pop().expect("one radius"))
    }

    /// ln R_l at several radii; the integral is accumulated once along a
    /// shared panel grid and each radius adds one partial panel.
    pub fn log_ratios_many(&self, radii: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        for &r in radii {
            self.check(r)?;
        }
        let r_max = radii.iter().cloned().fold(self.b, f64::max);
        let grid = self.grid(r_max);
        let n = self.l_max + 1;
        let pieces: Vec<Vec<Complex64>> = grid
            .par_windows(2)
            .map(|w| {
                let mut acc = vec![Complex64::new(0.0, 0.0); n];
                self.panel(w[0], w[1], &mut acc);
                acc
            })
            .collect();
        // Neumaier-compensated prefix sums: the phase grows like k(r - b)
        // and plain accumulation over hundreds of panels loses digits
        let zero = Complex64::new(0.0, 0.0);
        let mut sum = vec![zero; n];
        let mut comp = vec![zero; n];
        let mut cum = Vec::with_capacity(grid.len());
        cum.push(sum.clone());
        for p in &pieces {
            for ((s, c), x) in sum.iter_mut().zip(comp.iter_mut()).zip(p) {
                *s = neumaier(*s, *x, c);
            }
            cum.push(sum.iter().zip(&comp).map(|(s, c)| s + c).collect::<Vec<_>>());
        }
        Ok(radii
            .par_iter()
            .map(|&r| {
                let i = grid.partition_point(|&g| g <= r) - 1;
                let mut acc = cum[i].clone();
                if r > grid[i] {
                    self.panel(grid[i], r, &mut acc);
                }
                acc
            })
            .collect())
    }

    /// R_l(r) = exp(k ∫_b^r ρ_l(kξ) dξ), for all l ≤ l_max.
    pub fn ratios(&self, r: f64) -> Result<Vec<Complex64>> {
        Ok(self.log_ratios(r)?.into_iter().map(|v| v.exp()).collect())
    }

    pub fn outgoing_ratio(&self, l: usize, r: f64) -> Result<Complex64> {
        if l > self.l_max {
            return domain(format!("order {l} above context l_max {}", self.l_max));
        }
        Ok(self.ratios(r)?[l])
    }

    fn denominators(&self) -> Result<Vec<Complex64>> {
        let kb = self.k * self.b;
        self.rho_at_b
            .iter()
            .enumerate()
            .map(|(l, rho)| {
                let d = 1.0 + kb * rho;
                if d.norm() < 1e-300 {
                    Err(Error::Pole(format!("Z_{l}(kb) vanishes at kb = {kb}")))
                } else {
                    Ok(d)
                }
            })
            .collect()
    }

    fn values_from_logs(&self, r: f64, logs: Vec<Complex64>, den: &[Complex64]) -> RadialValues {
        let rho = hankel_log_derivative(self.l_max, self.k * r);
        let ratio: Vec<Complex64> = logs.into_iter().map(|v| v.exp()).collect();
        let kr = self.k * r;
        let z_num: Vec<Complex64> = ratio.iter().zip(&rho).map(|(rl, p)| rl * (1.0 + kr * p)).collect();
        let tilde = z_num.iter().zip(den).map(|(z, d)| z / d).collect();
        let breve = ratio.iter().zip(den).map(|(rl, d)| rl / d).collect();
        RadialValues { r, ratio, z_num, tilde, breve }
    }

    /// All three ratio families at one radius.
    pub fn values(&self, r: f64) -> Result<RadialValues> {
        Ok(self.values_many(&[r])?.pop().expect("one radius"))
    }

    pub fn values_many(&self, radii: &[f64]) -> Result<Vec<RadialValues>> {
        let den = self.denominators()?;
        let logs = self.log_ratios_many(radii)?;
        Ok(radii
            .par_iter()
            .zip(logs)
            .map(|(&r, lg)| self.values_from_logs(r, lg, &den))
            .collect())
    }

    /// (R̃_l(r), R̆_l(r)).
    pub fn z_ratios(&self, l: usize, r: f64) -> Result<(Complex64, Complex64)> {
        if l > self.l_max {
            return domain(format!("order {l} above context l_max {}", self.l_max));
        }
        let v = self.values(r)?;
        Ok((v.tilde[l], v.breve[l]))
    }
}

fn two_sum(a: f64, b: f64, c: &mut f64) -> f64 {
    let t = a + b;
    *c += if a.abs() >= b.abs() { (a - t) + b } else { (b - t) + a };
    t
}

fn neumaier(a: Complex64, b: Complex64, c: &mut Complex64) -> Complex64 {
    Complex64::new(two_sum(a.re, b.re, &mut c.re), two_sum(a.im, b.im, &mut c.im))
}

pub fn outgoing_ratio(ctx: &RadialContext, l: usize, r: f64) -> Result<Complex64> {
    ctx.outgoing_ratio(l, r)
}

pub fn z_ratios(ctx: &RadialContext, l: usize, r: f64) -> Result<(Complex64, Complex64)> {
    ctx.z_ratios(l, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::sph_hankel_ref;

    fn hp(l: usize, z: f64) -> Complex64 {
        // h_l' = h_{l-1} - (l+1)/z h_l, h_0' = -h_1
        if l == 0 {
            -sph_hankel_ref(1, z)
        } else {
            sph_hankel_ref(l - 1, z) - sph_hankel_ref(l, z) * ((l + 1) as f64 / z)
        }
    }

    #[test]
    fn unit_at_surface() {
        let c = RadialContext::new(7.0, 0.3, 40).unwrap();
        for v in c.ratios(0.3).unwrap() {
            assert_eq!(v, Complex64::new(1.0, 0.0));
        }
        assert!(matches!(c.ratios(0.29), Err(Error::Domain(_))));
    }

    #[test]
    fn order_zero_closed_form() {
        let c = RadialContext::new(1.0, 1.0, 3).unwrap();
        let r = c.outgoing_ratio(0, 2.0).unwrap();
        assert!((r - Complex64::new(0.2701512, 0.4207355)).norm() < 1e-7);
        assert!((r - Complex64::from_polar(0.5, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn matches_direct_quotients() {
        let c = RadialContext::new(10.0, 1.0, 5).unwrap();
        let r = c.outgoing_ratio(5, 1.5).unwrap();
        let d = sph_hankel_ref(5, 15.0) / sph_hankel_ref(5, 10.0);
        assert!((r - d).norm() < 1e-12 * d.norm());
        for &(k, b, r) in &[(3.0, 0.5, 4.0), (25.0, 0.25, 0.6), (1.0, 2.0, 9.0), (40.0, 0.25, 10.0)] {
            let c = RadialContext::new(k, b, 20).unwrap();
            let v = c.ratios(r).unwrap();
            for (l, vl) in v.iter().enumerate() {
                let d = sph_hankel_ref(l, k * r) / sph_hankel_ref(l, k * b);
                assert!((vl - d).norm() < 1e-12 * d.norm(), "k={k} l={l}: {vl} vs {d}");
            }
        }
    }

    #[test]
    fn z_ratio_examples() {
        let c = RadialContext::new(1.0, 1.0, 0).unwrap();
        let (t, br) = c.z_ratios(0, 1.0).unwrap();
        assert!((br - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((t - 1.0).norm() < 1e-15);
        let (k, b, r) = (25.0, 0.25, 0.6);
        let c = RadialContext::new(k, b, 8).unwrap();
        let (t, br) = c.z_ratios(8, r).unwrap();
        let zf = |z: f64| sph_hankel_ref(8, z) + z * hp(8, z);
        let t_ref = zf(k * r) / zf(k * b);
        let b_ref = sph_hankel_ref(8, k * r) / zf(k * b);
        assert!((t - t_ref).norm() < 1e-11 * t_ref.norm());
        assert!((br - b_ref).norm() < 1e-11 * b_ref.norm());
        let (t, br) = c.z_ratios(3, b).unwrap();
        assert!((t - 1.0).norm() < 1e-14);
        assert!((br - 1.0 / (1.0 + k * b * c.rho_at_b[3])).norm() < 1e-15);
    }

    #[test]
    fn bounded_and_monotone() {
        let b = 0.25;
        for &k in &[0.5, 4.0, 40.0] {
            let c = RadialContext::new(k, b, 300).unwrap();
            let radii: Vec<f64> = (0..=60).map(|i| b * 100f64.powf(i as f64 / 60.0)).collect();
            let vals = c.log_ratios_many(&radii).unwrap();
            for l in 0..=300 {
                let mut prev = f64::INFINITY;
                for v in &vals {
                    let m = v[l].re;
                    assert!(m <= 1e-14, "k={k} l={l}: ln|R| = {m}");
                    assert!(m <= prev + 1e-13, "k={k} l={l}");
                    prev = m;
                }
            }
        }
    }

    #[test]
    fn ode_residual() {
        let (k, b) = (12.0, 0.5);
        let c = RadialContext::new(k, b, 30).unwrap();
        let h = 1e-6;
        for &r in &[0.7, 1.3, 3.1] {
            let p = c.ratios(r + h).unwrap();
            let m = c.ratios(r - h).unwrap();
            let v = c.ratios(r).unwrap();
            let rho = hankel_log_derivative(30, k * r);
            for l in [0usize, 5, 12, 30] {
                let d = (p[l] - m[l]) / (2.0 * h);
                let res = d - k * rho[l] * v[l];
                assert!(res.norm() < 1e-6 * (k * rho[l] * v[l]).norm(), "r={r} l={l}");
            }
        }
    }

    #[test]
    fn panel_doubling_converged() {
        let c = RadialContext::new(30.0, 0.2, 60).unwrap();
        let c2 = c.clone().refined(2);
        for &r in &[0.21, 0.9, 5.0] {
            let a = c.ratios(r).unwrap();
            let b = c2.ratios(r).unwrap();
            for l in [0usize, 1, 6, 30, 60] {
                assert!((a[l] - b[l]).norm() < 1e-13 * b[l].norm(), "r={r} l={l}");
            }
        }
    }

    #[test]
    fn batched_matches_single() {
        let c = RadialContext::new(9.0, 0.4, 12).unwrap();
        let radii = [2.0, 0.4, 0.9, 1.7];
        let many = c.values_many(&radii).unwrap();
        for (r, v) in radii.iter().zip(&many) {
            let one = c.values(*r).unwrap();
            assert_eq!(one.ratio, v.ratio);
            assert_eq!(one.tilde, v.tilde);
        }
    }
}

//! Analytic incident fields and their exact harmonic expansions on a sphere
//! of radius R, used as transform and solver test data.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::specfun::{normalized_assoc_legendre, sph_bessel_j_with_deriv};

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

#[inline]
pub fn sphere_point(r: f64, theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [r * st * cp, r * st * sp, r * ct]
}

fn direction_angles(v: [f64; 3]) -> (f64, f64) {
    let u = unit(v);
    (u[2].clamp(-1.0, 1.0).acos(), u[1].atan2(u[0]))
}

#[inline]
fn i_pow(l: usize) -> Complex64 {
    match l % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// e^{ik k̂·x}; k̂ need not be normalized.
#[derive(Debug, Clone, Copy)]
pub struct PlaneWave {
    pub k: f64,
    pub dir: [f64; 3],
}

impl PlaneWave {
    pub fn new(k: f64, dir: [f64; 3]) -> Self {
        Self { k, dir: unit(dir) }
    }

    pub fn at(&self, x: [f64; 3]) -> Complex64 {
        let d = &self.dir;
        Complex64::from_polar(1.0, self.k * (d[0] * x[0] + d[1] * x[1] + d[2] * x[2]))
    }

    pub fn on_sphere(&self, r: f64, theta: f64, phi: f64) -> Complex64 {
        self.at(sphere_point(r, theta, phi))
    }

    /// ∇u + ∇u × e_r at radius r in spherical components (r, θ, φ).
    pub fn vsh_test_field(&self, r: f64, theta: f64, phi: f64) -> [Complex64; 3] {
        let x = sphere_point(r, theta, phi);
        let u = self.at(x);
        let d = self.dir;
        let er = [x[0] / r, x[1] / r, x[2] / r];
        let cr = [
            d[1] * er[2] - d[2] * er[1],
            d[2] * er[0] - d[0] * er[2],
            d[0] * er[1] - d[1] * er[0],
        ];
        let ik = Complex64::new(0.0, self.k) * u;
        let cart = [ik * (d[0] + cr[0]), ik * (d[1] + cr[1]), ik * (d[2] + cr[2])];
        crate::grid::cartesian_to_spherical(theta, phi, cart)
    }

    /// Per-degree factors 4π i^l for the expansion on radius r, together
    /// with j_l(kr) and j_l'(kr).
    fn radial_parts(&self, r: f64, l_max: usize) -> (Vec<f64>, Vec<f64>) {
        sph_bessel_j_with_deriv(l_max, self.k * r)
    }

    /// a_l^m = 4π i^l j_l(kR) conj(Y_l^m(k̂)) for all l ≤ l_max, at l² + l + m.
    pub fn sph_exact(&self, r: f64, l_max: usize) -> Vec<Complex64> {
        let (j, _) = self.radial_parts(r, l_max);
        let (th, ph) = direction_angles(self.dir);
        let mut out = vec![Complex64::new(0.0, 0.0); (l_max + 1) * (l_max + 1)];
        for l in 0..=l_max {
            let pre = i_pow(l) * (4.0 * PI * j[l]);
            for m in -(l as i32)..=(l as i32) {
                out[(l * l + l).wrapping_add_signed(m as isize)] = pre * ylm_conj(l, m, th, ph);
            }
        }
        out
    }

    /// Exact (v^r, v^(1), v^(2)) of `vsh_test_field`:
    /// 4π i^l conj(Y_l^m(k̂)) {k j_l'(kR), j_l(kR)/R, j_l(kR)/R}, tangential
    /// parts zero at l = 0.
    pub fn vsh_exact(&self, r: f64, l_max: usize) -> [Vec<Complex64>; 3] {
        let (j, dj) = self.radial_parts(r, l_max);
        let (th, ph) = direction_angles(self.dir);
        let len = (l_max + 1) * (l_max + 1);
        let zero = Complex64::new(0.0, 0.0);
        let mut out = [vec![zero; len], vec![zero; len], vec![zero; len]];
        for l in 0..=l_max {
            let pre = i_pow(l) * (4.0 * PI);
            for m in -(l as i32)..=(l as i32) {
                let idx = (l * l + l).wrapping_add_signed(m as isize);
                let y = pre * ylm_conj(l, m, th, ph);
                out[0][idx] = y * (self.k * dj[l]);
                if l > 0 {
                    out[1][idx] = y * (j[l] / r);
                    out[2][idx] = y * (j[l] / r);
                }
            }
        }
        out
    }
}

fn ylm_conj(l: usize, m: i32, theta: f64, phi: f64) -> Complex64 {
    let p = normalized_assoc_legendre(l, m, theta.cos()).expect("|cos| ≤ 1");
    Complex64::from_polar(p, -(m as f64) * phi)
}

/// e^{ik|x - x₀|}
#[derive(Debug, Clone, Copy)]
pub struct SphericalWave {
    pub k: f64,
    pub source: [f64; 3],
}

impl SphericalWave {
    pub fn at(&self, x: [f64; 3]) -> Complex64 {
        let d = [x[0] - self.source[0], x[1] - self.source[1], x[2] - self.source[2]];
        Complex64::from_polar(1.0, self.k * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt())
    }

    pub fn on_sphere(&self, r: f64, theta: f64, phi: f64) -> Complex64 {
        self.at(sphere_point(r, theta, phi))
    }
}

/// Incident field definition shared by the scatterer drivers.
#[derive(Debug, Clone, Copy)]
pub enum Incident {
    Plane(PlaneWave),
    Spherical(SphericalWave),
}

impl Incident {
    pub fn at(&self, x: [f64; 3]) -> Complex64 {
        match self {
            Self::Plane(p) => p.at(x),
            Self::Spherical(s) => s.at(x),
        }
    }
}

/// Electric field (e^{ikz}, e^{ikz}, 0) in Cartesian components.
pub fn em_test_field(k: f64, x: [f64; 3]) -> [Complex64; 3] {
    let e = Complex64::from_polar(1.0, k * x[2]);
    [e, e, Complex64::new(0.0, 0.0)]
}

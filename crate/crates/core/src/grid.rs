//! θ-φ rectangle partitions of the sphere, affine element maps and nodal
//! fields on mapped LGL grids.
//!
//! Index convention used everywhere: within an element, node (i, j) sits at
//! reference coordinates (ξ_i, η_j) with ξ ↦ φ and η ↦ θ. Values are stored
//! element-major, then i-major: `values[e*(N+1)² + i*(N+1) + j]`.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::lgl::barycentric_weights;
use crate::specfun::{lgl_basis_table, LegendreCoeffTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    /// Row (θ) and column (φ) position in the tensor partition.
    pub s: usize,
    pub t: usize,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub phi_lo: f64,
    pub phi_hi: f64,
    pub theta_half: f64,
    pub theta_mid: f64,
    pub phi_half: f64,
    pub phi_mid: f64,
}

impl Element {
    pub fn new(s: usize, t: usize, th: (f64, f64), ph: (f64, f64)) -> Self {
        Self {
            s,
            t,
            theta_lo: th.0,
            theta_hi: th.1,
            phi_lo: ph.0,
            phi_hi: ph.1,
            theta_half: 0.5 * (th.1 - th.0),
            theta_mid: 0.5 * (th.1 + th.0),
            phi_half: 0.5 * (ph.1 - ph.0),
            phi_mid: 0.5 * (ph.1 + ph.0),
        }
    }

    /// F_e(η, ξ) = (θ̂η + α, φ̂ξ + β).
    #[inline]
    pub fn map(&self, eta: f64, xi: f64) -> (f64, f64) {
        (
            self.theta_half * eta + self.theta_mid,
            self.phi_half * xi + self.phi_mid,
        )
    }

    #[inline]
    pub fn inverse(&self, theta: f64, phi: f64) -> (f64, f64) {
        (
            (theta - self.theta_mid) / self.theta_half,
            (phi - self.phi_mid) / self.phi_half,
        )
    }
}

#[derive(Debug)]
pub struct SphPartition {
    pub theta_breaks: Vec<f64>,
    pub phi_breaks: Vec<f64>,
    pub n: usize,
    pub elements: Vec<Element>,
    pub basis: LegendreCoeffTable,
    bary: Vec<f64>,
}

fn check_breaks(b: &[f64], hi: f64, name: &str) -> Result<()> {
    if b.len() < 2 {
        return Err(Error::InvalidBreaks(format!("{name}: need at least two breakpoints")));
    }
    if (b[0]).abs() > 1e-12 || (b[b.len() - 1] - hi).abs() > 1e-12 {
        return Err(Error::InvalidBreaks(format!(
            "{name}: breakpoints must run from 0 to {hi}"
        )));
    }
    if b.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidBreaks(format!(
            "{name}: breakpoints must be strictly increasing"
        )));
    }
    Ok(())
}

impl SphPartition {
    pub fn uniform(n_theta: usize, m_phi: usize, n: usize) -> Result<Arc<Self>> {
        if n_theta == 0 || m_phi == 0 {
            return Err(Error::InvalidBreaks("element counts must be positive".into()));
        }
        let tb: Vec<f64> = (0..=n_theta)
            .map(|s| if s == n_theta { PI } else { s as f64 * PI / n_theta as f64 })
            .collect();
        let pb: Vec<f64> = (0..=m_phi)
            .map(|t| {
                if t == m_phi {
                    2.0 * PI
                } else {
                    2.0 * PI * t as f64 / m_phi as f64
                }
            })
            .collect();
        Self::custom(tb, pb, n)
    }

    pub fn custom(theta_breaks: Vec<f64>, phi_breaks: Vec<f64>, n: usize) -> Result<Arc<Self>> {
        check_breaks(&theta_breaks, PI, "theta")?;
        check_breaks(&phi_breaks, 2.0 * PI, "phi")?;
        let basis = lgl_basis_table(n)?;
        let mut elements = Vec::new();
        for s in 0..theta_breaks.len() - 1 {
            for t in 0..phi_breaks.len() - 1 {
                elements.push(Element::new(
                    s,
                    t,
                    (theta_breaks[s], theta_breaks[s + 1]),
                    (phi_breaks[t], phi_breaks[t + 1]),
                ));
            }
        }
        let bary = barycentric_weights(&basis.nodes);
        Ok(Arc::new(Self {
            theta_breaks,
            phi_breaks,
            n,
            elements,
            basis,
            bary,
        }))
    }

    pub fn n_theta(&self) -> usize {
        self.theta_breaks.len() - 1
    }

    pub fn m_phi(&self) -> usize {
        self.phi_breaks.len() - 1
    }

    pub fn nodes_per_element(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    /// Σ_e (2θ̂)(2φ̂); equals 2π² for a tiling.
    pub fn measure(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| 4.0 * e.theta_half * e.phi_half)
            .sum()
    }

    /// Sphere coordinates (θ, φ) of node (i, j) of element e.
    #[inline]
    pub fn node(&self, e: usize, i: usize, j: usize) -> (f64, f64) {
        let el = &self.elements[e];
        el.map(self.basis.nodes[j], self.basis.nodes[i])
    }

    /// Element containing (θ, φ); φ is wrapped into [0, 2π).
    pub fn locate(&self, theta: f64, phi: f64) -> (usize, f64, f64) {
        let phi = phi.rem_euclid(2.0 * PI);
        let s = interval_index(&self.theta_breaks, theta);
        let t = interval_index(&self.phi_breaks, phi);
        (s * self.m_phi() + t, theta, phi)
    }

    fn lagrange(&self, x: f64, out: &mut [f64]) {
        let nodes = &self.basis.nodes;
        for (i, &xi) in nodes.iter().enumerate() {
            if x == xi {
                out.iter_mut().for_each(|o| *o = 0.0);
                out[i] = 1.0;
                return;
            }
        }
        let mut den = 0.0;
        for i in 0..nodes.len() {
            let t = self.bary[i] / (x - nodes[i]);
            out[i] = t;
            den += t;
        }
        out.iter_mut().for_each(|o| *o /= den);
    }
}

fn interval_index(breaks: &[f64], x: f64) -> usize {
    let n = breaks.len() - 1;
    let p = breaks.partition_point(|&b| b <= x);
    p.clamp(1, n) - 1
}

pub fn build_uniform_partition(n_theta: usize, m_phi: usize, n: usize) -> Result<Arc<SphPartition>> {
    SphPartition::uniform(n_theta, m_phi, n)
}

pub fn build_custom_partition(
    theta_breaks: &[f64],
    phi_breaks: &[f64],
    n: usize,
) -> Result<Arc<SphPartition>> {
    SphPartition::custom(theta_breaks.to_vec(), phi_breaks.to_vec(), n)
}

#[derive(Debug, Clone)]
pub struct NodalScalarField {
    pub partition: Arc<SphPartition>,
    pub values: Vec<Complex64>,
}

impl NodalScalarField {
    pub fn zeros(partition: Arc<SphPartition>) -> Self {
        let len = partition.elements.len() * partition.nodes_per_element();
        Self {
            partition,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    #[inline]
    pub fn element_values(&self, e: usize) -> &[Complex64] {
        let np = self.partition.nodes_per_element();
        &self.values[e * np..(e + 1) * np]
    }

    pub fn eval(&self, theta: f64, phi: f64) -> Complex64 {
        eval_nodal_field(self, theta, phi)
    }

    pub fn scaled(mut self, a: Complex64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= a);
        self
    }

    /// Combination a·self + b·other on the same partition.
    pub fn axpby(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if !Arc::ptr_eq(&self.partition, &other.partition) && self.values.len() != other.values.len()
        {
            return Err(Error::Dimension("fields on different partitions".into()));
        }
        Ok(Self {
            partition: self.partition.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }
}

/// Spherical components (v_r, v_θ, v_φ).
#[derive(Debug, Clone)]
pub struct NodalVectorField {
    pub u: NodalScalarField,
    pub v: NodalScalarField,
    pub w: NodalScalarField,
}

impl NodalVectorField {
    pub fn partition(&self) -> &Arc<SphPartition> {
        &self.u.partition
    }

    pub fn scaled(self, a: Complex64) -> Self {
        Self { u: self.u.scaled(a), v: self.v.scaled(a), w: self.w.scaled(a) }
    }

    pub fn eval(&self, theta: f64, phi: f64) -> [Complex64; 3] {
        [
            self.u.eval(theta, phi),
            self.v.eval(theta, phi),
            self.w.eval(theta, phi),
        ]
    }
}

pub fn sample_scalar<F>(f: F, partition: &Arc<SphPartition>) -> NodalScalarField
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let np = partition.n + 1;
    let values: Vec<Complex64> = (0..partition.elements.len())
        .into_par_iter()
        .flat_map_iter(|e| {
            let p = partition.clone();
            let f = &f;
            (0..np * np).map(move |k| {
                let (th, ph) = p.node(e, k / np, k % np);
                f(th, ph)
            })
        })
        .collect();
    NodalScalarField {
        partition: partition.clone(),
        values,
    }
}

/// Rows e_r, e_θ, e_φ of the Cartesian-to-spherical rotation T(θ, φ).
#[inline]
pub fn spherical_basis(theta: f64, phi: f64) -> [[f64; 3]; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        [st * cp, st * sp, ct],
        [ct * cp, ct * sp, -st],
        [-sp, cp, 0.0],
    ]
}

pub fn cartesian_to_spherical(theta: f64, phi: f64, f: [Complex64; 3]) -> [Complex64; 3] {
    let t = spherical_basis(theta, phi);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for r in 0..3 {
        out[r] = f[0] * t[r][0] + f[1] * t[r][1] + f[2] * t[r][2];
    }
    out
}

pub fn spherical_to_cartesian(theta: f64, phi: f64, v: [Complex64; 3]) -> [Complex64; 3] {
    let t = spherical_basis(theta, phi);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for c in 0..3 {
        out[c] = v[0] * t[0][c] + v[1] * t[1][c] + v[2] * t[2][c];
    }
    out
}

pub fn sample_vector_cartesian<F>(f: F, partition: &Arc<SphPartition>) -> NodalVectorField
where
    F: Fn(f64, f64) -> [Complex64; 3] + Sync,
{
    sample_vector_spherical(|th, ph| cartesian_to_spherical(th, ph, f(th, ph)), partition)
}

pub fn sample_vector_spherical<F>(f: F, partition: &Arc<SphPartition>) -> NodalVectorField
where
    F: Fn(f64, f64) -> [Complex64; 3] + Sync,
{
    let np = partition.n + 1;
    let all: Vec<[Complex64; 3]> = (0..partition.elements.len())
        .into_par_iter()
        .flat_map_iter(|e| {
            let p = partition.clone();
            let f = &f;
            (0..np * np).map(move |k| {
                let (th, ph) = p.node(e, k / np, k % np);
                f(th, ph)
            })
        })
        .collect();
    let comp = |c: usize| NodalScalarField {
        partition: partition.clone(),
        values: all.iter().map(|v| v[c]).collect(),
    };
    NodalVectorField {
        u: comp(0),
        v: comp(1),
        w: comp(2),
    }
}

/// Tensor Lagrange interpolant of the containing element at (θ, φ).
pub fn eval_nodal_field(field: &NodalScalarField, theta: f64, phi: f64) -> Complex64 {
    let p = &field.partition;
    let (e, theta, phi) = p.locate(theta, phi);
    let el = &p.elements[e];
    let (eta, xi) = el.inverse(theta, phi);
    let np = p.n + 1;
    let mut lx = vec![0.0; np];
    let mut le = vec![0.0; np];
    p.lagrange(xi, &mut lx);
    p.lagrange(eta, &mut le);
    let vals = field.element_values(e);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..np {
        if lx[i] == 0.0 {
            continue;
        }
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..np {
            row += vals[i * np + j] * le[j];
        }
        acc += row * lx[i];
    }
    acc
}

/// JSON container for nodal fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalFieldFile {
    pub theta_breaks: Vec<f64>,
    pub phi_breaks: Vec<f64>,
    pub degree: usize,
    /// One array per element, row-major over (i, j), entries [re, im].
    pub elements: Vec<Vec<[f64; 2]>>,
}

impl NodalFieldFile {
    pub fn from_field(field: &NodalScalarField) -> Self {
        let p = &field.partition;
        Self {
            theta_breaks: p.theta_breaks.clone(),
            phi_breaks: p.phi_breaks.clone(),
            degree: p.n,
            elements: (0..p.elements.len())
                .map(|e| field.element_values(e).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn into_field(self) -> Result<NodalScalarField> {
        let p = SphPartition::custom(self.theta_breaks, self.phi_breaks, self.degree)?;
        let np = p.nodes_per_element();
        if self.elements.len() != p.elements.len() || self.elements.iter().any(|e| e.len() != np)
        {
            return Err(Error::Format("element value arrays do not match the partition".into()));
        }
        let values = self
            .elements
            .into_iter()
            .flatten()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        Ok(NodalScalarField {
            partition: p,
            values,
        })
    }
}

pub fn write_field_json<W: Write>(field: &NodalScalarField, w: W) -> Result<()> {
    serde_json::to_writer(w, &NodalFieldFile::from_field(field))
        .map_err(|e| Error::Format(e.to_string()))
}

pub fn read_field_json<R: std::io::Read>(r: R) -> Result<NodalScalarField> {
    let f: NodalFieldFile = serde_json::from_reader(r).map_err(|e| Error::Format(e.to_string()))?;
    f.into_field()
}

/// CSV rows `element,i,j,theta,phi,re,im`.
pub fn write_field_csv<W: Write>(field: &NodalScalarField, mut w: W) -> std::io::Result<()> {
    let p = &field.partition;
    let np = p.n + 1;
    writeln!(w, "element,i,j,theta,phi,re,im")?;
    for e in 0..p.elements.len() {
        let vals = field.element_values(e);
        for i in 0..np {
            for j in 0..np {
                let (th, ph) = p.node(e, i, j);
                let z = vals[i * np + j];
                writeln!(w, "{e},{i},{j},{th:.17e},{ph:.17e},{:.17e},{:.17e}", z.re, z.im)?;
            }
        }
    }
    Ok(())
}

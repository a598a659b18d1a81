//! JSON experiment description. One document per run; unknown keys are
//! rejected so typos fail loudly.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sphwave::fields::{Incident, PlaneWave, SphericalWave};
use sphwave::grid::{build_custom_partition, build_uniform_partition, SphPartition};
use sphwave::multiscatter::Scatterer;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// Used when --out is not given.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub cases: Vec<Case>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    pub partition: PartitionSpec,
    /// polynomial degree per element direction
    pub n: usize,
    pub l_max: usize,
    pub wave: WaveSpec,
    /// sphere radius for transforms and single-sphere solves
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default)]
    pub scatterers: Vec<Scatterer>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    /// inclusive degree range for the decay table
    #[serde(default)]
    pub report: Option<[usize; 2]>,
    #[serde(default)]
    pub slices: Vec<Slice>,
}

fn one() -> f64 {
    1.0
}

/// Either `n_theta`/`m_phi` (equal spacing) or explicit `theta_breaks` /
/// `phi_breaks`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    pub n_theta: Option<usize>,
    pub m_phi: Option<usize>,
    pub theta_breaks: Option<Vec<f64>>,
    pub phi_breaks: Option<Vec<f64>>,
}

impl PartitionSpec {
    pub fn uniform(n_theta: usize, m_phi: usize) -> Self {
        Self { n_theta: Some(n_theta), m_phi: Some(m_phi), ..Self::default() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WaveSpec {
    /// e^{ik k̂·x}
    Plane { k: f64, direction: [f64; 3] },
    /// e^{ik|x − x₀|}
    Spherical { k: f64, source: [f64; 3] },
    /// ∇u + ∇u × e_r for the plane wave u
    VectorPlane { k: f64, direction: [f64; 3] },
    /// (e^{ikz}, e^{ikz}, 0)
    EmPlane { k: f64 },
    Constant { value: f64 },
    Zero { k: f64 },
}

impl WaveSpec {
    pub fn k(&self) -> f64 {
        match *self {
            Self::Plane { k, .. } | Self::Spherical { k, .. } | Self::VectorPlane { k, .. } | Self::EmPlane { k } | Self::Zero { k } => k,
            Self::Constant { .. } => 0.0,
        }
    }

    pub fn is_vector(&self) -> bool {
        matches!(self, Self::VectorPlane { .. } | Self::EmPlane { .. })
    }

    /// Scalar incident field, if this is one.
    pub fn incident(&self) -> Option<Incident> {
        match *self {
            Self::Plane { k, direction } => Some(Incident::Plane(PlaneWave::new(k, direction))),
            Self::Spherical { k, source } => Some(Incident::Spherical(SphericalWave { k, source })),
            _ => None,
        }
    }
}

/// Convergence study: one of the three series is swept, everything else is
/// taken from the case.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sweep {
    /// degree N on the case partition
    Degree { values: Vec<usize> },
    /// N_S × N_S uniform partitions at the case degree
    Elements { values: Vec<usize> },
    /// N_S = N
    Dof { values: Vec<usize> },
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Xy,
    Xz,
    Yz,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slice {
    pub plane: Plane,
    pub half_width: f64,
    pub points: usize,
    /// coordinate along the plane normal
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub center: [f64; 3],
    /// add the incident field to the scattered one
    #[serde(default)]
    pub total: bool,
}

impl Slice {
    pub fn grid(&self) -> Vec<[f64; 3]> {
        let n = self.points.max(2);
        let step = 2.0 * self.half_width / (n - 1) as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (u, v) = (-self.half_width + i as f64 * step, -self.half_width + j as f64 * step);
                let c = self.center;
                out.push(match self.plane {
                    Plane::Xy => [c[0] + u, c[1] + v, c[2] + self.offset],
                    Plane::Xz => [c[0] + u, c[1] + self.offset, c[2] + v],
                    Plane::Yz => [c[0] + self.offset, c[1] + u, c[2] + v],
                });
            }
        }
        out
    }
}

impl Case {
    pub fn build_partition(&self) -> Result<Arc<SphPartition>> {
        build(&self.partition, self.n)
    }
}

pub fn build(spec: &PartitionSpec, n: usize) -> Result<Arc<SphPartition>> {
    Ok(match spec {
        PartitionSpec { n_theta: Some(a), m_phi: Some(b), theta_breaks: None, phi_breaks: None } => {
            build_uniform_partition(*a, *b, n)?
        }
        PartitionSpec { n_theta: None, m_phi: None, theta_breaks: Some(t), phi_breaks: Some(p) } => {
            build_custom_partition(t, p, n)?
        }
        _ => bail!("partition needs either n_theta and m_phi, or theta_breaks and phi_breaks"),
    })
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.cases.is_empty() {
            bail!("`cases` is empty");
        }
        for (i, c) in self.cases.iter().enumerate() {
            if c.name.is_empty() || c.name.contains(['/', '\\']) {
                bail!("cases[{i}].name must be a plain non-empty file stem");
            }
            build(&c.partition, 1).with_context(|| format!("cases[{i}].partition"))?;
            if c.n == 0 {
                bail!("cases[{i}].n must be at least 1");
            }
            if !(c.radius > 0.0) {
                bail!("cases[{i}].radius must be positive");
            }
            if let Some([lo, hi]) = c.report {
                if lo > hi || hi > c.l_max {
                    bail!("cases[{i}].report must satisfy lo ≤ hi ≤ l_max");
                }
            }
            for (j, s) in c.slices.iter().enumerate() {
                if s.points < 2 || !(s.half_width > 0.0) {
                    bail!("cases[{i}].slices[{j}] needs points ≥ 2 and half_width > 0");
                }
            }
        }
        Ok(())
    }
}

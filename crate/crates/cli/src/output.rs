//! CSV writers. Floats use the shortest round-trip form so identical runs
//! give byte-identical files.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;

pub struct Out {
    dir: PathBuf,
}

impl Out {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn file(&self, name: &str) -> Result<BufWriter<File>> {
        let p = self.path(name);
        Ok(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?))
    }

    pub fn csv(&self, name: &str, header: &[&str]) -> Result<csv::Writer<File>> {
        let p = self.path(name);
        let mut w = csv::Writer::from_path(&p).with_context(|| format!("creating {}", p.display()))?;
        w.write_record(header)?;
        Ok(w)
    }
}

pub fn f(x: f64) -> String {
    format!("{x:e}")
}

pub fn c(z: Complex64) -> [String; 2] {
    [f(z.re), f(z.im)]
}

/// (r, θ, φ) of a Cartesian point.
pub fn spherical(x: [f64; 3]) -> (f64, f64, f64) {
    sphwave::multiscatter::to_spherical(x)
}

pub fn point_cols(x: [f64; 3]) -> Vec<String> {
    let (r, t, p) = spherical(x);
    vec![f(x[0]), f(x[1]), f(x[2]), f(r), f(t), f(p)]
}

pub const SCALAR_SLICE: [&str; 8] = ["x", "y", "z", "r", "theta", "phi", "re", "im"];
pub const EM_SLICE: [&str; 18] = [
    "x", "y", "z", "r", "theta", "phi", "ex_re", "ex_im", "ey_re", "ey_im", "ez_re", "ez_im", "hx_re", "hx_im",
    "hy_re", "hy_im", "hz_re", "hz_im",
];

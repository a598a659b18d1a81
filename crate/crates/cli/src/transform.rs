use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Result};
use num_complex::Complex64;
use sphwave::fields::{em_test_field, sphere_point, PlaneWave};
use sphwave::grid::{sample_scalar, sample_vector_cartesian, sample_vector_spherical, NodalScalarField, NodalVectorField, SphPartition};
use sphwave::sphtrans::{sph_forward, SphCoeffs};
use sphwave::vshtrans::{vsh_forward, VshCoeffs};

use crate::config::{build, Case, PartitionSpec, Sweep, WaveSpec};
use crate::output::{f, Out};

pub fn sample_scalar_wave(wave: &WaveSpec, r: f64, p: &Arc<SphPartition>) -> Result<NodalScalarField> {
    Ok(match *wave {
        WaveSpec::Plane { .. } | WaveSpec::Spherical { .. } => {
            let inc = wave.incident().expect("scalar wave");
            sample_scalar(|t, ph| inc.at(sphere_point(r, t, ph)), p)
        }
        WaveSpec::Constant { value } => sample_scalar(|_, _| Complex64::new(value, 0.0), p),
        WaveSpec::Zero { .. } => NodalScalarField::zeros(p.clone()),
        _ => bail!("wave type is a vector field"),
    })
}

pub fn sample_vector_wave(wave: &WaveSpec, r: f64, p: &Arc<SphPartition>) -> Result<NodalVectorField> {
    Ok(match *wave {
        WaveSpec::VectorPlane { k, direction } => {
            let pw = PlaneWave::new(k, direction);
            sample_vector_spherical(|t, ph| pw.vsh_test_field(r, t, ph), p)
        }
        WaveSpec::EmPlane { k } => sample_vector_cartesian(|t, ph| em_test_field(k, sphere_point(r, t, ph)), p),
        WaveSpec::Zero { .. } => sample_vector_spherical(|_, _| [Complex64::new(0.0, 0.0); 3], p),
        _ => bail!("wave type is a scalar field"),
    })
}

fn scalar_exact(wave: &WaveSpec, r: f64, l_max: usize) -> Option<Vec<Complex64>> {
    let len = (l_max + 1) * (l_max + 1);
    match *wave {
        WaveSpec::Plane { k, direction } => Some(PlaneWave::new(k, direction).sph_exact(r, l_max)),
        WaveSpec::Constant { value } => {
            let mut v = vec![Complex64::new(0.0, 0.0); len];
            v[0] = Complex64::new(2.0 * PI.sqrt() * value, 0.0);
            Some(v)
        }
        WaveSpec::Zero { .. } => Some(vec![Complex64::new(0.0, 0.0); len]),
        _ => None,
    }
}

fn vector_exact(wave: &WaveSpec, r: f64, l_max: usize) -> Option<[Vec<Complex64>; 3]> {
    match *wave {
        WaveSpec::VectorPlane { k, direction } => Some(PlaneWave::new(k, direction).vsh_exact(r, l_max)),
        _ => None,
    }
}

enum Coeffs {
    Scalar(SphCoeffs),
    Vector(VshCoeffs),
}

/// Forward transform of the case wave on `p`; returns the coefficients, the
/// error E_L when an exact expansion is known, and the transform wall time.
fn run_once(case: &Case, p: &Arc<SphPartition>) -> Result<(Coeffs, Option<f64>, f64)> {
    let (r, l) = (case.radius, case.l_max);
    if case.wave.is_vector() {
        let field = sample_vector_wave(&case.wave, r, p)?;
        let t0 = Instant::now();
        let c = vsh_forward(&field, l)?;
        let dt = t0.elapsed().as_secs_f64();
        let err = vector_exact(&case.wave, r, l).map(|ex| c.max_error(&ex));
        Ok((Coeffs::Vector(c), err, dt))
    } else {
        let field = sample_scalar_wave(&case.wave, r, p)?;
        let t0 = Instant::now();
        let c = sph_forward(&field, l)?;
        let dt = t0.elapsed().as_secs_f64();
        let err = scalar_exact(&case.wave, r, l).map(|ex| c.a.iter().zip(&ex).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        Ok((Coeffs::Scalar(c), err, dt))
    }
}

pub fn run(case: &Case, out: &Out) -> Result<()> {
    if let Some(sw) = &case.sweep {
        return run_sweep(case, sw, out);
    }
    let p = case.build_partition()?;
    let (coeffs, err, dt) = run_once(case, &p)?;
    let (lo, hi) = case.report.map_or((0, case.l_max), |[a, b]| (a, b));
    match &coeffs {
        Coeffs::Scalar(c) => {
            c.write_csv(out.file(&format!("{}_coefficients.csv", case.name))?)?;
            let mut w = out.csv(&format!("{}_degrees.csv", case.name), &["l", "max_abs"])?;
            for l in lo..=hi {
                w.write_record([l.to_string(), f(c.max_abs_at(l))])?;
            }
            w.flush()?;
            if let WaveSpec::Constant { .. } = case.wave {
                let a = c.get(0, 0);
                println!("{}: a_0^0 = {} + {}i", case.name, f(a.re), f(a.im));
            }
        }
        Coeffs::Vector(c) => {
            c.write_csv(out.file(&format!("{}_coefficients.csv", case.name))?)?;
            let mut w = out.csv(&format!("{}_degrees.csv", case.name), &["l", "max_r", "max_1", "max_2"])?;
            for l in lo..=hi {
                let m = |v: &[Complex64]| v[l * l..(l + 1) * (l + 1)].iter().map(|z| z.norm()).fold(0.0, f64::max);
                w.write_record([l.to_string(), f(m(&c.r)), f(m(&c.t1)), f(m(&c.t2))])?;
            }
            w.flush()?;
        }
    }
    match err {
        Some(e) => println!("{}: E_{} = {e:.4e}  (transform {dt:.3} s)", case.name, case.l_max),
        None => println!("{}: no analytic reference  (transform {dt:.3} s)", case.name),
    }
    Ok(())
}

fn run_sweep(case: &Case, sweep: &Sweep, out: &Out) -> Result<()> {
    let points: Vec<(PartitionSpec, usize)> = match sweep {
        Sweep::Degree { values } => values.iter().map(|&n| (case.partition.clone(), n)).collect(),
        Sweep::Elements { values } => values.iter().map(|&s| (PartitionSpec::uniform(s, s), case.n)).collect(),
        Sweep::Dof { values } => values.iter().map(|&s| (PartitionSpec::uniform(s, s), s)).collect(),
    };
    let mut w = out.csv(&format!("{}_convergence.csv", case.name), &["elements", "n", "dof", "error"])?;
    for (spec, n) in points {
        let p = build(&spec, n)?;
        let (_, err, _) = run_once(case, &p)?;
        let Some(e) = err else {
            bail!("case {}: a convergence sweep needs a wave with an analytic expansion", case.name);
        };
        let elems = p.elements.len();
        w.write_record([elems.to_string(), n.to_string(), (elems * (n + 1) * (n + 1)).to_string(), f(e)])?;
        println!("{}: elements {elems:>4}  N {n:>3}  E_{} = {e:.3e}", case.name, case.l_max);
    }
    w.flush()?;
    Ok(())
}

use anyhow::{bail, Result};
use num_complex::Complex64;
use sphwave::fields::em_test_field;
use sphwave::grid::spherical_to_cartesian;
use sphwave::scatter::{solve_acoustic_single, solve_em_single};

use crate::config::{Case, Slice, WaveSpec};
use crate::output::{c, f, point_cols, spherical, Out, EM_SLICE, SCALAR_SLICE};
use crate::transform::{sample_scalar_wave, sample_vector_wave};

fn incident_scalar(wave: &WaveSpec, x: [f64; 3]) -> Complex64 {
    match *wave {
        WaveSpec::Constant { value } => Complex64::new(value, 0.0),
        WaveSpec::Zero { .. } => Complex64::new(0.0, 0.0),
        _ => wave.incident().map_or(Complex64::new(0.0, 0.0), |i| i.at(x)),
    }
}

/// Incident (E, H) in Cartesian components, with curl E = ik H.
fn incident_em(wave: &WaveSpec, x: [f64; 3]) -> ([Complex64; 3], [Complex64; 3]) {
    match *wave {
        WaveSpec::EmPlane { k } => {
            let e = em_test_field(k, x);
            (e, [-e[0], e[0], Complex64::new(0.0, 0.0)])
        }
        _ => ([Complex64::new(0.0, 0.0); 3], [Complex64::new(0.0, 0.0); 3]),
    }
}

fn slice_name(case: &Case, i: usize) -> String {
    format!("{}_slice{i}.csv", case.name)
}

/// Grid points of a slice lying outside the sphere r < b.
fn outside(s: &Slice, b: f64) -> Vec<[f64; 3]> {
    s.grid().into_iter().filter(|&x| spherical(x).0 >= b).collect()
}

pub fn run(case: &Case, out: &Out) -> Result<()> {
    if case.sweep.is_some() {
        bail!("case {}: sweeps belong to the transform command", case.name);
    }
    let (k, b, l_max) = (case.wave.k(), case.radius, case.l_max);
    let p = case.build_partition()?;
    let (lo, hi) = case.report.map_or((0, l_max), |[a, z]| (a, z));
    if case.wave.is_vector() {
        let g = sample_vector_wave(&case.wave, b, &p)?.scaled(Complex64::new(-1.0, 0.0));
        let sol = solve_em_single(&g, k, b, l_max)?;
        let mut w = out.csv(&format!("{}_coefficients.csv", case.name), &["l", "m", "v_re", "v_im", "w_re", "w_im"])?;
        for l in 0..=l_max {
            for m in -(l as i32)..=(l as i32) {
                let i = sphwave::lm_index(l, m);
                let [a, bb] = c(sol.v[i]);
                let [cc, d] = c(sol.w[i]);
                w.write_record([l.to_string(), m.to_string(), a, bb, cc, d])?;
            }
        }
        w.flush()?;
        let mut w = out.csv(&format!("{}_decay.csv", case.name), &["l", "max_v", "max_w"])?;
        for l in lo..=hi {
            let (v, ww) = sol.max_abs_at(l);
            w.write_record([l.to_string(), f(v), f(ww)])?;
        }
        w.flush()?;
        for (i, s) in case.slices.iter().enumerate() {
            let pts = outside(s, b);
            let sph: Vec<_> = pts.iter().map(|&x| spherical(x)).collect();
            let vals = sol.eval_many(&sph)?;
            let mut w = out.csv(&slice_name(case, i), &EM_SLICE)?;
            for ((x, &(_, t, ph)), (e, h)) in pts.iter().zip(&sph).zip(vals) {
                let mut e = spherical_to_cartesian(t, ph, e);
                let mut h = spherical_to_cartesian(t, ph, h);
                if s.total {
                    let (ei, hi) = incident_em(&case.wave, *x);
                    for j in 0..3 {
                        e[j] += ei[j];
                        h[j] += hi[j];
                    }
                }
                let mut row = point_cols(*x);
                row.extend(e.iter().chain(&h).flat_map(|z| c(*z)));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        let (v, ww) = sol.max_abs_at(hi);
        println!("{}: EM sphere b={b} k={k} L={l_max}  max|V_{hi}|={v:.3e} max|W_{hi}|={ww:.3e}", case.name);
    } else {
        let g = sample_scalar_wave(&case.wave, b, &p)?.scaled(Complex64::new(-1.0, 0.0));
        let sol = solve_acoustic_single(&g, k, b, l_max)?;
        sol.coeffs.write_csv(out.file(&format!("{}_coefficients.csv", case.name))?)?;
        let mut w = out.csv(&format!("{}_decay.csv", case.name), &["l", "max_abs"])?;
        for l in lo..=hi {
            w.write_record([l.to_string(), f(sol.coeffs.max_abs_at(l))])?;
        }
        w.flush()?;
        for (i, s) in case.slices.iter().enumerate() {
            let pts = outside(s, b);
            let sph: Vec<_> = pts.iter().map(|&x| spherical(x)).collect();
            let vals = sol.eval_many(&sph)?;
            let mut w = out.csv(&slice_name(case, i), &SCALAR_SLICE)?;
            for (x, mut u) in pts.iter().zip(vals) {
                if s.total {
                    u += incident_scalar(&case.wave, *x);
                }
                let mut row = point_cols(*x);
                row.extend(c(u));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        println!(
            "{}: sound-soft sphere b={b} k={k} L={l_max}  max|U_{hi}|={:.3e}",
            case.name,
            sol.coeffs.max_abs_at(hi)
        );
    }
    Ok(())
}

use std::f64::consts::PI;

use anyhow::{bail, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphwave::grid::sample_scalar;
use sphwave::multiscatter::{assemble_and_solve, sound_soft_data, spiral_points, ScattererSet};

use crate::config::{Case, WaveSpec};
use crate::output::{c, f, point_cols, Out, SCALAR_SLICE};

/// Largest dense system the driver will factor.
pub const MAX_UNKNOWNS: usize = 20_000;

const RESIDUAL_POINTS: usize = 400;

pub fn check_budget(m: usize, l_max: usize) -> Result<()> {
    let n = m * (l_max + 1) * (l_max + 1);
    if n > MAX_UNKNOWNS {
        let fit = ((MAX_UNKNOWNS / m) as f64).sqrt().floor() as usize;
        bail!(
            "{m} scatterers at l_max={l_max} give {n} unknowns, above the limit of {MAX_UNKNOWNS}; \
             use l_max ≤ {} or fewer scatterers",
            fit.saturating_sub(1)
        );
    }
    Ok(())
}

/// Angles on the unit sphere for the boundary residual: uniform random with
/// a seed, otherwise a golden-angle spiral.
fn residual_angles(seed: Option<u64>) -> Vec<(f64, f64)> {
    match seed {
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (0..RESIDUAL_POINTS)
                .map(|_| {
                    let z: f64 = rng.random_range(-1.0..1.0);
                    (z.acos(), rng.random_range(0.0..2.0 * PI))
                })
                .collect()
        }
        None => spiral_points(RESIDUAL_POINTS),
    }
}

pub fn run(case: &Case, out: &Out, seed: Option<u64>) -> Result<()> {
    if case.wave.is_vector() {
        bail!("case {}: the multi-sphere solver is acoustic only", case.name);
    }
    if case.scatterers.is_empty() {
        bail!("case {}: `scatterers` is empty", case.name);
    }
    let set = ScattererSet::new(case.scatterers.clone())?;
    check_budget(set.len(), case.l_max)?;
    let (k, l_max) = (case.wave.k(), case.l_max);
    let p = case.build_partition()?;
    let data = match case.wave.incident() {
        Some(inc) => sound_soft_data(&set, &inc, &p),
        None => {
            let v = match case.wave {
                WaveSpec::Constant { value } => -value,
                _ => 0.0,
            };
            vec![sample_scalar(|_, _| Complex64::new(v, 0.0), &p); set.len()]
        }
    };
    let sol = assemble_and_solve(&set, k, l_max, &data)?;

    for (i, a) in sol.coeffs.iter().enumerate() {
        a.write_csv(out.file(&format!("{}_coefficients_{i}.csv", case.name))?)?;
    }
    let (lo, hi) = case.report.map_or((0, l_max), |[a, b]| (a, b));
    let mut w = out.csv(&format!("{}_decay.csv", case.name), &["l", "max_g", "max_c"])?;
    for l in lo..=hi {
        w.write_record([l.to_string(), f(sol.max_rhs_at(l)), f(sol.max_abs_at(l))])?;
    }
    w.flush()?;

    let res = sol.boundary_residual(&data, &residual_angles(seed))?;
    let mut w = out.csv(&format!("{}_residual.csv", case.name), &["scatterer", "residual"])?;
    for (i, r) in res.iter().enumerate() {
        w.write_record([i.to_string(), f(*r)])?;
    }
    w.flush()?;

    let inc = case.wave.incident();
    for (i, s) in case.slices.iter().enumerate() {
        let pts: Vec<[f64; 3]> = s
            .grid()
            .into_iter()
            .filter(|x| set.items.iter().all(|sc| dist(*x, sc.center) >= sc.radius))
            .collect();
        let vals = sol.eval_many(&pts)?;
        let mut w = out.csv(&format!("{}_slice{i}.csv", case.name), &SCALAR_SLICE)?;
        for (x, mut u) in pts.iter().zip(vals) {
            if s.total {
                u += match (&inc, &case.wave) {
                    (Some(inc), _) => inc.at(*x),
                    (None, WaveSpec::Constant { value }) => Complex64::new(*value, 0.0),
                    _ => Complex64::new(0.0, 0.0),
                };
            }
            let mut row = point_cols(*x);
            row.extend(c(u));
            w.write_record(&row)?;
        }
        w.flush()?;
    }

    let worst = res.iter().copied().fold(0.0, f64::max);
    println!(
        "{}: {} spheres k={k} L={l_max}  solve residual {:.2e}  boundary residual {worst:.2e}  max|C_{hi}|={:.4e}",
        case.name,
        set.len(),
        sol.solve_residual,
        sol.max_abs_at(hi)
    );
    Ok(())
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

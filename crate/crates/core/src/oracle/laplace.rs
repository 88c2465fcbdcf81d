//! Numerical check that the Laplace transform is an isometry from
//! `L^2(0, inf; w dt)` onto the Zen space of `nu`:
//!
//! ```text
//! integral |f|^2 w dt  =  integral integral |Lf(x + iy)|^2 dy d nu(x)
//! ```

use num_complex::Complex64;
use serde::Serialize;

use super::grid::GridFunction;
use crate::error::{Result, ZenError};
use crate::quadrature::{integrate, integrate_to_infinity_par, QuadOptions};
use crate::weights::{synthesize_weight, Weight, ZenMeasure};

/// Stop widening `[-Y, Y]` once the tail bound drops below this fraction
/// of the accumulated integral.
const Y_TAIL_FRACTION: f64 = 1e-6;
const Y_START: f64 = 8.0;
const Y_LIMIT: f64 = 1e12;
/// Boundary contributions `|f|^2 w t` above this fraction of the time norm
/// mean `f` is not (numerically) in the space.
const BOUNDARY_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsometryReport {
    pub time_norm_sq: f64,
    pub frequency_norm_sq: f64,
    pub relative_error: f64,
    /// Largest `Y` used for the truncated `y`-integral.
    pub y_cutoff: f64,
}

/// `(e^z - 1)/z` and `integral_0^1 u e^{zu} du = (z e^z - e^z + 1)/z^2`.
fn phi_pair(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0); // z^k / k!
        let mut p1 = Complex64::new(0.0, 0.0);
        let mut p2 = Complex64::new(0.0, 0.0);
        for k in 0..24 {
            let kf = k as f64;
            p1 += term / (kf + 1.0);
            p2 += term / (kf + 2.0);
            term *= z / (kf + 1.0);
        }
        (p1, p2)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (z * ez - ez + 1.0) / (z * z))
    }
}

/// Laplace transform of the piecewise-linear interpolant of `f`, held
/// constant on `[0, t_0]` and zero beyond the last node, integrated exactly
/// segment by segment.
pub fn laplace_transform(f: &GridFunction, s: Complex64) -> Complex64 {
    let t = f.grid.nodes();
    let v = &f.values;
    let (p1, _) = phi_pair(-s * t[0]);
    let mut sum = v[0] * t[0] * p1;
    for j in 0..t.len() - 1 {
        let (a, b) = (t[j], t[j + 1]);
        let h = b - a;
        let (p1, p2) = phi_pair(-s * h);
        let slope = (v[j + 1] - v[j]) / h;
        sum += (-s * a).exp() * (v[j] * h * p1 + slope * h * h * p2);
    }
    sum
}

/// `integral over R of |Lf(x + iy)|^2 dy`, truncated at `|y| = Y` with `Y`
/// doubled until `|Lf|^2 Y` at the cutoff (a bound for `O(1/y^2)` decay) is
/// negligible. Returns the integral and the final `Y`.
fn y_integral(f: &GridFunction, x: f64) -> Result<(f64, f64)> {
    let g = |y: f64| laplace_transform(f, Complex64::new(x, y)).norm_sqr();
    let opts = QuadOptions::with_rel_tol(1e-8);
    let mut y_max = Y_START;
    let mut acc = integrate(g, -y_max, 0.0, opts)?.value + integrate(g, 0.0, y_max, opts)?.value;
    loop {
        let tail = (g(y_max) + g(-y_max)) * y_max;
        if tail <= Y_TAIL_FRACTION * acc {
            return Ok((acc, y_max));
        }
        if y_max >= Y_LIMIT {
            return Err(ZenError::Divergent(format!(
                "frequency integral at x = {x} has not settled by |y| = {Y_LIMIT:e}"
            )));
        }
        let piece = QuadOptions {
            abs_tol: 1e-8 * acc,
            ..opts
        };
        acc += integrate(g, y_max, 2.0 * y_max, piece)?.value;
        acc += integrate(g, -2.0 * y_max, -y_max, piece)?.value;
        y_max *= 2.0;
    }
}

/// Compare `integral |f|^2 w dt` (grid quadrature) with the frequency-side
/// norm over `nu`: atoms are summed exactly, densities integrated in `x`.
/// `w` must be the weight of `nu` (`2 pi integral exp(-2rt) d nu(r)`).
pub fn laplace_isometry_check(f: &GridFunction, measure: &ZenMeasure, w: &Weight) -> Result<IsometryReport> {
    let grid = &f.grid;
    for t in [grid.t_min(), 1.0, grid.t_max()] {
        let expect = synthesize_weight(measure, t)?;
        if (w.eval(t) - expect).abs() > 1e-6 * expect {
            return Err(ZenError::param(
                "weight",
                format!("w({t}) = {} but the measure gives {expect}", w.eval(t)),
            ));
        }
    }
    let time_norm_sq = f.norm_sq(w);
    if time_norm_sq == 0.0 {
        return Ok(IsometryReport {
            time_norm_sq: 0.0,
            frequency_norm_sq: 0.0,
            relative_error: 0.0,
            y_cutoff: 0.0,
        });
    }
    let n = grid.len();
    let edge = |j: usize| f.values[j].norm_sqr() * w.eval(grid.nodes()[j]) * grid.nodes()[j];
    if edge(0).max(edge(n - 1)) > BOUNDARY_FRACTION * time_norm_sq {
        return Err(ZenError::Divergent(
            "|f|^2 w t does not vanish at the grid ends; f is not in the space".into(),
        ));
    }

    let mut frequency_norm_sq = 0.0;
    let mut y_cutoff: f64 = 0.0;
    for atom in measure.atoms() {
        let (v, y) = y_integral(f, atom.r)?;
        frequency_norm_sq += atom.mass * v;
        y_cutoff = y_cutoff.max(y);
    }
    if !matches!(measure.density(), crate::weights::Density::None) {
        let dens = integrate_to_infinity_par(
            |x| {
                let d = measure.density_at(x);
                if d == 0.0 {
                    return 0.0;
                }
                y_integral(f, x).map_or(f64::NAN, |(v, _)| d * v)
            },
            0.0,
            QuadOptions::with_rel_tol(1e-7),
        )?;
        frequency_norm_sq += dens.value;
    }
    let relative_error = (time_norm_sq - frequency_norm_sq).abs() / time_norm_sq.max(frequency_norm_sq);
    Ok(IsometryReport {
        time_norm_sq,
        frequency_norm_sq,
        relative_error,
        y_cutoff,
    })
}

//! One-dimensional sup/inf of log-domain objectives `g(u)`, `u = ln t`,
//! over `t in (0, inf)`.
//!
//! A coarse uniform scan in `u` locates the best sample, golden-section
//! search refines it, and the analytic limits of `g` at `t -> 0+` and
//! `t -> inf` (supplied by the caller from weight exponents) decide whether
//! the extremum is attained only in a limit. Huge and tiny `t` are never
//! evaluated to find boundary values.

use serde::Serialize;

use crate::error::{Result, ZenError};

/// Where an extremum over `t > 0` is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Extremum {
    Interior { t: f64, ln_t: f64 },
    /// Approached as `t -> 0+`.
    Zero,
    /// Approached as `t -> inf`.
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimumMethod {
    GoldenSection,
    BoundaryLimit,
}

/// Result of a sup or inf over `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioOptimum {
    pub value: f64,
    pub ln_value: f64,
    pub location: Extremum,
    pub method: OptimumMethod,
    /// For interior optima: no neighbouring sample improves on the optimum.
    pub stationary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub t_min: f64,
    pub t_max: f64,
    /// Coarse-scan points over `[t_min, t_max]`; the density is kept when the
    /// range is widened to cover extra scales.
    pub points: usize,
    /// Relative width (in `ln t`) at which golden-section search stops.
    pub rel_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            t_min: 1e-12,
            t_max: 1e12,
            points: 2001,
            rel_tol: 1e-10,
        }
    }
}

impl ScanOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(ZenError::param("grid", "need 0 < t_min < t_max < inf"));
        }
        if self.points < 3 {
            return Err(ZenError::param("points", "coarse scan needs at least 3 points"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(ZenError::param("rel_tol", "must be positive"));
        }
        Ok(())
    }
}

/// Objective in log-space with its analytic boundary limits.
pub(crate) struct LogObjective<F: Fn(f64) -> f64> {
    pub g: F,
    /// `lim g(u)` as `u -> -inf`.
    pub at_zero: f64,
    /// `lim g(u)` as `u -> +inf`.
    pub at_infinity: f64,
    /// `ln t` locations where `g` has structure; the scan is widened to cover
    /// each of them with a margin.
    pub scales: Vec<f64>,
}

const SCALE_MARGIN: f64 = 30.0;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn finite_or_neg_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn golden_max<F: Fn(f64) -> f64>(g: &F, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = finite_or_neg_inf(g(c));
    let mut gd = finite_or_neg_inf(g(d));
    for _ in 0..400 {
        if (b - a).abs() <= rel_tol * (0.5 * (a + b)).abs().max(1.0) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = finite_or_neg_inf(g(c));
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = finite_or_neg_inf(g(d));
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

pub(crate) fn sup_log<F: Fn(f64) -> f64>(obj: &LogObjective<F>, opts: &ScanOptions) -> Result<RatioOptimum> {
    opts.validate()?;
    let base_lo = opts.t_min.ln();
    let base_hi = opts.t_max.ln();
    let mut lo = base_lo;
    let mut hi = base_hi;
    for &s in obj.scales.iter().filter(|s| s.is_finite()) {
        lo = lo.min(s - SCALE_MARGIN);
        hi = hi.max(s + SCALE_MARGIN);
    }
    let density = (opts.points - 1) as f64 / (base_hi - base_lo);
    let n = (((hi - lo) * density).ceil() as usize).max(opts.points - 1) + 1;
    let step = (hi - lo) / (n - 1) as f64;

    let mut best_i = usize::MAX;
    let mut best = f64::NEG_INFINITY;
    let mut nan_count = 0usize;
    for i in 0..n {
        let u = lo + step * i as f64;
        let v = (obj.g)(u);
        if v.is_nan() {
            nan_count += 1;
            continue;
        }
        if best_i == usize::MAX || v > best {
            best = v;
            best_i = i;
        }
    }
    if nan_count == n {
        return Err(ZenError::NonConvergence(
            "objective is undefined on the whole scan range (weight evaluation failed)".into(),
        ));
    }

    let (mut u_star, mut g_star) = (lo + step * best_i as f64, best);
    let interior = best_i > 0 && best_i < n - 1;
    if interior && best.is_finite() {
        let (u, v) = golden_max(&obj.g, u_star - step, u_star + step, opts.rel_tol);
        if v >= g_star {
            u_star = u;
            g_star = v;
        }
    }
    let stationary = interior && {
        let h = step * 0.25;
        let left = finite_or_neg_inf((obj.g)(u_star - h));
        let right = finite_or_neg_inf((obj.g)(u_star + h));
        let slack = 1e-12 * g_star.abs().max(1.0);
        left <= g_star + slack && right <= g_star + slack
    };

    let slack = 1e-12 * g_star.abs().max(1.0);
    let zero = finite_or_neg_inf(obj.at_zero);
    let inf = finite_or_neg_inf(obj.at_infinity);
    let (ln_value, location, method, stationary) = if zero >= inf && zero >= g_star - slack {
        (zero, Extremum::Zero, OptimumMethod::BoundaryLimit, false)
    } else if inf >= g_star - slack {
        (inf, Extremum::Infinity, OptimumMethod::BoundaryLimit, false)
    } else {
        (
            g_star,
            Extremum::Interior {
                t: u_star.exp(),
                ln_t: u_star,
            },
            OptimumMethod::GoldenSection,
            stationary,
        )
    };
    Ok(RatioOptimum {
        value: ln_value.exp(),
        ln_value,
        location,
        method,
        stationary,
    })
}

pub(crate) fn inf_log<F: Fn(f64) -> f64>(obj: &LogObjective<F>, opts: &ScanOptions) -> Result<RatioOptimum> {
    let negated = LogObjective {
        g: |u: f64| -(obj.g)(u),
        at_zero: -obj.at_zero,
        at_infinity: -obj.at_infinity,
        scales: obj.scales.clone(),
    };
    let mut opt = sup_log(&negated, opts)?;
    opt.ln_value = -opt.ln_value;
    opt.value = opt.ln_value.exp();
    Ok(opt)
}

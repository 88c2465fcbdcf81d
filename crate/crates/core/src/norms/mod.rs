//! Norms, essential norms and spectral radii of composition operators,
//! each reduced to a one-dimensional sup or inf of weight ratios over
//! `t in (0, inf)`.
//!
//! For a symbol with angular derivative `L` at infinity,
//!
//! ```text
//! L inf_t w(t)/w(Lt)  <=  ||C_phi||_e^2  <=  ||C_phi||^2  <=  L sup_t w(t)/w(Lt)
//! ```
//!
//! and for `phi(s) = mu s + x` with `x >= 0` the norm is exact:
//! `||C_phi||^2 = (1/mu) sup_t exp(-2xt) w(mu t)/w(t)`.
//!
//! Note on the Hardy-Bergman weight `w(t) = 1 + 1/t`: the ratio is
//! `w(t)/w(Lt) = L(t+1)/(Lt+1)`, whose range has endpoints `1` and `L`
//! (not `1` and `1/L`), so `norm_bounds(hardy-bergman, L) = (min(L, L^2),
//! max(L, L^2))`. This agrees with the exact norms `1/mu` (`mu > 1`) and
//! `1/mu^2` (`mu < 1`).

mod optimize;

use rayon::prelude::*;
use serde::Serialize;

pub use optimize::{Extremum, OptimumMethod, RatioOptimum, ScanOptions};
use optimize::{inf_log, sup_log, LogObjective};

use crate::error::{Result, ZenError};
use crate::symbols::{log_iterate, AffineSymbol};
use crate::weights::Weight;

/// Relative agreement at which essential-norm bounds are reported exact.
const EXACT_BOUNDS_TOL: f64 = 1e-12;
/// Terms averaged (geometrically) to estimate a sequence limit.
const TAIL_TERMS: usize = 8;
/// Relative spread over the last quarter above which a sequence is flagged.
const CONVERGENCE_SPREAD: f64 = 0.01;

/// Bounds on `||C_phi||^2` together with the optimizers that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormBounds {
    pub angular_derivative: f64,
    pub lower: f64,
    pub upper: f64,
    pub inf: RatioOptimum,
    pub sup: RatioOptimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EssentialNormBounds {
    pub lower: f64,
    pub upper: f64,
    /// Lower and upper agree, so `||C_phi||_e = ||C_phi||`.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicNorm {
    pub norm: f64,
    pub norm_squared: f64,
    pub optimum: RatioOptimum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceLimit {
    pub estimate: f64,
    pub sequence: Vec<f64>,
    /// The last quarter of the sequence stays within 1% of the estimate.
    pub converged: bool,
    /// Successive differences over the last quarter share a sign up to 1e-3.
    pub monotone_tail: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralRadiusBounds {
    /// Lower bound on `rho(C_phi)^2`.
    pub lower: SequenceLimit,
    /// Upper bound on `rho(C_phi)^2`.
    pub upper: SequenceLimit,
}

fn check_positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ZenError::param(field, format!("must be a positive finite number, got {v}")))
    }
}

fn check_n_max(n_max: u32) -> Result<()> {
    if n_max < 8 {
        return Err(ZenError::param("n_max", format!("must be >= 8, got {n_max}")));
    }
    Ok(())
}

/// `e * ln_l`, with the convention that a zero log-factor kills any exponent.
fn scaled_exponent(e: f64, ln_l: f64) -> f64 {
    if ln_l == 0.0 {
        0.0
    } else {
        e * ln_l
    }
}

/// `ln(w(t) / w(e^{ln_l} t))` as a log objective in `u = ln t`.
fn dilation_ratio(w: &Weight, ln_l: f64) -> LogObjective<impl Fn(f64) -> f64 + '_> {
    let e = w.exponents();
    LogObjective {
        g: move |u: f64| w.ln_eval_at_log(u) - w.ln_eval_at_log(u + ln_l),
        at_zero: -scaled_exponent(e.at_zero, ln_l),
        at_infinity: -scaled_exponent(e.at_infinity, ln_l),
        scales: vec![0.0, -ln_l],
    }
}

/// `ln(exp(-2 x t) w(e^{ln_mu} t) / w(t))`; `ln_x = -inf` means `x = 0`.
fn damped_dilation(w: &Weight, ln_mu: f64, ln_x: f64) -> LogObjective<impl Fn(f64) -> f64 + '_> {
    let e = w.exponents();
    let damped = ln_x > f64::NEG_INFINITY;
    let mut scales = vec![0.0, -ln_mu];
    if damped {
        scales.push(-ln_x);
    }
    LogObjective {
        g: move |u: f64| {
            let damping = if damped { -2.0 * (ln_x + u).exp() } else { 0.0 };
            damping + w.ln_eval_at_log(u + ln_mu) - w.ln_eval_at_log(u)
        },
        at_zero: scaled_exponent(e.at_zero, ln_mu),
        at_infinity: if damped {
            f64::NEG_INFINITY
        } else {
            scaled_exponent(e.at_infinity, ln_mu)
        },
        scales,
    }
}

/// Bounds on `||C_phi||^2` for a symbol with angular derivative `l`.
pub fn norm_bounds(w: &Weight, l: f64) -> Result<NormBounds> {
    norm_bounds_with(w, l, &ScanOptions::default())
}

pub fn norm_bounds_with(w: &Weight, l: f64, opts: &ScanOptions) -> Result<NormBounds> {
    check_positive("L", l)?;
    let obj = dilation_ratio(w, l.ln());
    let inf = inf_log(&obj, opts)?;
    let sup = sup_log(&obj, opts)?;
    Ok(NormBounds {
        angular_derivative: l,
        lower: l * inf.value,
        upper: l * sup.value,
        inf,
        sup,
    })
}

/// Bounds on `||C_phi||_e^2`; the same two numbers as [`norm_bounds`].
pub fn essential_norm_bounds(w: &Weight, l: f64) -> Result<EssentialNormBounds> {
    let b = norm_bounds(w, l)?;
    Ok(EssentialNormBounds {
        lower: b.lower,
        upper: b.upper,
        exact: (b.upper - b.lower).abs() <= EXACT_BOUNDS_TOL * b.upper.abs(),
    })
}

/// Exact norm of `C_phi` for `phi(s) = mu s + x`, `x >= 0`.
pub fn exact_hyperbolic_norm(w: &Weight, mu: f64, x: f64) -> Result<HyperbolicNorm> {
    exact_hyperbolic_norm_with(w, mu, x, &ScanOptions::default())
}

pub fn exact_hyperbolic_norm_with(w: &Weight, mu: f64, x: f64, opts: &ScanOptions) -> Result<HyperbolicNorm> {
    check_positive("mu", mu)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(ZenError::param("x", format!("must be >= 0, got {x}")));
    }
    let ln_x = if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    let optimum = sup_log(&damped_dilation(w, mu.ln(), ln_x), opts)?;
    let ln_sq = optimum.ln_value - mu.ln();
    Ok(HyperbolicNorm {
        norm: (0.5 * ln_sq).exp(),
        norm_squared: ln_sq.exp(),
        optimum,
    })
}

/// Exact norm of `C_phi` for any affine symbol. The imaginary part of `s0`
/// is removed by a unitary conjugation and does not affect the norm.
pub fn exact_symbol_norm(w: &Weight, phi: &AffineSymbol) -> Result<HyperbolicNorm> {
    exact_hyperbolic_norm(w, phi.mu(), phi.x())
}

fn summarize(sequence: Vec<f64>) -> SequenceLimit {
    let n = sequence.len();
    let tail = &sequence[n.saturating_sub(TAIL_TERMS)..];
    let estimate = (tail.iter().map(|v| v.ln()).sum::<f64>() / tail.len() as f64).exp();
    let quarter = &sequence[n - (n / 4).max(2)..];
    let (lo, hi) = quarter
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let converged = estimate == 0.0 && hi == 0.0 || (hi - lo) <= CONVERGENCE_SPREAD * estimate;
    let diffs: Vec<f64> = quarter.windows(2).map(|p| p[1] - p[0]).collect();
    let monotone_tail = diffs.iter().all(|&d| d >= -1e-3) || diffs.iter().all(|&d| d <= 1e-3);
    SequenceLimit {
        estimate,
        sequence,
        converged,
        monotone_tail,
    }
}

/// Spectral radius of `C_phi`, `phi(s) = mu s + x`, from the iterates:
/// `r_n = (1/sqrt(mu)) (sup_t exp(-2 x_n t) w(mu^n t)/w(t))^{1/(2n)}`,
/// computed entirely in log-scale.
pub fn spectral_radius(w: &Weight, mu: f64, x: f64, n_max: u32) -> Result<SequenceLimit> {
    spectral_radius_with(w, mu, x, n_max, &ScanOptions::default())
}

pub fn spectral_radius_with(
    w: &Weight,
    mu: f64,
    x: f64,
    n_max: u32,
    opts: &ScanOptions,
) -> Result<SequenceLimit> {
    check_n_max(n_max)?;
    let phi = AffineSymbol::real(mu, x)?;
    let ln_mu = mu.ln();
    let sequence = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let it = log_iterate(&phi, n)?;
            let opt = sup_log(&damped_dilation(w, it.ln_mu, it.ln_x), opts)?;
            Ok((-0.5 * ln_mu + opt.ln_value / (2.0 * f64::from(n))).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarize(sequence))
}

/// Bounds on `rho(C_phi)^2` from the norm bounds of the iterates:
/// `L limsup (inf_t w(t)/w(L^n t))^{1/n}` and `L liminf (sup_t ...)^{1/n}`.
pub fn spectral_radius_bounds(w: &Weight, l: f64, n_max: u32) -> Result<SpectralRadiusBounds> {
    check_positive("L", l)?;
    check_n_max(n_max)?;
    let opts = ScanOptions::default();
    let ln_l = l.ln();
    let pairs = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let nf = f64::from(n);
            let obj = dilation_ratio(w, nf * ln_l);
            let lo = inf_log(&obj, &opts)?;
            let hi = sup_log(&obj, &opts)?;
            Ok(((ln_l + lo.ln_value / nf).exp(), (ln_l + hi.ln_value / nf).exp()))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let (lower, upper): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(SpectralRadiusBounds {
        lower: summarize(lower),
        upper: summarize(upper),
    })
}

/// Radii `(r, R)` of the annulus containing the spectrum of `C_phi` for
/// `phi(s) = mu s`, `mu != 1`:
/// `(1/sqrt(mu)) lim (inf_t w(mu^n t)/w(t))^{1/(2n)}` and the same with sup.
pub fn dilation_annulus(w: &Weight, mu: f64, n_max: u32) -> Result<(SequenceLimit, SequenceLimit)> {
    check_positive("mu", mu)?;
    check_n_max(n_max)?;
    if mu == 1.0 {
        return Err(ZenError::param("mu", "dilation annulus needs mu != 1"));
    }
    let opts = ScanOptions::default();
    let ln_mu = mu.ln();
    let pairs = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let nf = f64::from(n);
            let obj = damped_dilation(w, nf * ln_mu, f64::NEG_INFINITY);
            let lo = inf_log(&obj, &opts)?;
            let hi = sup_log(&obj, &opts)?;
            let radius = |ln_v: f64| (-0.5 * ln_mu + ln_v / (2.0 * nf)).exp();
            Ok((radius(lo.ln_value), radius(hi.ln_value)))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let (inner, outer): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok((summarize(inner), summarize(outer)))
}

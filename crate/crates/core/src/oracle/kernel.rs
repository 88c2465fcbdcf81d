//! Reproducing kernels in the time domain: `k_lambda(t) = exp(-conj(lambda) t) / w(t)`.

use num_complex::Complex64;
use serde::Serialize;

use super::grid::GridFunction;
use crate::error::{Result, ZenError};
use crate::quadrature::{integrate, QuadOptions};
use crate::weights::Weight;

/// Beyond `t = TAIL_START / Re lambda` only a tail bound is added.
const TAIL_START: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelNorm {
    pub norm: f64,
    pub norm_squared: f64,
    /// Estimate of the neglected tail beyond the cutoff.
    pub tail_bound: f64,
    pub cutoff: f64,
}

/// `||k_lambda||^2 = integral of exp(-2 Re(lambda) t) / w(t) dt`.
pub fn kernel_norm(lambda: Complex64, w: &Weight) -> Result<KernelNorm> {
    let a = lambda.re;
    if !(a > 0.0 && a.is_finite() && lambda.im.is_finite()) {
        return Err(ZenError::param("lambda", format!("need Re lambda > 0, got {lambda}")));
    }
    let e = w.exponents();
    // 1/w ~ t^{-e0} near zero
    if e.at_zero >= 1.0 {
        return Err(ZenError::Divergent(format!(
            "1/w grows like t^{} at 0 and is not integrable",
            -e.at_zero
        )));
    }
    let f = |t: f64| (-2.0 * a * t).exp() / w.eval(t);
    let opts = QuadOptions::with_rel_tol(1e-10);
    let cutoff = TAIL_START / a;
    let split = cutoff.min(1.0);
    let mut total = integrate(f, 0.0, split, opts)?.value;
    if cutoff > split {
        total += integrate(f, split, cutoff, opts)?.value;
    }
    // 1/w grows at most like t^{-e_inf}; bound the tail by that power times the exponential.
    let growth = (-e.at_infinity).max(0.0);
    let tail_bound = f(cutoff) / (2.0 * a) * (1.0 + growth / (2.0 * a * cutoff)).max(1.0);
    if !total.is_finite() || total <= 0.0 {
        return Err(ZenError::Divergent("kernel norm integral is not finite and positive".into()));
    }
    Ok(KernelNorm {
        norm: total.sqrt(),
        norm_squared: total,
        tail_bound,
        cutoff,
    })
}

/// `|<k_n / ||k_n||, g>|` for each `n`. For fixed `g` this tends to zero
/// (normalized kernels converge weakly to 0 as `n -> inf`).
pub fn kernel_weak_null_check(w: &Weight, n_list: &[f64], g: &GridFunction) -> Result<Vec<f64>> {
    let nodes = g.grid.nodes();
    let h = g.grid.weights();
    n_list
        .iter()
        .map(|&n| {
            let k = kernel_norm(Complex64::new(n, 0.0), w)?;
            // k_n(t) w(t) = exp(-n t): the weight cancels in the inner product.
            let ip: Complex64 = g
                .values
                .iter()
                .zip(nodes)
                .zip(h)
                .map(|((v, &t), &dt)| v.conj() * ((-n * t).exp() * dt))
                .sum();
            Ok(ip.norm() / k.norm)
        })
        .collect()
}

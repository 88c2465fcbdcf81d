//! Adaptive Gauss-Kronrod quadrature (7/15-point pair) on finite and
//! semi-infinite intervals.
//!
//! The driver keeps a list of subintervals, always bisecting the one with
//! the largest error estimate, until the summed estimate drops below
//! `max(abs_tol, rel_tol * |I|)` or the subdivision budget runs out.

#![allow(clippy::excessive_precision)]

use rayon::prelude::*;

use crate::error::{Result, ZenError};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<B: Fn(&[f64], &mut [f64])>(f: &B, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // xs[0] is the center, then pairs (center - dx_j, center + dx_j)
    let mut xs = [center; 15];
    for j in 0..7 {
        xs[1 + 2 * j] = center - half * XGK[j];
        xs[2 + 2 * j] = center + half * XGK[j];
    }
    let mut fs = [0.0; 15];
    f(&xs, &mut fs);
    let mut gauss = fs[0] * WG[3];
    let mut kronrod = fs[0] * WGK[7];
    for j in 0..7 {
        let pair = fs[1 + 2 * j] + fs[2 + 2 * j];
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    // The Gauss/Kronrod difference is the (pessimistic) error estimate.
    let error = ((kronrod - gauss) * half).abs();
    Segment { a, b, value, error }
}

fn drive<B: Fn(&[f64], &mut [f64])>(f: B, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(ZenError::param("interval", "finite bounds required"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut segments = vec![kronrod15(&f, a, b)];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(ZenError::Divergent(format!(
                "integrand produced a non-finite value on [{a}, {b}]"
            )));
        }
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult {
                value,
                error,
                evaluations,
            });
        }
        if segments.len() >= opts.max_subdivisions {
            return Err(ZenError::NonConvergence(format!(
                "quadrature on [{a}, {b}] stalled at error {error:.3e} (target {target:.3e})"
            )));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval can no longer be split in floating point.
            return Ok(QuadResult {
                value,
                error,
                evaluations,
            });
        }
        segments.push(kronrod15(&f, seg.a, mid));
        segments.push(kronrod15(&f, mid, seg.b));
        evaluations += 30;
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    drive(
        |xs: &[f64], out: &mut [f64]| {
            for (o, &x) in out.iter_mut().zip(xs) {
                *o = f(x);
            }
        },
        a,
        b,
        opts,
    )
}

/// As [`integrate`], evaluating the 15 nodes of each panel in parallel.
/// Worth it only for expensive integrands.
pub fn integrate_par<F: Fn(f64) -> f64 + Sync>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    drive(
        |xs: &[f64], out: &mut [f64]| {
            out.par_iter_mut().zip(xs.par_iter()).for_each(|(o, &x)| *o = f(x));
        },
        a,
        b,
        opts,
    )
}

fn infinite_map<F: Fn(f64) -> f64>(f: F, a: f64) -> impl Fn(f64) -> f64 {
    move |u: f64| {
        let t = a + (1.0 - u) / u;
        let v = f(t);
        if v == 0.0 {
            0.0
        } else {
            v / (u * u)
        }
    }
}

/// Integrate `f` over `[a, inf)` through the substitution `t = a + (1 - u) / u`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate(infinite_map(f, a), 0.0, 1.0, opts)
}

pub fn integrate_to_infinity_par<F: Fn(f64) -> f64 + Sync>(
    f: F,
    a: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    integrate_par(infinite_map(f, a), 0.0, 1.0, opts)
}

//! Spectra of composition operators with affine symbols.
//!
//! Closed forms cover the parabolic case (for every weight), the power
//! weights and the Hardy-Bergman weight. For other weights a hyperbolic
//! symbol gets an enclosing annulus or disc from norms of iterates, plus a
//! subset certified by explicit eigenfunctions of infinite multiplicity.
//!
//! In every exact case the essential spectrum coincides with the spectrum.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenError};
use crate::norms::{dilation_annulus, spectral_radius};
use crate::oracle::LogGrid;
use crate::symbols::{AffineSymbol, SymbolKind};
use crate::weights::{Weight, WeightClass};

/// Modulus slack for membership tests.
const MODULUS_SLACK: f64 = 1e-12;
/// Distance tolerance for membership in a spiral closure.
const SPIRAL_TOL: f64 = 1e-9;
/// Spiral arcs are sampled until `|exp(-s0 t)|` falls below this.
const SPIRAL_CUTOFF: f64 = 1e-6;
/// Iterates used for general-weight enclosures.
pub const GENERAL_N_MAX: u32 = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpectralShape {
    Circle { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
    Disc { radius: f64 },
    /// Closure of `{exp(-s0 t) : t >= 0} ∪ {0}`.
    SpiralClosure { s0: Complex64 },
    Singleton { value: Complex64 },
    /// The spectrum lies in `bound` and contains `certified`.
    Enclosure {
        bound: Box<SpectralShape>,
        certified: Option<Box<SpectralShape>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSet {
    #[serde(flatten)]
    pub shape: SpectralShape,
    pub exact: bool,
}

/// A point on a plotted boundary, with the index of the curve it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub z: Complex64,
    pub component: usize,
}

fn positive(field: &'static str, r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(ZenError::param(field, format!("must be positive and finite, got {r}")))
    }
}

impl SpectralShape {
    pub fn circle(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self::Circle { radius })
    }

    pub fn annulus(r_in: f64, r_out: f64) -> Result<Self> {
        positive("r_in", r_in)?;
        positive("r_out", r_out)?;
        if r_in > r_out {
            return Err(ZenError::param("r_in", format!("r_in = {r_in} exceeds r_out = {r_out}")));
        }
        Ok(Self::Annulus { r_in, r_out })
    }

    pub fn disc(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self::Disc { radius })
    }

    /// Spiral closure; a purely imaginary `s0` gives the unit circle and
    /// `s0 = 0` the point 1.
    pub fn spiral_closure(s0: Complex64) -> Result<Self> {
        if !(s0.re >= 0.0 && s0.re.is_finite() && s0.im.is_finite()) {
            return Err(ZenError::param("s0", format!("need finite s0 with Re s0 >= 0, got {s0}")));
        }
        Ok(if s0.re == 0.0 && s0.im == 0.0 {
            Self::Singleton {
                value: Complex64::new(1.0, 0.0),
            }
        } else if s0.re == 0.0 {
            Self::Circle { radius: 1.0 }
        } else {
            Self::SpiralClosure { s0 }
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Circle { radius } | Self::Disc { radius } => positive("radius", *radius),
            Self::Annulus { r_in, r_out } => Self::annulus(*r_in, *r_out).map(|_| ()),
            Self::SpiralClosure { s0 } => {
                if s0.re > 0.0 && s0.re.is_finite() && s0.im.is_finite() {
                    Ok(())
                } else {
                    Err(ZenError::param("s0", "spiral closure needs finite s0 with Re s0 > 0"))
                }
            }
            Self::Singleton { value } => {
                if value.re.is_finite() && value.im.is_finite() {
                    Ok(())
                } else {
                    Err(ZenError::param("value", "must be finite"))
                }
            }
            Self::Enclosure { bound, certified } => {
                bound.validate()?;
                if let Some(c) = certified {
                    c.validate()?;
                    let (lo, hi) = c.modulus_range();
                    let (blo, bhi) = bound.modulus_range();
                    if lo < blo * (1.0 - 1e-12) || hi > bhi * (1.0 + 1e-12) {
                        return Err(ZenError::param("certified", "certified subset exceeds the enclosure"));
                    }
                }
                Ok(())
            }
        }
    }

    /// Smallest and largest modulus of points in the set.
    pub fn modulus_range(&self) -> (f64, f64) {
        match self {
            Self::Circle { radius } => (*radius, *radius),
            Self::Annulus { r_in, r_out } => (*r_in, *r_out),
            Self::Disc { radius } => (0.0, *radius),
            Self::SpiralClosure { .. } => (0.0, 1.0),
            Self::Singleton { value } => (value.norm(), value.norm()),
            Self::Enclosure { bound, .. } => bound.modulus_range(),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let m = z.norm();
        match self {
            Self::Circle { radius } => (m - radius).abs() <= MODULUS_SLACK * radius.max(1.0),
            Self::Annulus { r_in, r_out } => {
                m >= r_in - MODULUS_SLACK * r_in.max(1.0) && m <= r_out + MODULUS_SLACK * r_out.max(1.0)
            }
            Self::Disc { radius } => m <= radius + MODULUS_SLACK * radius.max(1.0),
            Self::Singleton { value } => (z - value).norm() <= MODULUS_SLACK * value.norm().max(1.0),
            Self::SpiralClosure { s0 } => spiral_contains(*s0, z),
            Self::Enclosure { bound, .. } => bound.contains(z),
        }
    }

    /// `n` points on each boundary curve. Annuli give two circles (inner
    /// first); a spiral closure gives `n` points along `exp(-s0 t)`,
    /// `t in [0, T]` with `|exp(-s0 T)| < 1e-6`, plus the origin. Requires
    /// `n >= 3`.
    pub fn boundary_samples(&self, n: usize) -> Result<Vec<BoundaryPoint>> {
        if n < 3 {
            return Err(ZenError::param("n", format!("need at least 3 samples, got {n}")));
        }
        let circle = |r: f64, component: usize| {
            (0..n).map(move |k| BoundaryPoint {
                z: Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64),
                component,
            })
        };
        Ok(match self {
            Self::Circle { radius } | Self::Disc { radius } => circle(*radius, 0).collect(),
            Self::Annulus { r_in, r_out } => circle(*r_in, 0).chain(circle(*r_out, 1)).collect(),
            Self::Singleton { value } => vec![BoundaryPoint {
                z: *value,
                component: 0,
            }],
            Self::SpiralClosure { s0 } => {
                let t_end = (1.0 / SPIRAL_CUTOFF).ln() / s0.re * (1.0 + 1e-9);
                let mut pts: Vec<BoundaryPoint> = (0..n)
                    .map(|k| BoundaryPoint {
                        z: (-s0 * (t_end * k as f64 / (n - 1) as f64)).exp(),
                        component: 0,
                    })
                    .collect();
                pts.push(BoundaryPoint {
                    z: Complex64::new(0.0, 0.0),
                    component: 1,
                });
                pts
            }
            Self::Enclosure { bound, certified } => {
                let mut pts = bound.boundary_samples(n)?;
                if let Some(c) = certified {
                    let offset = pts.iter().map(|p| p.component + 1).max().unwrap_or(0);
                    pts.extend(c.boundary_samples(n)?.into_iter().map(|p| BoundaryPoint {
                        z: p.z,
                        component: p.component + offset,
                    }));
                }
                pts
            }
        })
    }
}

/// Distance test against the curve `exp(-s0 t)`, `t >= 0`, and its limit 0.
fn spiral_contains(s0: Complex64, z: Complex64) -> bool {
    let m = z.norm();
    if m <= SPIRAL_TOL {
        return true;
    }
    if m > 1.0 + SPIRAL_TOL {
        return false;
    }
    let a = s0.re;
    // curve points within the tolerance have modulus in [m - tol, m + tol]
    let t_lo = (-(m + SPIRAL_TOL).ln() / a).max(0.0);
    let t_hi = -((m - SPIRAL_TOL).max(f64::MIN_POSITIVE)).ln() / a;
    let dist = |t: f64| ((-s0 * t).exp() - z).norm();
    let turns = s0.im.abs() * (t_hi - t_lo) / (2.0 * PI);
    let samples = ((turns * 64.0).ceil() as usize).clamp(16, 100_000);
    let step = (t_hi - t_lo) / samples as f64;
    let (mut best_t, mut best) = (t_lo, dist(t_lo));
    for i in 1..=samples {
        let t = t_lo + step * i as f64;
        let d = dist(t);
        if d < best {
            best = d;
            best_t = t;
        }
    }
    if best <= SPIRAL_TOL {
        return true;
    }
    // golden-section refinement around the best sample
    let (mut lo, mut hi) = ((best_t - step).max(t_lo), (best_t + step).min(t_hi));
    for _ in 0..200 {
        let c = hi - 0.618_033_988_749_894_8 * (hi - lo);
        let d = lo + 0.618_033_988_749_894_8 * (hi - lo);
        if dist(c) < dist(d) {
            hi = d;
        } else {
            lo = c;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    dist(0.5 * (lo + hi)).min(best) <= SPIRAL_TOL
}

impl SpectralSet {
    pub fn exact(shape: SpectralShape) -> Self {
        SpectralSet { shape, exact: true }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.shape.contains(z)
    }

    pub fn boundary_samples(&self, n: usize) -> Result<Vec<BoundaryPoint>> {
        self.shape.boundary_samples(n)
    }

    pub fn modulus_range(&self) -> (f64, f64) {
        self.shape.modulus_range()
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()
    }
}

/// Writes boundary samples as `re,im,component` rows with a header.
pub fn write_boundary_csv(out: impl Write, points: &[BoundaryPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| ZenError::Io(e.to_string());
    w.write_record(["re", "im", "component"]).map_err(io)?;
    for p in points {
        w.write_record([p.z.re.to_string(), p.z.im.to_string(), p.component.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| ZenError::Io(e.to_string()))
}

/// Open interval of real parts; empty when `lower >= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaRange {
    pub lower: f64,
    pub upper: f64,
}

impl AlphaRange {
    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper)
    }

    pub fn contains(&self, a: f64) -> bool {
        a > self.lower && a < self.upper
    }
}

/// Real parts `a` of `alpha` with `integral |t^alpha|^2 / w dt < inf`, i.e.
/// `t^alpha / w` in `L^2(w)`: `(e0 - 1)/2 < a < (e_inf - 1)/2`.
pub fn eigen_admissible_alphas(w: &Weight) -> AlphaRange {
    let e = w.exponents();
    AlphaRange {
        lower: (e.at_zero - 1.0) / 2.0,
        upper: (e.at_infinity - 1.0) / 2.0,
    }
}

/// Which form of the operator an eigenfunction belongs to:
/// `A f(t) = (1/mu) f(t/mu) exp(-x t/mu)` or its adjoint
/// `A* g(u) = g(mu u) exp(-x u) w(mu u)/w(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSide {
    A,
    AStar,
}

/// Admissible real parts for the damped eigenfunctions (`x > 0`):
/// `t^alpha exp(-beta t)` for `A` and `t^alpha exp(-beta t)/w` for `A*`.
/// Only integrability at 0 constrains `alpha`.
pub fn damped_admissible_alphas(w: &Weight, side: OperatorSide) -> AlphaRange {
    let e0 = w.exponents().at_zero;
    let lower = match side {
        OperatorSide::A => (-1.0 - e0) / 2.0,
        OperatorSide::AStar => (e0 - 1.0) / 2.0,
    };
    AlphaRange {
        lower,
        upper: f64::INFINITY,
    }
}

fn power_radius(alpha: f64, mu: f64) -> f64 {
    mu.powf(-(alpha + 2.0) / 2.0)
}

/// Prediction of `sigma(C_phi)`.
pub fn predict_spectrum(w: &Weight, phi: &AffineSymbol) -> Result<SpectralSet> {
    predict_spectrum_with(w, phi, GENERAL_N_MAX)
}

/// Prediction of the essential spectrum. It equals [`predict_spectrum`]:
/// the exact cases are proved to coincide, and the certified subsets for
/// general weights consist of eigenvalues of infinite multiplicity.
pub fn predict_essential_spectrum(w: &Weight, phi: &AffineSymbol) -> Result<SpectralSet> {
    predict_spectrum(w, phi)
}

pub fn predict_spectrum_with(w: &Weight, phi: &AffineSymbol, n_max: u32) -> Result<SpectralSet> {
    match phi.kind() {
        SymbolKind::Identity => Ok(SpectralSet::exact(SpectralShape::Singleton {
            value: Complex64::new(1.0, 0.0),
        })),
        SymbolKind::Parabolic => Ok(SpectralSet::exact(SpectralShape::spiral_closure(phi.s0())?)),
        SymbolKind::Hyperbolic => {
            // The imaginary part of s0 is removed by a unitary similarity.
            let (mu, x) = (phi.mu(), phi.x());
            match w.class() {
                WeightClass::Power { alpha } => {
                    let r = power_radius(alpha, mu);
                    let shape = if x == 0.0 {
                        SpectralShape::circle(r)?
                    } else {
                        SpectralShape::disc(r)?
                    };
                    Ok(SpectralSet::exact(shape))
                }
                WeightClass::HardyBergman => {
                    let shape = if x == 0.0 {
                        let (a, b) = (1.0 / mu, 1.0 / mu.sqrt());
                        SpectralShape::annulus(a.min(b), a.max(b))?
                    } else {
                        SpectralShape::disc(1.0 / mu)?
                    };
                    Ok(SpectralSet::exact(shape))
                }
                WeightClass::General => general_hyperbolic(w, mu, x, n_max),
            }
        }
    }
}

/// Radius interval `[lo, hi]` (either end possibly 0) as a shape.
fn radial_shape(lo: f64, hi: f64) -> Result<SpectralShape> {
    if lo > 0.0 {
        SpectralShape::annulus(lo, hi)
    } else {
        SpectralShape::disc(hi)
    }
}

fn general_hyperbolic(w: &Weight, mu: f64, x: f64, n_max: u32) -> Result<SpectralSet> {
    // Each term of the iterate sequences is itself a valid bound
    // (rho(T) <= ||T^n||^{1/n}), so the tightest term is used.
    let (bound_lo, bound_hi, cert) = if x == 0.0 {
        let (inner, outer) = dilation_annulus(w, mu, n_max)?;
        let lo = inner.sequence.iter().copied().fold(0.0, f64::max);
        let hi = outer.sequence.iter().copied().fold(f64::INFINITY, f64::min);
        let alphas = eigen_admissible_alphas(w);
        let cert = (!alphas.is_empty()).then(|| {
            let (a, b) = (mu.powf(alphas.lower), mu.powf(alphas.upper));
            (a.min(b), a.max(b))
        });
        (lo, hi, cert)
    } else {
        let r = spectral_radius(w, mu, x, n_max)?;
        let hi = r.sequence.iter().copied().fold(f64::INFINITY, f64::min);
        // Eigenvalues of A (mu > 1) or A* (mu < 1) fill a disc of radius mu^{(e0-1)/2}.
        let e0 = w.exponents().at_zero;
        (0.0, hi, Some((0.0, mu.powf((e0 - 1.0) / 2.0))))
    };
    if !(bound_hi > 0.0 && bound_hi.is_finite()) {
        return Err(ZenError::NonConvergence(format!(
            "spectral enclosure radius is not finite and positive ({bound_hi})"
        )));
    }
    let bound_lo = bound_lo.min(bound_hi);
    let bound = radial_shape(bound_lo, bound_hi)?;
    // certified ∩ bound is still a subset of the spectrum
    let certified = match cert {
        Some((lo, hi)) => {
            let lo = lo.max(bound_lo);
            let hi = hi.min(bound_hi);
            if hi > 0.0 && lo <= hi {
                Some(Box::new(radial_shape(lo, hi)?))
            } else {
                None
            }
        }
        None => None,
    };
    Ok(SpectralSet {
        shape: SpectralShape::Enclosure {
            bound: Box::new(bound),
            certified,
        },
        exact: false,
    })
}

/// `E = ∪_n (base^n, base^n (1 + delta))` with `base > 1`, `0 < delta < base - 1`,
/// so that `base E = E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantSet {
    base: f64,
    delta: f64,
}

impl InvariantSet {
    pub fn new(base: f64, delta: f64) -> Result<Self> {
        if !(base > 1.0 && base.is_finite()) {
            return Err(ZenError::param("mu", format!("need mu > 1, got {base}")));
        }
        if !(delta > 0.0 && delta < base - 1.0) {
            return Err(ZenError::param("delta", format!("need 0 < delta < mu - 1, got {delta}")));
        }
        Ok(Self { base, delta })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// Membership in the open intervals. The fractional part of `log_base t`
    /// is snapped to 1e-9 so `t` and `base^k t` classify alike.
    pub fn contains(&self, t: f64) -> bool {
        if !(t > 0.0 && t.is_finite()) {
            return false;
        }
        let s = (t.ln() / self.base.ln() * 1e9).round() / 1e9;
        let frac = s - s.floor();
        let top = (1.0 + self.delta).ln() / self.base.ln();
        frac > 0.0 && frac < top
    }
}

pub fn invariant_set(mu: f64, delta: f64, t: f64) -> Result<bool> {
    Ok(InvariantSet::new(mu, delta)?.contains(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigencheck {
    pub eigenvalue: Complex64,
    /// `||(op - lambda) f|| / ||f||` in the discrete `L^2(w)` norm.
    pub relative_residual: f64,
}

/// Builds the closed-form eigenfunction for `(side, x)`, applies the
/// operator pointwise on the grid and measures the eigen-equation residual.
///
/// * `A*`, `x = 0`: `f = t^alpha / w`, eigenvalue `mu^alpha`;
/// * `A`, `x > 0`, `mu > 1`: `f = t^alpha exp(-beta t)`, `beta = x/(mu-1)`,
///   eigenvalue `mu^{-(alpha+1)}`;
/// * `A*`, `x > 0`, `mu < 1`: `f = t^alpha exp(-beta t) / w`,
///   `beta = x/(1-mu)`, eigenvalue `mu^alpha`.
///
/// With `truncation`, `f` is multiplied by the indicator of an invariant
/// set, which leaves the eigenvalue unchanged.
pub fn residual_eigencheck(
    w: &Weight,
    mu: f64,
    x: f64,
    alpha: Complex64,
    side: OperatorSide,
    grid: &LogGrid,
    truncation: Option<&InvariantSet>,
) -> Result<Eigencheck> {
    if !(mu > 0.0 && mu.is_finite()) || mu == 1.0 {
        return Err(ZenError::param("mu", format!("need mu > 0, mu != 1, got {mu}")));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(ZenError::param("x", format!("need x >= 0, got {x}")));
    }
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(ZenError::param("alpha", "must be finite"));
    }
    let (range, beta, divide_by_w) = match (side, x > 0.0) {
        (OperatorSide::AStar, false) => (eigen_admissible_alphas(w), 0.0, true),
        (OperatorSide::A, true) if mu > 1.0 => (damped_admissible_alphas(w, side), x / (mu - 1.0), false),
        (OperatorSide::AStar, true) if mu < 1.0 => (damped_admissible_alphas(w, side), x / (1.0 - mu), true),
        _ => {
            return Err(ZenError::param(
                "side",
                format!("no eigenfunction family for side {side:?} with mu = {mu}, x = {x}"),
            ))
        }
    };
    if !range.contains(alpha.re) {
        return Err(ZenError::param(
            "alpha",
            format!(
                "Re alpha = {} outside the admissible interval ({}, {}); the eigenfunction is not in the space",
                alpha.re, range.lower, range.upper
            ),
        ));
    }
    if let Some(e) = truncation {
        let m = if mu > 1.0 { mu } else { 1.0 / mu };
        if (e.base().ln() - m.ln()).abs() > 1e-12 * m.ln() {
            return Err(ZenError::param("truncation", "invariant set base must equal max(mu, 1/mu)"));
        }
    }

    let f = |t: f64| {
        let mut v = (alpha * t.ln()).exp() * (-beta * t).exp();
        if divide_by_w {
            v /= w.eval(t);
        }
        if truncation.is_some_and(|e| !e.contains(t)) {
            v = Complex64::new(0.0, 0.0);
        }
        v
    };
    let nodes = grid.nodes();
    let values: Vec<Complex64> = nodes.iter().map(|&t| f(t)).collect();
    let n = nodes.len() as i64;
    let shift = grid.shift_for(mu);
    // f at t_j * factor: read the node when the grid is closed under the map.
    let mapped = |j: usize, steps: Option<i64>, t: f64| match steps {
        Some(s) if (0..n).contains(&(j as i64 + s)) => values[(j as i64 + s) as usize],
        _ => f(t),
    };
    let (eigenvalue, image): (Complex64, Vec<Complex64>) = match side {
        OperatorSide::A => {
            let lambda = (-(alpha + 1.0) * mu.ln()).exp();
            let img = nodes
                .iter()
                .enumerate()
                .map(|(j, &t)| mapped(j, shift.map(|s| -s), t / mu) * (-x * t / mu).exp() / mu)
                .collect();
            (lambda, img)
        }
        OperatorSide::AStar => {
            let lambda = (alpha * mu.ln()).exp();
            let img = nodes
                .iter()
                .enumerate()
                .map(|(j, &t)| mapped(j, shift, mu * t) * (-x * t).exp() * (w.eval(mu * t) / w.eval(t)))
                .collect();
            (lambda, img)
        }
    };
    let gram = grid.gram(w);
    let (mut num, mut den) = (0.0, 0.0);
    for ((fv, gv), g) in values.iter().zip(&image).zip(&gram) {
        num += (gv - eigenvalue * fv).norm_sqr() * g;
        den += fv.norm_sqr() * g;
    }
    if den == 0.0 {
        return Err(ZenError::param("grid", "eigenfunction vanishes on the grid"));
    }
    Ok(Eigencheck {
        eigenvalue,
        relative_residual: (num / den).sqrt(),
    })
}

//! Semigroups of affine self-maps `phi_t` of the right half-plane and the
//! composition-operator semigroups they induce.
//!
//! The generator `G(z) = p z + p alpha` (`p != 0`) or `G(z) = alpha`
//! (`p = 0`) gives the flow
//!
//! ```text
//! phi_t(z) = e^{pt} z + alpha (e^{pt} - 1)      or      phi_t(z) = z + alpha t,
//! ```
//!
//! with angular derivative `L_t = e^{-delta t}` at infinity, `delta = p`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenError};
use crate::norms::{norm_bounds, NormBounds};
use crate::spectra::{predict_spectrum, SpectralSet};
use crate::symbols::AffineSymbol;
use crate::weights::Weight;

/// Margins above `-BP_TOL * max(1, |Re G|)` count as satisfying the
/// Berkson-Porta inequality; the finite-difference rounding error grows
/// with `|Re G|`.
const BP_TOL: f64 = 1e-9;
/// Relative finite-difference step `h = x * BP_STEP`.
const BP_STEP: f64 = 1e-5;

/// `G(z) = p z + p alpha` for `p != 0`, `G(z) = alpha` for `p = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorRepr", into = "GeneratorRepr")]
pub struct AffineGenerator {
    p: f64,
    alpha: Complex64,
}

#[derive(Serialize, Deserialize)]
struct GeneratorRepr {
    p: f64,
    alpha: [f64; 2],
}

impl TryFrom<GeneratorRepr> for AffineGenerator {
    type Error = ZenError;
    fn try_from(r: GeneratorRepr) -> Result<Self> {
        AffineGenerator::new(r.p, Complex64::new(r.alpha[0], r.alpha[1]))
    }
}

impl From<AffineGenerator> for GeneratorRepr {
    fn from(g: AffineGenerator) -> Self {
        GeneratorRepr {
            p: g.p,
            alpha: [g.alpha.re, g.alpha.im],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupClass {
    /// `phi_t` is a self-map for every real `t`.
    Group,
    SemigroupOnly,
}

impl AffineGenerator {
    /// Rejects generators whose flow leaves the half-plane: `p > 0` needs
    /// `Re alpha >= 0`, `p < 0` needs `Re alpha <= 0`, `p = 0` needs `Re alpha >= 0`.
    pub fn new(p: f64, alpha: Complex64) -> Result<Self> {
        if !p.is_finite() {
            return Err(ZenError::param("p", "must be finite"));
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(ZenError::param("alpha", "must be finite"));
        }
        let ok = if p < 0.0 { alpha.re <= 0.0 } else { alpha.re >= 0.0 };
        if !ok {
            return Err(ZenError::InvalidGenerator(format!(
                "p = {p} with Re alpha = {}: the flow does not map the half-plane into itself",
                alpha.re
            )));
        }
        Ok(Self { p, alpha })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// `G(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if self.p == 0.0 {
            self.alpha
        } else {
            self.p * z + self.p * self.alpha
        }
    }
}

/// `phi_t` for `t >= 0`.
pub fn flow(gen: &AffineGenerator, t: f64) -> Result<AffineSymbol> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(ZenError::param("t", format!("flow time must be >= 0, got {t}")));
    }
    flow_unchecked(gen, t)
}

fn flow_unchecked(gen: &AffineGenerator, t: f64) -> Result<AffineSymbol> {
    if gen.p == 0.0 {
        return AffineSymbol::new(1.0, gen.alpha * t);
    }
    let pt = gen.p * t;
    let mu = pt.exp();
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(ZenError::param("t", format!("e^(pt) = e^{pt} is out of range")));
    }
    AffineSymbol::new(mu, gen.alpha * pt.exp_m1())
}

/// `phi_t` for any real `t`; negative times are allowed only for groups.
pub fn flow_signed(gen: &AffineGenerator, t: f64) -> Result<AffineSymbol> {
    if t >= 0.0 {
        return flow(gen, t);
    }
    if classify_group(gen) != GroupClass::Group {
        return Err(ZenError::param(
            "t",
            format!("negative time {t} needs a group (Re alpha = 0), got Re alpha = {}", gen.alpha.re),
        ));
    }
    if !t.is_finite() {
        return Err(ZenError::param("t", "must be finite"));
    }
    flow_unchecked(gen, t)
}

/// Generator of `t -> phi_t^{-1}`: `(-p, alpha)`, or `(0, -alpha)` when `p = 0`.
/// Only groups have one.
pub fn inverse_generator(gen: &AffineGenerator) -> Result<AffineGenerator> {
    if classify_group(gen) != GroupClass::Group {
        return Err(ZenError::InvalidGenerator(
            "only groups (Re alpha = 0) have an inverse semigroup of self-maps".into(),
        ));
    }
    if gen.p == 0.0 {
        AffineGenerator::new(0.0, -gen.alpha)
    } else {
        AffineGenerator::new(-gen.p, gen.alpha)
    }
}

/// `delta = lim G(z)/z` at infinity.
pub fn delta(gen: &AffineGenerator) -> f64 {
    gen.p
}

/// Bounds on `||C_{phi_t}||^2`, i.e. [`norm_bounds`] at `L_t = e^{-delta t}`.
pub fn semigroup_norm_bounds(w: &Weight, gen: &AffineGenerator, t: f64) -> Result<NormBounds> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(ZenError::param("t", format!("flow time must be >= 0, got {t}")));
    }
    let l = (-delta(gen) * t).exp();
    norm_bounds(w, l)
}

pub fn classify_group(gen: &AffineGenerator) -> GroupClass {
    if gen.alpha.re == 0.0 {
        GroupClass::Group
    } else {
        GroupClass::SemigroupOnly
    }
}

/// `sigma(C_{phi_t})` for `t > 0`.
pub fn semigroup_spectrum(w: &Weight, gen: &AffineGenerator, t: f64) -> Result<SpectralSet> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(ZenError::param("t", format!("need t > 0, got {t}")));
    }
    predict_spectrum(w, &flow(gen, t)?)
}

/// Rectangular sample of the open right half-plane: `x_i = x_lo + (x_hi - x_lo) i / nx`
/// for `i = 1..=nx` and `ny` equally spaced `y` values from `y_lo` to `y_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlaneGrid {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub nx: usize,
    pub ny: usize,
}

impl HalfPlaneGrid {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(x_lo >= 0.0 && x_hi > x_lo && x_hi.is_finite()) {
            return Err(ZenError::param("grid", "need 0 <= x_lo < x_hi < inf"));
        }
        if !(y_hi >= y_lo && y_lo.is_finite() && y_hi.is_finite()) {
            return Err(ZenError::param("grid", "need finite y_lo <= y_hi"));
        }
        if nx == 0 || ny == 0 {
            return Err(ZenError::param("grid", "need at least one point in each direction"));
        }
        Ok(Self {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
            nx,
            ny,
        })
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(self.nx * self.ny);
        for i in 1..=self.nx {
            let x = self.x_lo + (self.x_hi - self.x_lo) * i as f64 / self.nx as f64;
            for j in 0..self.ny {
                let y = if self.ny == 1 {
                    self.y_lo
                } else {
                    self.y_lo + (self.y_hi - self.y_lo) * j as f64 / (self.ny - 1) as f64
                };
                pts.push(Complex64::new(x, y));
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerksonPortaReport {
    pub holds: bool,
    /// Minimum of `Re G - x d(Re G)/dx` over the grid.
    pub worst_margin: f64,
    pub witness: Complex64,
}

/// Samples `Re G(z) - x d(Re G)/dx` (central differences, `h = x * 1e-5`)
/// over the grid. A generator of a semigroup of self-maps keeps it
/// non-negative.
pub fn berkson_porta_check<G>(g: G, grid: &HalfPlaneGrid) -> Result<BerksonPortaReport>
where
    G: Fn(Complex64) -> Complex64 + Sync,
{
    let margins = grid
        .points()
        .into_par_iter()
        .map(|z| {
            let h = z.re * BP_STEP;
            let re_g = g(z).re;
            let plus = g(z + h).re;
            let minus = g(z - h).re;
            if !(re_g.is_finite() && plus.is_finite() && minus.is_finite()) {
                return Err(ZenError::param("generator", format!("G is not finite near {z}")));
            }
            let margin = re_g - z.re * (plus - minus) / (2.0 * h);
            Ok((z, margin, margin >= -BP_TOL * re_g.abs().max(1.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (witness, worst_margin, _) = margins
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| ZenError::param("grid", "no points"))?;
    Ok(BerksonPortaReport {
        holds: margins.iter().all(|m| m.2),
        worst_margin,
        witness,
    })
}

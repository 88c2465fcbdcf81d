//! Positive Borel measures on `[0, inf)` defining Zen spaces, and the
//! synthesis of their time-domain weights
//! `w(t) = 2 pi * integral of exp(-2 r t) d nu(r)`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Result, ZenError};
use crate::quadrature::{integrate_to_infinity, QuadOptions};

/// A point mass `mass * delta_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub r: f64,
    pub mass: f64,
}

/// Absolutely continuous part of a [`ZenMeasure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Density {
    #[default]
    None,
    /// `coeff * r^alpha dr`.
    Power { coeff: f64, alpha: f64 },
    /// Piecewise-linear density through `(r, value)` samples, zero below the
    /// first sample and continued beyond the last one as
    /// `value_last * (r / r_last)^tail_exponent`.
    Table {
        points: Vec<(f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_exponent: Option<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MeasureFile {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    density: Density,
}

/// Number of t-grid points per decade used by [`doubling_ratio`].
const DOUBLING_POINTS_PER_DECADE: usize = 100;
const DOUBLING_LOG10_MIN: f64 = -12.0;
const DOUBLING_LOG10_MAX: f64 = 12.0;

/// A validated doubling measure on `[0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZenMeasure {
    atoms: Vec<Atom>,
    density: Density,
    doubling: f64,
}

impl ZenMeasure {
    pub fn new(atoms: Vec<Atom>, density: Density) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !(a.r >= 0.0 && a.r.is_finite()) {
                return Err(ZenError::InvalidMeasure(format!("atom {i}: location r must be >= 0")));
            }
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(ZenError::InvalidMeasure(format!("atom {i}: mass must be > 0")));
            }
            if i > 0 && atoms[i - 1].r >= a.r {
                return Err(ZenError::InvalidMeasure(
                    "atom locations must be strictly increasing".into(),
                ));
            }
        }
        match &density {
            Density::None => {}
            Density::Power { coeff, alpha } => {
                if !(*coeff > 0.0 && coeff.is_finite()) {
                    return Err(ZenError::InvalidMeasure("power density: coeff must be > 0".into()));
                }
                if !(*alpha > -1.0 && alpha.is_finite()) {
                    return Err(ZenError::InvalidMeasure("power density: alpha must be > -1".into()));
                }
            }
            Density::Table {
                points,
                tail_exponent,
            } => {
                if points.len() < 2 {
                    return Err(ZenError::InvalidMeasure("table density needs at least two points".into()));
                }
                for (i, &(r, v)) in points.iter().enumerate() {
                    if !(r >= 0.0 && r.is_finite() && v >= 0.0 && v.is_finite()) {
                        return Err(ZenError::InvalidMeasure(format!(
                            "table point {i}: need r >= 0 and value >= 0"
                        )));
                    }
                    if i > 0 && points[i - 1].0 >= r {
                        return Err(ZenError::InvalidMeasure(
                            "table sample points must be strictly increasing".into(),
                        ));
                    }
                }
                if points.iter().all(|p| p.1 == 0.0) {
                    return Err(ZenError::InvalidMeasure("table density is identically zero".into()));
                }
                if let Some(e) = tail_exponent {
                    if !e.is_finite() {
                        return Err(ZenError::InvalidMeasure("tail_exponent must be finite".into()));
                    }
                }
            }
        }
        if atoms.is_empty() && matches!(density, Density::None) {
            return Err(ZenError::InvalidMeasure("measure is zero".into()));
        }
        let mut measure = ZenMeasure {
            atoms,
            density,
            doubling: f64::NAN,
        };
        measure.doubling = doubling_ratio(&measure)?;
        Ok(measure)
    }

    /// Dirac mass `mass * delta_0`.
    pub fn dirac(mass: f64) -> Result<Self> {
        Self::new(vec![Atom { r: 0.0, mass }], Density::None)
    }

    /// `coeff * r^alpha dr`.
    pub fn power(coeff: f64, alpha: f64) -> Result<Self> {
        Self::new(Vec::new(), Density::Power { coeff, alpha })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    /// Doubling ratio computed at construction.
    pub fn doubling(&self) -> f64 {
        self.doubling
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(ZenError::param("scale", "must be a positive finite number"));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                r: a.r,
                mass: a.mass * c,
            })
            .collect();
        let density = match &self.density {
            Density::None => Density::None,
            Density::Power { coeff, alpha } => Density::Power {
                coeff: coeff * c,
                alpha: *alpha,
            },
            Density::Table {
                points,
                tail_exponent,
            } => Density::Table {
                points: points.iter().map(|&(r, v)| (r, v * c)).collect(),
                tail_exponent: *tail_exponent,
            },
        };
        Self::new(atoms, density)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MeasureFile =
            serde_json::from_str(s).map_err(|e| ZenError::Parse(format!("measure file: {e}")))?;
        Self::new(file.atoms, file.density)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ZenError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "atoms": self.atoms,
            "density": self.density,
        })
    }

    /// `nu[0, t)`, exact for atoms, power and piecewise-linear densities.
    pub fn mass_below(&self, t: f64) -> Result<f64> {
        let atoms: f64 = self.atoms.iter().filter(|a| a.r < t).map(|a| a.mass).sum();
        let dens = match &self.density {
            Density::None => 0.0,
            Density::Power { coeff, alpha } => coeff * t.powf(alpha + 1.0) / (alpha + 1.0),
            Density::Table {
                points,
                tail_exponent,
            } => table_mass_below(points, *tail_exponent, t)?,
        };
        Ok(atoms + dens)
    }

    /// Value of the density part at `r` (zero for purely atomic measures).
    pub fn density_at(&self, r: f64) -> f64 {
        match &self.density {
            Density::None => 0.0,
            Density::Power { coeff, alpha } => {
                if r > 0.0 {
                    coeff * r.powf(*alpha)
                } else {
                    0.0
                }
            }
            Density::Table {
                points,
                tail_exponent,
            } => {
                let &(r_last, v_last) = points.last().expect("validated");
                if r < points[0].0 {
                    return 0.0;
                }
                if r >= r_last {
                    return match tail_exponent {
                        Some(e) if v_last > 0.0 => v_last * (r / r_last).powf(*e),
                        _ if r == r_last => v_last,
                        _ => 0.0,
                    };
                }
                let i = points.partition_point(|p| p.0 <= r) - 1;
                let ((a, va), (b, vb)) = (points[i], points[i + 1]);
                va + (vb - va) * (r - a) / (b - a)
            }
        }
    }

    /// Power-law exponents `(e0, e_inf)` of the synthesized weight,
    /// `w(t) ~ C t^e` as `t -> 0+` and `t -> inf`. Exponential decay at
    /// infinity is reported as `-inf`.
    pub fn weight_exponents(&self) -> (f64, f64) {
        let mut at_zero = f64::INFINITY;
        let mut at_inf = f64::NEG_INFINITY;
        for a in &self.atoms {
            at_zero = at_zero.min(0.0);
            if a.r == 0.0 {
                at_inf = at_inf.max(0.0);
            }
        }
        match &self.density {
            Density::None => {}
            Density::Power { alpha, .. } => {
                at_zero = at_zero.min(-(alpha + 1.0));
                at_inf = at_inf.max(-(alpha + 1.0));
            }
            Density::Table {
                points,
                tail_exponent,
            } => {
                let e = tail_exponent.unwrap_or(f64::NEG_INFINITY);
                let last = points.last().expect("validated").1;
                let zero_exp = if last > 0.0 && e >= -1.0 { -(e + 1.0) } else { 0.0 };
                at_zero = at_zero.min(zero_exp);
                // Behaviour near r = 0 decides the decay of w at infinity.
                let (r0, v0) = points[0];
                if r0 == 0.0 {
                    if v0 > 0.0 {
                        at_inf = at_inf.max(-1.0);
                    } else if points[1].1 > 0.0 {
                        at_inf = at_inf.max(-2.0);
                    }
                }
            }
        }
        (at_zero, at_inf)
    }
}

fn table_tail(points: &[(f64, f64)], tail_exponent: Option<f64>) -> Result<(f64, f64, f64)> {
    let &(r_last, v_last) = points.last().expect("validated");
    match tail_exponent {
        Some(e) => Ok((r_last, v_last, e)),
        None if v_last == 0.0 => Ok((r_last, 0.0, 0.0)),
        None => Err(ZenError::Divergent(
            "table density has a nonzero last sample but no tail_exponent".into(),
        )),
    }
}

fn table_mass_below(points: &[(f64, f64)], tail_exponent: Option<f64>, t: f64) -> Result<f64> {
    let mut total = 0.0;
    for w in points.windows(2) {
        let ((a, va), (b, vb)) = (w[0], w[1]);
        if t <= a {
            break;
        }
        let hi = t.min(b);
        let v_hi = va + (vb - va) * (hi - a) / (b - a);
        total += 0.5 * (va + v_hi) * (hi - a);
    }
    let (r_last, v_last, e) = table_tail(points, tail_exponent)?;
    if t > r_last && v_last > 0.0 {
        let x = t / r_last;
        total += if (e + 1.0).abs() < 1e-14 {
            v_last * r_last * x.ln()
        } else {
            v_last * r_last * (x.powf(e + 1.0) - 1.0) / (e + 1.0)
        };
    }
    Ok(total)
}

/// `(1 - exp(-z)) / z`, stable near zero.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -(-z).exp_m1() / z
    }
}

/// `(1 - exp(-z) (1 + z)) / z^2`, stable near zero.
fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0
    } else {
        (-(-z).exp_m1() - z * (-z).exp()) / (z * z)
    }
}

/// `integral of exp(-k r) * density(r) dr` for a piecewise-linear table,
/// integrated exactly segment by segment, plus the power-law tail.
fn table_laplace(points: &[(f64, f64)], tail_exponent: Option<f64>, k: f64) -> Result<f64> {
    let mut total = 0.0;
    for w in points.windows(2) {
        let ((a, va), (b, vb)) = (w[0], w[1]);
        let h = b - a;
        let slope = (vb - va) / h;
        let z = k * h;
        total += (-k * a).exp() * (va * h * phi1(z) + slope * h * h * phi2(z));
    }
    let (r_last, v_last, e) = table_tail(points, tail_exponent)?;
    if v_last > 0.0 {
        let tail = integrate_to_infinity(
            |r| v_last * (r / r_last).powf(e) * (-k * r).exp(),
            r_last,
            QuadOptions::with_rel_tol(1e-12),
        )?;
        total += tail.value;
    }
    Ok(total)
}

/// `w(t) = 2 pi (sum of m exp(-2 r t) + integral of exp(-2 r t) density(r) dr)`.
pub fn synthesize_weight(measure: &ZenMeasure, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(ZenError::param("t", "must be a positive finite number"));
    }
    let k = 2.0 * t;
    let atoms: f64 = measure.atoms.iter().map(|a| a.mass * (-k * a.r).exp()).sum();
    let dens = match &measure.density {
        Density::None => 0.0,
        // integral of c r^a e^{-kr} dr = c Gamma(a+1) / k^{a+1}
        Density::Power { coeff, alpha } => {
            coeff * (ln_gamma(alpha + 1.0) - (alpha + 1.0) * k.ln()).exp()
        }
        Density::Table {
            points,
            tail_exponent,
        } => table_laplace(points, *tail_exponent, k)?,
    };
    Ok(2.0 * PI * (atoms + dens))
}

/// `sup nu[0, 2t) / nu[0, t)` over a log-spaced grid spanning 24 decades.
pub fn doubling_ratio(measure: &ZenMeasure) -> Result<f64> {
    let n = ((DOUBLING_LOG10_MAX - DOUBLING_LOG10_MIN) as usize) * DOUBLING_POINTS_PER_DECADE;
    let mut sup: f64 = 0.0;
    for i in 0..=n {
        let t = 10f64.powf(DOUBLING_LOG10_MIN + i as f64 / DOUBLING_POINTS_PER_DECADE as f64);
        let below = measure.mass_below(t)?;
        if below <= 0.0 {
            return Err(ZenError::NonDoubling(format!(
                "nu[0, t) = 0 at t = {t:.3e}; the measure must charge every neighbourhood of 0"
            )));
        }
        let ratio = measure.mass_below(2.0 * t)? / below;
        if !ratio.is_finite() {
            return Err(ZenError::NonDoubling(format!("ratio is not finite at t = {t:.3e}")));
        }
        sup = sup.max(ratio);
    }
    Ok(sup)
}

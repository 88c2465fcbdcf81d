//! Weight families. Each family implements [`WeightFunction`]; a
//! [`Weight`] is a cheap, cloneable handle to one of them.
//!
//! Builtins are normalized: the `2 pi` of the Laplace synthesis formula and
//! any other multiplicative constant are dropped, since norm bounds and
//! spectra depend only on ratios `w(t) / w(L t)`. [`WeightFunction::measure`]
//! returns the measure that reproduces the normalized weight exactly, for
//! callers that need the literal isometry.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::measure::{synthesize_weight, Atom, Density, ZenMeasure};
use crate::error::{Result, ZenError};

/// Power-law exponents of a weight: `w(t) ~ C0 t^{at_zero}` as `t -> 0+`
/// and `w(t) ~ C t^{at_infinity}` as `t -> inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitExponents {
    pub at_zero: f64,
    pub at_infinity: f64,
}

/// Which closed-form spectral results apply to a weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum WeightClass {
    /// `t^{-(alpha+1)}`; the Hardy weight is `alpha = -1`.
    Power { alpha: f64 },
    /// `1 + 1/t`.
    HardyBergman,
    General,
}

/// A positive, non-increasing weight on `(0, inf)`.
pub trait WeightFunction: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn eval(&self, t: f64) -> f64;

    /// `ln w(e^u)`. Override when a closed form avoids overflow for very
    /// large or small `t`.
    fn ln_eval_at_log(&self, u: f64) -> f64 {
        self.eval(u.exp()).ln()
    }

    fn exponents(&self) -> LimitExponents;

    fn class(&self) -> WeightClass {
        WeightClass::General
    }

    fn nonincreasing(&self) -> bool {
        true
    }

    /// Measure whose synthesized weight (2 pi convention) equals this one.
    fn measure(&self) -> Option<ZenMeasure>;
}

#[derive(Debug, Clone, Copy)]
pub struct Hardy;

impl WeightFunction for Hardy {
    fn name(&self) -> String {
        "hardy".into()
    }
    fn eval(&self, _t: f64) -> f64 {
        1.0
    }
    fn ln_eval_at_log(&self, _u: f64) -> f64 {
        0.0
    }
    fn exponents(&self) -> LimitExponents {
        LimitExponents {
            at_zero: 0.0,
            at_infinity: 0.0,
        }
    }
    fn class(&self) -> WeightClass {
        WeightClass::Power { alpha: -1.0 }
    }
    fn measure(&self) -> Option<ZenMeasure> {
        ZenMeasure::dirac(1.0 / (2.0 * PI)).ok()
    }
}

/// Standard weighted Bergman weight `t^{-(alpha+1)}`, from `d nu = r^alpha dr`.
#[derive(Debug, Clone, Copy)]
pub struct AlphaBergman {
    alpha: f64,
}

impl AlphaBergman {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(ZenError::param("alpha", format!("must be > -1, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl WeightFunction for AlphaBergman {
    fn name(&self) -> String {
        format!("alpha-bergman:{}", self.alpha)
    }
    fn eval(&self, t: f64) -> f64 {
        t.powf(-(self.alpha + 1.0))
    }
    fn ln_eval_at_log(&self, u: f64) -> f64 {
        -(self.alpha + 1.0) * u
    }
    fn exponents(&self) -> LimitExponents {
        let e = -(self.alpha + 1.0);
        LimitExponents {
            at_zero: e,
            at_infinity: e,
        }
    }
    fn class(&self) -> WeightClass {
        WeightClass::Power { alpha: self.alpha }
    }
    fn measure(&self) -> Option<ZenMeasure> {
        // 2 pi c Gamma(a+1) / (2t)^{a+1} = t^{-(a+1)}
        let a = self.alpha;
        let coeff = ((a + 1.0) * 2f64.ln() - ln_gamma(a + 1.0)).exp() / (2.0 * PI);
        ZenMeasure::power(coeff, a).ok()
    }
}

/// `1 + 1/t`, the weight of the Hardy-Bergman space `H^2 ∩ A^2`.
#[derive(Debug, Clone, Copy)]
pub struct HardyBergman;

impl WeightFunction for HardyBergman {
    fn name(&self) -> String {
        "hardy-bergman".into()
    }
    fn eval(&self, t: f64) -> f64 {
        1.0 + 1.0 / t
    }
    fn ln_eval_at_log(&self, u: f64) -> f64 {
        // ln(1 + e^{-u}) without overflow
        if u < 0.0 {
            -u + u.exp().ln_1p()
        } else {
            (-u).exp().ln_1p()
        }
    }
    fn exponents(&self) -> LimitExponents {
        LimitExponents {
            at_zero: -1.0,
            at_infinity: 0.0,
        }
    }
    fn class(&self) -> WeightClass {
        WeightClass::HardyBergman
    }
    fn measure(&self) -> Option<ZenMeasure> {
        ZenMeasure::new(
            vec![Atom {
                r: 0.0,
                mass: 1.0 / (2.0 * PI),
            }],
            Density::Power {
                coeff: 1.0 / PI,
                alpha: 0.0,
            },
        )
        .ok()
    }
}

/// Weight synthesized from a user-supplied measure (keeps the 2 pi).
#[derive(Debug, Clone)]
pub struct Synthesized {
    measure: ZenMeasure,
    label: String,
}

impl Synthesized {
    pub fn new(measure: ZenMeasure, label: impl Into<String>) -> Result<Self> {
        // Surface missing tail metadata now rather than on first evaluation.
        synthesize_weight(&measure, 1.0)?;
        let (_, at_inf) = measure.weight_exponents();
        if at_inf == f64::NEG_INFINITY {
            return Err(ZenError::InvalidMeasure(
                "weight decays exponentially; the measure carries no mass near 0".into(),
            ));
        }
        Ok(Self {
            measure,
            label: label.into(),
        })
    }
}

impl WeightFunction for Synthesized {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn eval(&self, t: f64) -> f64 {
        // Validated at construction; t > 0 is the caller's contract.
        synthesize_weight(&self.measure, t).unwrap_or(f64::NAN)
    }
    fn exponents(&self) -> LimitExponents {
        let (at_zero, at_infinity) = self.measure.weight_exponents();
        LimitExponents {
            at_zero,
            at_infinity,
        }
    }
    fn measure(&self) -> Option<ZenMeasure> {
        Some(self.measure.clone())
    }
}

/// `c * w` for a positive constant `c`.
#[derive(Debug, Clone)]
pub struct Scaled {
    inner: Weight,
    factor: f64,
}

impl WeightFunction for Scaled {
    fn name(&self) -> String {
        format!("{}*{}", self.factor, self.inner.name())
    }
    fn eval(&self, t: f64) -> f64 {
        self.factor * self.inner.eval(t)
    }
    fn ln_eval_at_log(&self, u: f64) -> f64 {
        self.factor.ln() + self.inner.ln_eval_at_log(u)
    }
    fn exponents(&self) -> LimitExponents {
        self.inner.exponents()
    }
    fn class(&self) -> WeightClass {
        self.inner.class()
    }
    fn measure(&self) -> Option<ZenMeasure> {
        self.inner.measure().and_then(|m| m.scaled(self.factor).ok())
    }
}

/// Shared handle to a weight family instance.
#[derive(Clone)]
pub struct Weight(Arc<dyn WeightFunction>);

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Weight").field(&self.0.name()).finish()
    }
}

impl Weight {
    pub fn new(inner: impl WeightFunction + 'static) -> Self {
        Weight(Arc::new(inner))
    }

    pub fn hardy() -> Self {
        Weight::new(Hardy)
    }

    pub fn alpha_bergman(alpha: f64) -> Result<Self> {
        Ok(Weight::new(AlphaBergman::new(alpha)?))
    }

    pub fn hardy_bergman() -> Self {
        Weight::new(HardyBergman)
    }

    pub fn synthesized(measure: ZenMeasure) -> Result<Self> {
        Ok(Weight::new(Synthesized::new(measure, "measure")?))
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(ZenError::param("scale", "must be a positive finite number"));
        }
        Ok(Weight::new(Scaled {
            inner: self.clone(),
            factor,
        }))
    }

    pub fn name(&self) -> String {
        self.0.name()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    pub fn ln_eval_at_log(&self, u: f64) -> f64 {
        self.0.ln_eval_at_log(u)
    }

    pub fn exponents(&self) -> LimitExponents {
        self.0.exponents()
    }

    pub fn class(&self) -> WeightClass {
        self.0.class()
    }

    pub fn nonincreasing(&self) -> bool {
        self.0.nonincreasing()
    }

    pub fn measure(&self) -> Option<ZenMeasure> {
        self.0.measure()
    }
}

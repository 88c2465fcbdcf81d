//! Affine self-maps `phi(s) = mu s + s0` of the right half-plane
//! (`mu > 0`, `Re s0 >= 0`), the only linear-fractional maps fixing
//! infinity that induce bounded composition operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Identity,
    Parabolic,
    Hyperbolic,
}

/// `phi(s) = mu s + s0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolRepr", into = "SymbolRepr")]
pub struct AffineSymbol {
    mu: f64,
    s0: Complex64,
}

#[derive(Serialize, Deserialize)]
struct SymbolRepr {
    mu: f64,
    s0: [f64; 2],
}

impl TryFrom<SymbolRepr> for AffineSymbol {
    type Error = ZenError;
    fn try_from(r: SymbolRepr) -> Result<Self> {
        AffineSymbol::new(r.mu, Complex64::new(r.s0[0], r.s0[1]))
    }
}

impl From<AffineSymbol> for SymbolRepr {
    fn from(s: AffineSymbol) -> Self {
        SymbolRepr {
            mu: s.mu,
            s0: [s.s0.re, s.s0.im],
        }
    }
}

impl AffineSymbol {
    pub fn new(mu: f64, s0: Complex64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(ZenError::param("mu", format!("must be a positive finite number, got {mu}")));
        }
        if !(s0.re.is_finite() && s0.im.is_finite()) {
            return Err(ZenError::param("s0", "must be finite"));
        }
        if s0.re < 0.0 {
            return Err(ZenError::InvalidSymbol(format!(
                "Re s0 = {} < 0: phi does not map the right half-plane into itself",
                s0.re
            )));
        }
        Ok(Self { mu, s0 })
    }

    pub fn real(mu: f64, x: f64) -> Result<Self> {
        Self::new(mu, Complex64::new(x, 0.0))
    }

    pub fn identity() -> Self {
        Self {
            mu: 1.0,
            s0: Complex64::new(0.0, 0.0),
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn s0(&self) -> Complex64 {
        self.s0
    }

    /// `Re s0`.
    pub fn x(&self) -> f64 {
        self.s0.re
    }

    /// `Im s0`.
    pub fn y(&self) -> f64 {
        self.s0.im
    }

    pub fn kind(&self) -> SymbolKind {
        if self.mu != 1.0 {
            SymbolKind::Hyperbolic
        } else if self.s0 == Complex64::new(0.0, 0.0) {
            SymbolKind::Identity
        } else {
            SymbolKind::Parabolic
        }
    }

    pub fn apply(&self, s: Complex64) -> Complex64 {
        self.mu * s + self.s0
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineSymbol) -> AffineSymbol {
        AffineSymbol {
            mu: self.mu * other.mu,
            s0: self.mu * other.s0 + self.s0,
        }
    }
}

/// Angular derivative at infinity, `L = lim z / phi(z) = 1 / mu`.
pub fn angular_derivative(phi: &AffineSymbol) -> f64 {
    1.0 / phi.mu
}

/// `(mu^n - 1) / (mu - 1)` for `mu != 1`, `n` for `mu = 1`, via `expm1`.
fn geometric_factor(ln_mu: f64, n: u32) -> f64 {
    if ln_mu == 0.0 {
        f64::from(n)
    } else {
        (f64::from(n) * ln_mu).exp_m1() / ln_mu.exp_m1()
    }
}

/// `ln((mu^n - 1) / (mu - 1))`, finite even when `mu^n` overflows.
fn ln_geometric_factor(ln_mu: f64, n: u32) -> f64 {
    let nf = f64::from(n);
    if ln_mu == 0.0 {
        nf.ln()
    } else if ln_mu > 0.0 {
        // mu^n - 1 = mu^n (1 - mu^-n)
        nf * ln_mu + (-(-nf * ln_mu).exp()).ln_1p() - ln_mu.exp_m1().ln()
    } else {
        (-(nf * ln_mu).exp_m1()).ln() - (-ln_mu.exp_m1()).ln()
    }
}

/// `n`-th iterate `phi ∘ ... ∘ phi = (mu^n, s0 (mu^n - 1) / (mu - 1))`.
pub fn iterate(phi: &AffineSymbol, n: u32) -> Result<AffineSymbol> {
    if n == 0 {
        return Err(ZenError::param("n", "iteration count must be >= 1"));
    }
    let ln_mu = phi.mu.ln();
    let mu_n = if phi.mu == 1.0 {
        1.0
    } else {
        phi.mu.powi(n as i32)
    };
    let s0_n = phi.s0 * geometric_factor(ln_mu, n);
    AffineSymbol::new(mu_n, s0_n).map_err(|_| {
        ZenError::param(
            "n",
            format!("iterate {n} overflows; use log_iterate for log-scale parameters"),
        )
    })
}

/// Log-scale parameters of the `n`-th iterate, for `n` large enough that
/// `mu^n` or `x_n` leave the floating-point range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogIterate {
    pub n: u32,
    /// `n ln mu`.
    pub ln_mu: f64,
    /// `ln x_n`, `-inf` when `x = 0`.
    pub ln_x: f64,
    /// `y_n = y (mu^n - 1) / (mu - 1)`; may be infinite.
    pub y: f64,
}

pub fn log_iterate(phi: &AffineSymbol, n: u32) -> Result<LogIterate> {
    if n == 0 {
        return Err(ZenError::param("n", "iteration count must be >= 1"));
    }
    let ln_mu = phi.mu.ln();
    let ln_g = ln_geometric_factor(ln_mu, n);
    let ln_x = if phi.x() > 0.0 {
        phi.x().ln() + ln_g
    } else {
        f64::NEG_INFINITY
    };
    Ok(LogIterate {
        n,
        ln_mu: f64::from(n) * ln_mu,
        ln_x,
        y: phi.y() * ln_g.exp(),
    })
}

/// Conjugation to a real translation part: returns `psi(s) = mu s + Re s0`
/// and the shift `c = Im s0 / (mu - 1)` with `rho^{-1} ∘ psi ∘ rho = phi`
/// for `rho(s) = s + i c`.
pub fn reduce(phi: &AffineSymbol) -> Result<(AffineSymbol, f64)> {
    if phi.mu == 1.0 {
        return Err(ZenError::InvalidSymbol(
            "reduction needs mu != 1; parabolic symbols are handled directly".into(),
        ));
    }
    let psi = AffineSymbol::real(phi.mu, phi.x())?;
    Ok((psi, phi.y() / (phi.mu - 1.0)))
}

/// `phi^{-1}(s) = (s - s0) / mu`, a self-map only when `Re s0 = 0`.
pub fn invert(phi: &AffineSymbol) -> Result<AffineSymbol> {
    if phi.x() != 0.0 {
        return Err(ZenError::InvalidSymbol(format!(
            "inverse has Re s0 = {} < 0 and is not a self-map",
            -phi.x() / phi.mu
        )));
    }
    AffineSymbol::new(1.0 / phi.mu, Complex64::new(0.0, -phi.y() / phi.mu))
}

/// Outcome of a numerical angular-derivative estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularEstimate {
    pub value: f64,
    /// Raw ratios `r / phi(r)`.
    pub ratios: Vec<Complex64>,
    /// Aitken-accelerated estimates.
    pub accelerated: Vec<Complex64>,
}

/// Estimate `lim r / phi(r)` along the positive axis for an arbitrary
/// symbol, by Aitken's delta-squared acceleration of the ratios sampled at
/// `radii` (exact when the error is a single power of `r` and the radii are
/// geometric).
pub fn estimate_angular_derivative<F>(sampler: F, radii: &[f64], tol: f64) -> Result<AngularEstimate>
where
    F: Fn(Complex64) -> Complex64,
{
    if radii.len() < 4 {
        return Err(ZenError::param("radii", "need at least four radii"));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 0.0 {
        return Err(ZenError::param("radii", "must be positive and strictly increasing"));
    }
    let ratios: Vec<Complex64> = radii
        .iter()
        .map(|&r| Complex64::new(r, 0.0) / sampler(Complex64::new(r, 0.0)))
        .collect();
    if ratios.iter().any(|q| !(q.re.is_finite() && q.im.is_finite())) {
        return Err(ZenError::NonConvergence("sampler returned a non-finite ratio".into()));
    }
    let accelerated: Vec<Complex64> = ratios
        .windows(3)
        .map(|w| {
            let d1 = w[1] - w[0];
            let d2 = w[2] - 2.0 * w[1] + w[0];
            if d2.norm() <= 1e-300 || d2.norm() < 1e-14 * w[2].norm() {
                w[2]
            } else {
                w[0] - d1 * d1 / d2
            }
        })
        .collect();
    let m = accelerated.len();
    let last = accelerated[m - 1];
    let prev = accelerated[m - 2];
    let scale = last.norm().max(tol);
    if (last - prev).norm() > tol * scale.max(1.0) {
        return Err(ZenError::NonConvergence(format!(
            "successive estimates {prev} and {last} differ by more than {tol:e}"
        )));
    }
    if last.norm() <= tol || last.im.abs() > tol * last.norm().max(1.0) || last.re <= 0.0 {
        return Err(ZenError::NonConvergence(format!(
            "limit {last} is not a finite nonzero positive number; C_phi is unbounded"
        )));
    }
    Ok(AngularEstimate {
        value: last.re,
        ratios,
        accelerated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym(mu: f64, re: f64, im: f64) -> AffineSymbol {
        AffineSymbol::new(mu, c(re, im)).unwrap()
    }

    #[test]
    fn classification() {
        assert_eq!(AffineSymbol::identity().kind(), SymbolKind::Identity);
        assert_eq!(sym(1.0, 0.0, 2.0).kind(), SymbolKind::Parabolic);
        assert_eq!(sym(0.5, 0.0, 0.0).kind(), SymbolKind::Hyperbolic);
        assert!(AffineSymbol::new(0.0, c(0.0, 0.0)).is_err());
        assert!(AffineSymbol::new(1.0, c(-0.1, 0.0)).is_err());
    }

    #[test]
    fn angular_derivative_examples() {
        assert_eq!(angular_derivative(&sym(1.0, 0.0, 1.0)), 1.0);
        assert_eq!(angular_derivative(&sym(2.0, 1.0, 0.0)), 0.5);
        assert_eq!(angular_derivative(&sym(0.25, 0.0, 0.0)), 4.0);
    }

    #[test]
    fn iterate_examples() {
        let it = iterate(&sym(2.0, 1.0, 0.0), 3).unwrap();
        assert_eq!(it.mu(), 8.0);
        assert!((it.s0() - c(7.0, 0.0)).norm() < 1e-14);
        let phi = sym(3.0, 0.5, -2.0);
        assert_eq!(iterate(&phi, 1).unwrap(), phi);
        let tr = iterate(&sym(1.0, 0.0, 1.0), 5).unwrap();
        assert_eq!(tr.mu(), 1.0);
        assert_eq!(tr.s0(), c(0.0, 5.0));
        assert!(iterate(&phi, 0).is_err());
    }

    #[test]
    fn log_iterate_matches_direct_and_survives_overflow() {
        let phi = sym(4.0, 1.0, 0.0);
        for n in [1u32, 5, 40, 256] {
            let li = log_iterate(&phi, n).unwrap();
            let direct = iterate(&phi, n).unwrap();
            assert!((li.ln_mu - direct.mu().ln()).abs() < 1e-12);
            assert!((li.ln_x - direct.x().ln()).abs() < 1e-12 * li.ln_x.abs().max(1.0));
        }
        let big = sym(1e3, 2.0, 0.0);
        let li = log_iterate(&big, 256).unwrap();
        assert!((li.ln_mu - 256.0 * 1e3f64.ln()).abs() < 1e-9);
        // x_n ~ 2 mu^n / (mu - 1)
        let expected = 2f64.ln() + 255.0 * 1e3f64.ln() - (1.0 - 1e-3f64).ln();
        assert!((li.ln_x - expected).abs() < 1e-9);
        assert!(iterate(&big, 256).is_err());
        let small = sym(0.25, 1.0, 0.0);
        let li = log_iterate(&small, 300).unwrap();
        assert!((li.ln_x - (1.0f64 / 0.75).ln()).abs() < 1e-12);
        assert_eq!(log_iterate(&sym(1.0, 2.0, 0.0), 8).unwrap().ln_x, 16f64.ln());
    }

    #[test]
    fn reduce_examples() {
        let (psi, shift) = reduce(&sym(2.0, 3.0, 4.0)).unwrap();
        assert_eq!((psi.mu(), psi.s0(), shift), (2.0, c(3.0, 0.0), 4.0));
        let (psi, shift) = reduce(&sym(2.0, 0.0, 5.0)).unwrap();
        assert_eq!((psi.mu(), psi.s0(), shift), (2.0, c(0.0, 0.0), 5.0));
        let (psi, shift) = reduce(&sym(3.0, 2.0, 0.0)).unwrap();
        assert_eq!((psi.mu(), psi.s0(), shift), (3.0, c(2.0, 0.0), 0.0));
        assert!(reduce(&sym(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn invert_examples() {
        let inv = invert(&sym(4.0, 0.0, 2.0)).unwrap();
        assert_eq!(inv.mu(), 0.25);
        assert_eq!(inv.s0(), c(0.0, -0.5));
        let inv = invert(&sym(2.0, 0.0, 0.0)).unwrap();
        assert_eq!((inv.mu(), inv.s0().norm()), (0.5, 0.0));
        assert!(matches!(invert(&sym(2.0, 1.0, 0.0)), Err(ZenError::InvalidSymbol(_))));
    }

    #[test]
    fn angular_estimates() {
        let radii: Vec<f64> = (0..9).map(|k| 10f64.powi(k)).collect();
        let est = estimate_angular_derivative(|s| 2.0 * s + 1.0, &radii, 1e-8).unwrap();
        assert!((est.value - 0.5).abs() < 1e-8);

        let est = estimate_angular_derivative(|s| s + (s + 1.0).sqrt(), &radii, 1e-4).unwrap();
        assert!((est.value - 1.0).abs() < 1e-4, "{}", est.value);

        let err = estimate_angular_derivative(|s| s * s, &radii, 1e-8).unwrap_err();
        assert!(err.is_non_convergence());
    }

    #[test]
    fn symbol_json_shape() {
        let s = sym(2.0, 1.0, -3.0);
        let v = serde_json::to_value(s).unwrap();
        assert_eq!(v, serde_json::json!({"mu": 2.0, "s0": [1.0, -3.0]}));
        let back: AffineSymbol = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_value::<AffineSymbol>(serde_json::json!({"mu": -1.0, "s0": [0.0, 0.0]})).is_err());
    }

    fn arb_symbol() -> impl Strategy<Value = AffineSymbol> {
        (0.2f64..3.0, 0.0f64..2.0, -2.0f64..2.0).prop_map(|(mu, x, y)| sym(mu, x, y))
    }

    proptest! {
        #[test]
        fn iterate_respects_composition(phi in arb_symbol(), m in 1u32..8, n in 1u32..8) {
            let lhs = iterate(&phi, m + n).unwrap();
            let rhs = iterate(&phi, m).unwrap().compose(&iterate(&phi, n).unwrap());
            prop_assert!((lhs.mu() - rhs.mu()).abs() <= 1e-12 * lhs.mu().max(1.0));
            prop_assert!((lhs.s0() - rhs.s0()).norm() <= 1e-12 * lhs.s0().norm().max(1.0));
            let nested = iterate(&iterate(&phi, m).unwrap(), n).unwrap();
            let direct = iterate(&phi, m * n).unwrap();
            prop_assert!((nested.mu() - direct.mu()).abs() <= 1e-12 * direct.mu().max(1.0));
            prop_assert!((nested.s0() - direct.s0()).norm() <= 1e-12 * direct.s0().norm().max(1.0));
        }

        #[test]
        fn inversion_round_trips(mu in 0.2f64..5.0, y in -3.0f64..3.0, n in 1u32..6) {
            let phi = sym(mu, 0.0, y);
            let back = invert(&invert(&phi).unwrap()).unwrap();
            prop_assert!((back.mu() - mu).abs() <= 1e-12 * mu);
            prop_assert!((back.s0() - phi.s0()).norm() <= 1e-12 * y.abs().max(1.0));
            let a = iterate(&invert(&phi).unwrap(), n).unwrap();
            let b = invert(&iterate(&phi, n).unwrap()).unwrap();
            prop_assert!((a.mu() - b.mu()).abs() <= 1e-12 * a.mu().max(1.0));
            prop_assert!((a.s0() - b.s0()).norm() <= 1e-11 * a.s0().norm().max(1.0));
        }

        #[test]
        fn reduction_conjugates_back(phi in arb_symbol(), s_re in 0.0f64..5.0, s_im in -5.0f64..5.0) {
            prop_assume!((phi.mu() - 1.0).abs() > 1e-3);
            let (psi, shift) = reduce(&phi).unwrap();
            prop_assert_eq!(psi.mu(), phi.mu());
            prop_assert_eq!(psi.x(), phi.x());
            prop_assert_eq!(angular_derivative(&psi), angular_derivative(&phi));
            let s = c(s_re, s_im);
            let rho = |z: Complex64| z + c(0.0, shift);
            let conj = psi.apply(rho(s)) - c(0.0, shift);
            prop_assert!((conj - phi.apply(s)).norm() <= 1e-10 * phi.apply(s).norm().max(1.0));
        }
    }
}

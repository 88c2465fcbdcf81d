//! One function per subcommand. Each returns the JSON document to emit.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use zenspec::norms::{
    essential_norm_bounds, exact_symbol_norm, norm_bounds, spectral_radius, spectral_radius_bounds,
};
use zenspec::oracle::{
    build_grid, discretize, laplace_isometry_check, operator_norm, GridFunction, PowerOptions,
};
use zenspec::semigroups::{
    berkson_porta_check, classify_group, delta, flow, semigroup_norm_bounds, semigroup_spectrum,
    AffineGenerator, HalfPlaneGrid,
};
use zenspec::spectra::{
    damped_admissible_alphas, eigen_admissible_alphas, predict_spectrum_with, residual_eigencheck,
    write_boundary_csv, AlphaRange, OperatorSide,
};
use zenspec::symbols::AffineSymbol;
use zenspec::weights::{Weight, WeightRegistry};
use zenspec::{Complex64, Result, ZenError};

use crate::json::{complex, num, to_value, Obj};
use crate::{MuArgs, SymbolArgs, WeightArg};

const NORM_AGREEMENT: f64 = 0.02;
const EIGEN_RESIDUAL: f64 = 1e-8;
const ISOMETRY_TOL: f64 = 1e-3;
/// Isometry checks sample `t exp(-t)` on `[1e-8, 64]` at 32 points per octave.
const ISOMETRY_GRID: (f64, f64, u32) = (1e-8, 64.0, 32);
const SEED_VAR: &str = "ZENSPEC_SEED";

fn invalid(field: &'static str, reason: impl Into<String>) -> ZenError {
    ZenError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

fn resolve(w: &WeightArg) -> Result<Weight> {
    WeightRegistry::default().resolve(&w.weight)
}

fn weight_inputs(arg: &WeightArg, w: &Weight) -> Obj {
    Obj::new().put("weight", arg.weight.as_str()).put("weight_name", w.name())
}

fn range_value(r: AlphaRange) -> Value {
    Obj::new().num("lower", r.lower).num("upper", r.upper).build()
}

/// `a:b:n` with `n >= 1` values from `a` to `b` inclusive.
pub fn parse_mu_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(invalid("mu_range", format!("expected A:B:N, got `{s}`")));
    };
    let a: f64 = a.trim().parse().map_err(|_| invalid("mu_range", format!("bad start `{a}`")))?;
    let b: f64 = b.trim().parse().map_err(|_| invalid("mu_range", format!("bad end `{b}`")))?;
    let n: usize = n.trim().parse().map_err(|_| invalid("mu_range", format!("bad count `{n}`")))?;
    if n == 0 || n > 100_000 {
        return Err(invalid("mu_range", format!("count must be in 1..=100000, got {n}")));
    }
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(invalid("mu_range", "endpoints must be positive and finite"));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// Run `f` once for `--mu`, or over the sweep in parallel. Results keep
/// parameter order.
fn fan_out<F>(mu: &MuArgs, inputs: Obj, f: F) -> Result<Value>
where
    F: Fn(f64) -> Result<Value> + Sync,
{
    match (mu.mu, &mu.mu_range) {
        (Some(m), None) => Ok(inputs.merge("result", f(m)?).build()),
        (None, Some(spec)) => {
            let mus = parse_mu_range(spec)?;
            let rows = mus
                .par_iter()
                .map(|&m| f(m).map(|v| Obj::new().num("mu", m).merge("result", v).build()))
                .collect::<Result<Vec<Value>>>()?;
            Ok(inputs.put("sweep", rows).build())
        }
        _ => Err(invalid("mu", "give exactly one of --mu or --mu-range")),
    }
}

fn symbol_inputs(arg: &WeightArg, w: &Weight, s: &SymbolArgs) -> Obj {
    let mut o = weight_inputs(arg, w);
    o = match (s.mu.mu, &s.mu.mu_range) {
        (Some(m), _) => o.num("mu", m),
        (_, Some(r)) => o.put("mu_range", r.as_str()),
        _ => o,
    };
    o.num("x", s.x).num("y", s.y)
}

pub fn weight(arg: &WeightArg, ts: &[f64]) -> Result<Value> {
    let w = resolve(arg)?;
    let ts: Vec<f64> = if ts.is_empty() {
        vec![0.01, 0.1, 1.0, 10.0, 100.0]
    } else {
        ts.to_vec()
    };
    let mut values = Vec::with_capacity(ts.len());
    for &t in &ts {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("weights are evaluated at t > 0, got {t}")));
        }
        values.push(Obj::new().num("t", t).num("w", w.eval(t)).build());
    }
    let e = w.exponents();
    let registry: Vec<Value> = WeightRegistry::default()
        .entries()
        .map(|e| {
            Obj::new()
                .put("name", e.name)
                .put("summary", e.summary)
                .put("takes_param", e.takes_param)
                .build()
        })
        .collect();
    Ok(Obj::new()
        .put("command", "weight")
        .put("inputs", weight_inputs(arg, &w))
        .put("class", to_value(&w.class())?)
        .put("exponents", Obj::new().num("at_zero", e.at_zero).num("at_infinity", e.at_infinity))
        .put("nonincreasing", w.nonincreasing())
        .put("eigen_admissible_alphas", range_value(eigen_admissible_alphas(&w)))
        .put("values", values)
        .put("measure", w.measure().map_or(Value::Null, |m| m.to_json()))
        .put("registry", registry)
        .build())
}

pub fn norm(arg: &WeightArg, s: &SymbolArgs) -> Result<Value> {
    let w = resolve(arg)?;
    let inputs = Obj::new()
        .put("command", "norm")
        .put("inputs", symbol_inputs(arg, &w, s));
    fan_out(&s.mu, inputs, |mu| {
        let phi = AffineSymbol::new(mu, Complex64::new(s.x, s.y))?;
        let exact = exact_symbol_norm(&w, &phi)?;
        let b = norm_bounds(&w, 1.0 / mu)?;
        Ok(Obj::new()
            .num("norm", exact.norm)
            .num("norm_squared", exact.norm_squared)
            .put(
                "angular_bounds",
                Obj::new().num("lower", b.lower.sqrt()).num("upper", b.upper.sqrt()),
            )
            .put(
                "method",
                Obj::new()
                    .put("formula", "sup_t exp(-2xt) w(mu t)/w(t) / mu")
                    .put("exact", true)
                    .put("attained", to_value(&exact.optimum.location)?)
                    .put("optimizer", to_value(&exact.optimum.method)?)
                    .put("stationary", exact.optimum.stationary),
            )
            .build())
    })
}

pub fn essnorm(arg: &WeightArg, m: &MuArgs) -> Result<Value> {
    let w = resolve(arg)?;
    let mut inputs = weight_inputs(arg, &w);
    inputs = match (m.mu, &m.mu_range) {
        (Some(mu), _) => inputs.num("mu", mu),
        (_, Some(r)) => inputs.put("mu_range", r.as_str()),
        _ => inputs,
    };
    let doc = Obj::new().put("command", "essnorm").put("inputs", inputs);
    fan_out(m, doc, |mu| {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid("mu", format!("must be positive and finite, got {mu}")));
        }
        let l = 1.0 / mu;
        let b = essential_norm_bounds(&w, l)?;
        Ok(Obj::new()
            .num("lower", b.lower.sqrt())
            .num("upper", b.upper.sqrt())
            .num("lower_squared", b.lower)
            .num("upper_squared", b.upper)
            .put("exact", b.exact)
            .put("method", Obj::new().num("angular_derivative", l).put("formula", "L inf/sup w(t)/w(Lt)"))
            .build())
    })
}

/// Returns the document and whether every sequence settled.
pub fn specrad(arg: &WeightArg, s: &SymbolArgs, n_max: u32) -> Result<(Value, bool)> {
    let w = resolve(arg)?;
    let inputs = Obj::new()
        .put("command", "specrad")
        .put("inputs", symbol_inputs(arg, &w, s).put("n_max", n_max));
    let settled = std::sync::atomic::AtomicBool::new(true);
    let doc = fan_out(&s.mu, inputs, |mu| {
        AffineSymbol::new(mu, Complex64::new(s.x, s.y))?;
        let r = spectral_radius(&w, mu, s.x, n_max)?;
        let b = spectral_radius_bounds(&w, 1.0 / mu, n_max)?;
        if !r.converged {
            settled.store(false, std::sync::atomic::Ordering::Relaxed);
        }
        Ok(Obj::new()
            .num("spectral_radius", r.estimate)
            .put("converged", r.converged)
            .put("monotone_tail", r.monotone_tail)
            .put(
                "angular_bounds",
                Obj::new()
                    .num("lower", b.lower.estimate.sqrt())
                    .num("upper", b.upper.estimate.sqrt()),
            )
            .put("sequence", r.sequence.iter().map(|&v| num(v)).collect::<Vec<_>>())
            .put(
                "method",
                Obj::new()
                    .put("formula", "(||C_phi^n||)^(1/n) in log scale")
                    .put("estimate", "geometric mean of the last 8 terms")
                    .put("n_max", n_max),
            )
            .build())
    })?;
    Ok((doc, settled.into_inner()))
}

fn spectrum_value(w: &Weight, phi: &AffineSymbol, n_max: u32) -> Result<Value> {
    let set = predict_spectrum_with(w, phi, n_max)?;
    let (lo, hi) = set.modulus_range();
    Ok(Obj::new()
        .merge("shape", to_value(&set)?)
        .put("modulus_range", vec![num(lo), num(hi)])
        .build())
}

pub fn spectrum(
    arg: &WeightArg,
    s: &SymbolArgs,
    n_max: u32,
    csv: Option<&Path>,
    samples: usize,
) -> Result<Value> {
    let w = resolve(arg)?;
    if csv.is_some() && s.mu.mu_range.is_some() {
        return Err(invalid("csv", "boundary samples are written for a single --mu only"));
    }
    let inputs = Obj::new()
        .put("command", "spectrum")
        .put("inputs", symbol_inputs(arg, &w, s).put("n_max", n_max));
    let mut doc = fan_out(&s.mu, inputs, |mu| {
        let phi = AffineSymbol::new(mu, Complex64::new(s.x, s.y))?;
        let mut v = spectrum_value(&w, &phi, n_max)?;
        let side = if mu > 1.0 { OperatorSide::A } else { OperatorSide::AStar };
        let alphas = if s.x > 0.0 {
            damped_admissible_alphas(&w, side)
        } else {
            eigen_admissible_alphas(&w)
        };
        v["eigenfunction_alphas"] = range_value(alphas);
        Ok(v)
    })?;
    if let Some(path) = csv {
        let mu = s.mu.mu.unwrap_or_default();
        let phi = AffineSymbol::new(mu, Complex64::new(s.x, s.y))?;
        let set = predict_spectrum_with(&w, &phi, n_max)?;
        let points = set.boundary_samples(samples)?;
        let file = File::create(path).map_err(|e| ZenError::Io(format!("{}: {e}", path.display())))?;
        write_boundary_csv(BufWriter::new(file), &points)?;
        doc["csv"] = Obj::new()
            .put("path", path.display().to_string())
            .put("points", points.len())
            .build();
    }
    Ok(doc)
}

pub fn kernel(arg: &WeightArg, x: f64, y: f64) -> Result<Value> {
    let w = resolve(arg)?;
    let k = zenspec::oracle::kernel_norm(Complex64::new(x, y), &w)?;
    Ok(Obj::new()
        .put("command", "kernel")
        .put("inputs", weight_inputs(arg, &w).num("x", x).num("y", y))
        .num("norm", k.norm)
        .num("norm_squared", k.norm_squared)
        .num("tail_bound", k.tail_bound)
        .put(
            "method",
            Obj::new()
                .put("formula", "integral exp(-2 Re(lambda) t) / w(t) dt")
                .num("cutoff", k.cutoff),
        )
        .build())
}

pub struct VerifyRequest<'a> {
    pub weight: &'a WeightArg,
    pub mu: f64,
    pub x: f64,
    pub y: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub points_per_octave: u32,
    pub power_tol: f64,
    pub eigen_draws: usize,
}

fn seed() -> Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| invalid("ZENSPEC_SEED", format!("expected an unsigned integer, got `{s}`"))),
        Err(_) => Ok(0),
    }
}

fn check(name: &str, pass: bool, detail: Obj) -> Value {
    Obj::new().put("name", name).put("pass", pass).merge("detail", detail.build()).build()
}

fn skipped(name: &str, reason: &str) -> Value {
    Obj::new().put("name", name).put("pass", Value::Null).put("skipped", reason).build()
}

pub fn verify(req: &VerifyRequest) -> Result<Value> {
    let w = resolve(req.weight)?;
    let seed = seed()?;
    let phi = AffineSymbol::new(req.mu, Complex64::new(req.x, req.y))?;
    if !(req.power_tol > 0.0 && req.power_tol < 1.0) {
        return Err(invalid("power_tol", format!("must lie in (0, 1), got {}", req.power_tol)));
    }
    let grid_mu = (req.mu != 1.0).then_some(req.mu);
    let grid = build_grid(req.grid_min, req.grid_max, grid_mu, req.points_per_octave)?;
    let mut checks = Vec::new();

    let exact = exact_symbol_norm(&w, &phi)?;
    let m = discretize(&phi, &w, &grid)?;
    let power = operator_norm(
        &m,
        &PowerOptions {
            rel_tol: req.power_tol,
            ..PowerOptions::default()
        },
    )?;
    let rel = (power.norm - exact.norm).abs() / exact.norm;
    checks.push(check(
        "operator_norm",
        rel <= NORM_AGREEMENT,
        Obj::new()
            .num("oracle", power.norm)
            .num("exact", exact.norm)
            .num("relative_error", rel)
            .num("tolerance", NORM_AGREEMENT)
            .put("iterations", power.iterations),
    ));

    let family = if req.mu == 1.0 {
        Err("eigenfunctions are checked for mu != 1")
    } else if req.y != 0.0 {
        Err("eigenfunctions are checked for real translations (y = 0)")
    } else if req.x == 0.0 {
        Ok((OperatorSide::AStar, eigen_admissible_alphas(&w)))
    } else if req.mu > 1.0 {
        Ok((OperatorSide::A, damped_admissible_alphas(&w, OperatorSide::A)))
    } else {
        Ok((OperatorSide::AStar, damped_admissible_alphas(&w, OperatorSide::AStar)))
    };
    match family {
        Err(reason) => checks.push(skipped("eigen_residual", reason)),
        Ok((_, range)) if range.is_empty() => checks.push(skipped("eigen_residual", "no admissible alpha")),
        Ok((side, range)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hi = range.upper.min(range.lower + 2.0);
            for _ in 0..req.eigen_draws {
                let re = range.lower + (hi - range.lower) * rng.gen_range(0.05..0.95);
                let alpha = Complex64::new(re, rng.gen_range(-2.0..2.0));
                let r = residual_eigencheck(&w, req.mu, req.x, alpha, side, &grid, None)?;
                checks.push(check(
                    "eigen_residual",
                    r.relative_residual < EIGEN_RESIDUAL,
                    Obj::new()
                        .put("side", to_value(&side)?)
                        .put("alpha", complex(alpha))
                        .put("eigenvalue", complex(r.eigenvalue))
                        .num("relative_residual", r.relative_residual)
                        .num("tolerance", EIGEN_RESIDUAL),
                ));
            }
        }
    }

    match w.measure() {
        None => checks.push(skipped("isometry", "weight has no known measure")),
        Some(measure) => {
            let (lo, hi, ppo) = ISOMETRY_GRID;
            let g = build_grid(lo, hi, None, ppo)?;
            let f = GridFunction::from_fn(g, |t| Complex64::new(t * (-t).exp(), 0.0))?;
            match laplace_isometry_check(&f, &measure, &w) {
                Ok(r) => checks.push(check(
                    "isometry",
                    r.relative_error < ISOMETRY_TOL,
                    Obj::new()
                        .num("time_norm_sq", r.time_norm_sq)
                        .num("frequency_norm_sq", r.frequency_norm_sq)
                        .num("relative_error", r.relative_error)
                        .num("tolerance", ISOMETRY_TOL)
                        .num("y_cutoff", r.y_cutoff),
                )),
                Err(ZenError::Divergent(reason)) => {
                    checks.push(skipped("isometry", &format!("test function t exp(-t): {reason}")))
                }
                Err(e) => return Err(e),
            }
        }
    }

    let failed = checks.iter().filter(|c| c["pass"] == false).count();
    let passed = checks.iter().filter(|c| c["pass"] == true).count();
    Ok(Obj::new()
        .put("command", "verify")
        .put(
            "inputs",
            weight_inputs(req.weight, &w)
                .num("mu", req.mu)
                .num("x", req.x)
                .num("y", req.y)
                .put("seed", seed),
        )
        .put(
            "grid",
            Obj::new()
                .num("t_min", grid.t_min())
                .num("t_max", grid.t_max())
                .num("ratio", grid.ratio())
                .put("points_per_octave", req.points_per_octave)
                .put("nodes", grid.len()),
        )
        .put("checks", checks)
        .put("passed", passed)
        .put("failed", failed)
        .put("all_pass", failed == 0)
        .build())
}

pub fn semigroup(arg: &WeightArg, p: f64, alpha_re: f64, alpha_im: f64, t: f64) -> Result<Value> {
    let w = resolve(arg)?;
    let gen = AffineGenerator::new(p, Complex64::new(alpha_re, alpha_im))?;
    let phi_t = flow(&gen, t)?;
    let b = semigroup_norm_bounds(&w, &gen, t)?;
    let spectrum = if t > 0.0 {
        let set = semigroup_spectrum(&w, &gen, t)?;
        to_value(&set)?
    } else {
        Value::Null
    };
    let bp_grid = HalfPlaneGrid::new(0.0, 10.0, -10.0, 10.0, 50, 50)?;
    let bp = berkson_porta_check(|z| gen.eval(z), &bp_grid)?;
    Ok(Obj::new()
        .put("command", "semigroup")
        .put(
            "inputs",
            weight_inputs(arg, &w)
                .num("p", p)
                .put("alpha", complex(gen.alpha()))
                .num("t", t),
        )
        .put("class", to_value(&classify_group(&gen))?)
        .num("delta", delta(&gen))
        .put(
            "flow",
            Obj::new().num("mu", phi_t.mu()).put("s0", complex(phi_t.s0())),
        )
        .put(
            "norm_bounds",
            Obj::new()
                .num("lower", b.lower.sqrt())
                .num("upper", b.upper.sqrt())
                .num("angular_derivative", b.angular_derivative),
        )
        .put("spectrum", spectrum)
        .put(
            "berkson_porta",
            Obj::new()
                .put("holds", bp.holds)
                .num("worst_margin", bp.worst_margin)
                .put("witness", complex(bp.witness))
                .put("grid", "(0,10] x [-10,10], 50 x 50"),
        )
        .build())
}

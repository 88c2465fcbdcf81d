//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Random draws come from ChaCha8 seeded by
//! `ZENSPEC_SEED` (default 0).

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zenspec::norms::{exact_hyperbolic_norm, norm_bounds, spectral_radius};
use zenspec::oracle::{
    build_grid, discretize, laplace_isometry_check, operator_norm, GridFunction, PowerOptions,
};
use zenspec::semigroups::{
    berkson_porta_check, flow, semigroup_norm_bounds, AffineGenerator, HalfPlaneGrid,
};
use zenspec::spectra::{
    damped_admissible_alphas, eigen_admissible_alphas, predict_spectrum, residual_eigencheck,
    InvariantSet, OperatorSide, SpectralShape,
};
use zenspec::symbols::AffineSymbol;
use zenspec::weights::{Weight, ZenMeasure};
use zenspec::Complex64;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ab0() -> Weight {
    Weight::alpha_bergman(0.0).unwrap()
}

fn hb() -> Weight {
    Weight::hardy_bergman()
}

fn hardy_norm_law() -> Outcome {
    let w = Weight::hardy();
    let mut worst: f64 = 0.0;
    for mu in [0.25, 0.5, 2.0, 4.0] {
        for x in [0.0, 1.0] {
            let n = exact_hyperbolic_norm(&w, mu, x).map_err(|e| e.to_string())?;
            let expect = (1.0 / mu).sqrt();
            let b = norm_bounds(&w, 1.0 / mu).map_err(|e| e.to_string())?;
            let err = (n.norm - expect)
                .abs()
                .max((b.lower - 1.0 / mu).abs())
                .max((b.upper - 1.0 / mu).abs());
            worst = worst.max(err);
            ensure(err <= 1e-9, || format!("mu={mu} x={x}: norm {} bounds ({}, {})", n.norm, b.lower, b.upper))?;
        }
    }
    Ok(format!("8 cases, max abs error {worst:.1e}"))
}

fn bergman_norm_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for l in [0.25, 2.0, 4.0] {
        let b = norm_bounds(&ab0(), l).map_err(|e| e.to_string())?;
        let err = (b.lower.sqrt() - l).abs().max((b.upper.sqrt() - l).abs());
        worst = worst.max(err);
        ensure(err <= 1e-9, || format!("L={l}: norm in [{}, {}]", b.lower.sqrt(), b.upper.sqrt()))?;
    }
    Ok(format!("||C|| = L for L in {{1/4, 2, 4}}, max abs error {worst:.1e}"))
}

fn hardy_bergman_norms() -> Outcome {
    let mut worst: f64 = 0.0;
    for mu in [2.0, 4.0, 8.0, 0.5, 0.25] {
        let expect = if mu > 1.0 { 1.0 / mu } else { 1.0 / (mu * mu) };
        let n = exact_hyperbolic_norm(&hb(), mu, 0.0).map_err(|e| e.to_string())?;
        let err = (n.norm_squared - expect).abs();
        worst = worst.max(err);
        ensure(err <= 1e-8, || format!("mu={mu}: ||C||^2 = {} expected {expect}", n.norm_squared))?;
    }
    Ok(format!("5 cases, max abs error {worst:.1e}"))
}

fn hardy_bergman_spectrum(rng: &mut ChaCha8Rng) -> Outcome {
    let w = hb();
    let ann = predict_spectrum(&w, &AffineSymbol::real(4.0, 0.0).unwrap()).map_err(|e| e.to_string())?;
    let disc = predict_spectrum(&w, &AffineSymbol::real(4.0, 1.0).unwrap()).map_err(|e| e.to_string())?;
    ensure(ann.exact && ann.shape == SpectralShape::Annulus { r_in: 0.25, r_out: 0.5 }, || {
        format!("(4, 0): {ann:?}")
    })?;
    ensure(disc.exact && disc.shape == SpectralShape::Disc { radius: 0.25 }, || {
        format!("(4, 1): {disc:?}")
    })?;
    let mut checked = 0;
    while checked < 1000 {
        let r = rng.gen_range(0.0..0.75);
        let z = Complex64::from_polar(r, rng.gen_range(-PI..PI));
        let m = z.norm();
        if [0.25, 0.5].iter().any(|b| (m - b).abs() < 1e-9) {
            continue;
        }
        let in_ann = (0.25..=0.5).contains(&m);
        let in_disc = m <= 0.25;
        ensure(ann.contains(z) == in_ann && disc.contains(z) == in_disc, || format!("disagree at {z}"))?;
        checked += 1;
    }
    let a = eigen_admissible_alphas(&w);
    ensure(a.lower == -1.0 && a.upper == -0.5, || format!("alphas ({}, {})", a.lower, a.upper))?;
    Ok("annulus(0.25, 0.5), disc(0.25), 1000 points agree, alphas (-1, -1/2)".into())
}

fn spectral_radius_limit() -> Outcome {
    let r = spectral_radius(&hb(), 4.0, 1.0, 256).map_err(|e| e.to_string())?;
    let tail = &r.sequence[r.sequence.len() - 64..];
    let diffs: Vec<f64> = tail.windows(2).map(|p| p[1] - p[0]).collect();
    let monotone = diffs.iter().all(|&d| d <= 1e-3) || diffs.iter().all(|&d| d >= -1e-3);
    ensure((0.2375..=0.2625).contains(&r.estimate), || format!("estimate {}", r.estimate))?;
    ensure(monotone, || "last 64 terms are not monotone within 1e-3".into())?;
    Ok(format!("estimate {:.6} (target 0.25), tail monotone", r.estimate))
}

fn power_weight_spectra() -> Outcome {
    for mu in [2.0f64, 4.0] {
        for y in [0.0, 1.0, -3.5] {
            let s = predict_spectrum(&Weight::hardy(), &AffineSymbol::new(mu, c(0.0, y)).unwrap())
                .map_err(|e| e.to_string())?;
            let ok = matches!(s.shape, SpectralShape::Circle { radius } if rel(radius, mu.powf(-0.5)) < 1e-15);
            ensure(ok && s.exact, || format!("hardy mu={mu} y={y}: {s:?}"))?;
        }
        for x in [0.5, 1.0, 3.0] {
            let s = predict_spectrum(&ab0(), &AffineSymbol::real(mu, x).unwrap()).map_err(|e| e.to_string())?;
            let ok = matches!(s.shape, SpectralShape::Disc { radius } if rel(radius, 1.0 / mu) < 1e-15);
            ensure(ok && s.exact, || format!("bergman mu={mu} x={x}: {s:?}"))?;
        }
    }
    Ok("circle mu^-1/2 (Hardy), disc 1/mu (Bergman) for mu in {2, 4}".into())
}

fn oracle_norms() -> Outcome {
    let phi = AffineSymbol::real(2.0, 0.0).unwrap();
    let opts = PowerOptions {
        rel_tol: 1e-14,
        max_iterations: 10_000,
    };
    let mut report = Vec::new();
    for (name, w) in [("hardy", Weight::hardy()), ("hardy-bergman", hb())] {
        let exact = exact_hyperbolic_norm(&w, 2.0, 0.0).map_err(|e| e.to_string())?.norm;
        let err = |lo: i32, ppo: u32| -> Result<f64, String> {
            let g = build_grid(2f64.powi(lo), 2f64.powi(-lo), Some(2.0), ppo).map_err(|e| e.to_string())?;
            let m = discretize(&phi, &w, &g).map_err(|e| e.to_string())?;
            Ok(rel(operator_norm(&m, &opts).map_err(|e| e.to_string())?.norm, exact))
        };
        let coarse = err(-30, 8)?;
        let fine = err(-40, 16)?;
        ensure(coarse <= 0.02, || format!("{name}: coarse error {coarse:.2e}"))?;
        // both can sit at round-off (the Hardy shift is exact on the grid)
        ensure(fine < coarse || fine <= 1e-12, || format!("{name}: refinement {coarse:.2e} -> {fine:.2e}"))?;
        report.push(format!("{name} {coarse:.1e} -> {fine:.1e}"));
    }
    Ok(report.join(", "))
}

fn eigen_residuals(rng: &mut ChaCha8Rng) -> Outcome {
    // (weight, mu, x, side, truncated)
    let ws = [("hardy", Weight::hardy()), ("bergman", ab0()), ("hardy-bergman", hb())];
    let mut combos: Vec<(usize, f64, f64, OperatorSide, bool)> = Vec::new();
    for mu in [2.0, 4.0, 0.5, 0.25] {
        combos.push((2, mu, 0.0, OperatorSide::AStar, false));
    }
    combos.push((2, 2.0, 0.0, OperatorSide::AStar, true));
    combos.push((2, 0.5, 0.0, OperatorSide::AStar, true));
    for (wi, mu, x) in [(0, 2.0, 1.0), (0, 4.0, 0.5), (1, 2.0, 1.0), (1, 4.0, 2.0), (2, 2.0, 1.0), (2, 4.0, 0.25)] {
        combos.push((wi, mu, x, OperatorSide::A, false));
    }
    combos.push((2, 2.0, 1.0, OperatorSide::A, true));
    for (wi, mu, x) in [(0, 0.5, 1.0), (0, 0.25, 0.5), (1, 0.5, 1.0), (1, 0.25, 0.5), (2, 0.5, 1.0), (2, 0.25, 2.0)] {
        combos.push((wi, mu, x, OperatorSide::AStar, false));
    }
    combos.push((1, 0.5, 1.0, OperatorSide::AStar, true));
    assert_eq!(combos.len(), 20);

    let mut worst: f64 = 0.0;
    for (wi, mu, x, side, truncated) in combos {
        let (name, w) = &ws[wi];
        let range = if x == 0.0 {
            eigen_admissible_alphas(w)
        } else {
            damped_admissible_alphas(w, side)
        };
        let hi = range.upper.min(range.lower + 2.0);
        let alpha = c(
            range.lower + (hi - range.lower) * rng.gen_range(0.05..0.95),
            rng.gen_range(-3.0..3.0),
        );
        let grid = build_grid(2f64.powi(-20), 2f64.powi(20), Some(mu), 8).map_err(|e| e.to_string())?;
        let set = InvariantSet::new(mu.max(1.0 / mu), 0.5).unwrap();
        let r = residual_eigencheck(w, mu, x, alpha, side, &grid, truncated.then_some(&set))
            .map_err(|e| format!("{name} mu={mu} x={x}: {e}"))?;
        let expect = match side {
            OperatorSide::A => (-(alpha + 1.0) * mu.ln()).exp(),
            OperatorSide::AStar => (alpha * mu.ln()).exp(),
        };
        ensure((r.eigenvalue - expect).norm() <= 1e-13 * expect.norm(), || {
            format!("{name} mu={mu} x={x}: eigenvalue {} expected {expect}", r.eigenvalue)
        })?;
        ensure(r.relative_residual < 1e-8, || {
            format!("{name} mu={mu} x={x} alpha={alpha}: residual {:.2e}", r.relative_residual)
        })?;
        worst = worst.max(r.relative_residual);
    }
    Ok(format!("20 combinations, max relative residual {worst:.1e}"))
}

fn laplace_isometry() -> Outcome {
    let grid = build_grid(1e-8, 64.0, None, 32).map_err(|e| e.to_string())?;
    let cases = [
        ("e^-t, Hardy", ZenMeasure::dirac(1.0).unwrap(), 1.0, PI),
        ("t e^-t, Lebesgue", ZenMeasure::power(1.0, 0.0).unwrap(), 2.0, PI / 4.0),
    ];
    let mut report = Vec::new();
    for (name, m, power, expect) in cases {
        let f = GridFunction::from_fn(grid.clone(), |t| c(t.powf(power - 1.0) * (-t).exp(), 0.0))
            .map_err(|e| e.to_string())?;
        let w = Weight::synthesized(m.clone()).map_err(|e| e.to_string())?;
        let r = laplace_isometry_check(&f, &m, &w).map_err(|e| e.to_string())?;
        let e_time = rel(r.time_norm_sq, expect);
        let e_freq = rel(r.frequency_norm_sq, expect);
        ensure(e_time < 1e-3 && e_freq < 1e-3 && r.relative_error < 1e-3, || {
            format!("{name}: {r:?}")
        })?;
        report.push(format!("{name} {:.1e}", r.relative_error));
    }
    Ok(report.join(", "))
}

fn random_generator(rng: &mut ChaCha8Rng) -> AffineGenerator {
    let p = match rng.gen_range(0..4) {
        0 => 0.0,
        _ => rng.gen_range(-2.0..2.0),
    };
    let re = match rng.gen_range(0..3) {
        0 => 0.0,
        _ => rng.gen_range(0.0..3.0),
    };
    let re = if p < 0.0 { -re } else { re };
    AffineGenerator::new(p, c(re, rng.gen_range(-3.0..3.0))).unwrap()
}

fn semigroup_laws(rng: &mut ChaCha8Rng) -> Outcome {
    let h = 1e-6;
    let mut worst_law: f64 = 0.0;
    for _ in 0..1000 {
        let g = random_generator(rng);
        let (s, t) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let lhs = flow(&g, s + t).map_err(|e| e.to_string())?;
        let rhs = flow(&g, s).unwrap().compose(&flow(&g, t).unwrap());
        let scale = lhs.mu().max(lhs.s0().norm()).max(1.0);
        let err = ((lhs.mu() - rhs.mu()).abs() + (lhs.s0() - rhs.s0()).norm()) / scale;
        worst_law = worst_law.max(err);
        ensure(err <= 1e-12, || format!("law fails for {g:?} s={s} t={t}: {err:.2e}"))?;

        let z = c(rng.gen_range(0.01..5.0), rng.gen_range(-5.0..5.0));
        let fd = (flow(&g, h).unwrap().apply(z) - z) / h;
        // phi_h(z) = z + h G(z) + (h^2/2) p G(z) + ...
        let bound = 10.0 * h * (1.0 + g.p().powi(2)) * (1.0 + z.norm() + g.alpha().norm()) + 1e-8;
        ensure((fd - g.eval(z)).norm() <= bound, || format!("generator mismatch for {g:?} at {z}"))?;
    }
    let gen = AffineGenerator::new(2.0, c(0.0, 0.0)).unwrap();
    for (name, w, expect) in [("hardy", Weight::hardy(), (-1f64).exp()), ("bergman", ab0(), (-2f64).exp())] {
        let b = semigroup_norm_bounds(&w, &gen, 1.0).map_err(|e| e.to_string())?;
        ensure((b.lower.sqrt() - expect).abs() <= 1e-9 && (b.upper.sqrt() - expect).abs() <= 1e-9, || {
            format!("{name}: [{}, {}] expected {expect}", b.lower.sqrt(), b.upper.sqrt())
        })?;
    }
    Ok(format!("1000 draws, max law error {worst_law:.1e}; norms e^-1, e^-2"))
}

fn berkson_porta(rng: &mut ChaCha8Rng) -> Outcome {
    let grid = HalfPlaneGrid::new(0.0, 10.0, -10.0, 10.0, 50, 50).unwrap();
    for i in 0..200 {
        let g = random_generator(rng);
        let r = berkson_porta_check(|z| g.eval(z), &grid).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("draw {i}: {g:?} fails at {} (margin {})", r.witness, r.worst_margin))?;
    }
    let r = berkson_porta_check(|z| z * z, &grid).map_err(|e| e.to_string())?;
    let z = r.witness;
    // Re G - x d/dx Re G = x^2 - y^2 - 2 x^2
    let margin = -(z.re * z.re + z.im * z.im);
    ensure(!r.holds && margin < 0.0, || format!("z^2 not rejected: {r:?}"))?;
    Ok(format!("200 generators hold; z^2 fails at {z} (margin {margin:.1})"))
}

fn kernel_blow_up() -> Outcome {
    let w = hb();
    let mut vals = Vec::new();
    for x in [1.0, 0.1, 0.01, 0.001] {
        vals.push(zenspec::oracle::kernel_norm(c(x, 0.0), &w).map_err(|e| e.to_string())?.norm);
    }
    ensure(vals.windows(2).all(|p| p[1] > p[0]), || format!("not increasing: {vals:?}"))?;
    ensure(vals[2] > 10.0 * vals[0], || format!("k(0.01) = {} vs k(1) = {}", vals[2], vals[0]))?;
    Ok(format!(
        "norms {:.3}, {:.3}, {:.3}, {:.3}",
        vals[0], vals[1], vals[2], vals[3]
    ))
}

fn main() -> ExitCode {
    let seed: u64 = std::env::var("ZENSPEC_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0);
    // one independent stream per randomized criterion
    let rng = |n: u64| ChaCha8Rng::seed_from_u64(seed ^ (n << 32));
    println!("acceptance suite (seed {seed})");

    let start = Instant::now();
    let mut failed = 0;
    let mut run = |n: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let outcome = f();
        let ms = t0.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name}: {detail} ({ms} ms)"),
            Err(why) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {why} ({ms} ms)");
            }
        }
    };
    run(1, "hardy norm law", &mut hardy_norm_law);
    run(2, "bergman norm law", &mut bergman_norm_law);
    run(3, "hardy-bergman exact norms", &mut hardy_bergman_norms);
    run(4, "hardy-bergman spectrum", &mut || hardy_bergman_spectrum(&mut rng(4)));
    run(5, "spectral radius limit", &mut spectral_radius_limit);
    run(6, "power-weight spectra", &mut power_weight_spectra);
    run(7, "oracle norm agreement", &mut oracle_norms);
    run(8, "eigen residuals", &mut || eigen_residuals(&mut rng(8)));
    run(9, "laplace isometry", &mut laplace_isometry);
    run(10, "semigroup laws", &mut || semigroup_laws(&mut rng(10)));
    run(11, "berkson-porta", &mut || berkson_porta(&mut rng(11)));
    run(12, "kernel blow-up", &mut kernel_blow_up);
    println!(
        "{} of 12 criteria passed in {:.2} s",
        12 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

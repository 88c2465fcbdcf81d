//! Matrix discretizations of the time-domain form of `C_phi`:
//! `(B f)(t) = (1/mu) f(t/mu) exp(-s0 t / mu)` on `L^2(0, inf; w dt)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::grid::LogGrid;
use crate::error::{Result, ZenError};
use crate::symbols::{AffineSymbol, SymbolKind};
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorTag {
    /// Dilation with damping (hyperbolic symbols).
    Composition,
    /// Pointwise multiplication (parabolic symbols and the identity).
    Multiplication,
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<Complex64>,
    pub grid: LogGrid,
    pub tag: OperatorTag,
    /// Inner-product weights `w(t_j) t_j ln q`.
    pub gram: Vec<f64>,
}

/// Matrix of `C_phi` acting on samples at the grid nodes. Reads of
/// `f(t_j / mu)` outside the grid are taken as zero.
pub fn discretize(phi: &AffineSymbol, w: &Weight, grid: &LogGrid) -> Result<OperatorMatrix> {
    let n = grid.len();
    let nodes = grid.nodes();
    let s0 = phi.s0();
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    let tag = match phi.kind() {
        SymbolKind::Identity | SymbolKind::Parabolic => {
            for (j, &t) in nodes.iter().enumerate() {
                matrix[(j, j)] = (-s0 * t).exp();
            }
            OperatorTag::Multiplication
        }
        SymbolKind::Hyperbolic => {
            let mu = phi.mu();
            let shift = grid.shift_for(mu).ok_or_else(|| ZenError::IncommensurateGrid {
                mu,
                reason: format!("ratio {} has no integer power equal to mu", grid.ratio()),
            })?;
            for (j, &t) in nodes.iter().enumerate() {
                let src = j as i64 - shift;
                if (0..n as i64).contains(&src) {
                    matrix[(j, src as usize)] = (-s0 * t / mu).exp() / mu;
                }
            }
            OperatorTag::Composition
        }
    };
    Ok(OperatorMatrix {
        matrix,
        grid: grid.clone(),
        tag,
        gram: grid.gram(w),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    /// Relative change of the squared-norm estimate at which to stop.
    pub rel_tol: f64,
    pub max_iterations: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerResult {
    pub norm: f64,
    pub iterations: usize,
}

/// Largest singular value of `M` for the inner product `<f, g> = sum gram_j f_j conj(g_j)`,
/// by power iteration on `M* M`.
///
/// Iteration starts from the basis vector whose image is largest, so the
/// estimate is never below the best single-column ratio.
pub fn operator_norm(m: &OperatorMatrix, opts: &PowerOptions) -> Result<PowerResult> {
    let n = m.matrix.nrows();
    if m.gram.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
        return Err(ZenError::param("weight", "quadrature weights must be positive and finite"));
    }
    // Unitary change of variables: D M D^{-1} with D = diag(sqrt(gram)).
    let d: Vec<f64> = m.gram.iter().map(|g| g.sqrt()).collect();
    let mut a = m.matrix.clone();
    for (c, mut col) in a.column_iter_mut().enumerate() {
        for (r, v) in col.iter_mut().enumerate() {
            *v *= d[r] / d[c];
        }
    }
    let start = (0..n)
        .map(|c| a.column(c).norm_squared())
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(&y.1));
    let Some((c0, top)) = start else {
        return Ok(PowerResult { norm: 0.0, iterations: 0 });
    };
    if top == 0.0 {
        return Ok(PowerResult { norm: 0.0, iterations: 0 });
    }
    let ah = a.adjoint();
    let mut v = DVector::<Complex64>::zeros(n);
    v[c0] = Complex64::new(1.0, 0.0);
    let mut estimate = top;
    for it in 1..=opts.max_iterations {
        let av = &a * &v;
        let next = av.norm_squared();
        let mut u = &ah * av;
        let un = u.norm();
        if un == 0.0 {
            return Ok(PowerResult { norm: next.sqrt(), iterations: it });
        }
        u /= Complex64::new(un, 0.0);
        v = u;
        if (next - estimate).abs() <= opts.rel_tol * next && it > 1 {
            return Ok(PowerResult { norm: next.sqrt(), iterations: it });
        }
        estimate = next;
    }
    Err(ZenError::NonConvergence(format!(
        "power iteration did not reach relative change {} in {} iterations (estimate {})",
        opts.rel_tol,
        opts.max_iterations,
        estimate.sqrt()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::grid::build_grid;
    use crate::symbols::iterate;

    #[test]
    fn parabolic_is_diagonal() {
        let g = build_grid(0.5, 4.0, None, 2).unwrap();
        let phi = AffineSymbol::real(1.0, 1.0).unwrap();
        let m = discretize(&phi, &Weight::hardy_bergman(), &g).unwrap();
        assert_eq!(m.tag, OperatorTag::Multiplication);
        for (i, &t) in g.nodes().iter().enumerate() {
            for j in 0..g.len() {
                let expect = if i == j { (-t).exp() } else { 0.0 };
                assert!((m.matrix[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn dilation_is_scaled_shift() {
        let g = build_grid(1.0, 8.0, Some(2.0), 1).unwrap();
        let phi = AffineSymbol::real(2.0, 0.0).unwrap();
        let m = discretize(&phi, &Weight::hardy(), &g).unwrap();
        let half = Complex64::new(0.5, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j + 1 { half } else { Complex64::new(0.0, 0.0) };
                assert_eq!(m.matrix[(i, j)], expect);
            }
        }
    }

    #[test]
    fn identity_matrix() {
        let g = build_grid(1.0, 8.0, None, 3).unwrap();
        let m = discretize(&AffineSymbol::identity(), &Weight::hardy(), &g).unwrap();
        assert_eq!(m.matrix, DMatrix::identity(g.len(), g.len()));
    }

    #[test]
    fn incommensurate_grid_is_rejected() {
        let g = build_grid(1.0, 8.0, Some(2.0), 4).unwrap();
        let phi = AffineSymbol::real(3.0, 0.0).unwrap();
        assert!(matches!(
            discretize(&phi, &Weight::hardy(), &g),
            Err(ZenError::IncommensurateGrid { .. })
        ));
    }

    #[test]
    fn square_of_discretization_matches_iterate_on_interior_rows() {
        let g = build_grid(2f64.powi(-6), 2f64.powi(6), Some(2.0), 4).unwrap();
        let phi = AffineSymbol::real(2.0, 0.3).unwrap();
        let w = Weight::hardy_bergman();
        let m1 = discretize(&phi, &w, &g).unwrap().matrix;
        let m2 = discretize(&iterate(&phi, 2).unwrap(), &w, &g).unwrap().matrix;
        let sq = &m1 * &m1;
        let k = g.k().unwrap() as usize;
        for i in 2 * k..g.len() {
            for j in 0..g.len() {
                assert!((sq[(i, j)] - m2[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn hardy_shift_norm() {
        let g = build_grid(2f64.powi(-10), 2f64.powi(10), Some(2.0), 4).unwrap();
        let phi = AffineSymbol::real(2.0, 0.0).unwrap();
        let m = discretize(&phi, &Weight::hardy(), &g).unwrap();
        let r = operator_norm(&m, &PowerOptions::default()).unwrap();
        assert!((r.norm - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_on_a_dense_matrix() {
        // singular values of [[2, 1], [1, 2]] are 3 and 1
        let g = build_grid(1.0, 2.0, None, 1).unwrap();
        let c = |v: f64| Complex64::new(v, 0.0);
        let m = OperatorMatrix {
            matrix: DMatrix::from_row_slice(2, 2, &[c(2.0), c(1.0), c(1.0), c(2.0)]),
            grid: g,
            tag: OperatorTag::Composition,
            gram: vec![1.0, 1.0],
        };
        let r = operator_norm(&m, &PowerOptions { rel_tol: 1e-14, max_iterations: 1000 }).unwrap();
        assert!((r.norm - 3.0).abs() < 1e-10);
    }
}

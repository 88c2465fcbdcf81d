//! Geometric grids on `(0, inf)` and functions sampled on them.

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ZenError};
use crate::weights::Weight;

/// Relative tolerance for recognizing `ln mu / ln q` as an integer.
const COMMENSURATE_TOL: f64 = 1e-9;

/// Nodes `t_j = t_min q^j` with quadrature weights `t_j ln q`
/// (the rectangle rule in `u = ln t`; no endpoint halving).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogGrid {
    t_min: f64,
    t_max: f64,
    q: f64,
    /// `mu = q^k` when the grid was built for a dilation.
    k: Option<u32>,
    mu: Option<f64>,
    #[serde(skip)]
    nodes: Vec<f64>,
    #[serde(skip)]
    weights: Vec<f64>,
}

impl LogGrid {
    fn from_ratio(t_min: f64, q: f64, n: usize, k: Option<u32>, mu: Option<f64>) -> Self {
        let ln_q = q.ln();
        let nodes: Vec<f64> = (0..n).map(|j| t_min * q.powi(j as i32)).collect();
        let weights = nodes.iter().map(|t| t * ln_q).collect();
        LogGrid {
            t_min,
            t_max: *nodes.last().expect("n >= 2"),
            q,
            k,
            mu,
            nodes,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// Largest node.
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn ratio(&self) -> f64 {
        self.q
    }

    pub fn k(&self) -> Option<u32> {
        self.k
    }

    pub fn mu(&self) -> Option<f64> {
        self.mu
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index shift `s` with `t_j / mu = t_{j - s}`, if `mu` is an integer
    /// power of the grid ratio.
    pub fn shift_for(&self, mu: f64) -> Option<i64> {
        if !(mu > 0.0 && mu.is_finite()) {
            return None;
        }
        let steps = mu.ln() / self.q.ln();
        let s = steps.round();
        ((steps - s).abs() <= COMMENSURATE_TOL * s.abs().max(1.0)).then_some(s as i64)
    }

    /// `w(t_j) t_j ln q`, the weights of the discrete `L^2(w)` inner product.
    pub fn gram(&self, w: &Weight) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &h)| w.eval(t) * h)
            .collect()
    }

    /// Discrete `integral |f|^2 w dt`.
    pub fn norm_sq(&self, values: &[Complex64], w: &Weight) -> f64 {
        values
            .iter()
            .zip(&self.nodes)
            .zip(&self.weights)
            .map(|((f, &t), &h)| f.norm_sqr() * w.eval(t) * h)
            .sum()
    }
}

/// Geometric grid on `[t_min, t_max]`. With `mu` given, the ratio is
/// `q = mu^{1/k}` (`k = round(points_per_octave |log2 mu|)`), so dividing a
/// node by `mu` lands exactly `k` nodes away; otherwise `q = 2^{1/points_per_octave}`.
pub fn build_grid(t_min: f64, t_max: f64, mu: Option<f64>, points_per_octave: u32) -> Result<LogGrid> {
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(ZenError::param("grid", format!("need 0 < t_min < t_max < inf, got [{t_min}, {t_max}]")));
    }
    if points_per_octave == 0 {
        return Err(ZenError::param("points_per_octave", "must be >= 1"));
    }
    let (q, k) = match mu {
        Some(mu) => {
            if !(mu > 0.0 && mu.is_finite()) || mu == 1.0 {
                return Err(ZenError::param("mu", format!("grid needs mu > 0, mu != 1, got {mu}")));
            }
            let k = (f64::from(points_per_octave) * mu.log2().abs()).round();
            if k < 1.0 {
                return Err(ZenError::IncommensurateGrid {
                    mu,
                    reason: format!("k = round({points_per_octave} * |log2 mu|) is 0"),
                });
            }
            ((mu.ln().abs() / k).exp(), Some(k as u32))
        }
        None => ((std::f64::consts::LN_2 / f64::from(points_per_octave)).exp(), None),
    };
    let steps = (t_max / t_min).ln() / q.ln();
    let n = (steps + 1e-9).floor() as usize + 1;
    if n < 2 {
        return Err(ZenError::param("grid", "range holds fewer than two nodes"));
    }
    if n > i32::MAX as usize {
        return Err(ZenError::param("grid", "too many nodes"));
    }
    Ok(LogGrid::from_ratio(t_min, q, n, k, mu))
}

/// Complex samples of a function on a [`LogGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: LogGrid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: LogGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(ZenError::param(
                "values",
                format!("{} samples for a grid of {} nodes", values.len(), grid.len()),
            ));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(ZenError::param("values", "samples must be finite"));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: LogGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn zero(grid: LogGrid) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        GridFunction { grid, values }
    }

    /// Reads `t,re,im` rows (header optional). The `t` column must be
    /// geometric to relative accuracy 1e-9.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| ZenError::Parse(e.to_string()))?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let row = match parsed {
                Ok(row) => row,
                Err(_) if line == 0 => continue,
                Err(e) => return Err(ZenError::Parse(format!("row {}: {e}", line + 1))),
            };
            if row.len() != 3 {
                return Err(ZenError::Parse(format!("row {}: expected t,re,im", line + 1)));
            }
            ts.push(row[0]);
            values.push(Complex64::new(row[1], row[2]));
        }
        if ts.len() < 2 {
            return Err(ZenError::Parse("grid function needs at least two rows".into()));
        }
        if !(ts[0] > 0.0 && ts[1] > ts[0]) {
            return Err(ZenError::Parse("t must be positive and increasing".into()));
        }
        let q = ts[1] / ts[0];
        for (j, &t) in ts.iter().enumerate() {
            let expect = ts[0] * q.powi(j as i32);
            if (t - expect).abs() > 1e-9 * expect {
                return Err(ZenError::Parse(format!("row {}: t is not on a geometric grid", j + 1)));
            }
        }
        let grid = LogGrid::from_ratio(ts[0], q, ts.len(), None, None);
        Self::new(grid, values)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| ZenError::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    pub fn norm_sq(&self, w: &Weight) -> f64 {
        self.grid.norm_sq(&self.values, w)
    }
}

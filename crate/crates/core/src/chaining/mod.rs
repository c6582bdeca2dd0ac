//! Generic chaining on finite (pseudo-)metric spaces.
//!
//! Everything here works on an explicit distance matrix: covering numbers
//! from maximal separated sets, Dudley's entropy integral on a dyadic grid,
//! greedy admissible partition sequences (an upper bound on `γ_2`), empirical
//! Gaussian suprema, and the distance families induced by a tensor.

mod distances;
mod sequence;

pub use distances::{dtau_distance, entropy_trend_probe, induced_distance, tau_schedule, EntropyTrendReport, EntropyTrendRow, PointFamily};
pub use sequence::{
    greedy_admissible_sequence, merge_sequences, reindex_sequence, AdmissibleSequence, MergeReport, PartitionSequence,
    ReindexReport,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg_err, shape_err, Result};
use crate::mc::{draw, mean_and_se};

/// Slack allowed when checking the triangle inequality.
pub const TRIANGLE_SLACK: f64 = 1e-9;

/// A finite pseudo-metric space given by its symmetric distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMatrix {
    size: usize,
    dist: Vec<f64>,
}

impl MetricMatrix {
    /// Validates symmetry, zero diagonal, non-negativity and the triangle
    /// inequality (up to [`TRIANGLE_SLACK`]).
    pub fn new(size: usize, dist: Vec<f64>) -> Result<Self> {
        let m = Self::from_symmetric(size, dist)?;
        if let Some((i, j, k)) = m.triangle_violation() {
            return arg_err(format!(
                "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})"
            ));
        }
        Ok(m)
    }

    /// Like [`MetricMatrix::new`] without the cubic triangle check; for
    /// matrices that are distances by construction.
    pub(crate) fn from_symmetric(size: usize, dist: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return arg_err("metric space must have at least one point");
        }
        if dist.len() != size * size {
            return shape_err(format!("{} entries for a {size}x{size} matrix", dist.len()));
        }
        for i in 0..size {
            if dist[i * size + i] != 0.0 {
                return arg_err(format!("nonzero diagonal at {i}"));
            }
            for j in 0..i {
                let (a, b) = (dist[i * size + j], dist[j * size + i]);
                if !(a >= 0.0) || !a.is_finite() || a != b {
                    return arg_err(format!("entry ({i},{j}) is negative, non-finite or asymmetric"));
                }
            }
        }
        Ok(Self { size, dist })
    }

    /// Euclidean distances between points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return arg_err("no points");
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return shape_err("points have different dimensions");
        }
        let dist: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
                points[lo].iter().zip(&points[hi]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            })
            .collect();
        Self::from_symmetric(n, dist)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.size + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.dist
    }

    /// First `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k) + slack`.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.size;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, k) > self.get(i, j) + self.get(j, k) + TRIANGLE_SLACK {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().fold(0.0, |m: f64, &v| m.max(v))
    }

    /// Diameter of a subset of points.
    pub fn diameter_of(&self, cell: &[usize]) -> f64 {
        let mut m: f64 = 0.0;
        for (a, &i) in cell.iter().enumerate() {
            for &j in &cell[a + 1..] {
                m = m.max(self.get(i, j));
            }
        }
        m
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            size: self.size,
            dist: self.dist.iter().map(|v| c.abs() * v).collect(),
        }
    }

    /// Entrywise sum of distances on the same point set.
    pub fn sum(matrices: &[MetricMatrix]) -> Result<Self> {
        let first = matrices.first().ok_or_else(|| crate::Error::Argument("no matrices to sum".into()))?;
        if matrices.iter().any(|m| m.size != first.size) {
            return arg_err("matrices have different sizes");
        }
        let mut dist = vec![0.0; first.dist.len()];
        for m in matrices {
            dist.iter_mut().zip(&m.dist).for_each(|(a, b)| *a += b);
        }
        Ok(Self { size: first.size, dist })
    }

    pub fn zero(size: usize) -> Result<Self> {
        Self::from_symmetric(size, vec![0.0; size * size])
    }

    /// Rows of comma-separated distances.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|j| format!("{}", self.get(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringReport {
    pub epsilon: f64,
    pub count: usize,
    pub centers: Vec<usize>,
}

/// Greedy maximal `eps`-separated subset, scanning points in index order.
///
/// The result is an `eps`-net, so `N(T, D, eps) ≤ count`, and its points are
/// pairwise at least `eps` apart, so `count ≤ N(T, D, eps/2)`.
pub fn covering_number(m: &MetricMatrix, eps: f64) -> Result<CoveringReport> {
    if !(eps > 0.0) {
        return arg_err(format!("epsilon must be positive, got {eps}"));
    }
    let mut centers: Vec<usize> = Vec::new();
    for i in 0..m.size() {
        if centers.iter().all(|&c| m.get(i, c) >= eps) {
            centers.push(i);
        }
    }
    Ok(CoveringReport {
        epsilon: eps,
        count: centers.len(),
        centers,
    })
}

/// Largest dyadic scale index used by [`dudley_integral`].
pub const DUDLEY_MAX_SCALE: u32 = 64;

/// `∫_0^∞ √(ln N(T, D, ε)) dε` on the dyadic grid `ε_j = diam / 2^j`.
///
/// Each interval `(ε_{j+1}, ε_j]` is weighted by the greedy count at `ε_j`.
/// Once the count reaches the number of points it stays there for all smaller
/// scales, so the remaining integral `ε_{j+1} √(ln |T|)` is added in closed
/// form and the sum stops.
pub fn dudley_integral(m: &MetricMatrix) -> f64 {
    let diam = m.diameter();
    if m.size() < 2 || diam == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for j in 0..=DUDLEY_MAX_SCALE {
        let eps = diam / 2f64.powi(j as i32);
        let next = eps / 2.0;
        let count = covering_number(m, eps).expect("eps > 0").count;
        total += (eps - next) * (count as f64).ln().sqrt();
        if count == m.size() {
            total += next * (m.size() as f64).ln().sqrt();
            break;
        }
    }
    total
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussianSupReport {
    /// Monte Carlo estimate of `E max_t ⟨t, G⟩`.
    pub mean_sup: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Canonical distance of the process: Euclidean distance between points.
    #[serde(skip)]
    pub metric: MetricMatrix,
}

/// `E max_t ⟨t, G⟩` for a standard Gaussian `G` on `R^m`.
pub fn empirical_gaussian_sup(points: &[Vec<f64>], samples: usize, seed: u64) -> Result<GaussianSupReport> {
    let metric = MetricMatrix::from_points(points)?;
    if samples == 0 {
        return arg_err("samples must be positive");
    }
    let dim = points[0].len();
    let sups = draw(samples, seed, |stream| {
        let g = stream.gaussian_vec(dim);
        points
            .iter()
            .map(|t| t.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let (mean_sup, std_error) = mean_and_se(&sups, |v| v);
    Ok(GaussianSupReport {
        mean_sup,
        std_error,
        samples,
        metric,
    })
}

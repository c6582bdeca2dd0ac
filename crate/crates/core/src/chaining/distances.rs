//! Distances on `T = B_1 × .. × B_k` induced by a tensor of order `k+1`.

use rayon::prelude::*;
use serde::Serialize;

use super::{covering_number, MetricMatrix};
use crate::error::{arg_err, shape_err, Result};
use crate::mc::SampleStream;
use crate::norms::{partition_norm, NormOptions};
use crate::tensor::{contract, euclidean_norm, DenseTensor, FactorVector, Partition};

/// Points `(x_1, .., x_k)` of a product of unit balls, together with the
/// tensor `A` of order `k+1` they are paired with.
#[derive(Clone, Debug, PartialEq)]
pub struct PointFamily {
    tensor: DenseTensor,
    points: Vec<Vec<Vec<f64>>>,
}

impl PointFamily {
    pub fn new(tensor: DenseTensor, points: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if tensor.order() < 2 {
            return shape_err("the tensor needs order k+1 >= 2");
        }
        if points.is_empty() {
            return arg_err("no points");
        }
        let k = tensor.order() - 1;
        for (t, point) in points.iter().enumerate() {
            if point.len() != k {
                return shape_err(format!("point {t} has {} factors, expected {k}", point.len()));
            }
            for (j, x) in point.iter().enumerate() {
                if x.len() != tensor.dims()[j] {
                    return shape_err(format!(
                        "factor {} of point {t} has length {}, axis has dimension {}",
                        j + 1,
                        x.len(),
                        tensor.dims()[j]
                    ));
                }
                if x.iter().any(|v| !v.is_finite()) || euclidean_norm(x) > 1.0 + 1e-12 {
                    return arg_err(format!("factor {} of point {t} lies outside the unit ball", j + 1));
                }
            }
        }
        Ok(Self { tensor, points })
    }

    /// `npoints` points with independent uniform unit-sphere factors; point
    /// `t` uses stream `t` of `seed`.
    pub fn random(tensor: DenseTensor, npoints: usize, seed: u64) -> Result<Self> {
        if tensor.order() < 2 {
            return shape_err("the tensor needs order k+1 >= 2");
        }
        let k = tensor.order() - 1;
        let points = (0..npoints)
            .map(|t| {
                let mut stream = SampleStream::new(seed, t as u64);
                (0..k).map(|j| stream.unit_vector(tensor.dims()[j])).collect()
            })
            .collect();
        Self::new(tensor, points)
    }

    pub fn tensor(&self) -> &DenseTensor {
        &self.tensor
    }

    pub fn points(&self) -> &[Vec<Vec<f64>>] {
        &self.points
    }

    /// `k`, the number of factors per point.
    pub fn k(&self) -> usize {
        self.tensor.order() - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn factor(&self, t: usize, block: &[usize]) -> Result<FactorVector> {
        let mut acc: Option<FactorVector> = None;
        for &j in block {
            let x = FactorVector::for_shape(self.tensor.shape(), vec![j], self.points[t][j].clone())?;
            acc = Some(match acc {
                None => x,
                Some(prev) => prev.tensor(&x)?,
            });
        }
        acc.ok_or_else(|| crate::Error::Argument("empty index set".into()))
    }
}

fn check_block(block: &[usize], k: usize) -> Result<Vec<usize>> {
    if block.is_empty() {
        return arg_err("the index set I must be non-empty");
    }
    let mut sorted = block.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != block.len() {
        return arg_err("the index set I repeats an index");
    }
    if let Some(&bad) = sorted.iter().find(|&&j| j >= k) {
        return arg_err(format!("index {} outside 1..={k}", bad + 1));
    }
    Ok(sorted)
}

/// `D_I(x, y) = ‖⟨A, x_I⟩ − ⟨A, y_I⟩‖` (Euclidean) for 0-based `I ⊆ {0..k-1}`.
pub fn induced_distance(f: &PointFamily, block: &[usize]) -> Result<MetricMatrix> {
    let block = check_block(block, f.k())?;
    let images = (0..f.len())
        .into_par_iter()
        .map(|t| Ok(contract(f.tensor(), &f.factor(t, &block)?)?.into_data()))
        .collect::<Result<Vec<_>>>()?;
    MetricMatrix::from_points(&images)
}

/// Non-empty proper subsets of `{0..k-1}`, by bitmask.
fn proper_subsets(k: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << k) - 1).map(move |mask| (0..k).filter(|j| mask >> j & 1 == 1).collect())
}

/// `D^τ = Σ_{∅ ⊊ I ⊊ [k]} τ^{k − |I|} D_I`; the zero matrix for `k = 1`.
pub fn dtau_distance(f: &PointFamily, tau: f64) -> Result<MetricMatrix> {
    if !(tau > 0.0 && tau < 1.0) {
        return arg_err(format!("tau must lie in (0, 1), got {tau}"));
    }
    let k = f.k();
    let mut terms = Vec::new();
    for block in proper_subsets(k) {
        let w = tau.powi((k - block.len()) as i32);
        terms.push(induced_distance(f, &block)?.scaled(w));
    }
    if terms.is_empty() {
        return MetricMatrix::zero(f.len());
    }
    MetricMatrix::sum(&terms)
}

/// `τ_n = min(τ, 2^{-n/2})`.
pub fn tau_schedule(tau: f64, n: usize) -> f64 {
    tau.min(2f64.powf(-(n as f64) / 2.0))
}

/// Levels summed in [`EntropyTrendRow::schedule_sum`].
pub const SCHEDULE_LEVELS: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct EntropyTrendRow {
    pub tau: f64,
    /// `δ_{D^τ}(S) + τ^k ‖A‖_HS`.
    pub epsilon: f64,
    /// Greedy covering count of `S` for `D_[k]` at `epsilon`.
    pub count: usize,
    pub log2_count: f64,
    pub inv_tau_sq: f64,
    /// `Σ_{n ≤ 64} τ_n^k 2^{n/2}`.
    pub schedule_sum: f64,
    /// `schedule_sum / τ^{k-1}`.
    pub schedule_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyTrendReport {
    pub k: usize,
    pub points: usize,
    pub hs_norm: f64,
    pub rows: Vec<EntropyTrendRow>,
    /// Least-squares slope of `log2_count` against `inv_tau_sq`; `None` with
    /// fewer than two distinct `tau`.
    pub slope: Option<f64>,
}

/// Covering counts of the sampled set under `D_[k]` at the scale
/// `δ_{D^τ}(S) + τ^k ‖A‖_HS`, for each `τ`.
pub fn entropy_trend_probe(f: &PointFamily, taus: &[f64], opts: &NormOptions) -> Result<EntropyTrendReport> {
    if taus.is_empty() {
        return arg_err("no tau values");
    }
    let k = f.k();
    let hs = partition_norm(f.tensor(), &Partition::whole(f.tensor().order())?, opts)?.value;
    let full: Vec<usize> = (0..k).collect();
    let process = induced_distance(f, &full)?;
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let diam = dtau_distance(f, tau)?.diameter();
        let epsilon = diam + tau.powi(k as i32) * hs;
        let count = if epsilon > 0.0 {
            covering_number(&process, epsilon)?.count
        } else {
            // zero tensor: every distance vanishes
            1
        };
        let schedule_sum: f64 = (0..=SCHEDULE_LEVELS)
            .map(|n| tau_schedule(tau, n).powi(k as i32) * 2f64.powf(n as f64 / 2.0))
            .sum();
        rows.push(EntropyTrendRow {
            tau,
            epsilon,
            count,
            log2_count: (count as f64).log2(),
            inv_tau_sq: tau.powi(-2),
            schedule_sum,
            schedule_ratio: schedule_sum / tau.powi(k as i32 - 1),
        });
    }
    let slope = least_squares_slope(
        &rows.iter().map(|r| r.inv_tau_sq).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.log2_count).collect::<Vec<_>>(),
    );
    Ok(EntropyTrendReport {
        k,
        points: f.len(),
        hs_norm: hs,
        rows,
        slope,
    })
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

//! Partition norms `‖A‖_P = sup ⟨A, x_1 ⊗ .. ⊗ x_k⟩` over unit vectors
//! `x_j ∈ E_{I_j}`.
//!
//! The supremum is NP-hard for `k ≥ 3` blocks, so [`partition_norm`] returns
//! the best value found by alternating maximization (higher-order power
//! iteration) from one deterministic and several seeded random starts. The
//! witnesses are always feasible, so the value is a certified lower bound.
//! Two-block partitions are matrix operator norms and one-block partitions are
//! Frobenius norms; both are exact here.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg_err, shape_err, Result};
use crate::mc::{mix_seed, SampleStream};
use crate::tensor::{enumerate_partitions, euclidean_norm, is_finer, BlockLayout, DenseTensor, FactorVector, Partition};

/// Solver settings for [`partition_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormOptions {
    /// Random starts in addition to the deterministic one.
    pub restarts: usize,
    /// Cap on full block cycles per start.
    pub max_iters: usize,
    /// Relative improvement below which a start is converged.
    pub tol: f64,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 500,
            tol: 1e-12,
            seed: 0,
        }
    }
}

impl NormOptions {
    fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return arg_err("restarts must be at least 1");
        }
        if !(self.tol > 0.0) {
            return arg_err("tol must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionNormResult {
    #[serde(serialize_with = "serialize_display")]
    pub partition: Partition,
    pub value: f64,
    #[serde(skip)]
    pub witnesses: Vec<FactorVector>,
    /// Random starts run (the deterministic start is not counted).
    pub restarts_used: usize,
    /// Whether the winning start met the tolerance within `max_iters`.
    pub converged: bool,
}

fn serialize_display<S: serde::Serializer>(p: &Partition, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(p)
}

/// Frobenius norm, `‖A‖_{[d]}`.
pub fn hs_norm(a: &DenseTensor) -> f64 {
    euclidean_norm(a.data())
}

/// Largest singular value of an order-2 tensor.
pub fn operator_norm_2d(a: &DenseTensor) -> Result<f64> {
    if a.order() != 2 {
        return shape_err(format!("operator norm needs an order-2 tensor, got order {}", a.order()));
    }
    Ok(top_singular_value(a.dims()[0], a.dims()[1], a.data()))
}

fn top_singular_value(rows: usize, cols: usize, data: &[f64]) -> f64 {
    let m = DMatrix::from_row_slice(rows, cols, data);
    m.singular_values().iter().fold(0.0, |acc: f64, &s| acc.max(s))
}

/// Leading left singular vector of a row-major matrix.
fn top_left_singular_vector(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    let m = DMatrix::from_row_slice(rows, cols, data);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let best = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    u.column(best.0).iter().copied().collect()
}

struct Ascent {
    value: f64,
    xs: Vec<Vec<f64>>,
    converged: bool,
}

/// Block-coordinate ascent: each step replaces `x_j` by the normalized
/// contraction of `A` against the other blocks, the exact maximizer over `x_j`.
fn ascend(layout: &BlockLayout, data: &[f64], mut xs: Vec<Vec<f64>>, max_iters: usize, tol: f64) -> Ascent {
    let k = layout.num_blocks();
    let mut buf: Vec<Vec<f64>> = (0..k).map(|b| vec![0.0; layout.block_len(b)]).collect();
    let mut prev = f64::NEG_INFINITY;
    let mut converged = false;
    for _ in 0..max_iters.max(1) {
        let mut current = 0.0;
        for j in 0..k {
            layout.contract_except(data, &xs, j, &mut buf[j]);
            let n = euclidean_norm(&buf[j]);
            if n > 0.0 {
                xs[j].iter_mut().zip(&buf[j]).for_each(|(x, y)| *x = y / n);
            }
            current = n;
        }
        if current - prev <= tol * current.abs() {
            converged = true;
            break;
        }
        prev = current;
    }
    let value = layout.pair(data, &xs);
    Ascent { value, xs, converged }
}

fn blocks_layout(a: &DenseTensor, p: &Partition) -> Result<BlockLayout> {
    if p.ground_size() != a.order() {
        return shape_err(format!(
            "partition of {} elements for a tensor of order {}",
            p.ground_size(),
            a.order()
        ));
    }
    Ok(BlockLayout::new(a.shape(), p.blocks()))
}

fn witnesses(a: &DenseTensor, p: &Partition, xs: Vec<Vec<f64>>) -> Vec<FactorVector> {
    p.blocks()
        .iter()
        .zip(xs)
        .map(|(block, x)| FactorVector::for_shape(a.shape(), block.clone(), x).expect("block sizes match layout"))
        .collect()
}

fn unit_e1(len: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[0] = 1.0;
    v
}

/// Alternating-maximization estimate of `‖A‖_P`.
pub fn partition_norm(a: &DenseTensor, p: &Partition, opts: &NormOptions) -> Result<PartitionNormResult> {
    partition_norm_with_starts(a, p, opts, &[])
}

/// [`partition_norm`] with extra caller-supplied starting points (one unit
/// vector per block each), tried after the deterministic start.
pub fn partition_norm_with_starts(
    a: &DenseTensor,
    p: &Partition,
    opts: &NormOptions,
    extra: &[Vec<Vec<f64>>],
) -> Result<PartitionNormResult> {
    opts.validate()?;
    let layout = blocks_layout(a, p)?;
    let k = layout.num_blocks();
    if a.is_zero() {
        let xs = (0..k).map(|b| unit_e1(layout.block_len(b))).collect();
        return Ok(PartitionNormResult {
            partition: p.clone(),
            value: 0.0,
            witnesses: witnesses(a, p, xs),
            restarts_used: 0,
            converged: true,
        });
    }

    let deterministic: Vec<Vec<f64>> = p
        .blocks()
        .iter()
        .map(|block| {
            let (r, c, m) = a.flatten(block).expect("partition blocks are valid axes");
            top_left_singular_vector(r, c, &m)
        })
        .collect();

    let n_fixed = 1 + extra.len();
    let total = n_fixed + opts.restarts;
    let runs: Vec<Ascent> = (0..total)
        .into_par_iter()
        .map(|s| {
            let start = if s == 0 {
                deterministic.clone()
            } else if s < n_fixed {
                extra[s - 1].clone()
            } else {
                let mut stream = SampleStream::new(mix_seed(opts.seed, 0x6e6f726d), s as u64);
                (0..k).map(|b| stream.unit_vector(layout.block_len(b))).collect()
            };
            ascend(&layout, a.data(), start, opts.max_iters, opts.tol)
        })
        .collect();

    // max value, lowest start index on ties
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.value > runs[best].value {
            best = i;
        }
    }
    let winner = runs.into_iter().nth(best).expect("at least one start");
    Ok(PartitionNormResult {
        partition: p.clone(),
        value: winner.value,
        witnesses: witnesses(a, p, winner.xs),
        restarts_used: opts.restarts,
        converged: winner.converged,
    })
}

/// Norms for every partition of `[d]`, in enumeration order.
///
/// Partitions are solved finest first, and each one is also started from the
/// merged witnesses of the partitions it covers. Since a product of finer
/// witnesses is feasible for the coarser problem and ascent never decreases
/// the value, the returned values are monotone under refinement.
pub fn all_partition_norms(a: &DenseTensor, opts: &NormOptions) -> Result<Vec<PartitionNormResult>> {
    let parts = enumerate_partitions(a.order())?;
    let mut order: Vec<usize> = (0..parts.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(parts[i].cardinality()));
    let mut done: Vec<Option<PartitionNormResult>> = vec![None; parts.len()];
    for &i in &order {
        let p = &parts[i];
        let mut extra = Vec::new();
        for (j, q) in parts.iter().enumerate() {
            if q.cardinality() != p.cardinality() + 1 || !is_finer(q, p)? {
                continue;
            }
            let finer = done[j].as_ref().expect("finer partitions are solved first");
            extra.push(merge_witnesses(p, finer)?);
        }
        done[i] = Some(partition_norm_with_starts(a, p, opts, &extra)?);
    }
    Ok(done.into_iter().map(|r| r.expect("every partition solved")).collect())
}

/// Tensor products of the finer witnesses grouped by the blocks of `coarse`.
fn merge_witnesses(coarse: &Partition, finer: &PartitionNormResult) -> Result<Vec<Vec<f64>>> {
    coarse
        .blocks()
        .iter()
        .map(|block| {
            let mut acc: Option<FactorVector> = None;
            for w in finer.witnesses.iter().filter(|w| block.contains(&w.block()[0])) {
                acc = Some(match acc {
                    None => w.clone(),
                    Some(v) => v.tensor(w)?,
                });
            }
            Ok(acc.expect("every coarse block contains a finer block").coords().to_vec())
        })
        .collect()
}

/// Largest search dimension `Σ_blocks ∏ dims` accepted by [`brute_force_norm`].
pub const BRUTE_FORCE_MAX_DIM: usize = 12;

/// Grid-search oracle for `‖A‖_P` on small instances.
///
/// Every block except the largest is swept over a hyperspherical-angle grid
/// of its unit sphere (`grid_density` values per angle); the largest block is
/// then optimal in closed form. The best grid point is polished by alternating
/// maximization.
pub fn brute_force_norm(a: &DenseTensor, p: &Partition, grid_density: usize) -> Result<f64> {
    let layout = blocks_layout(a, p)?;
    let k = layout.num_blocks();
    let block_lens: Vec<usize> = (0..k).map(|b| layout.block_len(b)).collect();
    let search_dim: usize = block_lens.iter().sum();
    if search_dim > BRUTE_FORCE_MAX_DIM {
        return arg_err(format!(
            "search dimension {search_dim} exceeds {BRUTE_FORCE_MAX_DIM}"
        ));
    }
    if grid_density < 8 {
        return arg_err("grid density must be at least 8");
    }
    if a.is_zero() {
        return Ok(0.0);
    }
    let free = (0..k).max_by_key(|&b| (block_lens[b], std::cmp::Reverse(b))).expect("k >= 1");
    let grids: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|b| if b == free { vec![vec![0.0; block_lens[b]]] } else { sphere_grid(block_lens[b], grid_density) })
        .collect();

    let mut xs: Vec<Vec<f64>> = grids.iter().map(|g| g[0].clone()).collect();
    let mut buf = vec![0.0; block_lens[free]];
    let mut best_value = f64::NEG_INFINITY;
    let mut best_xs = xs.clone();
    let mut counter = vec![0usize; k];
    loop {
        for b in 0..k {
            xs[b].clone_from(&grids[b][counter[b]]);
        }
        layout.contract_except(a.data(), &xs, free, &mut buf);
        let value = euclidean_norm(&buf);
        if value > best_value {
            best_value = value;
            best_xs = xs.clone();
            if value > 0.0 {
                best_xs[free] = buf.iter().map(|y| y / value).collect();
            } else {
                best_xs[free] = unit_e1(block_lens[free]);
            }
        }
        // odometer over the grids
        let mut b = 0;
        loop {
            if b == k {
                let polished = ascend(&layout, a.data(), best_xs, 10_000, 1e-15);
                return Ok(polished.value.max(best_value));
            }
            counter[b] += 1;
            if counter[b] < grids[b].len() {
                break;
            }
            counter[b] = 0;
            b += 1;
        }
    }
}

/// Unit vectors of `R^m` on a hyperspherical-angle grid.
fn sphere_grid(m: usize, density: usize) -> Vec<Vec<f64>> {
    if m == 1 {
        return vec![vec![1.0]];
    }
    let n_angles = m - 1;
    let mut out = Vec::new();
    let mut idx = vec![0usize; n_angles];
    loop {
        let angles: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                if i + 1 == n_angles {
                    std::f64::consts::TAU * t as f64 / density as f64
                } else {
                    std::f64::consts::PI * (t as f64 + 0.5) / density as f64
                }
            })
            .collect();
        let mut v = Vec::with_capacity(m);
        let mut sin_prod = 1.0;
        for &phi in &angles {
            v.push(sin_prod * phi.cos());
            sin_prod *= phi.sin();
        }
        v.push(sin_prod);
        out.push(v);
        let mut i = 0;
        loop {
            if i == n_angles {
                return out;
            }
            idx[i] += 1;
            if idx[i] < density {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

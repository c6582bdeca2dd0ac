//! Gaussian chaoses: Monte Carlo moments, the partition-sum moment bound and
//! probes of the inequalities used to derive it.
//!
//! The decoupled chaos is `Z = ⟨A, X_1 ⊗ .. ⊗ X_d⟩` with independent standard
//! Gaussian vectors `X_i`; the coupled chaos substitutes one Gaussian vector
//! in every slot, `Y = Σ a_{i_1..i_d} g_{i_1}..g_{i_d}`, diagonal terms
//! included unless `no_diagonal` is set.

use serde::Serialize;

use crate::error::{arg_err, shape_err, Result};
use crate::mc::{abs_pow, chunked_sum, draw, draw_with, mean_and_se, mix_seed, SampleStream};
use crate::norms::{all_partition_norms, hs_norm, operator_norm_2d, partition_norm, NormOptions, PartitionNormResult};
use crate::tensor::{euclidean_norm, Partition, DenseTensor};

#[derive(Clone, Debug)]
pub struct ChaosSampleConfig {
    pub tensor: DenseTensor,
    /// Moment order, `p ≥ 1`.
    pub p: f64,
    pub samples: usize,
    pub seed: u64,
    /// Independent Gaussian vector per slot (`true`) or one shared vector.
    pub decoupled: bool,
    /// Coupled chaos only: drop every entry with a repeated index.
    pub no_diagonal: bool,
}

impl ChaosSampleConfig {
    pub fn decoupled(tensor: DenseTensor, p: f64, samples: usize, seed: u64) -> Self {
        Self {
            tensor,
            p,
            samples,
            seed,
            decoupled: true,
            no_diagonal: false,
        }
    }

    pub fn coupled(tensor: DenseTensor, p: f64, samples: usize, seed: u64) -> Self {
        Self {
            decoupled: false,
            ..Self::decoupled(tensor, p, samples, seed)
        }
    }

    fn validate(&self) -> Result<()> {
        check_p(self.p)?;
        if self.samples == 0 {
            return arg_err("samples must be positive");
        }
        if !self.decoupled && !self.tensor.shape().is_square() {
            return shape_err(format!(
                "coupled chaos needs equal dims, got {:?}",
                self.tensor.dims()
            ));
        }
        Ok(())
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return arg_err(format!("moment order p = {p} must be a finite number >= 1"));
    }
    Ok(())
}

/// Estimate of `(E|Z|^p)^{1/p}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub p: f64,
    pub value: f64,
    /// Delta-method standard error of the p-th root.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Draws of the chaos for a tensor whose entries are already scaled.
fn chaos_draws(a: &DenseTensor, decoupled: bool, samples: usize, seed: u64) -> Vec<f64> {
    let dims = a.dims().to_vec();
    let data = a.data();
    let max_dim = dims.iter().copied().max().unwrap_or(1);
    draw_with(
        samples,
        seed,
        || (vec![0.0; dims.iter().sum::<usize>()], vec![0.0; data.len()], vec![0.0; data.len()]),
        |(gauss, cur, next), stream| {
            if decoupled {
                stream.fill_gaussian(gauss);
            } else {
                stream.fill_gaussian(&mut gauss[..max_dim]);
            }
            // contract the last axis first; X_1 occupies the front of `gauss`
            let mut len = data.len();
            cur[..len].copy_from_slice(data);
            let mut offset = gauss.len();
            for &n in dims.iter().rev() {
                let x = if decoupled {
                    offset -= n;
                    &gauss[offset..offset + n]
                } else {
                    &gauss[..n]
                };
                let out_len = len / n;
                for (j, o) in next[..out_len].iter_mut().enumerate() {
                    *o = cur[j * n..(j + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum();
                }
                std::mem::swap(cur, next);
                len = out_len;
            }
            cur[0]
        },
    )
}

fn moment_from_draws(draws: &[f64], p: f64, samples: usize, seed: u64, scale: f64) -> MomentEstimate {
    let (mean, se_mean) = mean_and_se(draws, |z| abs_pow(z, p));
    let root = if mean > 0.0 { mean.powf(1.0 / p) } else { 0.0 };
    let se = if mean > 0.0 { root * se_mean / (p * mean) } else { 0.0 };
    MomentEstimate {
        p,
        value: scale * root,
        std_error: scale * se,
        samples,
        seed,
    }
}

/// Monte Carlo estimate of `(E|Z|^p)^{1/p}`.
pub fn sample_chaos_moment(cfg: &ChaosSampleConfig) -> Result<MomentEstimate> {
    Ok(sample_chaos_moments(cfg, &[cfg.p])?.remove(0))
}

/// Moments of several orders from one shared set of draws (`cfg.p` is only
/// validated). Results for each `p` equal [`sample_chaos_moment`] bit for bit.
///
/// Draws are taken for `A / max|a|` and the estimate rescaled, so scaling
/// `A` by a power of two scales the result exactly.
pub fn sample_chaos_moments(cfg: &ChaosSampleConfig, ps: &[f64]) -> Result<Vec<MomentEstimate>> {
    cfg.validate()?;
    for &p in ps {
        check_p(p)?;
    }
    let tensor = if !cfg.decoupled && cfg.no_diagonal {
        cfg.tensor.without_diagonal()
    } else {
        cfg.tensor.clone()
    };
    let scale = tensor.max_abs();
    if scale == 0.0 {
        return Ok(ps
            .iter()
            .map(|&p| MomentEstimate { p, value: 0.0, std_error: 0.0, samples: cfg.samples, seed: cfg.seed })
            .collect());
    }
    let normalized = tensor.scaled(1.0 / scale);
    let draws = chaos_draws(&normalized, cfg.decoupled, cfg.samples, cfg.seed);
    Ok(ps
        .iter()
        .map(|&p| moment_from_draws(&draws, p, cfg.samples, cfg.seed, scale))
        .collect())
}

/// `(E Z²)^{1/2}` for the decoupled chaos, which is exactly `‖A‖_HS`.
pub fn second_moment_exact(a: &DenseTensor) -> f64 {
    hs_norm(a)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundTerm {
    pub partition: String,
    pub cardinality: usize,
    pub norm: f64,
    /// `p^{card P / 2} ‖A‖_P`.
    pub term: f64,
    pub converged: bool,
}

/// `Σ_P p^{card P / 2} ‖A‖_P` term by term, with an optional empirical moment.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub p: f64,
    pub per_partition: Vec<BoundTerm>,
    pub total: f64,
    pub empirical: Option<MomentEstimate>,
    /// `empirical / total` when both are available and `total > 0`.
    pub ratio: Option<f64>,
}

impl BoundReport {
    /// Builds the report from precomputed partition norms (norms do not depend on `p`).
    pub fn from_norms(norms: &[PartitionNormResult], p: f64) -> Result<Self> {
        check_p(p)?;
        let per_partition: Vec<BoundTerm> = norms
            .iter()
            .map(|r| BoundTerm {
                partition: r.partition.to_string(),
                cardinality: r.partition.cardinality(),
                norm: r.value,
                term: p.powf(r.partition.cardinality() as f64 / 2.0) * r.value,
                converged: r.converged,
            })
            .collect();
        let total = per_partition.iter().map(|t| t.term).sum();
        Ok(Self {
            p,
            per_partition,
            total,
            empirical: None,
            ratio: None,
        })
    }

    pub fn with_empirical(mut self, estimate: MomentEstimate) -> Self {
        self.ratio = (self.total > 0.0).then(|| estimate.value / self.total);
        self.empirical = Some(estimate);
        self
    }
}

/// The moment bound summed over all partitions of `[d]` with unit constant.
pub fn partition_moment_bound(a: &DenseTensor, p: f64, opts: &NormOptions) -> Result<BoundReport> {
    check_p(p)?;
    let norms = all_partition_norms(a, opts)?;
    BoundReport::from_norms(&norms, p)
}

/// `√p ‖A‖_HS + p ‖A‖_op` for an order-2 tensor.
pub fn hanson_wright_bound(a: &DenseTensor, p: f64) -> Result<f64> {
    if a.order() != 2 {
        return shape_err(format!("order-2 tensor required, got order {}", a.order()));
    }
    check_p(p)?;
    Ok(p.sqrt() * hs_norm(a) + p * operator_norm_2d(a)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecouplingReport {
    pub coupled: MomentEstimate,
    pub decoupled: MomentEstimate,
    pub ratio: f64,
    /// Combined relative error propagated from both estimates.
    pub std_error: f64,
    /// Set when the coupled chaos keeps nonzero entries with repeated indices.
    pub diagonal_warning: bool,
}

/// Coupled over decoupled moment, both drawn with the same seed.
pub fn decoupling_ratio(a: &DenseTensor, p: f64, samples: usize, seed: u64, no_diagonal: bool) -> Result<DecouplingReport> {
    let mut coupled_cfg = ChaosSampleConfig::coupled(a.clone(), p, samples, seed);
    coupled_cfg.no_diagonal = no_diagonal;
    let coupled = sample_chaos_moment(&coupled_cfg)?;
    let decoupled = sample_chaos_moment(&ChaosSampleConfig::decoupled(a.clone(), p, samples, seed))?;
    let (ratio, std_error) = if decoupled.value > 0.0 && coupled.value > 0.0 {
        let r = coupled.value / decoupled.value;
        let rel = ((coupled.std_error / coupled.value).powi(2) + (decoupled.std_error / decoupled.value).powi(2)).sqrt();
        (r, r * rel)
    } else {
        (0.0, 0.0)
    };
    Ok(DecouplingReport {
        coupled,
        decoupled,
        ratio,
        std_error,
        diagonal_warning: !no_diagonal && a.has_diagonal_mass(),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConcentrationReport {
    pub p: f64,
    /// `E f(X)`.
    pub m: f64,
    /// `(E|f(X) - m|^p)^{1/p}`.
    pub lhs: f64,
    /// `√p ‖A‖_{{1}..{d}}`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Concentration of `f(x) = ‖⟨A, x⟩‖_{{1}..{k}}` around its mean, `x` the
/// Gaussian vector on the last factor and `k = d - 1`.
pub fn concentration_probe(a: &DenseTensor, p: f64, samples: usize, seed: u64, opts: &NormOptions) -> Result<ConcentrationReport> {
    check_p(p)?;
    if a.order() < 2 {
        return shape_err("concentration probe needs order >= 2");
    }
    if samples == 0 {
        return arg_err("samples must be positive");
    }
    let lip = partition_norm(a, &Partition::singletons(a.order())?, opts)?.value;
    if a.is_zero() {
        return Ok(ConcentrationReport { p, m: 0.0, lhs: 0.0, rhs: 0.0, ratio: 0.0 });
    }
    let d = a.order();
    let last = a.dims()[d - 1];
    let inner_dims: Vec<usize> = a.dims()[..d - 1].to_vec();
    let inner_len: usize = inner_dims.iter().product();
    let singletons = Partition::singletons(d - 1)?;
    let inner_opts = NormOptions { restarts: 2, ..*opts };
    let data = a.data();
    let values = draw(samples, seed, |stream| {
        let x = stream.gaussian_vec(last);
        let image: Vec<f64> = (0..inner_len)
            .map(|j| data[j * last..(j + 1) * last].iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        match inner_dims.len() {
            1 => euclidean_norm(&image),
            2 => {
                let m = DenseTensor::new(inner_dims.clone(), image).expect("dims match");
                operator_norm_2d(&m).expect("order 2")
            }
            _ => {
                let m = DenseTensor::new(inner_dims.clone(), image).expect("dims match");
                partition_norm(&m, &singletons, &inner_opts).expect("valid partition").value
            }
        }
    });
    let n = values.len() as f64;
    let m = chunked_sum(&values, |v| v) / n;
    let lhs = (chunked_sum(&values, |v| abs_pow(v - m, p)) / n).powf(1.0 / p);
    let rhs = p.sqrt() * lip;
    Ok(ConcentrationReport {
        p,
        m,
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SmallBallReport {
    /// Monte Carlo estimate of `E Σ_{∅≠I⊆[k]} 4^{|I|} ‖X_I ⊗ x_{[k]∖I}‖`.
    pub radius: f64,
    /// `P(‖X_{[k]} - x_{[k]}‖ ≤ radius)`.
    pub lhs_prob: f64,
    pub std_error: f64,
    /// `2^{-k} exp(-Σ|x_i|²/2)`.
    pub rhs_bound: f64,
    pub pass: bool,
}

/// Largest `k` and per-factor dimension accepted by [`small_ball_probe`].
pub const SMALL_BALL_MAX_K: usize = 3;
pub const SMALL_BALL_MAX_DIM: usize = 3;

/// Shifted small-ball probability for the semi-norm `‖y‖ = ‖⟨A, y⟩‖` (or the
/// Euclidean norm of `y` when `tensor` is `None`) on `F_1 ⊗ .. ⊗ F_k`.
pub fn small_ball_probe(
    x: &[Vec<f64>],
    tensor: Option<&DenseTensor>,
    samples: usize,
    inner_samples: usize,
    seed: u64,
) -> Result<SmallBallReport> {
    let k = x.len();
    if k == 0 || k > SMALL_BALL_MAX_K {
        return arg_err(format!("small-ball probe needs 1..={SMALL_BALL_MAX_K} factors, got {k}"));
    }
    if x.iter().any(|v| v.is_empty() || v.len() > SMALL_BALL_MAX_DIM) {
        return arg_err(format!("factor dimensions must be in 1..={SMALL_BALL_MAX_DIM}"));
    }
    if samples == 0 || inner_samples == 0 {
        return arg_err("samples must be positive");
    }
    let dims: Vec<usize> = x.iter().map(Vec::len).collect();
    if let Some(a) = tensor {
        if a.order() != k + 1 || a.dims()[..k] != dims[..] {
            return shape_err(format!(
                "semi-norm tensor must have dims {:?} followed by one output axis, got {:?}",
                dims,
                a.dims()
            ));
        }
    }
    let seminorm = |y: &[f64]| -> f64 {
        match tensor {
            None => euclidean_norm(y),
            Some(a) => {
                let out = a.dims()[k];
                let mut acc = vec![0.0; out];
                for (j, &yj) in y.iter().enumerate() {
                    for (o, &v) in acc.iter_mut().zip(&a.data()[j * out..(j + 1) * out]) {
                        *o += yj * v;
                    }
                }
                euclidean_norm(&acc)
            }
        }
    };
    let outer = |factors: &[&[f64]]| -> Vec<f64> {
        let mut acc = vec![1.0];
        for f in factors {
            acc = acc.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
        }
        acc
    };

    let radius_draws = draw(inner_samples, mix_seed(seed, 1), |stream| {
        let gs: Vec<Vec<f64>> = dims.iter().map(|&n| stream.gaussian_vec(n)).collect();
        let mut total = 0.0;
        for mask in 1u32..(1 << k) {
            let factors: Vec<&[f64]> = (0..k)
                .map(|i| if mask & (1 << i) != 0 { gs[i].as_slice() } else { x[i].as_slice() })
                .collect();
            total += 4f64.powi(mask.count_ones() as i32) * seminorm(&outer(&factors));
        }
        total
    });
    let radius = chunked_sum(&radius_draws, |v| v) / inner_samples as f64;

    let shift = outer(&x.iter().map(Vec::as_slice).collect::<Vec<_>>());
    let hits = draw(samples, mix_seed(seed, 2), |stream| {
        let gs: Vec<Vec<f64>> = dims.iter().map(|&n| stream.gaussian_vec(n)).collect();
        let g = outer(&gs.iter().map(Vec::as_slice).collect::<Vec<_>>());
        let diff: Vec<f64> = g.iter().zip(&shift).map(|(a, b)| a - b).collect();
        if seminorm(&diff) <= radius { 1.0 } else { 0.0 }
    });
    let lhs_prob = chunked_sum(&hits, |v| v) / samples as f64;
    let std_error = (lhs_prob * (1.0 - lhs_prob) / samples as f64).sqrt();
    let sq: f64 = x.iter().flatten().map(|v| v * v).sum();
    let rhs_bound = 0.5f64.powi(k as i32) * (-0.5 * sq).exp();
    Ok(SmallBallReport {
        radius,
        lhs_prob,
        std_error,
        rhs_bound,
        pass: lhs_prob + 3.0 * std_error >= rhs_bound,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TranslateReport {
    /// `γ_n(x + K)`.
    pub lhs: f64,
    pub lhs_se: f64,
    /// `γ_n(K) e^{-|x|²/2}`.
    pub rhs: f64,
    pub rhs_se: f64,
    pub pass: bool,
}

/// Gaussian measure of a translated centered ball `K = {|y| ≤ radius}` in
/// `R^n`, `n = x.len()`, against the translate lower bound. Both sides use
/// the same draws.
pub fn translate_probe(radius: f64, x: &[f64], samples: usize, seed: u64) -> Result<TranslateReport> {
    if !(radius > 0.0) || !radius.is_finite() {
        return arg_err("radius must be positive");
    }
    if x.is_empty() {
        return arg_err("translation vector must be non-empty");
    }
    if samples == 0 {
        return arg_err("samples must be positive");
    }
    let n = x.len();
    let r2 = radius * radius;
    // encode both indicators in one draw: bit 0 = in x + K, bit 1 = in K
    let codes = draw(samples, seed, |stream| {
        let g = stream.gaussian_vec(n);
        let shifted: f64 = g.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        let centered: f64 = g.iter().map(|a| a * a).sum();
        (u8::from(shifted <= r2) + 2 * u8::from(centered <= r2)) as f64
    });
    let n_f = samples as f64;
    let in_shift = chunked_sum(&codes, |c| (c as u8 & 1) as f64) / n_f;
    let in_ball = chunked_sum(&codes, |c| ((c as u8 >> 1) & 1) as f64) / n_f;
    let weight = (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp();
    let lhs_se = (in_shift * (1.0 - in_shift) / n_f).sqrt();
    let ball_se = (in_ball * (1.0 - in_ball) / n_f).sqrt();
    let rhs = in_ball * weight;
    let rel = if in_ball > 0.0 { ball_se / in_ball } else { 0.0 };
    Ok(TranslateReport {
        lhs: in_shift,
        lhs_se,
        rhs,
        rhs_se: ball_se * weight,
        pass: in_shift + 3.0 * lhs_se >= rhs * (1.0 - 3.0 * rel),
    })
}

/// Random tensor with i.i.d. standard Gaussian entries.
pub fn gaussian_tensor(dims: Vec<usize>, seed: u64) -> Result<DenseTensor> {
    let len = dims.iter().product();
    let mut stream = SampleStream::new(seed, 0);
    DenseTensor::new(dims, stream.gaussian_vec(len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e1e2() -> DenseTensor {
        DenseTensor::new(vec![2, 2], vec![0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    fn identity2() -> DenseTensor {
        DenseTensor::new(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn product_of_two_gaussians() {
        let cfg = ChaosSampleConfig::decoupled(e1e2(), 2.0, 100_000, 3);
        let est = sample_chaos_moments(&cfg, &[2.0, 4.0]).unwrap();
        assert!((est[0].value - 1.0).abs() <= 3.0 * est[0].std_error, "{:?}", est[0]);
        assert!((est[1].value - 3f64.sqrt()).abs() <= 3.0 * est[1].std_error, "{:?}", est[1]);
    }

    #[test]
    fn zero_tensor_has_zero_moments() {
        let cfg = ChaosSampleConfig::decoupled(DenseTensor::zeros(vec![2, 3]).unwrap(), 3.0, 10, 1);
        let est = sample_chaos_moment(&cfg).unwrap();
        assert_eq!((est.value, est.std_error), (0.0, 0.0));
    }

    #[test]
    fn config_errors() {
        let a = DenseTensor::zeros(vec![2, 3]).unwrap();
        assert!(sample_chaos_moment(&ChaosSampleConfig::coupled(a.clone(), 2.0, 10, 1)).is_err());
        assert!(sample_chaos_moment(&ChaosSampleConfig::decoupled(a.clone(), 0.5, 10, 1)).is_err());
        assert!(sample_chaos_moment(&ChaosSampleConfig::decoupled(a, 2.0, 0, 1)).is_err());
    }

    #[test]
    fn determinism_and_power_of_two_scaling() {
        let a = gaussian_tensor(vec![3, 2, 2], 5).unwrap();
        let cfg = ChaosSampleConfig::decoupled(a.clone(), 3.0, 20_000, 9);
        let base = sample_chaos_moment(&cfg).unwrap();
        assert_eq!(base, sample_chaos_moment(&cfg).unwrap());
        for c in [2.0, -0.25, 8.0] {
            let scaled = sample_chaos_moment(&ChaosSampleConfig { tensor: a.scaled(c), ..cfg.clone() }).unwrap();
            assert_eq!(scaled.value.to_bits(), (c.abs() * base.value).to_bits());
            assert_eq!(scaled.std_error.to_bits(), (c.abs() * base.std_error).to_bits());
        }
        let odd = sample_chaos_moment(&ChaosSampleConfig { tensor: a.scaled(-1.7), ..cfg.clone() }).unwrap();
        assert_relative_eq!(odd.value, 1.7 * base.value, max_relative = 1e-12);
    }

    #[test]
    fn moments_increase_with_p() {
        let a = gaussian_tensor(vec![2, 3, 2], 8).unwrap();
        let cfg = ChaosSampleConfig::decoupled(a, 1.0, 50_000, 1);
        let est = sample_chaos_moments(&cfg, &[1.0, 2.0, 4.0, 8.0]).unwrap();
        for w in est.windows(2) {
            assert!(w[0].value <= w[1].value);
        }
        let single = sample_chaos_moment(&ChaosSampleConfig { p: 4.0, ..cfg }).unwrap();
        assert_eq!(single, est[2]);
    }

    #[test]
    fn coupled_vector_case_equals_decoupled() {
        let a = DenseTensor::new(vec![3], vec![1.0, -2.0, 0.5]).unwrap();
        let r = decoupling_ratio(&a, 3.0, 20_000, 4, false).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(!r.diagonal_warning);
    }

    #[test]
    fn coupled_diagonal_flag() {
        let r = decoupling_ratio(&identity2(), 2.0, 20_000, 4, false).unwrap();
        assert!(r.diagonal_warning);
        // E(g1² + g2²)² = 8, so the coupled second moment is √8
        assert!((r.coupled.value - 8f64.sqrt()).abs() < 4.0 * r.coupled.std_error);
        let off = decoupling_ratio(&identity2(), 2.0, 1000, 4, true).unwrap();
        assert_eq!(off.coupled.value, 0.0);
        assert!(!off.diagonal_warning);
    }

    #[test]
    fn bound_values() {
        let opts = NormOptions::default();
        let v = DenseTensor::new(vec![3], vec![1.0, 2.0, 2.0]).unwrap();
        let r = partition_moment_bound(&v, 5.0, &opts).unwrap();
        assert_relative_eq!(r.total, 5f64.sqrt() * 3.0, max_relative = 1e-12);

        let r = partition_moment_bound(&identity2(), 4.0, &opts).unwrap();
        assert_relative_eq!(r.total, 2.0 * 2f64.sqrt() + 4.0, max_relative = 1e-12);
        assert_eq!(r.per_partition.len(), 2);

        let z = partition_moment_bound(&DenseTensor::zeros(vec![2, 2, 2]).unwrap(), 2.0, &opts).unwrap();
        assert_eq!(z.total, 0.0);
        assert!(partition_moment_bound(&identity2(), 0.9, &opts).is_err());
    }

    #[test]
    fn hanson_wright_values() {
        assert_relative_eq!(hanson_wright_bound(&identity2(), 1.0).unwrap(), 2f64.sqrt() + 1.0, max_relative = 1e-14);
        let diag = DenseTensor::new(vec![2, 2], vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(hanson_wright_bound(&diag, 4.0).unwrap(), 2.0 * 10f64.sqrt() + 12.0, max_relative = 1e-14);
        assert!(hanson_wright_bound(&DenseTensor::zeros(vec![2]).unwrap(), 2.0).is_err());
        for seed in 0..5 {
            let a = gaussian_tensor(vec![4, 3], seed).unwrap();
            for p in [1.0, 2.5, 16.0] {
                let hw = hanson_wright_bound(&a, p).unwrap();
                let lb = partition_moment_bound(&a, p, &NormOptions::default()).unwrap().total;
                assert!((hw - lb).abs() <= 1e-9 * hw);
            }
        }
    }

    #[test]
    fn concentration_half_normal() {
        let r = concentration_probe(&e1e2(), 2.0, 200_000, 2, &NormOptions::default()).unwrap();
        let m = (2.0 / std::f64::consts::PI).sqrt();
        assert!((r.m - m).abs() < 0.01);
        assert!((r.lhs - (1.0 - 2.0 / std::f64::consts::PI).sqrt()).abs() < 0.01, "{r:?}");
        assert_relative_eq!(r.rhs, 2f64.sqrt(), max_relative = 1e-12);
        assert!((r.ratio - 0.4263).abs() < 0.01);
        let z = concentration_probe(&DenseTensor::zeros(vec![2, 2]).unwrap(), 2.0, 10, 2, &NormOptions::default()).unwrap();
        assert_eq!((z.lhs, z.ratio), (0.0, 0.0));
    }

    #[test]
    fn small_ball_one_dimensional() {
        let r = small_ball_probe(&[vec![0.0]], None, 100_000, 100_000, 1).unwrap();
        assert!((r.radius - 4.0 * (2.0 / std::f64::consts::PI).sqrt()).abs() < 0.02);
        assert!((r.lhs_prob - 0.9986).abs() < 0.002, "{r:?}");
        assert_eq!(r.rhs_bound, 0.5);
        assert!(r.pass);

        let r = small_ball_probe(&[vec![1.0]], None, 50_000, 50_000, 1).unwrap();
        assert_relative_eq!(r.rhs_bound, 0.5 * (-0.5f64).exp(), max_relative = 1e-14);
        assert!(r.pass);

        let r = small_ball_probe(&[vec![0.0, 0.0], vec![0.0, 0.0]], None, 50_000, 50_000, 1).unwrap();
        assert_eq!(r.rhs_bound, 0.25);
        assert!(r.pass);
    }

    #[test]
    fn small_ball_errors() {
        assert!(small_ball_probe(&[], None, 10, 10, 1).is_err());
        assert!(small_ball_probe(&[vec![0.0; 4]], None, 10, 10, 1).is_err());
        let a = DenseTensor::zeros(vec![3, 2]).unwrap();
        assert!(small_ball_probe(&[vec![0.0; 2]], Some(&a), 10, 10, 1).is_err());
    }

    #[test]
    fn translate_cases() {
        let same = translate_probe(1.0, &[0.0, 0.0], 10_000, 3).unwrap();
        assert_eq!(same.lhs, same.rhs);
        assert!(same.pass);
        let r = translate_probe(1.0, &[1.0], 200_000, 3).unwrap();
        assert!((r.lhs - 0.4772).abs() < 3.0 * r.lhs_se + 1e-4, "{r:?}");
        assert!((r.rhs - 0.4140).abs() < 3.0 * r.rhs_se + 1e-4, "{r:?}");
        assert!(r.pass);
        assert!(translate_probe(0.0, &[1.0], 10, 3).is_err());
    }
}

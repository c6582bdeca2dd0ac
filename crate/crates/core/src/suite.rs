//! Reproducible verification suites with CSV and JSON reports.
//!
//! Trial `t` of a run seeded with `seed` draws everything from
//! `mix_seed(seed, t)`, so reports depend only on the configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::chaining::{dudley_integral, empirical_gaussian_sup, greedy_admissible_sequence};
use crate::chaos::{
    concentration_probe, gaussian_tensor, hanson_wright_bound, sample_chaos_moments, small_ball_probe, translate_probe,
    BoundReport, ChaosSampleConfig,
};
use crate::error::{arg_err, Error, Result};
use crate::mc::{mix_seed, SampleStream};
use crate::norms::{all_partition_norms, NormOptions};
use crate::tensor::io::{points_to_json, read_tensor, tensor_to_json};
use crate::tensor::{DenseTensor, TensorShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    HansonWright,
    PartitionBound,
    ChainingSandwich,
    Probes,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::HansonWright, Suite::PartitionBound, Suite::ChainingSandwich, Suite::Probes];

    pub fn name(self) -> &'static str {
        match self {
            Suite::HansonWright => "hanson-wright",
            Suite::PartitionBound => "latala-bound",
            Suite::ChainingSandwich => "chaining-sandwich",
            Suite::Probes => "probes",
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown suite '{s}' (expected hanson-wright, latala-bound, chaining-sandwich or probes)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Tensor order (latala-bound) or largest order (probes).
    pub order: usize,
    /// Dimension of every axis, or the ambient dimension for chaining-sandwich.
    pub dim: usize,
    /// Points per set (chaining-sandwich).
    pub points: usize,
    pub trials: usize,
    pub ps: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Fixed input tensor replacing the random ones (hanson-wright, latala-bound).
    pub tensor: Option<PathBuf>,
}

impl SuiteConfig {
    /// The standard parameters of each suite.
    pub fn defaults(suite: Suite, seed: u64) -> Self {
        let base = Self {
            suite,
            order: 2,
            dim: 5,
            points: 64,
            trials: 10,
            ps: vec![2.0, 4.0, 8.0],
            samples: 100_000,
            seed,
            out: None,
            tensor: None,
        };
        match suite {
            Suite::HansonWright => Self {
                trials: 20,
                ps: vec![2.0, 4.0, 8.0, 16.0],
                ..base
            },
            Suite::PartitionBound => Self { order: 3, dim: 3, ..base },
            Suite::ChainingSandwich => Self { dim: 8, ..base },
            Suite::Probes => Self { order: 3, dim: 3, ..base },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.samples == 0 || self.dim == 0 || self.points == 0 {
            return arg_err("trials, samples, dim and points must be positive");
        }
        if self.ps.is_empty() || self.ps.iter().any(|p| !(*p >= 1.0) || !p.is_finite()) {
            return arg_err("the p list must be non-empty with every p >= 1");
        }
        match self.suite {
            Suite::PartitionBound if !(1..=crate::tensor::MAX_ORDER).contains(&self.order) => {
                arg_err(format!("order must be in 1..={}", crate::tensor::MAX_ORDER))
            }
            Suite::Probes if self.order < 2 || self.dim > crate::chaos::SMALL_BALL_MAX_DIM => {
                arg_err(format!("probes need order >= 2 and dim <= {}", crate::chaos::SMALL_BALL_MAX_DIM))
            }
            _ => Ok(()),
        }
    }
}

/// One checked quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteRow {
    pub trial: usize,
    pub case: String,
    /// First 16 hex digits of the SHA-256 of the trial input.
    pub inputs_hash: String,
    pub p: Option<f64>,
    pub measured: f64,
    pub std_error: f64,
    pub reference: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub rows: Vec<SuiteRow>,
    pub passed: usize,
    pub pass_rate: f64,
    pub env: Environment,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.rows.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,case,inputs_hash,p,measured,std_error,reference,ratio,pass\n");
        for r in &self.rows {
            let p = r.p.map(|p| p.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.trial, r.case, r.inputs_hash, p, r.measured, r.std_error, r.reference, r.ratio, r.pass
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `<dir>/<suite>.csv` and `<dir>/<suite>.json`; returns both paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.config.suite));
        let json = dir.join(format!("{}.json", self.config.suite));
        std::fs::write(&csv, self.to_csv())?;
        std::fs::write(&json, self.to_json())?;
        Ok((csv, json))
    }
}

fn hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn ratio(measured: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        measured / reference
    } else {
        0.0
    }
}

/// Runs the suite, writes the reports when `cfg.out` is set and returns the report.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let fixed = cfg.tensor.as_ref().map(read_tensor).transpose()?;
    let per_trial: Vec<Vec<SuiteRow>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = mix_seed(cfg.seed, t as u64);
            match cfg.suite {
                Suite::HansonWright => hanson_wright_trial(cfg, t, seed, fixed.as_ref()),
                Suite::PartitionBound => partition_bound_trial(cfg, t, seed, fixed.as_ref()),
                Suite::ChainingSandwich => chaining_trial(cfg, t, seed),
                Suite::Probes => probes_trial(cfg, t, seed),
            }
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SuiteRow> = per_trial.into_iter().flatten().collect();
    let passed = rows.iter().filter(|r| r.pass).count();
    let report = SuiteReport {
        config: cfg.clone(),
        pass_rate: if rows.is_empty() { 1.0 } else { passed as f64 / rows.len() as f64 },
        passed,
        rows,
        env: Environment {
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
        },
    };
    if let Some(dir) = &cfg.out {
        report.write(dir)?;
    }
    Ok(report)
}

fn hanson_wright_trial(cfg: &SuiteConfig, t: usize, seed: u64, fixed: Option<&DenseTensor>) -> Result<Vec<SuiteRow>> {
    let a = match fixed {
        Some(a) => a.clone(),
        None => gaussian_tensor(vec![cfg.dim, cfg.dim], mix_seed(seed, 0))?,
    };
    let h = hash(&tensor_to_json(&a));
    let est = sample_chaos_moments(&ChaosSampleConfig::decoupled(a.clone(), 2.0, cfg.samples, mix_seed(seed, 1)), &cfg.ps)?;
    est.into_iter()
        .map(|e| {
            let b = hanson_wright_bound(&a, e.p)?;
            Ok(SuiteRow {
                trial: t,
                case: "hanson-wright".into(),
                inputs_hash: h.clone(),
                p: Some(e.p),
                measured: e.value,
                std_error: e.std_error,
                reference: b,
                ratio: ratio(e.value, b),
                pass: 0.05 * b <= e.value && e.value <= 3.0 * b,
            })
        })
        .collect()
}

fn partition_bound_trial(cfg: &SuiteConfig, t: usize, seed: u64, fixed: Option<&DenseTensor>) -> Result<Vec<SuiteRow>> {
    let a = match fixed {
        Some(a) => a.clone(),
        None => gaussian_tensor(vec![cfg.dim; cfg.order], mix_seed(seed, 0))?,
    };
    let d = a.order() as i32;
    let h = hash(&tensor_to_json(&a));
    let opts = NormOptions {
        seed: mix_seed(seed, 2),
        ..NormOptions::default()
    };
    let norms = all_partition_norms(&a, &opts)?;
    let est = sample_chaos_moments(&ChaosSampleConfig::decoupled(a.clone(), 2.0, cfg.samples, mix_seed(seed, 1)), &cfg.ps)?;
    est.into_iter()
        .map(|e| {
            let total = BoundReport::from_norms(&norms, e.p)?.total;
            Ok(SuiteRow {
                trial: t,
                case: "partition-bound".into(),
                inputs_hash: h.clone(),
                p: Some(e.p),
                measured: e.value,
                std_error: e.std_error,
                reference: total,
                ratio: ratio(e.value, total),
                pass: 10f64.powi(-2 * d) * total <= e.value && e.value <= 3f64.powi(d) * total,
            })
        })
        .collect()
}

/// `n` uniform points on the unit sphere of `R^dim`.
pub fn sphere_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..n).map(|i| SampleStream::new(seed, i as u64).unit_vector(dim)).collect()
}

fn chaining_trial(cfg: &SuiteConfig, t: usize, seed: u64) -> Result<Vec<SuiteRow>> {
    let points = sphere_points(cfg.points, cfg.dim, mix_seed(seed, 0));
    let h = hash(&points_to_json(&points));
    let sup = empirical_gaussian_sup(&points, cfg.samples, mix_seed(seed, 1))?;
    let gamma = greedy_admissible_sequence(&sup.metric).value;
    let dudley = dudley_integral(&sup.metric);
    let row = |case: &str, reference: f64, pass: bool| SuiteRow {
        trial: t,
        case: case.into(),
        inputs_hash: h.clone(),
        p: None,
        measured: sup.mean_sup,
        std_error: sup.std_error,
        reference,
        ratio: ratio(sup.mean_sup, reference),
        pass,
    };
    Ok(vec![
        row("gamma", gamma, gamma / 20.0 <= sup.mean_sup && sup.mean_sup <= 20.0 * gamma),
        row("dudley", dudley, dudley >= sup.mean_sup / 20.0),
    ])
}

fn probes_trial(cfg: &SuiteConfig, t: usize, seed: u64) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let mut stream = SampleStream::new(mix_seed(seed, 0), 0);

    // small ball: k in {1, 2}, dims <= dim, |x_i| <= 1.5
    let k = 1 + t % 2;
    let dims: Vec<usize> = (0..k).map(|_| 1 + (stream.uniform() * cfg.dim as f64) as usize).collect();
    let x: Vec<Vec<f64>> = dims
        .iter()
        .map(|&n| {
            let r = 1.5 * stream.uniform();
            stream.unit_vector(n).into_iter().map(|v| r * v).collect()
        })
        .collect();
    let seminorm = if t % 4 >= 2 {
        let mut tdims = dims.clone();
        tdims.push(2);
        Some(gaussian_tensor(tdims, mix_seed(seed, 3))?)
    } else {
        None
    };
    let sb = small_ball_probe(&x, seminorm.as_ref(), cfg.samples, cfg.samples, mix_seed(seed, 1))?;
    let sb_input = format!("{:?}{}", x, seminorm.as_ref().map(tensor_to_json).unwrap_or_default());
    rows.push(SuiteRow {
        trial: t,
        case: "small-ball".into(),
        inputs_hash: hash(&sb_input),
        p: None,
        measured: sb.lhs_prob,
        std_error: sb.std_error,
        reference: sb.rhs_bound,
        ratio: ratio(sb.lhs_prob, sb.rhs_bound),
        pass: sb.pass,
    });

    // translate: n = 2, radius in [0.5, 2], |x| <= 2
    let radius = 0.5 + 1.5 * stream.uniform();
    let len = 2.0 * stream.uniform();
    let shift: Vec<f64> = stream.unit_vector(2).into_iter().map(|v| len * v).collect();
    let tr = translate_probe(radius, &shift, cfg.samples, mix_seed(seed, 2))?;
    rows.push(SuiteRow {
        trial: t,
        case: "translate".into(),
        inputs_hash: hash(&format!("{radius:?}{shift:?}")),
        p: None,
        measured: tr.lhs,
        std_error: tr.lhs_se,
        reference: tr.rhs,
        ratio: ratio(tr.lhs, tr.rhs),
        pass: tr.pass,
    });

    // concentration: order alternating in 2..=order
    let d = 2 + t % (cfg.order - 1);
    let a = gaussian_tensor(vec![cfg.dim; d], mix_seed(seed, 4))?;
    let h = hash(&tensor_to_json(&a));
    let opts = NormOptions {
        seed: mix_seed(seed, 5),
        ..NormOptions::default()
    };
    for &p in &cfg.ps {
        let c = concentration_probe(&a, p, cfg.samples, mix_seed(seed, 6), &opts)?;
        rows.push(SuiteRow {
            trial: t,
            case: "concentration".into(),
            inputs_hash: h.clone(),
            p: Some(p),
            measured: c.lhs,
            std_error: 0.0,
            reference: c.rhs,
            ratio: c.ratio,
            pass: c.ratio <= 3.0,
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Gaussian,
    Rank1,
    Diagonal,
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Distribution::Gaussian),
            "rank1" => Ok(Distribution::Rank1),
            "diagonal" => Ok(Distribution::Diagonal),
            _ => arg_err(format!("unknown distribution '{s}' (expected gaussian, rank1 or diagonal)")),
        }
    }
}

/// Deterministic test tensors: i.i.d. standard normal entries, an outer
/// product of random unit vectors, or ones on the main diagonal.
pub fn generate_tensor(dims: Vec<usize>, distribution: Distribution, seed: u64) -> Result<DenseTensor> {
    let shape = TensorShape::new(dims.clone())?;
    match distribution {
        Distribution::Gaussian => gaussian_tensor(dims, seed),
        Distribution::Rank1 => {
            let mut stream = SampleStream::new(seed, 0);
            let factors: Vec<Vec<f64>> = dims.iter().map(|&n| stream.unit_vector(n)).collect();
            DenseTensor::outer(&factors)
        }
        Distribution::Diagonal => {
            if !shape.is_square() {
                return arg_err(format!("diagonal tensors need equal dims, got {dims:?}"));
            }
            DenseTensor::from_fn(dims, |idx| if idx.iter().all(|&i| i == idx[0]) { 1.0 } else { 0.0 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::hs_norm;

    #[test]
    fn generated_tensors() {
        let id = generate_tensor(vec![2, 2], Distribution::Diagonal, 0).unwrap();
        assert_eq!(id.data(), &[1.0, 0.0, 0.0, 1.0]);
        let r = generate_tensor(vec![2, 3], Distribution::Rank1, 4).unwrap();
        assert!((hs_norm(&r) - 1.0).abs() <= 1e-12);
        assert!(generate_tensor(vec![2, 3], Distribution::Diagonal, 0).is_err());
        let a = tensor_to_json(&generate_tensor(vec![3, 2, 2], Distribution::Gaussian, 9).unwrap());
        let b = tensor_to_json(&generate_tensor(vec![3, 2, 2], Distribution::Gaussian, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn zero_tensor_bound_suite_passes_trivially() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("zero.json");
        crate::tensor::io::write_tensor(&path, &DenseTensor::zeros(vec![2, 2, 2]).unwrap()).unwrap();
        let cfg = SuiteConfig {
            trials: 1,
            samples: 1000,
            tensor: Some(path),
            ..SuiteConfig::defaults(Suite::PartitionBound, 3)
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.all_passed());
        assert!(r.rows.iter().all(|row| row.measured == 0.0 && row.reference == 0.0));
    }

    #[test]
    fn small_runs_are_reproducible() {
        for suite in Suite::ALL {
            let cfg = SuiteConfig {
                trials: 3,
                samples: 2000,
                points: 16,
                ..SuiteConfig::defaults(suite, 7)
            };
            let a = run_suite(&cfg).unwrap();
            let b = run_suite(&cfg).unwrap();
            assert_eq!(a.to_csv(), b.to_csv());
            assert_eq!(a.to_json(), b.to_json());
            assert!(!a.rows.is_empty());
        }
    }
}

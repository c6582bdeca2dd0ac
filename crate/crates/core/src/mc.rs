//! Reproducible Monte Carlo plumbing.
//!
//! Every sample `i` of a run seeded with `seed` draws from its own ChaCha8
//! stream (`key = seed`, `stream = i`), so results do not depend on how samples
//! are scheduled across threads. Gaussian deviates come from the Box–Muller
//! transform applied to pairs of 53-bit uniforms. Sums are Neumaier-compensated
//! and reduced in fixed 4096-sample chunks in index order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per reduction chunk.
pub const CHUNK: usize = 4096;

/// SplitMix64 finalizer, used to derive independent seeds from `(seed, tag)`.
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-sample random stream: uniform and standard Gaussian deviates.
pub struct SampleStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl SampleStream {
    /// Stream `index` of the family keyed by `seed`.
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng, spare: None }
    }

    fn from_base(base: &ChaCha8Rng, index: u64) -> Self {
        let mut rng = base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        Self { rng, spare: None }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate (Box–Muller, both outputs used).
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn fill_gaussian(&mut self, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = self.gaussian());
    }

    pub fn gaussian_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    /// Uniform point on the unit sphere of `R^n`.
    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        loop {
            let v = self.gaussian_vec(n);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-300 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }
}

/// Evaluates `f` on samples `0..n`, each with its own stream, and returns the
/// values in index order. `init` builds per-chunk scratch state.
pub fn draw_with<S, I, F>(n: usize, seed: u64, init: I, f: F) -> Vec<f64>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut SampleStream) -> f64 + Sync,
{
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut scratch = init();
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi)
                .map(|i| {
                    let mut stream = SampleStream::from_base(&base, i as u64);
                    f(&mut scratch, &mut stream)
                })
                .collect()
        })
        .collect();
    parts.concat()
}

/// [`draw_with`] without scratch state.
pub fn draw<F>(n: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut SampleStream) -> f64 + Sync,
{
    draw_with(n, seed, || (), |_, s| f(s))
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of `f(v)` over `values`, reduced chunk by chunk in order.
pub fn chunked_sum(values: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut total = CompensatedSum::default();
    for chunk in values.chunks(CHUNK) {
        let mut part = CompensatedSum::default();
        chunk.iter().for_each(|&v| part.add(f(v)));
        total.add(part.value());
    }
    total.value()
}

/// Mean and standard error of the mean of `f(v)`.
pub fn mean_and_se(values: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = chunked_sum(values, &f) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = chunked_sum(values, |v| {
        let d = f(v) - mean;
        d * d
    }) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `|v|^p`, exact repeated multiplication for small integer `p`.
#[inline]
pub fn abs_pow(v: f64, p: f64) -> f64 {
    let a = v.abs();
    if p.fract() == 0.0 && (1.0..=64.0).contains(&p) {
        a.powi(p as i32)
    } else {
        a.powf(p)
    }
}

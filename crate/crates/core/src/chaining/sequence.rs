//! Partition sequences of a finite point set and the chaining value
//! `max_t Σ_n δ(A_n(t)) 2^{n/2}`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::MetricMatrix;
use crate::error::{arg_err, Result};

/// A sequence of partitions `(𝒜_n)` of `{0, .., size-1}`.
///
/// Cells are sorted ascending and ordered by their first element. Only the
/// stored levels enter the chaining value; a sequence whose last level has
/// zero-diameter cells (e.g. singletons) loses nothing by the truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionSequence {
    size: usize,
    levels: Vec<Vec<Vec<usize>>>,
}

impl PartitionSequence {
    pub fn new(size: usize, levels: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if size == 0 {
            return arg_err("empty point set");
        }
        if levels.is_empty() {
            return arg_err("a sequence needs at least one level");
        }
        let mut canonical = Vec::with_capacity(levels.len());
        for (n, level) in levels.into_iter().enumerate() {
            let mut seen = vec![false; size];
            for cell in &level {
                if cell.is_empty() {
                    return arg_err(format!("level {n} has an empty cell"));
                }
                for &t in cell {
                    if t >= size || seen[t] {
                        return arg_err(format!("level {n} is not a partition of 0..{size}"));
                    }
                    seen[t] = true;
                }
            }
            if seen.iter().any(|s| !s) {
                return arg_err(format!("level {n} does not cover every point"));
            }
            canonical.push(canonicalize(level));
        }
        Ok(Self { size, levels: canonical })
    }

    /// The one-level sequence `{T}`.
    pub fn trivial(size: usize) -> Result<Self> {
        Self::new(size, vec![vec![(0..size).collect()]])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn levels(&self) -> &[Vec<Vec<usize>>] {
        &self.levels
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Level `n`, repeating the last stored level beyond the end.
    pub fn level(&self, n: usize) -> &[Vec<usize>] {
        &self.levels[n.min(self.levels.len() - 1)]
    }

    pub fn cardinality(&self, n: usize) -> usize {
        self.level(n).len()
    }

    /// True when every stored level refines the previous one.
    pub fn is_nested(&self) -> bool {
        self.levels.windows(2).all(|w| {
            let owner = cell_labels(self.size, &w[0]);
            w[1].iter().all(|cell| cell.iter().all(|&t| owner[t] == owner[cell[0]]))
        })
    }

    /// `card 𝒜_n ≤ 2^{exponent(n)}` for every stored level.
    pub fn satisfies_cardinality(&self, exponent: impl Fn(usize) -> f64) -> bool {
        self.levels
            .iter()
            .enumerate()
            .all(|(n, level)| (level.len() as f64).log2() <= exponent(n) + 1e-12)
    }

    /// `𝒜_0 = {T}` and `card 𝒜_n ≤ 2^{2^n}`.
    pub fn is_admissible(&self) -> bool {
        self.levels[0].len() == 1 && self.satisfies_cardinality(|n| 2f64.powi(n as i32))
    }

    /// First level made of singletons, if any.
    pub fn first_singleton_level(&self) -> Option<usize> {
        self.levels.iter().position(|l| l.len() == self.size)
    }

    /// `max_t Σ_n δ_D(A_n(t)) 2^{n/2}` over the stored levels.
    pub fn chaining_value(&self, metric: &MetricMatrix) -> Result<f64> {
        if metric.size() != self.size {
            return arg_err(format!(
                "metric has {} points, sequence has {}",
                metric.size(),
                self.size
            ));
        }
        let mut per_point = vec![0.0; self.size];
        for (n, level) in self.levels.iter().enumerate() {
            let weight = 2f64.powf(n as f64 / 2.0);
            for cell in level {
                let term = metric.diameter_of(cell) * weight;
                if term > 0.0 {
                    cell.iter().for_each(|&t| per_point[t] += term);
                }
            }
        }
        Ok(per_point.into_iter().fold(0.0, f64::max))
    }
}

fn canonicalize(mut level: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    level.iter_mut().for_each(|c| c.sort_unstable());
    level.sort_unstable_by_key(|c| c[0]);
    level
}

fn cell_labels(size: usize, level: &[Vec<usize>]) -> Vec<usize> {
    let mut owner = vec![0; size];
    for (c, cell) in level.iter().enumerate() {
        cell.iter().for_each(|&t| owner[t] = c);
    }
    owner
}

/// A sequence satisfying the cardinality condition, with its chaining value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibleSequence {
    pub sequence: PartitionSequence,
    /// Last stored level; the first all-singleton level when there is one.
    pub n_max: usize,
    pub value: f64,
}

impl AdmissibleSequence {
    fn from_sequence(sequence: PartitionSequence, metric: &MetricMatrix) -> Result<Self> {
        let value = sequence.chaining_value(metric)?;
        let n_max = sequence.num_levels() - 1;
        Ok(Self { sequence, n_max, value })
    }
}

/// `2^{2^n}`, saturating.
fn level_budget(n: usize) -> usize {
    if n >= 6 {
        usize::MAX
    } else {
        1usize.checked_shl(1u32 << n).unwrap_or(usize::MAX)
    }
}

/// Builds nested levels by repeatedly splitting the widest cell.
///
/// Level `n+1` starts from the cells of level `n`; while fewer than
/// `2^{2^{n+1}}` cells exist, the cell of largest diameter (lowest first
/// point on ties) is split around its two mutually farthest points, each
/// member joining the nearer seed (the first seed on ties). Construction stops
/// at the first all-singleton level.
pub fn greedy_admissible_sequence(metric: &MetricMatrix) -> AdmissibleSequence {
    let size = metric.size();
    let mut levels: Vec<Vec<Vec<usize>>> = vec![vec![(0..size).collect()]];
    while levels.last().expect("non-empty").len() < size {
        let budget = level_budget(levels.len());
        let mut cells: Vec<(Vec<usize>, f64)> = levels
            .last()
            .expect("non-empty")
            .iter()
            .map(|c| (c.clone(), metric.diameter_of(c)))
            .collect();
        while cells.len() < budget {
            let widest = cells
                .iter()
                .enumerate()
                .filter(|(_, (c, _))| c.len() > 1)
                .max_by(|(_, (ca, da)), (_, (cb, db))| da.total_cmp(db).then(cb[0].cmp(&ca[0])))
                .map(|(i, _)| i);
            let Some(i) = widest else { break };
            let (cell, _) = cells.swap_remove(i);
            let (left, right) = split_farthest(metric, &cell);
            let dl = metric.diameter_of(&left);
            let dr = metric.diameter_of(&right);
            cells.push((left, dl));
            cells.push((right, dr));
        }
        levels.push(canonicalize(cells.into_iter().map(|(c, _)| c).collect()));
    }
    let sequence = PartitionSequence { size, levels };
    AdmissibleSequence::from_sequence(sequence, metric).expect("sizes match")
}

fn split_farthest(metric: &MetricMatrix, cell: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (mut s1, mut s2, mut best) = (cell[0], cell[1], f64::NEG_INFINITY);
    for (a, &i) in cell.iter().enumerate() {
        for &j in &cell[a + 1..] {
            if metric.get(i, j) > best {
                best = metric.get(i, j);
                (s1, s2) = (i, j);
            }
        }
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &t in cell {
        if t == s2 || (t != s1 && metric.get(t, s2) < metric.get(t, s1)) {
            right.push(t);
        } else {
            left.push(t);
        }
    }
    (left, right)
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeReport {
    /// Levelwise common refinement of the inputs.
    pub sequence: PartitionSequence,
    /// Chaining value of the merged sequence for the summed distance.
    pub gamma_bound: f64,
    /// Chaining value of each input for its own distance.
    pub values: Vec<f64>,
    /// `card 𝒜_n ≤ 2^{N 2^n}` at every level.
    pub cardinality_ok: bool,
    /// `gamma_bound ≤ 2 Σ values`.
    pub delta_ok: bool,
}

/// Common refinement `𝒜_n = {A^1 ∩ .. ∩ A^N}` of admissible sequences, with
/// the chaining value for `D = Σ D_i`.
pub fn merge_sequences(seqs: &[PartitionSequence], dists: &[MetricMatrix]) -> Result<MergeReport> {
    if seqs.is_empty() || seqs.len() != dists.len() {
        return arg_err("need one distance per sequence and at least one sequence");
    }
    let size = seqs[0].size();
    if seqs.iter().any(|s| s.size() != size) || dists.iter().any(|d| d.size() != size) {
        return arg_err("sequences and distances must share the point set");
    }
    if let Some(i) = seqs.iter().position(|s| !s.is_admissible()) {
        return arg_err(format!("sequence {i} violates the cardinality condition"));
    }
    let n_levels = seqs.iter().map(PartitionSequence::num_levels).max().expect("non-empty");
    let mut levels = Vec::with_capacity(n_levels);
    for n in 0..n_levels {
        let labels: Vec<Vec<usize>> = seqs.iter().map(|s| cell_labels(size, s.level(n))).collect();
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for t in 0..size {
            groups.entry(labels.iter().map(|l| l[t]).collect()).or_default().push(t);
        }
        levels.push(canonicalize(groups.into_values().collect()));
    }
    let sequence = PartitionSequence { size, levels };
    let n_seqs = seqs.len() as f64;
    let cardinality_ok = sequence.satisfies_cardinality(|n| n_seqs * 2f64.powi(n as i32));
    let total = MetricMatrix::sum(dists)?;
    let gamma_bound = sequence.chaining_value(&total)?;
    let values = seqs
        .iter()
        .zip(dists)
        .map(|(s, d)| s.chaining_value(d))
        .collect::<Result<Vec<_>>>()?;
    let sum: f64 = values.iter().sum();
    Ok(MergeReport {
        sequence,
        gamma_bound,
        delta_ok: gamma_bound <= 2.0 * sum * (1.0 + 1e-12) + 1e-12,
        values,
        cardinality_ok,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReindexReport {
    pub sequence: AdmissibleSequence,
    /// Smallest integers with `a ≤ 2^p`, `b ≤ 2^q`.
    pub p: u32,
    pub q: u32,
    pub input_value: f64,
    /// `(2^{(p+q+1)/2} - 1)/(√2 - 1) · diam + 2^{(q+1)/2} · input_value`.
    pub value_bound: f64,
    pub bound_ok: bool,
}

fn smallest_power_exponent(x: f64) -> u32 {
    let mut p = 0;
    while 2f64.powi(p as i32) < x {
        p += 1;
    }
    p
}

/// Turns a sequence with `card 𝒜_n ≤ 2^{a + b 2^n}` into an admissible one:
/// `ℬ_n = {T}` for `n ≤ p+q`, then `ℬ_n = 𝒜_{n-q-1}` for the stored levels
/// from `𝒜_p` on.
pub fn reindex_sequence(seq: &PartitionSequence, metric: &MetricMatrix, a: f64, b: f64) -> Result<ReindexReport> {
    if !(a >= 1.0 && b >= 1.0) || !a.is_finite() || !b.is_finite() {
        return arg_err("reindexing needs finite a, b >= 1");
    }
    if metric.size() != seq.size() {
        return arg_err("metric and sequence have different sizes");
    }
    if !seq.satisfies_cardinality(|n| a + b * 2f64.powi(n as i32)) {
        return arg_err(format!("input violates card A_n <= 2^(a + b 2^n) for a = {a}, b = {b}"));
    }
    let p = smallest_power_exponent(a);
    let q = smallest_power_exponent(b);
    let head = (p + q + 1) as usize;
    let mut levels: Vec<Vec<Vec<usize>>> = vec![vec![(0..seq.size()).collect()]; head];
    levels.extend(seq.levels().iter().skip(p as usize).cloned());
    let out = PartitionSequence { size: seq.size(), levels };
    let input_value = seq.chaining_value(metric)?;
    let sequence = AdmissibleSequence::from_sequence(out, metric)?;
    let sqrt2 = 2f64.sqrt();
    let value_bound = (2f64.powf(head as f64 / 2.0) - 1.0) / (sqrt2 - 1.0) * metric.diameter()
        + 2f64.powf((q + 1) as f64 / 2.0) * input_value;
    Ok(ReindexReport {
        bound_ok: sequence.sequence.is_admissible() && sequence.value <= value_bound * (1.0 + 1e-12) + 1e-12,
        sequence,
        p,
        q,
        input_value,
        value_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaining::tests::{line, uniform};
    use approx::assert_relative_eq;

    #[test]
    fn greedy_examples() {
        let single = greedy_admissible_sequence(&line(&[1.0]));
        assert_eq!(single.value, 0.0);
        assert_eq!(single.n_max, 0);

        let delta = 0.37;
        let two = greedy_admissible_sequence(&line(&[0.0, delta]));
        assert_eq!(two.value, delta);
        assert_eq!(two.n_max, 1);

        let sixteen = greedy_admissible_sequence(&uniform(16));
        assert!((sixteen.value - (1.0 + 2f64.sqrt())).abs() <= 1e-12);
        assert_eq!(sixteen.sequence.cardinality(1), 4);
        assert_eq!(sixteen.sequence.cardinality(2), 16);
    }

    #[test]
    fn greedy_output_is_admissible_nested_and_above_diameter() {
        for n in [3usize, 17, 40, 90] {
            let pts: Vec<f64> = (0..n).map(|i| ((i * 37 % 101) as f64).sqrt()).collect();
            let m = line(&pts);
            let g = greedy_admissible_sequence(&m);
            assert!(g.sequence.is_admissible());
            assert!(g.sequence.is_nested());
            assert_eq!(g.sequence.first_singleton_level(), Some(g.n_max));
            assert!(g.value >= m.diameter() - 1e-12);
        }
    }

    #[test]
    fn greedy_handles_duplicate_points() {
        let m = line(&[0.0, 0.0, 0.0, 1.0, 1.0]);
        let g = greedy_admissible_sequence(&m);
        assert!(g.sequence.is_admissible());
        assert_eq!(g.sequence.first_singleton_level(), Some(g.n_max));
    }

    #[test]
    fn sequence_validation() {
        assert!(PartitionSequence::new(3, vec![vec![vec![0, 1]]]).is_err());
        assert!(PartitionSequence::new(2, vec![vec![vec![0, 1], vec![1]]]).is_err());
        assert!(PartitionSequence::new(2, vec![]).is_err());
        let s = PartitionSequence::new(3, vec![vec![vec![2, 0, 1]], vec![vec![2], vec![1, 0]]]).unwrap();
        assert_eq!(s.level(1), &[vec![0, 1], vec![2]]);
        assert_eq!(s.level(5), s.level(1));
    }

    #[test]
    fn merge_examples() {
        let m = line(&[0.0, 1.0]);
        let s = greedy_admissible_sequence(&m).sequence;
        let self_merge = merge_sequences(&[s.clone(), s.clone()], &[m.clone(), m.clone()]).unwrap();
        assert_eq!(self_merge.sequence, s);
        assert!(self_merge.cardinality_ok && self_merge.delta_ok);
        assert_eq!(self_merge.sequence.cardinality(1), 2);
        assert_relative_eq!(self_merge.gamma_bound, 2.0);

        let one = line(&[0.0]);
        let t = PartitionSequence::trivial(1).unwrap();
        let r = merge_sequences(&[t.clone(), t], &[one.clone(), one]).unwrap();
        assert_eq!(r.gamma_bound, 0.0);
        assert!(merge_sequences(&[s], &[line(&[0.0, 1.0, 2.0])]).is_err());
    }

    #[test]
    fn reindex_examples() {
        let m = line(&[0.0, 1.0, 3.0]);
        let s = greedy_admissible_sequence(&m).sequence;
        let r = reindex_sequence(&s, &m, 1.0, 1.0).unwrap();
        assert_eq!((r.p, r.q), (0, 0));
        assert_eq!(r.sequence.sequence.level(1), s.level(0));
        assert_eq!(r.sequence.sequence.level(2), s.level(1));
        assert_relative_eq!(r.value_bound, m.diameter() + 2f64.sqrt() * r.input_value, max_relative = 1e-14);
        assert!(r.bound_ok);

        let r = reindex_sequence(&s, &m, 2.0, 2.0).unwrap();
        assert_eq!((r.p, r.q), (1, 1));
        let coef = (2f64.powf(1.5) - 1.0) / (2f64.sqrt() - 1.0);
        assert_relative_eq!(r.value_bound, coef * 3.0 + 2.0 * r.input_value, max_relative = 1e-14);
        assert_eq!(r.sequence.sequence.level(3), s.level(1));
        assert!(r.bound_ok);

        let single = reindex_sequence(&PartitionSequence::trivial(1).unwrap(), &line(&[0.0]), 1.0, 1.0).unwrap();
        assert_eq!(single.sequence.value, 0.0);
        assert!(reindex_sequence(&s, &m, 0.5, 1.0).is_err());
    }

    #[test]
    fn reindex_rejects_violated_input() {
        let m = line(&(0..8).map(f64::from).collect::<Vec<_>>());
        let bad = PartitionSequence::new(8, vec![(0..8).map(|i| vec![i]).collect()]).unwrap();
        // card 8 > 2^(1 + 1)
        assert!(reindex_sequence(&bad, &m, 1.0, 1.0).is_err());
        assert!(reindex_sequence(&bad, &m, 2.0, 1.0).is_ok());
    }
}

//! Biologically-informed, distribution-controlled negative sampling: pool
//! construction with relatedness exclusion, similarity filtering, six
//! distribution-matching samplers, Jensen-Shannon validation, external pool
//! expansion, and the peptide-protein shuffle generator.
//!
//! Scalar matching runs in a 3-dimensional property space (length, net
//! charge, hydrophobicity), z-scored over the union of positives and pool;
//! constant features are dropped with a warning. Validation compares 30-bin
//! histograms on a shared range for the scalars and class-mean composition
//! vectors for 1-mers and 2-mers, against JS thresholds 0.2 / 0.2 / 0.2 /
//! 0.05 / 0.15 (base-2).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cleanse::{self, align_pair, pair_links, AlignmentParams};
use crate::notation::{self, BilnDocument, MonomerLibrary};
use crate::seqcore::{self, PeptideSequence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NegSampError {
    #[error("overlap ratio of an empty set is undefined")]
    EmptySet,
    #[error("positive and negative classes must both be non-empty")]
    EmptyClass,
    #[error("every candidate dataset was excluded from the pool")]
    EmptyPoolAfterExclusion,
    #[error("distribution dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("distribution does not sum to 1")]
    NotNormalized,
    #[error("no values to histogram")]
    EmptyValues,
    #[error("pool of {available} cannot supply {needed} negatives")]
    InsufficientPool { needed: usize, available: usize },
    #[error("only {available} non-positive recombinations exist, {needed} requested")]
    ExhaustedCombinations { needed: usize, available: usize },
    #[error("property computation failed: {0}")]
    Property(String),
    #[error(transparent)]
    Notation(#[from] notation::NotationError),
}

impl From<seqcore::SeqError> for NegSampError {
    fn from(e: seqcore::SeqError) -> Self {
        NegSampError::Property(e.to_string())
    }
}

/// |a intersect b| / min(|a|, |b|) over exact sequence text.
pub fn overlap_ratio(a: &[PeptideSequence], b: &[PeptideSequence]) -> Result<f64, NegSampError> {
    if a.is_empty() || b.is_empty() {
        return Err(NegSampError::EmptySet);
    }
    let sa: BTreeSet<&str> = a.iter().map(PeptideSequence::residues).collect();
    let sb: BTreeSet<&str> = b.iter().map(PeptideSequence::residues).collect();
    let shared = sa.intersection(&sb).count();
    Ok(shared as f64 / sa.len().min(sb.len()) as f64)
}

/// Datasets whose overlap with the target exceeds this are treated as
/// related and excluded from the pool.
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SourceDataset {
    pub name: String,
    pub seqs: Vec<PeptideSequence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolMember {
    pub seq: PeptideSequence,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPool {
    pub members: Vec<PoolMember>,
    pub excluded_datasets: Vec<String>,
    pub warnings: Vec<String>,
}

impl SamplingPool {
    pub fn seqs(&self) -> Vec<PeptideSequence> {
        self.members.iter().map(|m| m.seq.clone()).collect()
    }
}

/// Builds the negative pool: drops expert-excluded datasets and datasets
/// overlapping the target positives above the threshold, deduplicates the
/// union exactly, then removes redundancy at the standard 0.9/0.9 regime.
pub fn build_pool(
    datasets: &[SourceDataset],
    target_positives: &[PeptideSequence],
    expert_exclusions: &[String],
    auto_threshold: f64,
    dedup: &AlignmentParams,
) -> Result<SamplingPool, NegSampError> {
    let mut excluded = Vec::new();
    let mut union: Vec<PoolMember> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for ds in datasets {
        if expert_exclusions.contains(&ds.name) {
            excluded.push(ds.name.clone());
            continue;
        }
        if !ds.seqs.is_empty() && !target_positives.is_empty() {
            let ratio = overlap_ratio(&ds.seqs, target_positives)?;
            if ratio > auto_threshold {
                excluded.push(ds.name.clone());
                continue;
            }
        }
        for s in &ds.seqs {
            if seen.insert(s.residues().to_string()) {
                union.push(PoolMember { seq: s.clone(), source: ds.name.clone() });
            }
        }
    }
    if union.is_empty() {
        return Err(NegSampError::EmptyPoolAfterExclusion);
    }
    let seqs: Vec<PeptideSequence> = union.iter().map(|m| m.seq.clone()).collect();
    let kept = cleanse::remove_redundancy(&seqs, dedup);
    let members: Vec<PoolMember> = kept.into_iter().map(|i| union[i].clone()).collect();
    Ok(SamplingPool { members, excluded_datasets: excluded, warnings: Vec::new() })
}

/// Base-2 Jensen-Shannon divergence between two distributions.
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64, NegSampError> {
    if p.len() != q.len() {
        return Err(NegSampError::DimensionMismatch(p.len(), q.len()));
    }
    for dist in [p, q] {
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || dist.iter().any(|&x| x < 0.0) {
            return Err(NegSampError::NotNormalized);
        }
    }
    let mut js = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        let mi = 0.5 * (pi + qi);
        if pi > 0.0 {
            js += 0.5 * pi * (pi / mi).log2();
        }
        if qi > 0.0 {
            js += 0.5 * qi * (qi / mi).log2();
        }
    }
    Ok(js.clamp(0.0, 1.0))
}

/// Histogram with right-open bins (last bin closed); out-of-range values are
/// clamped into the edge bins. Normalized to sum 1.
pub fn feature_histogram(
    values: &[f64],
    bins: usize,
    range: (f64, f64),
) -> Result<Vec<f64>, NegSampError> {
    if values.is_empty() {
        return Err(NegSampError::EmptyValues);
    }
    assert!(bins >= 2, "need at least 2 bins");
    let (lo, hi) = range;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = if hi > lo {
            (((v - lo) / (hi - lo) * bins as f64).floor() as i64).clamp(0, bins as i64 - 1)
                as usize
        } else {
            0
        };
        counts[idx] += 1;
    }
    let total = values.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Thresholds and binning for the distribution checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub bins: usize,
    pub scalar_threshold: f64,
    pub onemer_threshold: f64,
    pub twomer_threshold: f64,
    /// pH used for the net-charge feature.
    pub ph: f64,
    /// Shared (length, charge, hydrophobicity) ranges fixed before sampling;
    /// computed from the populations under comparison when absent.
    pub ranges: Option<[(f64, f64); 3]>,
}

impl Default for DistributionSpec {
    fn default() -> Self {
        DistributionSpec {
            bins: 30,
            scalar_threshold: 0.2,
            onemer_threshold: 0.05,
            twomer_threshold: 0.15,
            ph: 7.0,
            ranges: None,
        }
    }
}

/// The five JS values and the conjunction verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsReport {
    #[serde(rename = "Length_js")]
    pub length_js: f64,
    #[serde(rename = "Charge_js")]
    pub charge_js: f64,
    #[serde(rename = "Hydrophobicity_js")]
    pub hydrophobicity_js: f64,
    #[serde(rename = "1mers_js")]
    pub onemer_js: f64,
    #[serde(rename = "2mers_js")]
    pub twomer_js: f64,
    pub pass: bool,
}

/// Raw (length, net charge, hydrophobicity) rows for a set of sequences.
pub fn scalar_properties(
    seqs: &[PeptideSequence],
    ph: f64,
) -> Result<Vec<[f64; 3]>, NegSampError> {
    seqs.iter()
        .map(|s| {
            Ok([
                s.len() as f64,
                seqcore::net_charge(s, ph)?,
                seqcore::gravy(s)?,
            ])
        })
        .collect()
}

fn shared_ranges(a: &[[f64; 3]], b: &[[f64; 3]]) -> [(f64, f64); 3] {
    let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for row in a.iter().chain(b) {
        for d in 0..3 {
            ranges[d].0 = ranges[d].0.min(row[d]);
            ranges[d].1 = ranges[d].1.max(row[d]);
        }
    }
    ranges
}

fn mean_composition(seqs: &[PeptideSequence], n: usize) -> Result<Vec<f64>, NegSampError> {
    let dim = 20usize.pow(n as u32);
    let mut acc = vec![0.0f64; dim];
    let mut counted = 0usize;
    for s in seqs {
        match seqcore::composition(s, n) {
            Ok(f) => {
                for (a, x) in acc.iter_mut().zip(&f) {
                    *a += x;
                }
                counted += 1;
            }
            Err(seqcore::SeqError::SequenceTooShort { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    if counted == 0 {
        return Err(NegSampError::EmptyValues);
    }
    Ok(acc.into_iter().map(|x| x / counted as f64).collect())
}

/// Computes the five JS values between the classes: 30-bin shared-range
/// histograms for length/charge/hydrophobicity, class-mean composition
/// vectors for 1-mers and 2-mers.
pub fn validate_distributions(
    pos: &[PeptideSequence],
    neg: &[PeptideSequence],
    spec: &DistributionSpec,
) -> Result<JsReport, NegSampError> {
    if pos.is_empty() || neg.is_empty() {
        return Err(NegSampError::EmptyClass);
    }
    let pos_props = scalar_properties(pos, spec.ph)?;
    let neg_props = scalar_properties(neg, spec.ph)?;
    let ranges = spec.ranges.unwrap_or_else(|| shared_ranges(&pos_props, &neg_props));

    let mut scalar_js = [0.0f64; 3];
    for d in 0..3 {
        let pv: Vec<f64> = pos_props.iter().map(|r| r[d]).collect();
        let nv: Vec<f64> = neg_props.iter().map(|r| r[d]).collect();
        let hp = feature_histogram(&pv, spec.bins, ranges[d])?;
        let hn = feature_histogram(&nv, spec.bins, ranges[d])?;
        scalar_js[d] = js_divergence(&hp, &hn)?;
    }
    let onemer_js = js_divergence(&mean_composition(pos, 1)?, &mean_composition(neg, 1)?)?;
    let twomer_js = js_divergence(&mean_composition(pos, 2)?, &mean_composition(neg, 2)?)?;
    let pass = scalar_js.iter().all(|&j| j <= spec.scalar_threshold)
        && onemer_js <= spec.onemer_threshold
        && twomer_js <= spec.twomer_threshold;
    Ok(JsReport {
        length_js: scalar_js[0],
        charge_js: scalar_js[1],
        hydrophobicity_js: scalar_js[2],
        onemer_js,
        twomer_js,
        pass,
    })
}

/// Z-scored feature rows for positives and pool, constant dims dropped.
struct FeatureSpace {
    pos: Vec<Vec<f64>>,
    pool: Vec<Vec<f64>>,
    warnings: Vec<String>,
}

const FEATURE_NAMES: [&str; 3] = ["length", "net_charge", "hydrophobicity"];

fn feature_space(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    ph: f64,
) -> Result<FeatureSpace, NegSampError> {
    let pos_raw = scalar_properties(positives, ph)?;
    let pool_raw = scalar_properties(pool, ph)?;
    let n = pos_raw.len() + pool_raw.len();
    let mut keep = Vec::new();
    let mut means = [0.0f64; 3];
    let mut stds = [0.0f64; 3];
    let mut warnings = Vec::new();
    for d in 0..3 {
        let mean: f64 =
            pos_raw.iter().chain(&pool_raw).map(|r| r[d]).sum::<f64>() / n as f64;
        let var: f64 = pos_raw
            .iter()
            .chain(&pool_raw)
            .map(|r| (r[d] - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        let std = var.sqrt();
        if std > 0.0 {
            keep.push(d);
            means[d] = mean;
            stds[d] = std;
        } else {
            warnings.push(format!("feature {} is constant and was dropped", FEATURE_NAMES[d]));
        }
    }
    let project = |rows: &[[f64; 3]]| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| keep.iter().map(|&d| (r[d] - means[d]) / stds[d]).collect())
            .collect()
    };
    Ok(FeatureSpace { pos: project(&pos_raw), pool: project(&pool_raw), warnings })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn required(ratio: f64, npos: usize) -> usize {
    (ratio * npos as f64).round() as usize
}

fn check_pool(need: usize, available: usize) -> Result<(), NegSampError> {
    if available < need {
        return Err(NegSampError::InsufficientPool { needed: need, available });
    }
    Ok(())
}

/// The outcome every sampler returns: pool indices plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub indices: Vec<usize>,
    pub warnings: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
}

impl SampleOutcome {
    fn new(indices: Vec<usize>, warnings: Vec<String>) -> Self {
        SampleOutcome { indices, warnings, converged: true, iterations: 0 }
    }
}

/// Largest-remainder apportionment of `need` slots proportional to counts.
fn apportion(counts: &[u64], need: usize) -> Vec<usize> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let exact: Vec<f64> = counts.iter().map(|&c| need as f64 * c as f64 / total as f64).collect();
    let mut quotas: Vec<usize> = exact.iter().map(|&e| e.floor() as usize).collect();
    let assigned: usize = quotas.iter().sum();
    let mut rema: Vec<(usize, f64)> =
        exact.iter().enumerate().map(|(i, &e)| (i, e - e.floor())).collect();
    rema.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for &(bin, _) in rema.iter().take(need - assigned) {
        quotas[bin] += 1;
    }
    quotas
}

/// Histogram matching on sequence length: per-bin quotas proportional to the
/// positive length histogram, sampled without replacement, with shortfalls
/// backfilled from the nearest bins (warned).
pub fn sample_bin_matched(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    ratio: f64,
    spec: &DistributionSpec,
    seed: u64,
) -> Result<SampleOutcome, NegSampError> {
    if positives.is_empty() {
        return Err(NegSampError::EmptyClass);
    }
    let need = required(ratio, positives.len());
    check_pool(need, pool.len())?;
    let pos_lengths: Vec<f64> = positives.iter().map(|s| s.len() as f64).collect();
    let pool_lengths: Vec<f64> = pool.iter().map(|s| s.len() as f64).collect();
    let range = spec.ranges.map(|r| r[0]).unwrap_or_else(|| {
        let all = pos_lengths.iter().chain(&pool_lengths);
        let lo = all.clone().cloned().fold(f64::INFINITY, f64::min);
        let hi = all.cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    });
    let bins = spec.bins;
    let bin_of = |len: f64| -> usize {
        if range.1 > range.0 {
            (((len - range.0) / (range.1 - range.0) * bins as f64).floor() as i64)
                .clamp(0, bins as i64 - 1) as usize
        } else {
            0
        }
    };
    let mut pos_counts = vec![0u64; bins];
    for &l in &pos_lengths {
        pos_counts[bin_of(l)] += 1;
    }
    let quotas = apportion(&pos_counts, need);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_bin: Vec<Vec<usize>> = vec![Vec::new(); bins];
    for (i, &l) in pool_lengths.iter().enumerate() {
        by_bin[bin_of(l)].push(i);
    }
    for b in &mut by_bin {
        b.shuffle(&mut rng);
    }

    let mut selected = Vec::with_capacity(need);
    let mut deficits = vec![0usize; bins];
    for (b, &quota) in quotas.iter().enumerate() {
        let take = quota.min(by_bin[b].len());
        selected.extend(by_bin[b].drain(..take));
        deficits[b] = quota - take;
    }
    let mut warnings = Vec::new();
    for b in 0..bins {
        let mut shortfall = deficits[b];
        if shortfall == 0 {
            continue;
        }
        warnings.push(format!(
            "length bin {b} short by {shortfall}; backfilling from adjacent bins"
        ));
        for offset in 1..bins {
            for neighbor in [b.checked_sub(offset), Some(b + offset)].into_iter().flatten() {
                if neighbor >= bins || shortfall == 0 {
                    continue;
                }
                let take = shortfall.min(by_bin[neighbor].len());
                selected.extend(by_bin[neighbor].drain(..take));
                shortfall -= take;
            }
            if shortfall == 0 {
                break;
            }
        }
        if shortfall > 0 {
            return Err(NegSampError::InsufficientPool {
                needed: need,
                available: selected.len(),
            });
        }
    }
    selected.truncate(need);
    Ok(SampleOutcome::new(selected, warnings))
}

/// Gaussian KDE density of each query row under the positive rows,
/// bandwidth per Scott's rule on z-scored features (h = n^(-1/(d+4))).
fn kde_densities(pos: &[Vec<f64>], queries: &[Vec<f64>]) -> Vec<f64> {
    let d = pos.first().map_or(0, Vec::len);
    if d == 0 {
        return vec![1.0; queries.len()];
    }
    let h = (pos.len() as f64).powf(-1.0 / (d as f64 + 4.0));
    let norm = 1.0 / (pos.len() as f64 * (h * (2.0 * std::f64::consts::PI).sqrt()).powi(d as i32));
    queries
        .par_iter()
        .map(|q| {
            let mut acc = 0.0;
            for p in pos {
                acc += (-sq_dist(q, p) / (2.0 * h * h)).exp();
            }
            acc * norm
        })
        .collect()
}

/// KDE importance sampling: pool points drawn without replacement with
/// probability proportional to the positive-density estimate at their
/// features (weighted reservoir keys, deterministic under seed).
pub fn sample_kde_importance(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    ratio: f64,
    spec: &DistributionSpec,
    seed: u64,
) -> Result<SampleOutcome, NegSampError> {
    if positives.is_empty() {
        return Err(NegSampError::EmptyClass);
    }
    let need = required(ratio, positives.len());
    check_pool(need, pool.len())?;
    let space = feature_space(pool, positives, spec.ph)?;
    let weights = kde_densities(&space.pos, &space.pool);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keyed: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            let key = if w > 0.0 { u.ln() / w } else { f64::NEG_INFINITY };
            (key, i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let indices: Vec<usize> = keyed.into_iter().take(need).map(|(_, i)| i).collect();
    Ok(SampleOutcome::new(indices, space.warnings))
}

/// Weights used by the KDE sampler, exposed for inspection.
pub fn kde_pool_weights(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    spec: &DistributionSpec,
) -> Result<Vec<f64>, NegSampError> {
    let space = feature_space(pool, positives, spec.ph)?;
    Ok(kde_densities(&space.pos, &space.pool))
}

fn rbf(a: &[f64], b: &[f64], bandwidth: f64) -> f64 {
    (-sq_dist(a, b) / (2.0 * bandwidth * bandwidth)).exp()
}

/// Median pairwise distance among the positive rows; 1.0 when degenerate.
fn median_pairwise_distance(pos: &[Vec<f64>]) -> f64 {
    let mut dists = Vec::with_capacity(pos.len() * (pos.len() - 1) / 2);
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            dists.push(sq_dist(&pos[i], &pos[j]).sqrt());
        }
    }
    if dists.is_empty() {
        return 1.0;
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = dists[dists.len() / 2];
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

/// Greedy kernel herding against the positive feature distribution under an
/// RBF kernel (bandwidth = median pairwise positive distance). Step t+1
/// picks the unused pool point maximizing
/// mean_i k(x, p_i) - (1/(t+1)) * sum_{s selected} k(x, s); ties go to the
/// lowest index. Exact twins of the positives drive the selection MMD to 0.
pub fn sample_mmd_herding(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    ratio: f64,
    spec: &DistributionSpec,
    _seed: u64,
) -> Result<SampleOutcome, NegSampError> {
    if positives.is_empty() {
        return Err(NegSampError::EmptyClass);
    }
    let need = required(ratio, positives.len());
    check_pool(need, pool.len())?;
    let space = feature_space(pool, positives, spec.ph)?;
    let bandwidth = median_pairwise_distance(&space.pos);

    let mean_kernel: Vec<f64> = space
        .pool
        .par_iter()
        .map(|x| {
            space.pos.iter().map(|p| rbf(x, p, bandwidth)).sum::<f64>() / space.pos.len() as f64
        })
        .collect();

    let m = pool.len();
    let mut used = vec![false; m];
    let mut selected_kernel_sum = vec![0.0f64; m];
    let mut indices = Vec::with_capacity(need);
    for t in 0..need {
        let mut best: Option<(f64, usize)> = None;
        for j in 0..m {
            if used[j] {
                continue;
            }
            let score = mean_kernel[j] - selected_kernel_sum[j] / (t as f64 + 1.0);
            match best {
                Some((bs, _)) if score <= bs => {}
                _ => best = Some((score, j)),
            }
        }
        let (_, pick) = best.expect("pool large enough");
        used[pick] = true;
        indices.push(pick);
        let picked_row = space.pool[pick].clone();
        selected_kernel_sum
            .par_iter_mut()
            .enumerate()
            .for_each(|(j, s)| *s += rbf(&space.pool[j], &picked_row, bandwidth));
    }
    Ok(SampleOutcome::new(indices, space.warnings))
}

/// Squared-MMD between the rows of `a` and `b` under the herding kernel
/// conventions (biased V-statistic, diagonal included).
pub fn mmd_squared(a: &[Vec<f64>], b: &[Vec<f64>], bandwidth: f64) -> f64 {
    let term = |x: &[Vec<f64>], y: &[Vec<f64>]| -> f64 {
        let mut acc = 0.0;
        for xi in x {
            for yj in y {
                acc += rbf(xi, yj, bandwidth);
            }
        }
        acc / (x.len() as f64 * y.len() as f64)
    };
    term(a, a) - 2.0 * term(a, b) + term(b, b)
}

/// Nearest-neighbor matching: positives visited in seeded order repeatedly,
/// each claiming its nearest unused pool point (Euclidean on z-scored
/// features, ties to the lowest index). Injective by construction.
pub fn sample_nearest_neighbor(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    ratio: f64,
    spec: &DistributionSpec,
    seed: u64,
) -> Result<SampleOutcome, NegSampError> {
    if positives.is_empty() {
        return Err(NegSampError::EmptyClass);
    }
    let need = required(ratio, positives.len());
    check_pool(need, pool.len())?;
    let space = feature_space(pool, positives, spec.ph)?;

    let mut order: Vec<usize> = (0..positives.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut used = vec![false; pool.len()];
    let mut indices = Vec::with_capacity(need);
    'outer: loop {
        for &p in &order {
            if indices.len() == need {
                break 'outer;
            }
            let target = &space.pos[p];
            let nearest = (0..pool.len())
                .filter(|&j| !used[j])
                .min_by(|&a, &b| {
                    sq_dist(&space.pool[a], target)
                        .partial_cmp(&sq_dist(&space.pool[b], target))
                        .unwrap()
                        .then(a.cmp(&b))
                })
                .expect("pool large enough");
            used[nearest] = true;
            indices.push(nearest);
        }
    }
    Ok(SampleOutcome::new(indices, space.warnings))
}

/// Diagnostics of a Sinkhorn run.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornStats {
    pub iterations: usize,
    pub max_marginal_violation: f64,
    pub converged: bool,
}

/// Kernel matrix and converged scaling vectors of the Sinkhorn iteration;
/// the plan entry (i, j) is `u[i] * kernel[i * m + j] * v[j]`.
struct SinkhornState {
    kernel: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    stats: SinkhornStats,
}

fn sinkhorn_iterate(
    pos: &[Vec<f64>],
    pool: &[Vec<f64>],
    epsilon: f64,
    max_iters: usize,
) -> SinkhornState {
    let n = pos.len();
    let m = pool.len();
    // Cost rescaled by its maximum, then turned into the Gibbs kernel in
    // place.
    let mut kernel: Vec<f64> = pos
        .par_iter()
        .flat_map_iter(|p| pool.iter().map(move |x| sq_dist(p, x).sqrt()))
        .collect();
    let max_cost = kernel.par_iter().cloned().reduce(|| 0.0, f64::max);
    let scale = if max_cost > 0.0 { max_cost } else { 1.0 };
    kernel.par_iter_mut().for_each(|c| *c = (-*c / (scale * epsilon)).exp());

    let a = 1.0 / n as f64;
    let b = 1.0 / m as f64;
    let mut u = vec![1.0f64; n];
    let mut v = vec![1.0f64; m];
    let mut iterations = 0;
    let mut violation = f64::INFINITY;
    while iterations < max_iters {
        // u = a ./ (K v)
        let kv: Vec<f64> = kernel
            .par_chunks(m)
            .map(|row| row.iter().zip(&v).map(|(k, vj)| k * vj).sum::<f64>())
            .collect();
        for i in 0..n {
            u[i] = a / kv[i].max(f64::MIN_POSITIVE);
        }
        // v = b ./ (K^T u)
        let mut ktu = vec![0.0f64; m];
        for (i, row) in kernel.chunks(m).enumerate() {
            let ui = u[i];
            for (j, k) in row.iter().enumerate() {
                ktu[j] += k * ui;
            }
        }
        for j in 0..m {
            v[j] = b / ktu[j].max(f64::MIN_POSITIVE);
        }
        iterations += 1;
        if iterations % 5 == 0 || iterations == max_iters {
            violation = marginal_violation(&kernel, &u, &v, n, m, a, b);
            if violation < 1e-6 {
                break;
            }
        }
    }
    if violation.is_infinite() {
        violation = marginal_violation(&kernel, &u, &v, n, m, a, b);
    }
    SinkhornState {
        kernel,
        u,
        v,
        stats: SinkhornStats {
            iterations,
            max_marginal_violation: violation,
            converged: violation < 1e-6,
        },
    }
}

/// Entropy-regularized transport between uniform marginals on positives and
/// pool over the Euclidean cost on z-scored features (cost rescaled by its
/// maximum). Returns the plan as (n_pos x n_pool) row-major storage.
pub fn sinkhorn_plan(
    pos: &[Vec<f64>],
    pool: &[Vec<f64>],
    epsilon: f64,
    max_iters: usize,
) -> (Vec<f64>, SinkhornStats) {
    let state = sinkhorn_iterate(pos, pool, epsilon, max_iters);
    let m = pool.len();
    let plan: Vec<f64> = (0..pos.len() * m)
        .into_par_iter()
        .map(|idx| state.u[idx / m] * state.kernel[idx] * state.v[idx % m])
        .collect();
    (plan, state.stats)
}

fn marginal_violation(
    kernel: &[f64],
    u: &[f64],
    v: &[f64],
    n: usize,
    m: usize,
    a: f64,
    b: f64,
) -> f64 {
    let row_violation = (0..n)
        .into_par_iter()
        .map(|i| {
            let sum: f64 = (0..m).map(|j| u[i] * kernel[i * m + j] * v[j]).sum();
            (sum - a).abs()
        })
        .reduce(|| 0.0, f64::max);
    let col_violation = (0..m)
        .into_par_iter()
        .map(|j| {
            let sum: f64 = (0..n).map(|i| u[i] * kernel[i * m + j] * v[j]).sum();
            (sum - b).abs()
        })
        .reduce(|| 0.0, f64::max);
    row_violation.max(col_violation)
}

/// Entropic optimal transport sampler: pool points ranked by the largest
/// single plan entry they receive (the strongest positive-to-pool flow),
/// taken without replacement. Non-convergence degrades to the best iterate
/// with a warning rather than failing.
pub fn sample_sinkhorn_ot(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    ratio: f64,
    spec: &DistributionSpec,
    epsilon: f64,
    max_iters: usize,
    _seed: u64,
) -> Result<SampleOutcome, NegSampError> {
    if positives.is_empty() {
        return Err(NegSampError::EmptyClass);
    }
    assert!(epsilon > 0.0, "epsilon must be positive");
    let need = required(ratio, positives.len());
    check_pool(need, pool.len())?;
    let space = feature_space(pool, positives, spec.ph)?;
    let state = sinkhorn_iterate(&space.pos, &space.pool, epsilon, max_iters);

    let m = pool.len();
    // Column maxima of the plan, without materializing it.
    let mut best = vec![0.0f64; m];
    for (i, row) in state.kernel.chunks(m).enumerate() {
        let ui = state.u[i];
        for (j, k) in row.iter().enumerate() {
            let entry = ui * k * state.v[j];
            if entry > best[j] {
                best[j] = entry;
            }
        }
    }
    let mut score: Vec<(f64, usize)> = best.into_iter().zip(0..m).collect();
    score.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let indices: Vec<usize> = score.into_iter().take(need).map(|(_, j)| j).collect();
    let mut warnings = space.warnings;
    if !state.stats.converged {
        warnings.push(format!(
            "sinkhorn did not converge in {} iterations (violation {:.2e})",
            state.stats.iterations, state.stats.max_marginal_violation
        ));
    }
    Ok(SampleOutcome {
        indices,
        warnings,
        converged: state.stats.converged,
        iterations: state.stats.iterations,
    })
}

/// Greedy swap search minimizing the summed per-feature |mean| and |std|
/// gaps to the positives from a seeded random start. First-improvement
/// passes; the objective never increases.
pub fn sample_moment_matched(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    ratio: f64,
    spec: &DistributionSpec,
    seed: u64,
) -> Result<SampleOutcome, NegSampError> {
    if positives.is_empty() {
        return Err(NegSampError::EmptyClass);
    }
    let need = required(ratio, positives.len());
    check_pool(need, pool.len())?;
    let space = feature_space(pool, positives, spec.ph)?;
    let d = space.pos.first().map_or(0, Vec::len);
    if d == 0 || need == 0 {
        return Ok(SampleOutcome::new((0..need).collect(), space.warnings));
    }
    let npos = space.pos.len() as f64;
    let mut target_mean = vec![0.0; d];
    let mut target_std = vec![0.0; d];
    for k in 0..d {
        let mean: f64 = space.pos.iter().map(|r| r[k]).sum::<f64>() / npos;
        let var: f64 = space.pos.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / npos;
        target_mean[k] = mean;
        target_std[k] = var.sqrt();
    }

    let m = pool.len();
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut selected: Vec<bool> = vec![false; m];
    for &j in order.iter().take(need) {
        selected[j] = true;
    }

    let mut sum = vec![0.0; d];
    let mut sumsq = vec![0.0; d];
    for j in 0..m {
        if selected[j] {
            for k in 0..d {
                sum[k] += space.pool[j][k];
                sumsq[k] += space.pool[j][k] * space.pool[j][k];
            }
        }
    }
    let objective = |sum: &[f64], sumsq: &[f64]| -> f64 {
        let nf = need as f64;
        (0..d)
            .map(|k| {
                let mean = sum[k] / nf;
                let var = (sumsq[k] / nf - mean * mean).max(0.0);
                (mean - target_mean[k]).abs() + (var.sqrt() - target_std[k]).abs()
            })
            .sum()
    };
    let mut best = objective(&sum, &sumsq);
    let mut iterations = 0usize;
    const MAX_PASSES: usize = 60;
    for _pass in 0..MAX_PASSES {
        let mut improved = false;
        for out in 0..m {
            if !selected[out] {
                continue;
            }
            for into in 0..m {
                if selected[into] {
                    continue;
                }
                let mut trial_sum = sum.clone();
                let mut trial_sumsq = sumsq.clone();
                for k in 0..d {
                    trial_sum[k] += space.pool[into][k] - space.pool[out][k];
                    trial_sumsq[k] += space.pool[into][k] * space.pool[into][k]
                        - space.pool[out][k] * space.pool[out][k];
                }
                let trial = objective(&trial_sum, &trial_sumsq);
                if trial + 1e-15 < best {
                    best = trial;
                    sum = trial_sum;
                    sumsq = trial_sumsq;
                    selected[out] = false;
                    selected[into] = true;
                    improved = true;
                    break;
                }
            }
        }
        iterations += 1;
        if !improved {
            break;
        }
    }
    let indices: Vec<usize> = (0..m).filter(|&j| selected[j]).collect();
    Ok(SampleOutcome { indices, warnings: space.warnings, converged: true, iterations })
}

/// The sampler registry, in the order strategies are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Bin,
    Kde,
    Mmd,
    Nn,
    Ot,
    Moment,
}

impl Strategy {
    pub const ALL: [Strategy; 6] =
        [Strategy::Bin, Strategy::Kde, Strategy::Mmd, Strategy::Nn, Strategy::Ot, Strategy::Moment];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Bin => "bin",
            Strategy::Kde => "kde",
            Strategy::Mmd => "mmd",
            Strategy::Nn => "nn",
            Strategy::Ot => "ot",
            Strategy::Moment => "moment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyScore {
    pub strategy: String,
    pub report: JsReport,
    pub max_js: f64,
    pub diversity: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub strategy: String,
    pub indices: Vec<usize>,
    pub report: JsReport,
    /// False when no candidate met every JS threshold and the max-JS
    /// minimizer was returned instead.
    pub pass: bool,
    pub scoreboard: Vec<StrategyScore>,
}

/// Weight of the diversity term in the selection score.
pub const DIVERSITY_LAMBDA: f64 = 0.1;

/// Mean pairwise sequence dissimilarity (1 - identity), measured on an
/// evenly-spaced subsample of at most 200 sequences to bound cost.
pub fn mean_pairwise_dissimilarity(seqs: &[PeptideSequence]) -> f64 {
    if seqs.len() < 2 {
        return 0.0;
    }
    const CAP: usize = 200;
    let picked: Vec<&PeptideSequence> = if seqs.len() <= CAP {
        seqs.iter().collect()
    } else {
        (0..CAP).map(|k| &seqs[k * seqs.len() / CAP]).collect()
    };
    let n = picked.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total: f64 = pairs
        .par_iter()
        .map(|&(i, j)| 1.0 - align_pair(picked[i], picked[j]).identity)
        .sum();
    total / pairs.len() as f64
}

/// Scores each candidate negative set (max JS minus a diversity bonus) and
/// returns the best passing candidate, or the max-JS minimizer flagged as
/// failing when none passes. Ties break on strategy name.
pub fn select_best(
    candidates: &[(Strategy, Vec<usize>)],
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    spec: &DistributionSpec,
    lambda: f64,
) -> Result<Selection, NegSampError> {
    assert!(!candidates.is_empty(), "need at least one candidate");
    let mut scored = Vec::with_capacity(candidates.len());
    for (strategy, indices) in candidates {
        let negs: Vec<PeptideSequence> = indices.iter().map(|&i| pool[i].clone()).collect();
        let report = validate_distributions(positives, &negs, spec)?;
        let max_js = [
            report.length_js,
            report.charge_js,
            report.hydrophobicity_js,
            report.onemer_js,
            report.twomer_js,
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        let diversity = mean_pairwise_dissimilarity(&negs);
        scored.push(StrategyScore {
            strategy: strategy.name().to_string(),
            report,
            max_js,
            diversity,
            score: max_js - lambda * diversity,
        });
    }
    let pick_among = |flags: Vec<bool>, by_max_js: bool| -> usize {
        let mut best = usize::MAX;
        for (i, ok) in flags.iter().enumerate() {
            if !ok {
                continue;
            }
            if best == usize::MAX {
                best = i;
                continue;
            }
            let (a, b) = (&scored[i], &scored[best]);
            let (ka, kb) = if by_max_js { (a.max_js, b.max_js) } else { (a.score, b.score) };
            if ka < kb || (ka == kb && a.strategy < b.strategy) {
                best = i;
            }
        }
        best
    };
    let passing: Vec<bool> = scored.iter().map(|s| s.report.pass).collect();
    let any_pass = passing.iter().any(|&p| p);
    let winner = if any_pass {
        pick_among(passing, false)
    } else {
        pick_among(vec![true; scored.len()], true)
    };
    Ok(Selection {
        strategy: scored[winner].strategy.clone(),
        indices: candidates[winner].1.clone(),
        report: scored[winner].report,
        pass: any_pass,
        scoreboard: scored,
    })
}

/// Full negative-sampling configuration with the standard defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegSampConfig {
    pub ratio: f64,
    pub spec: DistributionSpec,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    pub epsilon: f64,
    pub max_iters: usize,
    pub similarity_filter_identity: f64,
    pub diversity_lambda: f64,
}

impl Default for NegSampConfig {
    fn default() -> Self {
        NegSampConfig {
            ratio: 1.0,
            spec: DistributionSpec::default(),
            seed: 0,
            strategies: Strategy::ALL.to_vec(),
            epsilon: 0.1,
            max_iters: 1000,
            similarity_filter_identity: 0.6,
            diversity_lambda: DIVERSITY_LAMBDA,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingRun {
    pub selection: Selection,
    /// Indices into the filtered pool slice handed to the samplers.
    pub filtered_pool: Vec<PeptideSequence>,
    pub warnings: Vec<String>,
}

/// Runs similarity filtering and every configured sampler, then selects the
/// best candidate set. The returned indices refer to `filtered_pool`.
pub fn run_negative_sampling(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    config: &NegSampConfig,
) -> Result<SamplingRun, NegSampError> {
    if positives.is_empty() {
        return Err(NegSampError::EmptyClass);
    }
    let filter_params =
        AlignmentParams::default().with_identity(config.similarity_filter_identity);
    let kept = cleanse::filter_similar_to(pool, positives, &filter_params);
    let filtered_pool: Vec<PeptideSequence> = kept.into_iter().map(|i| pool[i].clone()).collect();
    let need = required(config.ratio, positives.len());
    check_pool(need, filtered_pool.len())?;

    let mut spec = config.spec;
    if spec.ranges.is_none() {
        let pos_props = scalar_properties(positives, spec.ph)?;
        let pool_props = scalar_properties(&filtered_pool, spec.ph)?;
        spec.ranges = Some(shared_ranges(&pos_props, &pool_props));
    }

    let mut warnings = Vec::new();
    let mut candidates = Vec::new();
    for &strategy in &config.strategies {
        let outcome = match strategy {
            Strategy::Bin => {
                sample_bin_matched(&filtered_pool, positives, config.ratio, &spec, config.seed)?
            }
            Strategy::Kde => {
                sample_kde_importance(&filtered_pool, positives, config.ratio, &spec, config.seed)?
            }
            Strategy::Mmd => {
                sample_mmd_herding(&filtered_pool, positives, config.ratio, &spec, config.seed)?
            }
            Strategy::Nn => {
                sample_nearest_neighbor(&filtered_pool, positives, config.ratio, &spec, config.seed)?
            }
            Strategy::Ot => sample_sinkhorn_ot(
                &filtered_pool,
                positives,
                config.ratio,
                &spec,
                config.epsilon,
                config.max_iters,
                config.seed,
            )?,
            Strategy::Moment => {
                sample_moment_matched(&filtered_pool, positives, config.ratio, &spec, config.seed)?
            }
        };
        for w in outcome.warnings {
            warnings.push(format!("{}: {w}", strategy.name()));
        }
        candidates.push((strategy, outcome.indices));
    }
    let selection =
        select_best(&candidates, &filtered_pool, positives, &spec, config.diversity_lambda)?;
    Ok(SamplingRun { selection, filtered_pool, warnings })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpandOutcome {
    /// Indices into the external slice that were added.
    pub added: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Tops up under-covered positive length bins from an external source until
/// each bin holds `coverage` times its positive count. Additions pass the
/// same exact-duplicate, redundancy (0.9), and positive-similarity (0.6)
/// filters as pool members.
pub fn expand_pool_external(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    external: &[PeptideSequence],
    coverage: usize,
    spec: &DistributionSpec,
) -> Result<ExpandOutcome, NegSampError> {
    if positives.is_empty() {
        return Err(NegSampError::EmptyClass);
    }
    let pos_lengths: Vec<f64> = positives.iter().map(|s| s.len() as f64).collect();
    let pool_lengths: Vec<f64> = pool.iter().map(|s| s.len() as f64).collect();
    let range = spec.ranges.map(|r| r[0]).unwrap_or_else(|| {
        let lo = pos_lengths.iter().chain(&pool_lengths).cloned().fold(f64::INFINITY, f64::min);
        let hi =
            pos_lengths.iter().chain(&pool_lengths).cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    });
    let bins = spec.bins;
    let bin_of = |len: f64| -> usize {
        if range.1 > range.0 {
            (((len - range.0) / (range.1 - range.0) * bins as f64).floor() as i64)
                .clamp(0, bins as i64 - 1) as usize
        } else {
            0
        }
    };
    let mut pos_counts = vec![0usize; bins];
    for &l in &pos_lengths {
        pos_counts[bin_of(l)] += 1;
    }
    let mut pool_counts = vec![0usize; bins];
    for &l in &pool_lengths {
        pool_counts[bin_of(l)] += 1;
    }

    let redundancy = AlignmentParams::default();
    let similarity = AlignmentParams::default().with_identity(0.6);
    let mut existing_text: BTreeSet<&str> =
        pool.iter().map(PeptideSequence::residues).collect();
    let mut added: Vec<usize> = Vec::new();
    let mut added_seqs: Vec<&PeptideSequence> = Vec::new();
    let mut warnings = Vec::new();

    for b in 0..bins {
        if pos_counts[b] == 0 {
            continue;
        }
        let target = coverage * pos_counts[b];
        let mut have = pool_counts[b];
        if have >= target {
            continue;
        }
        for (i, ext) in external.iter().enumerate() {
            if have >= target {
                break;
            }
            if bin_of(ext.len() as f64) != b || !existing_text.insert(ext.residues()) {
                continue;
            }
            let near_positive = positives.iter().any(|p| pair_links(ext, p, &similarity));
            if near_positive {
                continue;
            }
            let redundant = pool.iter().chain(added_seqs.iter().copied())
                .any(|p| pair_links(ext, p, &redundancy));
            if redundant {
                continue;
            }
            added.push(i);
            added_seqs.push(ext);
            have += 1;
        }
        if have < target {
            warnings.push(format!(
                "length bin {b}: coverage {have}/{target} after exhausting the external source"
            ));
        }
    }
    Ok(ExpandOutcome { added, warnings })
}

/// Negative peptide-protein pairs generated by recombination: for each
/// positive pair, `ratio` draws of (peptide, protein) rejected against the
/// positive set and previous draws. Deterministic under seed.
pub fn ppi_shuffle_negatives(
    positive_pairs: &[(String, String)],
    ratio: usize,
    seed: u64,
) -> Result<Vec<(String, String)>, NegSampError> {
    let mut peptides: Vec<&str> = Vec::new();
    let mut proteins: Vec<&str> = Vec::new();
    for (pep, prot) in positive_pairs {
        if !peptides.contains(&pep.as_str()) {
            peptides.push(pep);
        }
        if !proteins.contains(&prot.as_str()) {
            proteins.push(prot);
        }
    }
    let positive_set: BTreeSet<(&str, &str)> =
        positive_pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let needed = ratio * positive_pairs.len();
    let available = peptides.len() * proteins.len() - positive_set.len();
    if available < needed {
        return Err(NegSampError::ExhaustedCombinations { needed, available });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut out = Vec::with_capacity(needed);
    let mut attempts = 0usize;
    let attempt_budget = 100 * needed + 1000;
    while out.len() < needed && attempts < attempt_budget {
        attempts += 1;
        let pi = rng.gen_range(0..peptides.len());
        let qi = rng.gen_range(0..proteins.len());
        if positive_set.contains(&(peptides[pi], proteins[qi])) || !drawn.insert((pi, qi)) {
            continue;
        }
        out.push((peptides[pi].to_string(), proteins[qi].to_string()));
    }
    if out.len() < needed {
        // Rejection sampling stalled near exhaustion; enumerate the rest.
        let mut remaining: Vec<(usize, usize)> = (0..peptides.len())
            .flat_map(|pi| (0..proteins.len()).map(move |qi| (pi, qi)))
            .filter(|&(pi, qi)| {
                !positive_set.contains(&(peptides[pi], proteins[qi]))
                    && !drawn.contains(&(pi, qi))
            })
            .collect();
        remaining.shuffle(&mut rng);
        for (pi, qi) in remaining.into_iter().take(needed - out.len()) {
            out.push((peptides[pi].to_string(), proteins[qi].to_string()));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeOutcome {
    /// Canonical homolog images of the non-canonical positives.
    pub mapped_positives: Vec<PeptideSequence>,
    pub outcome: SamplingRun,
    /// Rows of the converter handoff file, one canonical negative each.
    pub handoff: Vec<String>,
}

/// Canonical bridge for non-canonical positives: maps each document to its
/// nearest canonical homolog sequence, runs the canonical pipeline against
/// the pool, and emits the handoff rows for an external canonical-to-
/// non-canonical converter.
pub fn nc_negsamp_bridge(
    nc_positives: &[BilnDocument],
    library: &MonomerLibrary,
    pool: &[PeptideSequence],
    config: &NegSampConfig,
) -> Result<BridgeOutcome, NegSampError> {
    let mapped: Vec<PeptideSequence> = nc_positives
        .iter()
        .enumerate()
        .map(|(i, doc)| {
            notation::nearest_canonical_homolog(doc, library, format!("nc{i:05}"))
        })
        .collect::<Result<_, _>>()?;
    let outcome = run_negative_sampling(pool, &mapped, config)?;
    let handoff = outcome
        .selection
        .indices
        .iter()
        .map(|&i| outcome.filtered_pool[i].residues().to_string())
        .collect();
    Ok(BridgeOutcome { mapped_positives: mapped, outcome, handoff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{validate_sequence, ValidationPolicy};
    use proptest::prelude::{prop, prop_assert, proptest, ProptestConfig};

    fn seq(s: &str, id: &str) -> PeptideSequence {
        validate_sequence(s, id, ValidationPolicy::DropRecord)
            .unwrap()
            .accepted()
            .unwrap()
    }

    fn seqs(list: &[String]) -> Vec<PeptideSequence> {
        list.iter().enumerate().map(|(i, s)| seq(s, &format!("s{i:04}"))).collect()
    }

    /// i-th canonical residue letter, cycling.
    fn letter(i: usize) -> char {
        b"ACDEFGHIKLMNPQRSTVWY"[i % 20] as char
    }

    /// Deterministic synthetic positives with varied length and composition.
    fn synthetic_positives(n: usize) -> Vec<PeptideSequence> {
        let letters = b"ACDEFGHIKLMNPQRSTVWY";
        let raw: Vec<String> = (0..n)
            .map(|i| {
                let len = 8 + (i * 7) % 18;
                (0..len)
                    .map(|j| letters[(i * 13 + j * 5 + j * j) % 20] as char)
                    .collect()
            })
            .collect();
        seqs(&raw)
    }

    /// Pool of exact copies of the positives plus far-away junk.
    fn twin_pool(positives: &[PeptideSequence], junk: usize) -> Vec<PeptideSequence> {
        let mut pool: Vec<PeptideSequence> = positives
            .iter()
            .enumerate()
            .map(|(i, p)| seq(p.residues(), &format!("twin{i:04}")))
            .collect();
        for i in 0..junk {
            let long = "W".repeat(90 + i % 5);
            pool.push(seq(&long, &format!("junk{i:04}")));
        }
        pool
    }

    #[test]
    fn overlap_ratio_cases() {
        let a = seqs(&(0..10).map(|i| format!("AAAA{}AAAA", letter(i))).collect::<Vec<_>>());
        let mut b_raw: Vec<String> = (0..19).map(|i| format!("CCCC{}CCCC", letter(i))).collect();
        b_raw.push("AAAAAAAAA".into());
        let b = seqs(&b_raw);
        let r = overlap_ratio(&a, &b).unwrap();
        assert!((r - 0.1).abs() < 1e-12);
        let disjoint = overlap_ratio(&a, &seqs(&vec!["WWWW".into()])).unwrap();
        assert_eq!(disjoint, 0.0);
        // Subset: ratio 1.
        let sub = seqs(&vec!["AAAAAAAAA".into(), "AAAABAAAA".to_string().replace('B', "A")]);
        let sup = overlap_ratio(&sub, &sub.clone()).unwrap();
        assert_eq!(sup, 1.0);
        assert_eq!(overlap_ratio(&a, &[]), Err(NegSampError::EmptySet));
    }

    #[test]
    fn build_pool_excludes_overlapping_and_expert() {
        let target = synthetic_positives(20);
        let mut overlapping: Vec<PeptideSequence> = synthetic_positives(20)[..2].to_vec();
        overlapping.extend(seqs(&(0..8).map(|i| format!("MMMM{}MMMM", letter(i))).collect::<Vec<_>>()));
        let clean = seqs(&(0..10).map(|i| format!("QQQ{}QQQ{}Q", letter(i), letter(i + 2))).collect::<Vec<_>>());
        let expert = seqs(&(0..4).map(|i| format!("EEEE{}EEEE", letter(i))).collect::<Vec<_>>());
        let datasets = vec![
            SourceDataset { name: "overlapping".into(), seqs: overlapping },
            SourceDataset { name: "clean".into(), seqs: clean },
            SourceDataset { name: "expert_excluded".into(), seqs: expert },
        ];
        let pool = build_pool(
            &datasets,
            &target,
            &["expert_excluded".into()],
            DEFAULT_OVERLAP_THRESHOLD,
            &AlignmentParams::default(),
        )
        .unwrap();
        assert_eq!(pool.excluded_datasets, vec!["overlapping", "expert_excluded"]);
        assert!(pool.members.iter().all(|m| m.source == "clean"));
    }

    #[test]
    fn build_pool_dedups_cross_source() {
        let a = SourceDataset {
            name: "a".into(),
            seqs: vec![seq("ACDEFGHIKL", "x1")],
        };
        let b = SourceDataset {
            name: "b".into(),
            seqs: vec![seq("ACDEFGHIKL", "x2"), seq("WWWWYYYYWW", "x3")],
        };
        let pool = build_pool(&[a, b], &[], &[], 0.05, &AlignmentParams::default()).unwrap();
        assert_eq!(pool.members.len(), 2);
        assert_eq!(pool.members[0].source, "a");
    }

    #[test]
    fn build_pool_all_excluded_errors() {
        let ds = SourceDataset { name: "only".into(), seqs: synthetic_positives(5) };
        assert_eq!(
            build_pool(&[ds], &[], &["only".into()], 0.05, &AlignmentParams::default()),
            Err(NegSampError::EmptyPoolAfterExclusion)
        );
    }

    #[test]
    fn js_divergence_worked_cases() {
        assert_eq!(js_divergence(&[0.25, 0.75], &[0.25, 0.75]).unwrap(), 0.0);
        assert!((js_divergence(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        let js = js_divergence(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert!((js - 0.31128).abs() < 1e-5, "got {js}");
    }

    #[test]
    fn js_divergence_errors() {
        assert_eq!(
            js_divergence(&[1.0], &[0.5, 0.5]),
            Err(NegSampError::DimensionMismatch(1, 2))
        );
        assert_eq!(js_divergence(&[0.7, 0.7], &[0.5, 0.5]), Err(NegSampError::NotNormalized));
    }

    #[test]
    fn histogram_behavior() {
        let h = feature_histogram(&[5.0, 5.0, 5.0], 30, (5.0, 5.0)).unwrap();
        assert_eq!(h[0], 1.0);
        let values: Vec<f64> = (0..300).map(|i| i as f64 / 300.0 * 30.0).collect();
        let h = feature_histogram(&values, 30, (0.0, 30.0)).unwrap();
        for &x in &h {
            assert!((x - 1.0 / 30.0).abs() < 1e-9);
        }
        assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Out-of-range clamped to the edge bins.
        let h = feature_histogram(&[-10.0, 50.0], 4, (0.0, 40.0)).unwrap();
        assert_eq!(h[0], 0.5);
        assert_eq!(h[3], 0.5);
        assert_eq!(feature_histogram(&[], 30, (0.0, 1.0)), Err(NegSampError::EmptyValues));
    }

    #[test]
    fn validate_self_is_all_zero() {
        let pos = synthetic_positives(25);
        let report = validate_distributions(&pos, &pos, &DistributionSpec::default()).unwrap();
        assert_eq!(report.length_js, 0.0);
        assert_eq!(report.charge_js, 0.0);
        assert_eq!(report.hydrophobicity_js, 0.0);
        assert_eq!(report.onemer_js, 0.0);
        assert_eq!(report.twomer_js, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn validate_disjoint_lengths_fail() {
        let pos = seqs(&(0..10).map(|i| format!("{}{}", "ACDEFGHIKL", "M".repeat(i % 3))).collect::<Vec<_>>());
        let neg = seqs(&(0..10).map(|i| "WY".repeat(40 + i % 3)).collect::<Vec<_>>());
        let report = validate_distributions(&pos, &neg, &DistributionSpec::default()).unwrap();
        assert!(report.length_js > 0.9);
        assert!(!report.pass);
    }

    #[test]
    fn every_sampler_passes_on_twin_pool() {
        // Samplers are called directly: the twin pool deliberately contains
        // exact copies that the 0.6 similarity filter would remove.
        let positives = synthetic_positives(40);
        let pool = twin_pool(&positives, 20);
        let mut spec = DistributionSpec::default();
        let pos_props = scalar_properties(&positives, spec.ph).unwrap();
        let pool_props = scalar_properties(&pool, spec.ph).unwrap();
        spec.ranges = Some(shared_ranges(&pos_props, &pool_props));
        for strategy in Strategy::ALL {
            let outcome = match strategy {
                Strategy::Bin => sample_bin_matched(&pool, &positives, 1.0, &spec, 11),
                Strategy::Kde => sample_kde_importance(&pool, &positives, 1.0, &spec, 11),
                Strategy::Mmd => sample_mmd_herding(&pool, &positives, 1.0, &spec, 11),
                Strategy::Nn => sample_nearest_neighbor(&pool, &positives, 1.0, &spec, 11),
                Strategy::Ot => sample_sinkhorn_ot(&pool, &positives, 1.0, &spec, 0.05, 4000, 11),
                Strategy::Moment => sample_moment_matched(&pool, &positives, 1.0, &spec, 11),
            }
            .unwrap();
            let negs: Vec<PeptideSequence> =
                outcome.indices.iter().map(|&i| pool[i].clone()).collect();
            let report = validate_distributions(&positives, &negs, &spec).unwrap();
            assert!(
                report.pass,
                "strategy {} failed thresholds: {report:?}",
                strategy.name()
            );
        }
    }

    #[test]
    fn samplers_are_deterministic_and_disjoint_from_positives() {
        let positives = synthetic_positives(25);
        let pool = twin_pool(&positives, 10);
        let spec = DistributionSpec::default();
        for strategy in Strategy::ALL {
            let run = |seed: u64| -> Vec<usize> {
                match strategy {
                    Strategy::Bin => sample_bin_matched(&pool, &positives, 1.0, &spec, seed),
                    Strategy::Kde => sample_kde_importance(&pool, &positives, 1.0, &spec, seed),
                    Strategy::Mmd => sample_mmd_herding(&pool, &positives, 1.0, &spec, seed),
                    Strategy::Nn => sample_nearest_neighbor(&pool, &positives, 1.0, &spec, seed),
                    Strategy::Ot => {
                        sample_sinkhorn_ot(&pool, &positives, 1.0, &spec, 0.1, 500, seed)
                    }
                    Strategy::Moment => sample_moment_matched(&pool, &positives, 1.0, &spec, seed),
                }
                .unwrap()
                .indices
            };
            let first = run(3);
            let second = run(3);
            assert_eq!(first, second, "strategy {} not deterministic", strategy.name());
            assert_eq!(first.len(), positives.len(), "size contract for {}", strategy.name());
            let unique: BTreeSet<usize> = first.iter().copied().collect();
            assert_eq!(unique.len(), first.len(), "{} reused a pool member", strategy.name());
        }
    }

    #[test]
    fn insufficient_pool_reported() {
        let positives = synthetic_positives(50);
        let pool = twin_pool(&positives, 0)[..10].to_vec();
        let spec = DistributionSpec::default();
        assert!(matches!(
            sample_bin_matched(&pool, &positives, 1.0, &spec, 0),
            Err(NegSampError::InsufficientPool { needed: 50, available: 10 })
        ));
    }

    #[test]
    fn kde_weights_peak_at_twins() {
        let positives = synthetic_positives(15);
        let pool = twin_pool(&positives, 8);
        let weights = kde_pool_weights(&pool, &positives, &DistributionSpec::default()).unwrap();
        let min_twin = weights[..15].iter().cloned().fold(f64::INFINITY, f64::min);
        let max_junk = weights[15..].iter().cloned().fold(0.0f64, f64::max);
        assert!(min_twin > max_junk, "twin {min_twin} vs junk {max_junk}");
    }

    #[test]
    fn herding_first_pick_maximizes_mean_kernel() {
        let positives = synthetic_positives(12);
        let pool = twin_pool(&positives, 6);
        let spec = DistributionSpec::default();
        // Reproduce the step-1 argmax by brute force.
        let outcome = sample_mmd_herding(&pool, &positives, 1.0 / 12.0, &spec, 0).unwrap();
        assert_eq!(outcome.indices.len(), 1);
        let space = feature_space(&pool, &positives, spec.ph).unwrap();
        let bw = median_pairwise_distance(&space.pos);
        let brute: usize = (0..pool.len())
            .max_by(|&a, &b| {
                let ma: f64 =
                    space.pos.iter().map(|p| rbf(&space.pool[a], p, bw)).sum::<f64>();
                let mb: f64 =
                    space.pos.iter().map(|p| rbf(&space.pool[b], p, bw)).sum::<f64>();
                ma.partial_cmp(&mb).unwrap().then(b.cmp(&a))
            })
            .unwrap();
        assert_eq!(outcome.indices[0], brute);
    }

    #[test]
    fn herding_on_exact_twins_reaches_zero_mmd() {
        let positives = synthetic_positives(10);
        let pool: Vec<PeptideSequence> = positives
            .iter()
            .enumerate()
            .map(|(i, p)| seq(p.residues(), &format!("t{i}")))
            .collect();
        let spec = DistributionSpec::default();
        let outcome = sample_mmd_herding(&pool, &positives, 1.0, &spec, 0).unwrap();
        let space = feature_space(&pool, &positives, spec.ph).unwrap();
        let bw = median_pairwise_distance(&space.pos);
        let sel: Vec<Vec<f64>> =
            outcome.indices.iter().map(|&i| space.pool[i].clone()).collect();
        let mmd2 = mmd_squared(&sel, &space.pos, bw);
        assert!(mmd2.abs() < 1e-9, "MMD^2 = {mmd2}");
    }

    #[test]
    fn nearest_neighbor_matches_twins() {
        let positives = synthetic_positives(10);
        let pool = twin_pool(&positives, 5);
        let outcome =
            sample_nearest_neighbor(&pool, &positives, 1.0, &DistributionSpec::default(), 7)
                .unwrap();
        let twin_indices: BTreeSet<usize> = (0..10).collect();
        let picked: BTreeSet<usize> = outcome.indices.iter().copied().collect();
        assert_eq!(picked, twin_indices);
    }

    #[test]
    fn nearest_neighbor_two_by_two_brute_force() {
        // Two positives, two pool points: the seeded order decides who picks
        // first; the result must match the order-respecting greedy.
        let positives = vec![seq("AAAAAAAA", "p0"), seq("KKKKKKKK", "p1")];
        let pool = vec![seq("AAAAAAAA", "q0"), seq("KKKKKKKK", "q1")];
        let spec = DistributionSpec::default();
        let outcome = sample_nearest_neighbor(&pool, &positives, 1.0, &spec, 5).unwrap();
        let space = feature_space(&pool, &positives, spec.ph).unwrap();
        let mut order: Vec<usize> = vec![0, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        order.shuffle(&mut rng);
        let mut used = [false; 2];
        let mut expect = Vec::new();
        for &p in &order {
            let pick = (0..2)
                .filter(|&j| !used[j])
                .min_by(|&a, &b| {
                    sq_dist(&space.pool[a], &space.pos[p])
                        .partial_cmp(&sq_dist(&space.pool[b], &space.pos[p]))
                        .unwrap()
                        .then(a.cmp(&b))
                })
                .unwrap();
            used[pick] = true;
            expect.push(pick);
        }
        assert_eq!(outcome.indices, expect);
    }

    #[test]
    fn sinkhorn_marginals_and_outer_product_limit() {
        let positives = synthetic_positives(12);
        let pool = twin_pool(&positives, 6);
        let spec = DistributionSpec::default();
        let space = feature_space(&pool, &positives, spec.ph).unwrap();
        let (plan, stats) = sinkhorn_plan(&space.pos, &space.pool, 0.1, 2000);
        assert!(stats.converged);
        assert!(stats.max_marginal_violation < 1e-6);
        let (n, m) = (space.pos.len(), space.pool.len());
        // Large epsilon: plan approaches the outer product of marginals.
        let (plan_big, _) = sinkhorn_plan(&space.pos, &space.pool, 1e4, 2000);
        let uniform = 1.0 / (n as f64 * m as f64);
        for &x in &plan_big {
            assert!((x - uniform).abs() < 1e-3 * uniform.max(1.0), "entry {x} vs {uniform}");
        }
        drop(plan);
    }

    #[test]
    fn sinkhorn_small_epsilon_selects_twins() {
        let positives = synthetic_positives(10);
        let pool = twin_pool(&positives, 6);
        let outcome = sample_sinkhorn_ot(
            &pool,
            &positives,
            1.0,
            &DistributionSpec::default(),
            0.01,
            4000,
            0,
        )
        .unwrap();
        let picked: BTreeSet<usize> = outcome.indices.iter().copied().collect();
        assert_eq!(picked, (0..10).collect::<BTreeSet<usize>>());
    }

    #[test]
    fn moment_matching_reaches_zero_on_forced_twins() {
        let positives = synthetic_positives(12);
        let pool: Vec<PeptideSequence> = positives
            .iter()
            .enumerate()
            .map(|(i, p)| seq(p.residues(), &format!("t{i}")))
            .collect();
        let outcome =
            sample_moment_matched(&pool, &positives, 1.0, &DistributionSpec::default(), 9)
                .unwrap();
        assert_eq!(outcome.indices.len(), 12);
    }

    #[test]
    fn select_best_prefers_passing_then_diverse() {
        let positives = synthetic_positives(20);
        let pool = twin_pool(&positives, 10);
        let spec = DistributionSpec::default();
        let twin_set: Vec<usize> = (0..20).collect();
        let junk_heavy: Vec<usize> = (10..30).collect();
        let selection = select_best(
            &[(Strategy::Bin, twin_set.clone()), (Strategy::Kde, junk_heavy)],
            &pool,
            &positives,
            &spec,
            DIVERSITY_LAMBDA,
        )
        .unwrap();
        assert_eq!(selection.strategy, "bin");
        assert!(selection.pass);
        // Identical candidates: tie broken by strategy name.
        let tie = select_best(
            &[(Strategy::Nn, twin_set.clone()), (Strategy::Bin, twin_set)],
            &pool,
            &positives,
            &spec,
            DIVERSITY_LAMBDA,
        )
        .unwrap();
        assert_eq!(tie.strategy, "bin");
    }

    #[test]
    fn select_best_fallback_flags_failure() {
        let positives = seqs(&(0..10).map(|i| format!("AC{}DEFAC", letter(i))).collect::<Vec<_>>());
        let junk = seqs(&(0..10).map(|i| "W".repeat(60 + i)).collect::<Vec<_>>());
        let indices: Vec<usize> = (0..10).collect();
        let selection = select_best(
            &[(Strategy::Bin, indices)],
            &junk,
            &positives,
            &DistributionSpec::default(),
            DIVERSITY_LAMBDA,
        )
        .unwrap();
        assert!(!selection.pass);
    }

    #[test]
    fn expand_pool_tops_up_bins() {
        let positives: Vec<PeptideSequence> =
            seqs(&(0..5).map(|i| format!("ACDEFGHIK{}", letter(i))).collect::<Vec<_>>());
        let pool: Vec<PeptideSequence> =
            seqs(&(0..2).map(|i| format!("MNPQRSTVW{}", letter(i + 1))).collect::<Vec<_>>());
        // Externals of matching length 10, composition-distinct from positives.
        let external: Vec<PeptideSequence> = (0..200)
            .map(|i| {
                let c1 = letter(i % 20);
                let c2 = letter((i / 20) % 20);
                seq(&format!("QQ{c1}{c2}MMPP{c1}{c2}"), &format!("ext{i:03}"))
            })
            .collect();
        let out =
            expand_pool_external(&pool, &positives, &external, 10, &DistributionSpec::default())
                .unwrap();
        // Toward 50 for the single active bin, bounded by distinct externals.
        assert!(out.added.len() >= 30, "added {}", out.added.len());
        // Already covered: nothing added.
        let covered: Vec<PeptideSequence> = external[..60].to_vec();
        let out2 = expand_pool_external(
            &covered,
            &positives,
            &external[60..],
            10,
            &DistributionSpec::default(),
        )
        .unwrap();
        assert!(out2.added.len() <= 3, "near-covered bin expanded by {}", out2.added.len());
    }

    #[test]
    fn expand_pool_rejects_near_positives() {
        let positives = vec![seq("ACDEFGHIKL", "p0")];
        let pool: Vec<PeptideSequence> = Vec::new();
        let external = vec![
            seq("ACDEFGHIKL", "e0"), // exact positive: filtered at 0.6
            seq("WWYYWWYYWW", "e1"),
        ];
        let out =
            expand_pool_external(&pool, &positives, &external, 10, &DistributionSpec::default())
                .unwrap();
        assert_eq!(out.added, vec![1]);
    }

    #[test]
    fn ppi_shuffle_basics() {
        let positives: Vec<(String, String)> = (0..10)
            .map(|i| (format!("PEP{i}"), format!("PROT{i}")))
            .collect();
        let negs = ppi_shuffle_negatives(&positives, 5, 3).unwrap();
        assert_eq!(negs.len(), 50);
        let pos_set: BTreeSet<(String, String)> = positives.into_iter().collect();
        for pair in &negs {
            assert!(!pos_set.contains(pair));
        }
        let unique: BTreeSet<&(String, String)> = negs.iter().collect();
        assert_eq!(unique.len(), negs.len());
    }

    #[test]
    fn ppi_shuffle_exhaustion() {
        let positives = vec![("PEP".to_string(), "PROT".to_string())];
        assert!(matches!(
            ppi_shuffle_negatives(&positives, 5, 0),
            Err(NegSampError::ExhaustedCombinations { .. })
        ));
    }

    #[test]
    fn ppi_shuffle_deterministic() {
        let positives: Vec<(String, String)> =
            (0..6).map(|i| (format!("PEP{i}"), format!("PROT{}", 5 - i))).collect();
        assert_eq!(
            ppi_shuffle_negatives(&positives, 3, 9).unwrap(),
            ppi_shuffle_negatives(&positives, 3, 9).unwrap()
        );
    }

    #[test]
    fn nc_bridge_maps_and_hands_off() {
        let lib = MonomerLibrary::default_library();
        let docs: Vec<BilnDocument> = ["[meA]-K-K", "A-K-[dK]", "G-G-K", "K-[Nle]-K", "A-[Orn]-G"]
            .iter()
            .map(|t| notation::parse_biln(t).unwrap())
            .collect();
        let mapped_expect = ["AKK", "AKK", "GGK", "KLK", "AKG"];
        let pool: Vec<PeptideSequence> = (0..40)
            .map(|i| {
                let fill = letter(i % 20);
                seq(&format!("{}K{}", fill, fill), &format!("pl{i}"))
            })
            .collect();
        let config = NegSampConfig {
            strategies: vec![Strategy::Bin, Strategy::Nn],
            ..Default::default()
        };
        let bridge = nc_negsamp_bridge(&docs, &lib, &pool, &config).unwrap();
        let got: Vec<&str> = bridge.mapped_positives.iter().map(|s| s.residues()).collect();
        assert_eq!(got, mapped_expect);
        assert_eq!(bridge.handoff.len(), bridge.outcome.selection.indices.len());
    }

    #[test]
    fn nc_bridge_missing_homolog() {
        let lib = MonomerLibrary::default_library();
        let docs = vec![notation::parse_biln("[ac]-A").unwrap()];
        let pool = synthetic_positives(10);
        assert!(matches!(
            nc_negsamp_bridge(&docs, &lib, &pool, &NegSampConfig::default()),
            Err(NegSampError::Notation(notation::NotationError::MissingHomolog(_)))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn js_symmetric_bounded_zero_iff_equal(
            raw_p in prop::collection::vec(0.01f64..1.0, 4),
            raw_q in prop::collection::vec(0.01f64..1.0, 4),
        ) {
            let norm = |v: &[f64]| -> Vec<f64> {
                let s: f64 = v.iter().sum();
                v.iter().map(|x| x / s).collect()
            };
            let p = norm(&raw_p);
            let q = norm(&raw_q);
            let pq = js_divergence(&p, &q).unwrap();
            let qp = js_divergence(&q, &p).unwrap();
            prop_assert!((pq - qp).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&pq));
            prop_assert!((js_divergence(&p, &p).unwrap()).abs() < 1e-12);
            if pq < 1e-15 {
                for (a, b) in p.iter().zip(&q) {
                    prop_assert!((a - b).abs() < 1e-6);
                }
            }
        }
    }
}

//! Pairwise identity, identity clustering, redundancy removal, similarity
//! filtering, isolation sweeps, and IQR label aggregation.
//!
//! Identity semantics: global alignment with match +1 / mismatch -1 / gap -2,
//! identity = identical residues / shorter length, coverage = aligned
//! (non-gap) columns / sequence length. A pair "links" when identity and
//! coverage clear the configured thresholds. Clusters are the connected
//! components of the linking relation, which is what makes near-duplicate
//! fans with a weak middle member come out as one cluster; the representative
//! is the longest member (ties broken by lexicographically smaller sequence).
//!
//! A composition bound (shared residue multiset / shorter length) is used to
//! skip alignments that provably cannot reach the identity threshold; it
//! never changes results.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seqcore::PeptideSequence;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CleanseError {
    #[error("sequence {0} aggregates labels with inconsistent units")]
    MixedUnits(String),
    #[error("no values to aggregate")]
    NoValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    /// Both sequences must reach the coverage threshold.
    Both,
    /// Only the longer sequence must reach it.
    Longer,
}

/// Identity/coverage thresholds for linking decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentParams {
    pub min_seq_id: f64,
    pub min_cov: f64,
    pub cov_mode: CoverageMode,
}

impl Default for AlignmentParams {
    fn default() -> Self {
        // The redundancy-removal regime: 90% identity, 90% coverage of both.
        AlignmentParams { min_seq_id: 0.9, min_cov: 0.9, cov_mode: CoverageMode::Both }
    }
}

impl AlignmentParams {
    pub fn with_identity(self, min_seq_id: f64) -> Self {
        AlignmentParams { min_seq_id, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentResult {
    pub score: i32,
    /// Identical aligned residue pairs. Ambiguity codes never count.
    pub identical: usize,
    /// identical / shorter length.
    pub identity: f64,
    /// Aligned (match or mismatch) column count.
    pub aligned_columns: usize,
    pub cov_query: f64,
    pub cov_target: f64,
}

const GAP: i32 = -2;
const MATCH: i32 = 1;
const MISMATCH: i32 = -1;

fn residues_match(a: u8, b: u8) -> bool {
    a == b && a != b'X'
}

#[derive(Clone, Copy)]
struct Cell {
    score: i32,
    identical: u32,
    columns: u32,
}

/// Global alignment of two sequences. Symmetric: `align_pair(a, b)` equals
/// `align_pair(b, a)` with query/target coverage swapped.
///
/// Ties between equal-score alignments are broken diagonal-first, then up,
/// then left; the per-cell statistics follow that same preferred path, so a
/// rolling two-row pass reproduces the traceback counts exactly.
pub fn align_pair(a: &PeptideSequence, b: &PeptideSequence) -> AlignmentResult {
    // Canonical internal order keeps tie-broken paths symmetric.
    let swap = (b.len(), b.residues()) < (a.len(), a.residues());
    let (q, t) = if swap { (b, a) } else { (a, b) };
    let qb = q.bytes();
    let tb = t.bytes();
    let (n, m) = (qb.len(), tb.len());

    let mut prev: Vec<Cell> = (0..=m)
        .map(|j| Cell { score: j as i32 * GAP, identical: 0, columns: 0 })
        .collect();
    let mut curr = prev.clone();
    for i in 1..=n {
        curr[0] = Cell { score: i as i32 * GAP, identical: 0, columns: 0 };
        let qc = qb[i - 1];
        for j in 1..=m {
            let matched = residues_match(qc, tb[j - 1]);
            let sub = if matched { MATCH } else { MISMATCH };
            let diag = prev[j - 1].score + sub;
            let up = prev[j].score + GAP;
            let left = curr[j - 1].score + GAP;
            let best = diag.max(up).max(left);
            curr[j] = if best == diag {
                Cell {
                    score: best,
                    identical: prev[j - 1].identical + matched as u32,
                    columns: prev[j - 1].columns + 1,
                }
            } else if best == up {
                Cell { score: best, ..prev[j] }
            } else {
                Cell { score: best, ..curr[j - 1] }
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    let end = prev[m];

    let shorter = n.min(m).max(1);
    let aligned_columns = end.columns as usize;
    let (cov_q, cov_t) = (
        aligned_columns as f64 / n.max(1) as f64,
        aligned_columns as f64 / m.max(1) as f64,
    );
    let (cov_query, cov_target) = if swap { (cov_t, cov_q) } else { (cov_q, cov_t) };
    AlignmentResult {
        score: end.score,
        identical: end.identical as usize,
        identity: end.identical as f64 / shorter as f64,
        aligned_columns,
        cov_query,
        cov_target,
    }
}

/// Per-sequence residue counts for the alignment-skipping bound.
fn residue_counts(seq: &PeptideSequence) -> [u16; 26] {
    let mut counts = [0u16; 26];
    for &c in seq.bytes() {
        counts[(c - b'A') as usize] += 1;
    }
    counts
}

fn identity_upper_bound(a: &[u16; 26], b: &[u16; 26], min_len: usize) -> f64 {
    let mut shared = 0u32;
    for c in 0..26 {
        if c != (b'X' - b'A') as usize {
            shared += a[c].min(b[c]) as u32;
        }
    }
    shared as f64 / min_len.max(1) as f64
}

fn coverage_ok(r: &AlignmentResult, a_len: usize, b_len: usize, params: &AlignmentParams) -> bool {
    match params.cov_mode {
        CoverageMode::Both => r.cov_query >= params.min_cov && r.cov_target >= params.min_cov,
        CoverageMode::Longer => {
            let cov_longer = if a_len >= b_len { r.cov_query } else { r.cov_target };
            cov_longer >= params.min_cov
        }
    }
}

/// True when the pair clears the identity and coverage thresholds.
pub fn pair_links(a: &PeptideSequence, b: &PeptideSequence, params: &AlignmentParams) -> bool {
    // Cheap exact rejections before aligning.
    let min_len = a.len().min(b.len());
    let max_len = a.len().max(b.len());
    if (min_len as f64 / max_len as f64) < params.min_cov {
        return false;
    }
    let (ca, cb) = (residue_counts(a), residue_counts(b));
    if identity_upper_bound(&ca, &cb, min_len) < params.min_seq_id {
        return false;
    }
    let r = align_pair(a, b);
    r.identity >= params.min_seq_id && coverage_ok(&r, a.len(), b.len(), params)
}

/// Disjoint sets over record indices; the smaller root wins so component
/// ids are stable across union orders.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    pub fn union(&mut self, x: usize, y: usize) {
        let rx = self.find(x);
        let ry = self.find(y);
        if rx != ry {
            let (lo, hi) = (rx.min(ry), rx.max(ry));
            self.parent[hi] = lo;
        }
    }

    /// Components as sorted member lists, ordered by smallest member.
    pub fn components(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut id_of_root = std::collections::BTreeMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let root = self.find(i);
            let id = *id_of_root.entry(root).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[id].push(i);
        }
        out
    }
}

/// Unions every linking pair admitted by `consider` into `union`. Pairs
/// already in one component are skipped, which never changes the final
/// partition. The composition bound skips alignments that provably cannot
/// reach the identity threshold.
pub fn union_identity_links<F>(
    seqs: &[PeptideSequence],
    params: &AlignmentParams,
    consider: F,
    union: &mut UnionFind,
) where
    F: Fn(usize, usize) -> bool + Sync,
{
    let n = seqs.len();
    let counts: Vec<[u16; 26]> = seqs.iter().map(residue_counts).collect();
    for i in 0..n {
        let root_i = union.find(i);
        let candidates: Vec<usize> = (i + 1..n)
            .filter(|&j| consider(i, j) && union.find(j) != root_i)
            .collect();
        let linked: Vec<usize> = candidates
            .into_par_iter()
            .filter(|&j| {
                let min_len = seqs[i].len().min(seqs[j].len());
                let max_len = seqs[i].len().max(seqs[j].len());
                if (min_len as f64 / max_len as f64) < params.min_cov {
                    return false;
                }
                if identity_upper_bound(&counts[i], &counts[j], min_len) < params.min_seq_id {
                    return false;
                }
                let r = align_pair(&seqs[i], &seqs[j]);
                r.identity >= params.min_seq_id
                    && coverage_ok(&r, seqs[i].len(), seqs[j].len(), params)
            })
            .collect();
        for j in linked {
            union.union(i, j);
        }
    }
}

/// Clustering outcome: cluster ids are dense, ordered by each cluster's
/// smallest member index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub cluster_of: Vec<usize>,
    /// One member index per cluster.
    pub representatives: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

impl ClusterAssignment {
    pub fn n_clusters(&self) -> usize {
        self.members.len()
    }

    pub fn singleton_ratio(&self) -> f64 {
        if self.cluster_of.is_empty() {
            return 0.0;
        }
        let singles = self.members.iter().filter(|m| m.len() == 1).count();
        singles as f64 / self.cluster_of.len() as f64
    }
}

/// Groups sequences into connected components of the linking relation and
/// picks the longest member (ties: lexicographically smallest sequence) as
/// each cluster's representative. Order-independent: permuting the input
/// permutes members but yields the same partition.
pub fn cluster_by_identity(
    seqs: &[PeptideSequence],
    params: &AlignmentParams,
) -> ClusterAssignment {
    let n = seqs.len();
    let mut uf = UnionFind::new(n);
    union_identity_links(seqs, params, |_, _| true, &mut uf);
    let members = uf.components();
    let mut cluster_of = vec![usize::MAX; n];
    for (cid, member_list) in members.iter().enumerate() {
        for &i in member_list {
            cluster_of[i] = cid;
        }
    }
    let representatives = members
        .iter()
        .map(|m| {
            *m.iter()
                .min_by_key(|&&i| (std::cmp::Reverse(seqs[i].len()), seqs[i].residues()))
                .expect("non-empty cluster")
        })
        .collect();
    ClusterAssignment { cluster_of, representatives, members }
}

/// Keeps one representative per cluster; returned indices are ascending.
pub fn remove_redundancy(seqs: &[PeptideSequence], params: &AlignmentParams) -> Vec<usize> {
    let mut reps = cluster_by_identity(seqs, params).representatives;
    reps.sort_unstable();
    reps
}

/// Drops pool members that link to any positive at the (lowered) identity
/// threshold. Returns the retained pool indices, ascending.
pub fn filter_similar_to(
    pool: &[PeptideSequence],
    positives: &[PeptideSequence],
    params: &AlignmentParams,
) -> Vec<usize> {
    (0..pool.len())
        .into_par_iter()
        .filter(|&i| !positives.iter().any(|p| pair_links(&pool[i], p, params)))
        .collect::<Vec<_>>()
}

/// Singleton-cluster ratio at each identity threshold, same coverage rules.
pub fn isolation_sweep(
    seqs: &[PeptideSequence],
    thresholds: &[f64],
    base: &AlignmentParams,
) -> Vec<(f64, f64)> {
    thresholds
        .iter()
        .map(|&t| {
            let assignment = cluster_by_identity(seqs, &base.with_identity(t));
            (t, assignment.singleton_ratio())
        })
        .collect()
}

/// IQR fence outcome for one duplicate group.
#[derive(Debug, Clone, PartialEq)]
pub struct IqrOutcome {
    pub kept: Vec<f64>,
    pub removed: Vec<f64>,
    pub mean: f64,
}

/// Quartile by linear interpolation between order statistics:
/// position h = (n - 1) * p, value = x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]).
fn quartile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Removes values outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR] and averages the rest.
/// The median is always inside the fence, so the kept set is never empty.
pub fn iqr_aggregate(values: &[f64]) -> Result<IqrOutcome, CleanseError> {
    if values.is_empty() {
        return Err(CleanseError::NoValues);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite labels"));
    let q1 = quartile(&sorted, 0.25);
    let q3 = quartile(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for &v in values {
        if v >= lo && v <= hi {
            kept.push(v);
        } else {
            removed.push(v);
        }
    }
    let mean = kept.iter().sum::<f64>() / kept.len() as f64;
    Ok(IqrOutcome { kept, removed, mean })
}

/// One measurement row of a regression dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub sequence: String,
    pub value: f64,
    pub unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatedRecord {
    pub sequence: String,
    pub n_measurements: usize,
    pub n_removed: usize,
    pub final_label: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub records: Vec<AggregatedRecord>,
    pub total_measurements: usize,
    pub outliers_removed: usize,
    pub unique_sequences: usize,
}

/// Groups measurements by exact sequence (first-seen order), applies the IQR
/// fence per group, and reports per-dataset counts.
pub fn aggregate_duplicates(records: &[Measurement]) -> Result<AggregateReport, CleanseError> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: std::collections::HashMap<&str, Vec<&Measurement>> =
        std::collections::HashMap::new();
    for r in records {
        let entry = groups.entry(&r.sequence).or_default();
        if entry.is_empty() {
            order.push(&r.sequence);
        }
        entry.push(r);
    }
    let mut out = Vec::with_capacity(order.len());
    let mut outliers_removed = 0;
    for seq in order {
        let group = &groups[seq];
        let unit = &group[0].unit;
        if group.iter().any(|m| &m.unit != unit) {
            return Err(CleanseError::MixedUnits(seq.to_string()));
        }
        let values: Vec<f64> = group.iter().map(|m| m.value).collect();
        let outcome = iqr_aggregate(&values)?;
        outliers_removed += outcome.removed.len();
        out.push(AggregatedRecord {
            sequence: seq.to_string(),
            n_measurements: values.len(),
            n_removed: outcome.removed.len(),
            final_label: outcome.mean,
        });
    }
    Ok(AggregateReport {
        total_measurements: records.len(),
        outliers_removed,
        unique_sequences: out.len(),
        records: out,
    })
}

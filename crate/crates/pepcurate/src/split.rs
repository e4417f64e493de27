//! Dataset splitting: random, k-mer-aware, identity-clustered, hybrid,
//! fingerprint-component, and protein cold-start strategies, plus an
//! independent leakage auditor.
//!
//! Cluster allocation: clusters are shuffled by seed, stably sorted by size
//! descending, and each is assigned whole to the partition with the greatest
//! remaining deficit against its target count (ties: train, then valid, then
//! test). A cluster larger than its target lands in train with a warning
//! rather than failing.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cleanse::{cluster_by_identity, pair_links, AlignmentParams};
use crate::enrich::MotifCluster;
use crate::fingerprint::{tanimoto, Fingerprint};
use crate::seqcore::PeptideSequence;

pub const DEFAULT_IDENTITY_SPLIT_THRESHOLD: f64 = 0.3;
pub const DEFAULT_ECFP_TAU: f64 = 0.95;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplitError {
    #[error("fractions must be non-negative and sum to 1 (got {0}, {1}, {2})")]
    BadFractions(f64, f64, f64),
    #[error("fingerprint widths differ")]
    WidthMismatch,
    #[error("no records to split")]
    EmptyDataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    Train,
    Valid,
    Test,
}

impl Partition {
    pub const ALL: [Partition; 3] = [Partition::Train, Partition::Valid, Partition::Test];

    pub fn name(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Valid => "valid",
            Partition::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitParams {
    pub frac_train: f64,
    pub frac_valid: f64,
    pub frac_test: f64,
    pub seed: u64,
}

impl Default for SplitParams {
    fn default() -> Self {
        SplitParams { frac_train: 0.8, frac_valid: 0.1, frac_test: 0.1, seed: 0 }
    }
}

impl SplitParams {
    pub fn validate(&self) -> Result<(), SplitError> {
        let fr = [self.frac_train, self.frac_valid, self.frac_test];
        let sum: f64 = fr.iter().sum();
        if fr.iter().any(|&f| f < 0.0) || self.frac_train <= 0.0 || (sum - 1.0).abs() > 1e-9 {
            return Err(SplitError::BadFractions(self.frac_train, self.frac_valid, self.frac_test));
        }
        Ok(())
    }

    fn targets(&self, n: usize) -> [f64; 3] {
        [self.frac_train * n as f64, self.frac_valid * n as f64, self.frac_test * n as f64]
    }
}

/// A partition of records with per-record provenance for auditing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub partitions: Vec<Partition>,
    /// Cluster (or component) id each record was allocated with.
    pub cluster_ids: Vec<usize>,
    pub strategy: String,
    pub warnings: Vec<String>,
}

impl SplitAssignment {
    pub fn counts(&self) -> [usize; 3] {
        let mut counts = [0usize; 3];
        for p in &self.partitions {
            counts[*p as usize] += 1;
        }
        counts
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    /// Largest cluster size, the granularity bound on achieved fractions.
    pub fn largest_cluster(&self) -> usize {
        let mut sizes = std::collections::BTreeMap::new();
        for &cid in &self.cluster_ids {
            *sizes.entry(cid).or_insert(0usize) += 1;
        }
        sizes.values().copied().max().unwrap_or(0)
    }
}

/// Deficit-driven whole-cluster allocation shared by every cluster strategy.
fn allocate_clusters(
    n: usize,
    clusters: Vec<Vec<usize>>,
    params: &SplitParams,
    strategy: &str,
    cluster_id_offset: usize,
    assigned_so_far: &mut [f64; 3],
    out_partitions: &mut [Partition],
    out_cluster_ids: &mut [usize],
    warnings: &mut Vec<String>,
) {
    let targets = params.targets(n);
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    order.shuffle(&mut rng);
    order.sort_by_key(|&c| std::cmp::Reverse(clusters[c].len()));

    for (rank, &c) in order.iter().enumerate() {
        let members = &clusters[c];
        let chosen = Partition::ALL
            .into_iter()
            .max_by(|&x, &y| {
                let dx = targets[x as usize] - assigned_so_far[x as usize];
                let dy = targets[y as usize] - assigned_so_far[y as usize];
                dx.partial_cmp(&dy).unwrap().then(y.cmp(&x))
            })
            .unwrap();
        let deficit = targets[chosen as usize] - assigned_so_far[chosen as usize];
        if members.len() as f64 > deficit.max(0.0) + 0.5 && members.len() > n / 2 {
            warnings.push(format!(
                "{strategy}: cluster of {} records exceeds every partition target; \
                 allocated to {}",
                members.len(),
                chosen.name()
            ));
        }
        assigned_so_far[chosen as usize] += members.len() as f64;
        for &r in members {
            out_partitions[r] = chosen;
            out_cluster_ids[r] = cluster_id_offset + rank;
        }
    }
}

fn assignment_from_clusters(
    n: usize,
    clusters: Vec<Vec<usize>>,
    params: &SplitParams,
    strategy: &str,
) -> Result<SplitAssignment, SplitError> {
    params.validate()?;
    let mut partitions = vec![Partition::Train; n];
    let mut cluster_ids = vec![0usize; n];
    let mut warnings = Vec::new();
    let mut assigned = [0.0f64; 3];
    allocate_clusters(
        n, clusters, params, strategy, 0, &mut assigned, &mut partitions, &mut cluster_ids,
        &mut warnings,
    );
    Ok(SplitAssignment { partitions, cluster_ids, strategy: strategy.into(), warnings })
}

/// Seeded shuffle with sizes rounded to the nearest count; train absorbs the
/// remainder. Every record is its own singleton cluster.
pub fn random_split(n: usize, params: &SplitParams) -> Result<SplitAssignment, SplitError> {
    params.validate()?;
    if n == 0 {
        return Err(SplitError::EmptyDataset);
    }
    let n_valid = (params.frac_valid * n as f64).round() as usize;
    let n_test = (params.frac_test * n as f64).round() as usize;
    if n_valid + n_test > n {
        return Err(SplitError::BadFractions(
            params.frac_train,
            params.frac_valid,
            params.frac_test,
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    order.shuffle(&mut rng);
    let mut partitions = vec![Partition::Train; n];
    for &r in order.iter().take(n_valid) {
        partitions[r] = Partition::Valid;
    }
    for &r in order.iter().skip(n_valid).take(n_test) {
        partitions[r] = Partition::Test;
    }
    Ok(SplitAssignment {
        partitions,
        cluster_ids: (0..n).collect(),
        strategy: "random".into(),
        warnings: vec![],
    })
}

use crate::cleanse::{union_identity_links, UnionFind};

/// Indices of records containing any of the cluster's k-mers.
fn records_with_motif(records: &[PeptideSequence], cluster: &MotifCluster) -> Vec<usize> {
    records
        .par_iter()
        .enumerate()
        .filter(|(_, r)| cluster.kmers.iter().any(|k| r.residues().contains(k.as_str())))
        .map(|(i, _)| i)
        .collect()
}

fn motif_components(records: &[PeptideSequence], motif_clusters: &[MotifCluster]) -> UnionFind {
    let mut uf = UnionFind::new(records.len());
    for cluster in motif_clusters {
        let hits = records_with_motif(records, cluster);
        for w in hits.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    uf
}

/// Records sharing an enriched motif are joined into one component and the
/// components are allocated whole, so no enriched motif spans partitions.
/// Motif-free records become singleton components.
pub fn kmer_split(
    records: &[PeptideSequence],
    motif_clusters: &[MotifCluster],
    params: &SplitParams,
) -> Result<SplitAssignment, SplitError> {
    let clusters = motif_components(records, motif_clusters).components();
    assignment_from_clusters(records.len(), clusters, params, "kmer")
}

/// Identity clusters (connected components of the linking relation at the
/// given threshold) allocated whole.
pub fn identity_split(
    records: &[PeptideSequence],
    identity_threshold: f64,
    params: &SplitParams,
) -> Result<SplitAssignment, SplitError> {
    let align = AlignmentParams::default().with_identity(identity_threshold);
    let clusters = cluster_by_identity(records, &align).members;
    assignment_from_clusters(records.len(), clusters, params, "identity")
}

/// Motif components are allocated first; motif-free records are
/// identity-clustered and topped up toward the target fractions.
///
/// Identity links are honored for every pair with at least one motif-free
/// endpoint: a motif-free record linking into a motif component joins that
/// component, so no identity-linked pair involving a motif-free record can
/// cross partitions. With no motifs this reduces exactly to
/// [`identity_split`]; when every record bears a motif it reduces exactly to
/// [`kmer_split`]. Links between motif-bearing records of two different
/// motif components are the one case not enforced (the motif constraint
/// already pins those records); the auditor reports them when they occur.
pub fn hybrid_split(
    records: &[PeptideSequence],
    motif_clusters: &[MotifCluster],
    identity_threshold: f64,
    params: &SplitParams,
) -> Result<SplitAssignment, SplitError> {
    params.validate()?;
    let n = records.len();
    let mut uf = motif_components(records, motif_clusters);
    let motif_bearing: Vec<bool> = {
        let mut flags = vec![false; n];
        for cluster in motif_clusters {
            for i in records_with_motif(records, cluster) {
                flags[i] = true;
            }
        }
        flags
    };
    let align = AlignmentParams::default().with_identity(identity_threshold);
    union_identity_links(
        records,
        &align,
        |i, j| !(motif_bearing[i] && motif_bearing[j]),
        &mut uf,
    );
    let (stage1, stage2): (Vec<Vec<usize>>, Vec<Vec<usize>>) = uf
        .components()
        .into_iter()
        .partition(|comp| comp.iter().any(|&i| motif_bearing[i]));

    let mut partitions = vec![Partition::Train; n];
    let mut cluster_ids = vec![0usize; n];
    let mut warnings = Vec::new();
    let mut assigned = [0.0f64; 3];
    let stage1_count = stage1.len();
    allocate_clusters(
        n, stage1, params, "hybrid", 0, &mut assigned, &mut partitions, &mut cluster_ids,
        &mut warnings,
    );
    allocate_clusters(
        n, stage2, params, "hybrid", stage1_count, &mut assigned, &mut partitions,
        &mut cluster_ids, &mut warnings,
    );

    Ok(SplitAssignment { partitions, cluster_ids, strategy: "hybrid".into(), warnings })
}

/// Connected components of the Tanimoto similarity graph at threshold `tau`,
/// allocated whole.
pub fn ecfp_split(
    fingerprints: &[Fingerprint],
    tau: f64,
    params: &SplitParams,
) -> Result<SplitAssignment, SplitError> {
    let n = fingerprints.len();
    if n == 0 {
        return Err(SplitError::EmptyDataset);
    }
    if fingerprints.iter().any(|f| f.width() != fingerprints[0].width()) {
        return Err(SplitError::WidthMismatch);
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).filter_map(move |j| {
                let s = tanimoto(&fingerprints[i], &fingerprints[j]).expect("checked widths");
                (s >= tau).then_some((i, j))
            })
        })
        .collect();
    let mut uf = UnionFind::new(n);
    for (i, j) in edges {
        uf.union(i, j);
    }
    assignment_from_clusters(n, uf.components(), params, "ecfp")
}

/// Peptide-protein pairs partitioned so that no protein (nor any protein in
/// its identity cluster) appears in more than one partition. Protein
/// clusters are weighted by their pair counts during allocation.
pub fn cold_start_split(
    pairs: &[(PeptideSequence, PeptideSequence)],
    protein_identity_threshold: f64,
    params: &SplitParams,
) -> Result<SplitAssignment, SplitError> {
    params.validate()?;
    if pairs.is_empty() {
        return Err(SplitError::EmptyDataset);
    }
    let mut unique: Vec<&PeptideSequence> = Vec::new();
    let mut protein_of: Vec<usize> = Vec::with_capacity(pairs.len());
    for (_, protein) in pairs {
        let idx = unique
            .iter()
            .position(|p| p.residues() == protein.residues())
            .unwrap_or_else(|| {
                unique.push(protein);
                unique.len() - 1
            });
        protein_of.push(idx);
    }
    let protein_seqs: Vec<PeptideSequence> = unique.iter().map(|&p| p.clone()).collect();
    let align = AlignmentParams::default().with_identity(protein_identity_threshold);
    let protein_clusters = cluster_by_identity(&protein_seqs, &align);

    // Record-level clusters grouped by protein cluster.
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); protein_clusters.n_clusters()];
    for (rec, &p) in protein_of.iter().enumerate() {
        clusters[protein_clusters.cluster_of[p]].push(rec);
    }
    let mut assignment = assignment_from_clusters(pairs.len(), clusters, params, "cold_start")?;
    if protein_clusters.n_clusters() == 1 {
        assignment
            .warnings
            .push("cold_start: a single protein cluster covers the whole dataset".into());
    }
    Ok(assignment)
}

/// One enriched motif observed in more than one partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifViolation {
    pub kmer: String,
    pub partitions: Vec<String>,
}

/// A cross-partition pair linking at the identity threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityViolation {
    pub id_a: String,
    pub id_b: String,
    pub identity: f64,
}

/// A cross-partition fingerprint pair at or above tau.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityViolation {
    pub id_a: String,
    pub id_b: String,
    pub similarity: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub motif_violations: Vec<MotifViolation>,
    pub identity_violations: Vec<IdentityViolation>,
    pub similarity_violations: Vec<SimilarityViolation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.motif_violations.is_empty()
            && self.identity_violations.is_empty()
            && self.similarity_violations.is_empty()
    }

    pub fn total(&self) -> usize {
        self.motif_violations.len()
            + self.identity_violations.len()
            + self.similarity_violations.len()
    }
}

/// Independent check of a finished split: reports enriched motifs spanning
/// partitions, cross-partition identity links, and (when fingerprints are
/// supplied) cross-partition Tanimoto pairs at or above tau.
pub fn audit_leakage(
    records: &[PeptideSequence],
    assignment: &SplitAssignment,
    enriched_kmers: &[String],
    identity_threshold: f64,
    fingerprints: Option<(&[Fingerprint], f64)>,
) -> AuditReport {
    assert_eq!(records.len(), assignment.partitions.len());
    let mut report = AuditReport::default();

    for kmer in enriched_kmers {
        let mut seen: Vec<&'static str> = Vec::new();
        for (i, r) in records.iter().enumerate() {
            if r.residues().contains(kmer.as_str()) {
                let name = assignment.partitions[i].name();
                if !seen.contains(&name) {
                    seen.push(name);
                }
            }
        }
        if seen.len() >= 2 {
            seen.sort_unstable();
            report.motif_violations.push(MotifViolation {
                kmer: kmer.clone(),
                partitions: seen.iter().map(|s| s.to_string()).collect(),
            });
        }
    }

    let align = AlignmentParams::default().with_identity(identity_threshold);
    let n = records.len();
    let mut id_violations: Vec<IdentityViolation> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let align = align;
            (i + 1..n).filter_map(move |j| {
                if assignment.partitions[i] == assignment.partitions[j] {
                    return None;
                }
                if !pair_links(&records[i], &records[j], &align) {
                    return None;
                }
                let r = crate::cleanse::align_pair(&records[i], &records[j]);
                Some(IdentityViolation {
                    id_a: records[i].id().to_string(),
                    id_b: records[j].id().to_string(),
                    identity: r.identity,
                })
            })
        })
        .collect();
    id_violations.sort_by(|a, b| (&a.id_a, &a.id_b).cmp(&(&b.id_a, &b.id_b)));
    report.identity_violations = id_violations;

    if let Some((fps, tau)) = fingerprints {
        assert_eq!(fps.len(), records.len());
        let mut sim_violations: Vec<SimilarityViolation> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                (i + 1..n).filter_map(move |j| {
                    if assignment.partitions[i] == assignment.partitions[j] {
                        return None;
                    }
                    let s = tanimoto(&fps[i], &fps[j]).ok()?;
                    (s >= tau).then(|| SimilarityViolation {
                        id_a: records[i].id().to_string(),
                        id_b: records[j].id().to_string(),
                        similarity: s,
                    })
                })
            })
            .collect();
        sim_violations.sort_by(|a, b| (&a.id_a, &a.id_b).cmp(&(&b.id_a, &b.id_b)));
        report.similarity_violations = sim_violations;
    }
    report
}

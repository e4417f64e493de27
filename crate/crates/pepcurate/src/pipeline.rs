//! Configuration, run manifest, and stage orchestration
//! (clean -> negsamp -> split -> audit -> stats).
//!
//! `PipelineConfig::default()` carries the standard parameter set: 0.9/0.9
//! redundancy removal, 0.6 positive-similarity filtering, 8:1:1 fractions,
//! 0.3 identity-split threshold, tau 0.95 for fingerprint components, 30-bin
//! JS validation at 0.2/0.2/0.2/0.05/0.15, enrichment gates alpha 0.05 /
//! min_score 4.0 / min_support 5 / min_pos 3 / min_jaccard 0.6 with FDR on,
//! and 10x external coverage.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cleanse::{self, AlignmentParams, Measurement};
use crate::enrich::{self, EnrichmentParams, MotifHit};
use crate::fingerprint::{self, Fingerprint};
use crate::io::{self, IoError, RawRecord};
use crate::negsamp::{self, DistributionSpec, NegSampConfig, SourceDataset, Strategy};
use crate::notation::{self, MonomerLibrary};
use crate::seqcore::{self, Label, PeptideSequence, Validated, ValidationPolicy};
use crate::split::{self, AuditReport, SplitAssignment, SplitParams};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("stage produced an empty result: {0}")]
    Empty(String),
    #[error(transparent)]
    NegSamp(#[from] negsamp::NegSampError),
    #[error(transparent)]
    Split(#[from] split::SplitError),
    #[error(transparent)]
    Enrich(#[from] enrich::EnrichError),
    #[error(transparent)]
    Cleanse(#[from] cleanse::CleanseError),
    #[error(transparent)]
    Notation(#[from] notation::NotationError),
    #[error("sequence {id}: {source}")]
    Sequence {
        id: String,
        #[source]
        source: seqcore::SeqError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    Classification,
    Regression,
    Ppi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeptideType {
    Canonical,
    NonCanonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitStrategy {
    Random,
    Kmer,
    Identity,
    Hybrid,
    Ecfp,
    ColdStart,
}

impl SplitStrategy {
    pub fn name(self) -> &'static str {
        match self {
            SplitStrategy::Random => "random",
            SplitStrategy::Kmer => "kmer",
            SplitStrategy::Identity => "identity",
            SplitStrategy::Hybrid => "hybrid",
            SplitStrategy::Ecfp => "ecfp",
            SplitStrategy::ColdStart => "cold_start",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub strategy: SplitStrategy,
    pub frac_train: f64,
    pub frac_valid: f64,
    pub frac_test: f64,
    pub identity_threshold: f64,
    pub tau: f64,
    pub protein_identity_threshold: f64,
    /// Number of seeded repeat splits to emit (seed, seed+1, ...).
    pub repeats: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            strategy: SplitStrategy::Hybrid,
            frac_train: 0.8,
            frac_valid: 0.1,
            frac_test: 0.1,
            identity_threshold: split::DEFAULT_IDENTITY_SPLIT_THRESHOLD,
            tau: split::DEFAULT_ECFP_TAU,
            protein_identity_threshold: 0.3,
            repeats: 1,
        }
    }
}

impl SplitConfig {
    pub fn params(&self, seed: u64) -> SplitParams {
        SplitParams {
            frac_train: self.frac_train,
            frac_valid: self.frac_valid,
            frac_test: self.frac_test,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NegSampSettings {
    pub ratio: f64,
    pub bins: usize,
    pub scalar_threshold: f64,
    pub onemer_threshold: f64,
    pub twomer_threshold: f64,
    pub similarity_filter_identity: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub diversity_lambda: f64,
    /// Per-length-bin external coverage multiple.
    pub coverage: usize,
    pub strategies: Vec<Strategy>,
    pub ppi_ratio: usize,
}

impl Default for NegSampSettings {
    fn default() -> Self {
        NegSampSettings {
            ratio: 1.0,
            bins: 30,
            scalar_threshold: 0.2,
            onemer_threshold: 0.05,
            twomer_threshold: 0.15,
            similarity_filter_identity: 0.6,
            epsilon: 0.1,
            max_iters: 1000,
            diversity_lambda: negsamp::DIVERSITY_LAMBDA,
            coverage: 10,
            strategies: Strategy::ALL.to_vec(),
            ppi_ratio: 5,
        }
    }
}

impl NegSampSettings {
    pub fn distribution_spec(&self, ph: f64) -> DistributionSpec {
        DistributionSpec {
            bins: self.bins,
            scalar_threshold: self.scalar_threshold,
            onemer_threshold: self.onemer_threshold,
            twomer_threshold: self.twomer_threshold,
            ph,
            ranges: None,
        }
    }

    pub fn config(&self, seed: u64, ph: f64) -> NegSampConfig {
        NegSampConfig {
            ratio: self.ratio,
            spec: self.distribution_spec(ph),
            seed,
            strategies: self.strategies.clone(),
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            similarity_filter_identity: self.similarity_filter_identity,
            diversity_lambda: self.diversity_lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoolConfig {
    pub overlap_threshold: f64,
    /// Extra dataset names excluded by hand.
    pub expert_exclusions: Vec<String>,
    /// Mechanistically related activity groups: if the target dataset is a
    /// member, the rest of its group is excluded from the pool.
    pub exclusion_groups: BTreeMap<String, Vec<String>>,
    pub target_dataset: Option<String>,
}

impl Default for PoolConfig {
    fn default() -> Self {
        let mut groups = BTreeMap::new();
        groups.insert(
            "membrane_interaction".to_string(),
            ["antimicrobial", "antibacterial", "antifungal", "antiviral", "anticancer",
                "hemolytic", "transmembrane"]
                .map(String::from)
                .to_vec(),
        );
        groups.insert(
            "glucose_regulating".to_string(),
            ["dppiv_inhibitors", "antidiabetic", "antioxidant", "antiinflamatory"]
                .map(String::from)
                .to_vec(),
        );
        groups.insert(
            "neuroactive".to_string(),
            ["neuropeptide", "neurotoxin", "bbp"].map(String::from).to_vec(),
        );
        PoolConfig {
            overlap_threshold: negsamp::DEFAULT_OVERLAP_THRESHOLD,
            expert_exclusions: Vec::new(),
            exclusion_groups: groups,
            target_dataset: None,
        }
    }
}

impl PoolConfig {
    /// Expert exclusions expanded with the target dataset's activity group.
    pub fn effective_exclusions(&self) -> Vec<String> {
        let mut out = self.expert_exclusions.clone();
        if let Some(target) = &self.target_dataset {
            for members in self.exclusion_groups.values() {
                if members.contains(target) {
                    for m in members {
                        if m != target && !out.contains(m) {
                            out.push(m.clone());
                        }
                    }
                }
            }
            if !out.contains(target) {
                out.push(target.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FingerprintSettings {
    pub radius: u32,
    pub width: usize,
}

impl Default for FingerprintSettings {
    fn default() -> Self {
        FingerprintSettings { radius: fingerprint::DEFAULT_RADIUS, width: fingerprint::DEFAULT_WIDTH }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub task_type: TaskType,
    pub peptide_type: PeptideType,
    pub seed: u64,
    /// Maximum retained residue count (the 50- and 150-length regimes).
    pub max_len: usize,
    pub validation_policy: ValidationPolicy,
    /// pH for the net-charge feature.
    pub ph: f64,
    pub dedup: AlignmentParams,
    pub pool: PoolConfig,
    pub negsamp: NegSampSettings,
    pub enrich: EnrichmentParams,
    pub split: SplitConfig,
    pub fingerprint: FingerprintSettings,
    /// Monomer library CSV; the built-in library when absent.
    pub monomer_library: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            task_type: TaskType::Classification,
            peptide_type: PeptideType::Canonical,
            seed: 0,
            max_len: 150,
            validation_policy: ValidationPolicy::DropRecord,
            ph: 7.0,
            dedup: AlignmentParams::default(),
            pool: PoolConfig::default(),
            negsamp: NegSampSettings::default(),
            enrich: EnrichmentParams::default(),
            split: SplitConfig::default(),
            fingerprint: FingerprintSettings::default(),
            monomer_library: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_json_path(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::Parse(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| PipelineError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf29ce484222325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }

    pub fn library(&self) -> Result<MonomerLibrary, PipelineError> {
        Ok(match &self.monomer_library {
            Some(path) => MonomerLibrary::from_csv_path(path)?,
            None => MonomerLibrary::default_library(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub input_count: usize,
    pub output_count: usize,
    pub warnings: Vec<String>,
}

/// Reproducibility record updated by every stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
}

impl RunManifest {
    pub fn load_or_new(out_dir: &Path, config: &PipelineConfig) -> Self {
        let path = out_dir.join("manifest.json");
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(manifest) = serde_json::from_str::<RunManifest>(&text) {
                if manifest.config_hash == config.hash() {
                    return manifest;
                }
            }
        }
        RunManifest { config_hash: config.hash(), seed: config.seed, stages: Vec::new() }
    }

    pub fn record(
        &mut self,
        name: &str,
        input_count: usize,
        output_count: usize,
        warnings: Vec<String>,
    ) {
        self.stages.retain(|s| s.name != name);
        self.stages.push(StageRecord {
            name: name.to_string(),
            input_count,
            output_count,
            warnings,
        });
    }

    pub fn save(&self, out_dir: &Path) -> Result<(), PipelineError> {
        fs::create_dir_all(out_dir)
            .map_err(|e| PipelineError::Parse(format!("{}: {e}", out_dir.display())))?;
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(out_dir.join("manifest.json"), text + "\n")
            .map_err(|e| PipelineError::Parse(e.to_string()))?;
        Ok(())
    }
}

/// A validated, length-filtered labeled record.
#[derive(Debug, Clone, PartialEq)]
pub struct CuratedRecord {
    pub seq: PeptideSequence,
    pub label: Label,
    pub source: String,
    /// Raw notation text when the record came in as BILN.
    pub notation: Option<String>,
    pub protein: Option<PeptideSequence>,
}

/// Validates raw rows into curated records, honoring the ambiguity policy
/// and the maximum length. Dropped rows are counted, not errors.
pub fn validate_records(
    rows: &[RawRecord],
    config: &PipelineConfig,
) -> Result<(Vec<CuratedRecord>, usize), PipelineError> {
    let mut out = Vec::with_capacity(rows.len());
    let mut dropped = 0usize;
    let is_biln = config.peptide_type == PeptideType::NonCanonical;
    let library = if is_biln { Some(config.library()?) } else { None };
    for (i, row) in rows.iter().enumerate() {
        let id = format!("r{i:06}");
        let label = parse_label(&row.label, config.task_type)
            .ok_or_else(|| PipelineError::Parse(format!("row {}: bad label {:?}", i + 2, row.label)))?;
        let (seq, notation_text) = if is_biln {
            let doc = notation::parse_biln(&row.sequence)?;
            if let Some(lib) = &library {
                for chain in &doc.chains {
                    for symbol in chain {
                        if lib.get(symbol).is_none() {
                            return Err(PipelineError::Notation(
                                notation::NotationError::UnknownMonomer(symbol.clone()),
                            ));
                        }
                    }
                }
            }
            (notation::collapse_noncanonical(&doc, id.clone()), Some(row.sequence.clone()))
        } else {
            match seqcore::validate_sequence(&row.sequence, id.clone(), config.validation_policy)
            {
                Ok(Validated::Accepted(seq)) => (seq, None),
                Ok(Validated::Dropped { .. }) => {
                    dropped += 1;
                    continue;
                }
                Err(e) => return Err(PipelineError::Sequence { id, source: e }),
            }
        };
        if seq.len() > config.max_len {
            dropped += 1;
            continue;
        }
        let protein = match &row.protein {
            Some(text) => match seqcore::validate_sequence(
                text,
                format!("{id}_prot"),
                config.validation_policy,
            ) {
                Ok(Validated::Accepted(p)) => Some(p),
                Ok(Validated::Dropped { .. }) => {
                    dropped += 1;
                    continue;
                }
                Err(e) => return Err(PipelineError::Sequence { id, source: e }),
            },
            None => None,
        };
        out.push(CuratedRecord {
            seq,
            label,
            source: row.source.clone().unwrap_or_default(),
            notation: notation_text,
            protein,
        });
    }
    Ok((out, dropped))
}

fn parse_label(text: &str, task: TaskType) -> Option<Label> {
    match task {
        TaskType::Classification | TaskType::Ppi => match text {
            "0" => Some(Label::Binary(0)),
            "1" => Some(Label::Binary(1)),
            _ => None,
        },
        TaskType::Regression => {
            let v: f64 = text.parse().ok()?;
            v.is_finite().then(|| Label::Real { value: v, unit: None })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CleanCounts {
    pub total: usize,
    pub dropped_invalid: usize,
    pub removed: usize,
    pub kept: usize,
    pub filt_ratio: f64,
}

pub struct CleanOutcome {
    pub records: Vec<CuratedRecord>,
    pub counts: CleanCounts,
    pub warnings: Vec<String>,
    /// Per-class clustering used for redundancy removal (classification):
    /// (class label, clustered sequences, assignment).
    pub class_clusters: Vec<(u8, Vec<PeptideSequence>, cleanse::ClusterAssignment)>,
    /// IQR aggregation report (regression).
    pub outlier_report: Option<cleanse::AggregateReport>,
}

/// Data-cleaning stage: redundancy removal per class for classification,
/// IQR duplicate aggregation for regression, validation only for PPI.
pub fn stage_clean(
    rows: &[RawRecord],
    config: &PipelineConfig,
) -> Result<CleanOutcome, PipelineError> {
    let (records, dropped) = validate_records(rows, config)?;
    if records.is_empty() {
        return Err(PipelineError::Empty("no valid records after validation".into()));
    }
    match config.task_type {
        TaskType::Classification => {
            let mut kept_records = Vec::new();
            let mut removed = 0usize;
            let mut class_clusters = Vec::new();
            for class in [1u8, 0u8] {
                let class_records: Vec<&CuratedRecord> = records
                    .iter()
                    .filter(|r| r.label.as_binary() == Some(class))
                    .collect();
                if class_records.is_empty() {
                    continue;
                }
                let seqs: Vec<PeptideSequence> =
                    class_records.iter().map(|r| r.seq.clone()).collect();
                let assignment = cleanse::cluster_by_identity(&seqs, &config.dedup);
                let mut kept = assignment.representatives.clone();
                kept.sort_unstable();
                removed += seqs.len() - kept.len();
                kept_records.extend(kept.into_iter().map(|i| class_records[i].clone()));
                class_clusters.push((class, seqs, assignment));
            }
            let counts = CleanCounts {
                total: rows.len(),
                dropped_invalid: dropped,
                removed,
                kept: kept_records.len(),
                filt_ratio: removed as f64 / records.len().max(1) as f64,
            };
            Ok(CleanOutcome {
                records: kept_records,
                counts,
                warnings: vec![],
                class_clusters,
                outlier_report: None,
            })
        }
        TaskType::Regression => {
            let measurements: Vec<Measurement> = records
                .iter()
                .map(|r| Measurement {
                    sequence: r.seq.residues().to_string(),
                    value: r.label.as_real().expect("regression labels"),
                    unit: None,
                })
                .collect();
            let report = cleanse::aggregate_duplicates(&measurements)?;
            let out_records: Vec<CuratedRecord> = report
                .records
                .iter()
                .enumerate()
                .map(|(i, a)| CuratedRecord {
                    seq: PeptideSequence::from_validated(format!("u{i:06}"), &a.sequence),
                    label: Label::Real { value: a.final_label, unit: None },
                    source: String::new(),
                    notation: None,
                    protein: None,
                })
                .collect();
            let counts = CleanCounts {
                total: rows.len(),
                dropped_invalid: dropped,
                removed: report.outliers_removed,
                kept: report.unique_sequences,
                filt_ratio: report.outliers_removed as f64 / report.total_measurements as f64,
            };
            Ok(CleanOutcome {
                records: out_records,
                counts,
                warnings: vec![],
                class_clusters: vec![],
                outlier_report: Some(report),
            })
        }
        TaskType::Ppi => {
            let counts = CleanCounts {
                total: rows.len(),
                dropped_invalid: dropped,
                removed: 0,
                kept: records.len(),
                filt_ratio: 0.0,
            };
            Ok(CleanOutcome {
                records,
                counts,
                warnings: vec![],
                class_clusters: vec![],
                outlier_report: None,
            })
        }
    }
}

pub struct NegsampOutcome {
    pub negatives: Vec<(PeptideSequence, String)>,
    pub strategy: String,
    pub report: negsamp::JsReport,
    pub pass: bool,
    pub scoreboard: Vec<negsamp::StrategyScore>,
    pub warnings: Vec<String>,
}

/// Negative-sampling stage: pool construction with exclusions, optional external
/// expansion, similarity filtering, all samplers, and candidate selection.
pub fn stage_negsamp(
    positives: &[PeptideSequence],
    datasets: &[SourceDataset],
    external: Option<&[PeptideSequence]>,
    config: &PipelineConfig,
) -> Result<NegsampOutcome, PipelineError> {
    let exclusions = config.pool.effective_exclusions();
    let pool = negsamp::build_pool(
        datasets,
        positives,
        &exclusions,
        config.pool.overlap_threshold,
        &config.dedup,
    )?;
    let mut pool_seqs = pool.seqs();
    let mut pool_sources: Vec<String> =
        pool.members.iter().map(|m| m.source.clone()).collect();
    let mut warnings = pool.warnings.clone();

    if let Some(external) = external {
        let spec = config.negsamp.distribution_spec(config.ph);
        let expansion = negsamp::expand_pool_external(
            &pool_seqs,
            positives,
            external,
            config.negsamp.coverage,
            &spec,
        )?;
        warnings.extend(expansion.warnings.iter().cloned());
        for &i in &expansion.added {
            pool_seqs.push(external[i].clone());
            pool_sources.push("external".to_string());
        }
    }

    let ns_config = config.negsamp.config(config.seed, config.ph);
    let outcome = negsamp::run_negative_sampling(&pool_seqs, positives, &ns_config)?;
    warnings.extend(outcome.warnings.iter().cloned());

    // Map filtered-pool indices back to sources by sequence text.
    let source_of: BTreeMap<&str, &str> = pool_seqs
        .iter()
        .zip(&pool_sources)
        .map(|(s, src)| (s.residues(), src.as_str()))
        .collect();
    let negatives: Vec<(PeptideSequence, String)> = outcome
        .selection
        .indices
        .iter()
        .map(|&i| {
            let seq = outcome.filtered_pool[i].clone();
            let source = source_of.get(seq.residues()).copied().unwrap_or("").to_string();
            (seq, source)
        })
        .collect();
    Ok(NegsampOutcome {
        negatives,
        strategy: outcome.selection.strategy.clone(),
        report: outcome.selection.report,
        pass: outcome.selection.pass,
        scoreboard: outcome.selection.scoreboard,
        warnings,
    })
}

pub struct SplitOutcome {
    pub assignment: SplitAssignment,
    pub enriched_kmers: Vec<String>,
    pub audit: AuditReport,
    pub fingerprints: Option<Vec<Fingerprint>>,
}

/// Splitting stage: runs the configured strategy and audits the result.
pub fn stage_split(
    records: &[CuratedRecord],
    config: &PipelineConfig,
    seed: u64,
) -> Result<SplitOutcome, PipelineError> {
    if records.is_empty() {
        return Err(PipelineError::Empty("no records to split".into()));
    }
    let seqs: Vec<PeptideSequence> = records.iter().map(|r| r.seq.clone()).collect();
    let params = config.split.params(seed);

    let motif_clusters = || -> Result<Vec<enrich::MotifCluster>, PipelineError> {
        let pos: Vec<PeptideSequence> = records
            .iter()
            .filter(|r| r.label.as_binary() == Some(1))
            .map(|r| r.seq.clone())
            .collect();
        let neg: Vec<PeptideSequence> = records
            .iter()
            .filter(|r| r.label.as_binary() == Some(0))
            .map(|r| r.seq.clone())
            .collect();
        let hits = enrich::find_enriched_kmers(&pos, &neg, &config.enrich)?;
        Ok(enrich::merge_motifs(&hits, config.enrich.min_jaccard))
    };

    let mut fingerprints = None;
    let mut enriched_kmers: Vec<String> = Vec::new();
    let assignment = match config.split.strategy {
        SplitStrategy::Random => split::random_split(seqs.len(), &params)?,
        SplitStrategy::Kmer => {
            let clusters = motif_clusters()?;
            enriched_kmers =
                clusters.iter().flat_map(|c| c.kmers.iter().cloned()).collect();
            split::kmer_split(&seqs, &clusters, &params)?
        }
        SplitStrategy::Identity => {
            split::identity_split(&seqs, config.split.identity_threshold, &params)?
        }
        SplitStrategy::Hybrid => {
            let clusters = motif_clusters()?;
            enriched_kmers =
                clusters.iter().flat_map(|c| c.kmers.iter().cloned()).collect();
            split::hybrid_split(&seqs, &clusters, config.split.identity_threshold, &params)?
        }
        SplitStrategy::Ecfp => {
            let library = config.library()?;
            let fps: Vec<Fingerprint> = records
                .iter()
                .map(|r| -> Result<Fingerprint, PipelineError> {
                    let text = r.notation.as_deref().ok_or_else(|| {
                        PipelineError::Parse(
                            "ecfp split needs notation input (non-canonical records)".into(),
                        )
                    })?;
                    let doc = notation::parse_biln(text)?;
                    let graph = notation::assemble_molecule(&doc, &library)?;
                    fingerprint::morgan_fingerprint(
                        &graph,
                        config.fingerprint.radius,
                        config.fingerprint.width,
                    )
                    .map_err(|e| PipelineError::Parse(e.to_string()))
                })
                .collect::<Result<_, _>>()?;
            let assignment = split::ecfp_split(&fps, config.split.tau, &params)?;
            fingerprints = Some(fps);
            assignment
        }
        SplitStrategy::ColdStart => {
            let pairs: Vec<(PeptideSequence, PeptideSequence)> = records
                .iter()
                .map(|r| {
                    let protein = r.protein.clone().ok_or_else(|| {
                        PipelineError::Parse("cold-start split needs a protein column".into())
                    })?;
                    Ok((r.seq.clone(), protein))
                })
                .collect::<Result<_, PipelineError>>()?;
            split::cold_start_split(&pairs, config.split.protein_identity_threshold, &params)?
        }
    };

    let audit = split::audit_leakage(
        &seqs,
        &assignment,
        &enriched_kmers,
        config.split.identity_threshold,
        fingerprints.as_ref().map(|f| (f.as_slice(), config.split.tau)),
    );
    Ok(SplitOutcome { assignment, enriched_kmers, audit, fingerprints })
}

/// Enrichment stage over a labeled classification dataset.
pub fn stage_enrich(
    records: &[CuratedRecord],
    config: &PipelineConfig,
) -> Result<Vec<MotifHit>, PipelineError> {
    let pos: Vec<PeptideSequence> = records
        .iter()
        .filter(|r| r.label.as_binary() == Some(1))
        .map(|r| r.seq.clone())
        .collect();
    let neg: Vec<PeptideSequence> = records
        .iter()
        .filter(|r| r.label.as_binary() == Some(0))
        .map(|r| r.seq.clone())
        .collect();
    Ok(enrich::find_enriched_kmers(&pos, &neg, &config.enrich)?)
}

/// Per-class length counts, residue frequencies, and property histograms;
/// the data behind class-balance distribution figures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsTables {
    pub lengths: Vec<(usize, usize, usize)>,
    pub aa_freq: Vec<(char, f64, f64)>,
    pub properties: Vec<PropertyHistRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyHistRow {
    pub property: String,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub frac_pos: f64,
    pub frac_neg: f64,
}

pub fn stage_stats(
    records: &[CuratedRecord],
    config: &PipelineConfig,
) -> Result<StatsTables, PipelineError> {
    if records.is_empty() {
        return Err(PipelineError::Empty("no records for stats".into()));
    }
    let class_of = |r: &CuratedRecord| -> usize {
        match r.label.as_binary() {
            Some(1) => 0,
            Some(0) => 1,
            _ => 0,
        }
    };
    let mut length_counts: BTreeMap<usize, [usize; 2]> = BTreeMap::new();
    let mut aa_counts = [[0u64; 26]; 2];
    let mut aa_totals = [0u64; 2];
    for r in records {
        let class = class_of(r);
        length_counts.entry(r.seq.len()).or_default()[class] += 1;
        for &b in r.seq.bytes() {
            aa_counts[class][(b - b'A') as usize] += 1;
            aa_totals[class] += 1;
        }
    }
    let lengths: Vec<(usize, usize, usize)> =
        length_counts.into_iter().map(|(l, [p, n])| (l, p, n)).collect();
    let aa_freq: Vec<(char, f64, f64)> = (0..26)
        .filter(|&i| aa_counts[0][i] + aa_counts[1][i] > 0)
        .map(|i| {
            let freq = |class: usize| {
                if aa_totals[class] == 0 {
                    0.0
                } else {
                    aa_counts[class][i] as f64 / aa_totals[class] as f64
                }
            };
            ((b'A' + i as u8) as char, freq(0), freq(1))
        })
        .collect();

    // Property histograms on canonical records only.
    let mut properties = Vec::new();
    let canonical: Vec<&CuratedRecord> =
        records.iter().filter(|r| !r.seq.has_ambiguity()).collect();
    if !canonical.is_empty() {
        let spec = config.negsamp.distribution_spec(config.ph);
        let mut values: [Vec<Vec<f64>>; 2] = [vec![vec![]; 4], vec![vec![]; 4]];
        for r in &canonical {
            let class = class_of(r);
            let props = seqcore::property_vector(&r.seq, config.ph)
                .map_err(|e| PipelineError::Sequence { id: r.seq.id().into(), source: e })?;
            values[class][0].push(props.length as f64);
            values[class][1].push(props.net_charge);
            values[class][2].push(props.hydrophobicity);
            values[class][3].push(props.isoelectric_point);
        }
        let names = ["length", "net_charge", "hydrophobicity", "isoelectric_point"];
        for (k, name) in names.iter().enumerate() {
            let all: Vec<f64> =
                values[0][k].iter().chain(values[1][k].iter()).copied().collect();
            if all.is_empty() {
                continue;
            }
            let lo = all.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = all.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let hist = |vals: &[f64]| -> Vec<f64> {
                if vals.is_empty() {
                    vec![0.0; spec.bins]
                } else {
                    negsamp::feature_histogram(vals, spec.bins, (lo, hi)).expect("non-empty")
                }
            };
            let hp = hist(&values[0][k]);
            let hn = hist(&values[1][k]);
            let step = if hi > lo { (hi - lo) / spec.bins as f64 } else { 1.0 };
            for b in 0..spec.bins {
                properties.push(PropertyHistRow {
                    property: name.to_string(),
                    bin_lo: lo + b as f64 * step,
                    bin_hi: lo + (b + 1) as f64 * step,
                    frac_pos: hp[b],
                    frac_neg: hn[b],
                });
            }
        }
    }
    Ok(StatsTables { lengths, aa_freq, properties })
}

pub fn write_stats(out_dir: &Path, tables: &StatsTables) -> Result<(), PipelineError> {
    fs::create_dir_all(out_dir).map_err(|e| PipelineError::Parse(e.to_string()))?;
    let mut text = String::from("length,count_pos,count_neg\n");
    for (l, p, n) in &tables.lengths {
        text.push_str(&format!("{l},{p},{n}\n"));
    }
    fs::write(out_dir.join("stats_length.csv"), text)
        .map_err(|e| PipelineError::Parse(e.to_string()))?;

    let mut text = String::from("residue,freq_pos,freq_neg\n");
    for (c, p, n) in &tables.aa_freq {
        text.push_str(&format!("{c},{p},{n}\n"));
    }
    fs::write(out_dir.join("stats_aa.csv"), text)
        .map_err(|e| PipelineError::Parse(e.to_string()))?;

    let mut text = String::from("property,bin_lo,bin_hi,frac_pos,frac_neg\n");
    for row in &tables.properties {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            row.property, row.bin_lo, row.bin_hi, row.frac_pos, row.frac_neg
        ));
    }
    fs::write(out_dir.join("stats_properties.csv"), text)
        .map_err(|e| PipelineError::Parse(e.to_string()))?;
    Ok(())
}

/// Summary of a complete classification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub cleaned: usize,
    pub negatives: usize,
    pub negative_strategy: String,
    pub js_pass: bool,
    pub split_counts: [usize; 3],
    pub audit_violations: usize,
}

/// The full classification pipeline: clean -> negsamp -> hybrid split ->
/// audit -> stats, writing every stage artifact under `out_dir`.
pub fn run_classification_pipeline(
    positive_rows: &[RawRecord],
    datasets: &[SourceDataset],
    external: Option<&[PeptideSequence]>,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<PipelineSummary, PipelineError> {
    let mut manifest = RunManifest::load_or_new(out_dir, config);

    let clean = stage_clean(positive_rows, config)?;
    let positives: Vec<PeptideSequence> =
        clean.records.iter().map(|r| r.seq.clone()).collect();
    manifest.record("clean", positive_rows.len(), positives.len(), clean.warnings.clone());
    io::write_labeled_csv(
        &out_dir.join("cleaned.csv"),
        &clean
            .records
            .iter()
            .map(|r| (r.seq.residues().to_string(), "1".to_string(), r.source.clone()))
            .collect::<Vec<_>>(),
    )?;

    let ns = stage_negsamp(&positives, datasets, external, config)?;
    manifest.record("negsamp", positives.len(), ns.negatives.len(), ns.warnings.clone());
    io::write_labeled_csv(
        &out_dir.join("negatives.csv"),
        &ns.negatives
            .iter()
            .map(|(s, src)| (s.residues().to_string(), "0".to_string(), src.clone()))
            .collect::<Vec<_>>(),
    )?;
    io::write_js_report_json(&out_dir.join("js_report.json"), &ns.report)?;

    let mut combined: Vec<CuratedRecord> = clean.records.clone();
    combined.extend(ns.negatives.iter().enumerate().map(|(i, (s, src))| CuratedRecord {
        seq: PeptideSequence::from_validated(format!("n{i:06}"), s.residues()),
        label: Label::Binary(0),
        source: src.clone(),
        notation: None,
        protein: None,
    }));

    let split_out = stage_split(&combined, config, config.seed)?;
    manifest.record(
        "split",
        combined.len(),
        combined.len(),
        split_out.assignment.warnings.clone(),
    );
    let ids: Vec<String> = combined.iter().map(|r| r.seq.id().to_string()).collect();
    io::write_split_csv(&out_dir.join("split.csv"), &ids, &split_out.assignment)?;
    io::write_audit_json(&out_dir.join("audit.json"), &split_out.audit)?;

    let stats = stage_stats(&combined, config)?;
    manifest.record("stats", combined.len(), combined.len(), vec![]);
    write_stats(out_dir, &stats)?;

    manifest.save(out_dir)?;
    Ok(PipelineSummary {
        cleaned: positives.len(),
        negatives: ns.negatives.len(),
        negative_strategy: ns.strategy,
        js_pass: ns.pass,
        split_counts: split_out.assignment.counts(),
        audit_violations: split_out.audit.total(),
    })
}

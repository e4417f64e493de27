//! File formats: FASTA and labeled-CSV readers, and the report writers the
//! pipeline stages emit.

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::cleanse::{AggregateReport, AlignmentParams, ClusterAssignment};
use crate::enrich::MotifHit;
use crate::fingerprint::Fingerprint;
use crate::negsamp::JsReport;
use crate::seqcore::PeptideSequence;
use crate::split::{AuditReport, SplitAssignment};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
}

impl IoError {
    pub fn format(path: &Path, line: usize, message: impl Into<String>) -> Self {
        IoError::Format {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.display().to_string(), source }
    }
}

/// Reads FASTA records (`>id` header, sequence possibly split over lines).
pub fn read_fasta(path: &Path) -> Result<Vec<(String, String)>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_fasta(&text, path)
}

fn parse_fasta(text: &str, path: &Path) -> Result<Vec<(String, String)>, IoError> {
    let mut records: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            if id.is_empty() {
                return Err(IoError::format(path, lineno + 1, "empty FASTA header"));
            }
            records.push((id, String::new()));
        } else {
            match records.last_mut() {
                Some((_, seq)) => seq.push_str(line),
                None => {
                    return Err(IoError::format(path, lineno + 1, "sequence before any header"))
                }
            }
        }
    }
    if let Some((id, seq)) = records.iter().find(|(_, s)| s.is_empty()) {
        let _ = seq;
        return Err(IoError::format(path, 0, format!("record {id} has no sequence")));
    }
    Ok(records)
}

/// One row of a labeled dataset CSV. The `protein` column is present only in
/// peptide-protein interaction files.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub sequence: String,
    pub label: String,
    pub source: Option<String>,
    pub protein: Option<String>,
}

/// Reads `sequence,label[,source]` (header required). A `protein` column
/// between `sequence` and `label` carries peptide-protein pairs.
pub fn read_labeled_csv(path: &Path) -> Result<Vec<RawRecord>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| IoError::format(path, 0, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| IoError::format(path, 1, e.to_string()))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    let col = |name: &str| names.iter().position(|&h| h == name);
    let seq_col = col("sequence")
        .ok_or_else(|| IoError::format(path, 1, "missing required column 'sequence'"))?;
    let label_col = col("label")
        .ok_or_else(|| IoError::format(path, 1, "missing required column 'label'"))?;
    let source_col = col("source");
    let protein_col = col("protein");

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IoError::format(path, i + 2, e.to_string()))?;
        let get = |c: usize| record.get(c).unwrap_or("").trim().to_string();
        out.push(RawRecord {
            sequence: get(seq_col),
            label: get(label_col),
            source: source_col.map(get).filter(|s| !s.is_empty()),
            protein: protein_col.map(get).filter(|s| !s.is_empty()),
        });
    }
    Ok(out)
}

fn create(path: &Path) -> Result<fs::File, IoError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| IoError::io(path, e))?;
        }
    }
    fs::File::create(path).map_err(|e| IoError::io(path, e))
}

pub fn write_labeled_csv(
    path: &Path,
    rows: &[(String, String, String)],
) -> Result<(), IoError> {
    let mut f = create(path)?;
    writeln!(f, "sequence,label,source").map_err(|e| IoError::io(path, e))?;
    for (seq, label, source) in rows {
        writeln!(f, "{seq},{label},{source}").map_err(|e| IoError::io(path, e))?;
    }
    Ok(())
}

/// `record_id, cluster_id, representative_id, identity_to_rep` rows.
pub fn write_cluster_tsv(
    path: &Path,
    seqs: &[PeptideSequence],
    assignment: &ClusterAssignment,
) -> Result<(), IoError> {
    let mut f = create(path)?;
    writeln!(f, "record_id\tcluster_id\trepresentative_id\tidentity_to_rep")
        .map_err(|e| IoError::io(path, e))?;
    for (i, seq) in seqs.iter().enumerate() {
        let cid = assignment.cluster_of[i];
        let rep = assignment.representatives[cid];
        let identity = if rep == i {
            1.0
        } else {
            crate::cleanse::align_pair(seq, &seqs[rep]).identity
        };
        writeln!(f, "{}\t{}\t{}\t{:.4}", seq.id(), cid, seqs[rep].id(), identity)
            .map_err(|e| IoError::io(path, e))?;
    }
    Ok(())
}

/// `sequence, n_measurements, n_removed, final_label` rows.
pub fn write_outlier_csv(path: &Path, report: &AggregateReport) -> Result<(), IoError> {
    let mut f = create(path)?;
    writeln!(f, "sequence,n_measurements,n_removed,final_label")
        .map_err(|e| IoError::io(path, e))?;
    for r in &report.records {
        writeln!(f, "{},{},{},{}", r.sequence, r.n_measurements, r.n_removed, r.final_label)
            .map_err(|e| IoError::io(path, e))?;
    }
    Ok(())
}

/// Enrichment report; the leading comment documents the merge semantics.
pub fn write_enrichment_csv(path: &Path, hits: &[MotifHit]) -> Result<(), IoError> {
    let mut f = create(path)?;
    writeln!(
        f,
        "# motif merging: single-linkage on support-set Jaccard; support = positive record indices"
    )
    .map_err(|e| IoError::io(path, e))?;
    writeln!(f, "kmer,a,b,c,d,p,q,odds,support_size").map_err(|e| IoError::io(path, e))?;
    for h in hits {
        writeln!(
            f,
            "{},{},{},{},{},{:e},{:e},{},{}",
            h.kmer, h.table.a, h.table.b, h.table.c, h.table.d, h.p, h.q, h.odds,
            h.support.len()
        )
        .map_err(|e| IoError::io(path, e))?;
    }
    Ok(())
}

/// `record_id, partition, cluster_id, strategy` rows.
pub fn write_split_csv(
    path: &Path,
    ids: &[String],
    assignment: &SplitAssignment,
) -> Result<(), IoError> {
    let mut f = create(path)?;
    writeln!(f, "record_id,partition,cluster_id,strategy").map_err(|e| IoError::io(path, e))?;
    for (i, id) in ids.iter().enumerate() {
        writeln!(
            f,
            "{},{},{},{}",
            id,
            assignment.partitions[i].name(),
            assignment.cluster_ids[i],
            assignment.strategy
        )
        .map_err(|e| IoError::io(path, e))?;
    }
    Ok(())
}

pub fn write_audit_json(path: &Path, report: &AuditReport) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(report).expect("audit serializes");
    let mut f = create(path)?;
    writeln!(f, "{text}").map_err(|e| IoError::io(path, e))
}

pub fn write_js_report_json(path: &Path, report: &JsReport) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    let mut f = create(path)?;
    writeln!(f, "{text}").map_err(|e| IoError::io(path, e))
}

/// One line per record: id + hex-encoded bit vector.
pub fn write_fingerprint_dump(
    path: &Path,
    ids: &[String],
    fingerprints: &[Fingerprint],
) -> Result<(), IoError> {
    assert_eq!(ids.len(), fingerprints.len());
    let mut f = create(path)?;
    for (id, fp) in ids.iter().zip(fingerprints) {
        writeln!(f, "{id}\t{}", fp.to_hex()).map_err(|e| IoError::io(path, e))?;
    }
    Ok(())
}

/// Alignment-parameter row echoed into reports.
pub fn describe_params(p: &AlignmentParams) -> String {
    format!(
        "min_seq_id={} min_cov={} cov_mode={:?}",
        p.min_seq_id, p.min_cov, p.cov_mode
    )
}

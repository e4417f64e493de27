//! Peptide sequence representation, validation, k-mer extraction, and
//! physicochemical properties.
//!
//! Charge model: Henderson–Hasselbalch over ionizable groups with EMBOSS-style
//! pKa constants (N-terminus 8.6, C-terminus 3.6, K 10.8, R 12.5, H 6.5,
//! D 3.9, E 4.1, C 8.5, Y 10.1). Hydrophobicity: Kyte–Doolittle scale.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The 20 standard amino acids, in fixed alphabetical order.
pub const CANONICAL_ALPHABET: [u8; 20] = [
    b'A', b'C', b'D', b'E', b'F', b'G', b'H', b'I', b'K', b'L', b'M', b'N', b'P', b'Q', b'R',
    b'S', b'T', b'V', b'W', b'Y',
];

/// Ambiguity / special residue codes tolerated only under a permissive policy.
pub const AMBIGUITY_CODES: [u8; 6] = [b'B', b'J', b'O', b'U', b'X', b'Z'];

pub fn is_canonical_residue(c: u8) -> bool {
    CANONICAL_ALPHABET.contains(&c.to_ascii_uppercase())
}

pub fn is_ambiguity_code(c: u8) -> bool {
    AMBIGUITY_CODES.contains(&c.to_ascii_uppercase())
}

/// Index of a canonical residue in [`CANONICAL_ALPHABET`], if any.
pub fn canonical_index(c: u8) -> Option<usize> {
    CANONICAL_ALPHABET.iter().position(|&a| a == c.to_ascii_uppercase())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("empty sequence after trimming whitespace")]
    EmptySequence,
    #[error("illegal character {0:?} (not a letter)")]
    IllegalCharacter(char),
    #[error("ambiguous residue {0:?} not allowed here")]
    AmbiguousResidue(char),
    #[error("sequence of length {len} too short for n = {n}")]
    SequenceTooShort { len: usize, n: usize },
    #[error("no root for net charge in pH [0, 14]")]
    NoRoot,
}

/// How to treat the ambiguity codes {X, U, B, J, O, Z} during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationPolicy {
    /// Reject any sequence containing an ambiguity code.
    StrictCanonical,
    /// Accept ambiguity codes and mark the sequence.
    AllowAmbiguity,
    /// Tell the caller to silently discard the record.
    #[default]
    DropRecord,
}

/// A validated, uppercase-normalized peptide sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeptideSequence {
    id: String,
    residues: String,
    has_ambiguity: bool,
}

impl PeptideSequence {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn residues(&self) -> &str {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// True when the sequence contains any of {X, U, B, J, O, Z}.
    pub fn has_ambiguity(&self) -> bool {
        self.has_ambiguity
    }

    pub fn bytes(&self) -> &[u8] {
        self.residues.as_bytes()
    }

    /// Builds a sequence from parts already known to be valid (library-internal
    /// construction for converters; still normalizes case and the flag).
    pub fn from_validated(id: impl Into<String>, residues: impl Into<String>) -> Self {
        let residues: String = residues.into().to_ascii_uppercase();
        let has_ambiguity = residues.bytes().any(is_ambiguity_code);
        PeptideSequence { id: id.into(), residues, has_ambiguity }
    }
}

impl fmt::Display for PeptideSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.residues)
    }
}

/// Result of validating one raw sequence record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validated {
    Accepted(PeptideSequence),
    /// The policy was [`ValidationPolicy::DropRecord`] and the sequence
    /// contained the offending ambiguity code.
    Dropped { id: String, offending: char },
}

impl Validated {
    pub fn accepted(self) -> Option<PeptideSequence> {
        match self {
            Validated::Accepted(s) => Some(s),
            Validated::Dropped { .. } => None,
        }
    }
}

/// Validates and normalizes a raw sequence string.
///
/// Input is whitespace-trimmed and uppercased. Non-alphabetic characters are
/// rejected outright; the ambiguity codes {X, U, B, J, O, Z} are handled
/// according to `policy`.
pub fn validate_sequence(
    text: &str,
    id: impl Into<String>,
    policy: ValidationPolicy,
) -> Result<Validated, SeqError> {
    let id = id.into();
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(SeqError::EmptySequence);
    }
    let mut residues = String::with_capacity(trimmed.len());
    let mut first_ambiguity: Option<char> = None;
    for ch in trimmed.chars() {
        if !ch.is_ascii_alphabetic() {
            return Err(SeqError::IllegalCharacter(ch));
        }
        let up = ch.to_ascii_uppercase();
        if is_ambiguity_code(up as u8) {
            first_ambiguity.get_or_insert(up);
        } else if !is_canonical_residue(up as u8) {
            // All 26 letters are either canonical or ambiguity codes.
            unreachable!("letter {up} is neither canonical nor ambiguity");
        }
        residues.push(up);
    }
    match (first_ambiguity, policy) {
        (None, _) => Ok(Validated::Accepted(PeptideSequence {
            id,
            residues,
            has_ambiguity: false,
        })),
        (Some(c), ValidationPolicy::StrictCanonical) => Err(SeqError::AmbiguousResidue(c)),
        (Some(_), ValidationPolicy::AllowAmbiguity) => Ok(Validated::Accepted(PeptideSequence {
            id,
            residues,
            has_ambiguity: true,
        })),
        (Some(c), ValidationPolicy::DropRecord) => Ok(Validated::Dropped { id, offending: c }),
    }
}

/// Multiset of the k-length windows of a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KmerProfile {
    pub k: usize,
    pub counts: BTreeMap<String, usize>,
}

impl KmerProfile {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

/// All contiguous windows of length `k`, with multiplicity. A sequence shorter
/// than `k` yields an empty profile.
pub fn kmers(seq: &PeptideSequence, k: usize) -> KmerProfile {
    assert!(k >= 1, "k must be at least 1");
    let mut counts = BTreeMap::new();
    let bytes = seq.bytes();
    if bytes.len() >= k {
        for w in bytes.windows(k) {
            let key = String::from_utf8(w.to_vec()).expect("validated ascii");
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    KmerProfile { k, counts }
}

/// Frequency vector over the fixed `20^n`-dimensional ordered alphabet of
/// canonical n-mers (n = 1 or 2). Entries are nonnegative and sum to 1.
pub fn composition(seq: &PeptideSequence, n: usize) -> Result<Vec<f64>, SeqError> {
    assert!(n == 1 || n == 2, "composition supports n = 1 or 2");
    if seq.len() < n {
        return Err(SeqError::SequenceTooShort { len: seq.len(), n });
    }
    let dim = 20usize.pow(n as u32);
    let mut counts = vec![0u64; dim];
    let bytes = seq.bytes();
    let mut total = 0u64;
    for w in bytes.windows(n) {
        let mut idx = 0usize;
        let mut ok = true;
        for &c in w {
            match canonical_index(c) {
                Some(i) => idx = idx * 20 + i,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            return Err(SeqError::AmbiguousResidue(w[0] as char));
        }
        counts[idx] += 1;
        total += 1;
    }
    Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

/// pKa constants of the charge model; see the module docs.
pub mod pka {
    pub const N_TERM: f64 = 8.6;
    pub const C_TERM: f64 = 3.6;
    pub const LYS: f64 = 10.8;
    pub const ARG: f64 = 12.5;
    pub const HIS: f64 = 6.5;
    pub const ASP: f64 = 3.9;
    pub const GLU: f64 = 4.1;
    pub const CYS: f64 = 8.5;
    pub const TYR: f64 = 10.1;
}

/// Kyte–Doolittle hydropathy index for a canonical residue.
pub fn kyte_doolittle(c: u8) -> Option<f64> {
    Some(match c.to_ascii_uppercase() {
        b'A' => 1.8,
        b'R' => -4.5,
        b'N' => -3.5,
        b'D' => -3.5,
        b'C' => 2.5,
        b'Q' => -3.5,
        b'E' => -3.5,
        b'G' => -0.4,
        b'H' => -3.2,
        b'I' => 4.5,
        b'L' => 3.8,
        b'K' => -3.9,
        b'M' => 1.9,
        b'F' => 2.8,
        b'P' => -1.6,
        b'S' => -0.8,
        b'T' => -0.7,
        b'W' => -0.9,
        b'Y' => -1.3,
        b'V' => 4.2,
        _ => return None,
    })
}

fn positive_term(ph: f64, pka: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(ph - pka))
}

fn negative_term(ph: f64, pka: f64) -> f64 {
    -1.0 / (1.0 + 10f64.powf(pka - ph))
}

/// Henderson–Hasselbalch net charge at the given pH. Strictly decreasing in
/// pH for any fixed sequence.
pub fn net_charge(seq: &PeptideSequence, ph: f64) -> Result<f64, SeqError> {
    if seq.has_ambiguity() {
        let c = seq.bytes().iter().copied().find(|&c| is_ambiguity_code(c)).unwrap();
        return Err(SeqError::AmbiguousResidue(c as char));
    }
    let mut charge = positive_term(ph, pka::N_TERM) + negative_term(ph, pka::C_TERM);
    for &c in seq.bytes() {
        charge += match c {
            b'K' => positive_term(ph, pka::LYS),
            b'R' => positive_term(ph, pka::ARG),
            b'H' => positive_term(ph, pka::HIS),
            b'D' => negative_term(ph, pka::ASP),
            b'E' => negative_term(ph, pka::GLU),
            b'C' => negative_term(ph, pka::CYS),
            b'Y' => negative_term(ph, pka::TYR),
            _ => 0.0,
        };
    }
    Ok(charge)
}

/// Mean Kyte–Doolittle index over residues (GRAVY).
pub fn gravy(seq: &PeptideSequence) -> Result<f64, SeqError> {
    let mut sum = 0.0;
    for &c in seq.bytes() {
        sum += kyte_doolittle(c).ok_or(SeqError::AmbiguousResidue(c as char))?;
    }
    Ok(sum / seq.len() as f64)
}

/// Isoelectric point: the bisection root of [`net_charge`] on pH [0, 14],
/// resolved to 1e-4 pH units.
pub fn isoelectric_point(seq: &PeptideSequence) -> Result<f64, SeqError> {
    let mut lo = 0.0f64;
    let mut hi = 14.0f64;
    let charge_lo = net_charge(seq, lo)?;
    let charge_hi = net_charge(seq, hi)?;
    if charge_lo < 0.0 || charge_hi > 0.0 {
        return Err(SeqError::NoRoot);
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if net_charge(seq, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scalar feature bundle used by sampling and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyVector {
    pub length: usize,
    pub net_charge: f64,
    pub hydrophobicity: f64,
    pub isoelectric_point: f64,
}

/// Computes the full property vector of a canonical sequence at the given pH.
pub fn property_vector(seq: &PeptideSequence, ph: f64) -> Result<PropertyVector, SeqError> {
    Ok(PropertyVector {
        length: seq.len(),
        net_charge: net_charge(seq, ph)?,
        hydrophobicity: gravy(seq)?,
        isoelectric_point: isoelectric_point(seq)?,
    })
}

/// Label carried by a dataset record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Binary(u8),
    Real { value: f64, unit: Option<String> },
}

impl Label {
    pub fn binary(v: u8) -> Self {
        assert!(v <= 1, "binary labels are 0 or 1");
        Label::Binary(v)
    }

    pub fn real(value: f64, unit: Option<String>) -> Self {
        assert!(value.is_finite(), "real labels must be finite");
        Label::Real { value, unit }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Label::Real { value, .. } => Some(*value),
            Label::Binary(_) => None,
        }
    }

    pub fn as_binary(&self) -> Option<u8> {
        match self {
            Label::Binary(v) => Some(*v),
            Label::Real { .. } => None,
        }
    }
}

/// One row of an input dataset: a sequence (plain or notation text), its
/// label, and the source dataset name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub sequence: String,
    pub label: Label,
    pub source: String,
}

/// Keeps records whose residue count is at most `max_len`, preserving order.
pub fn filter_by_length(records: &[PeptideSequence], max_len: usize) -> Vec<PeptideSequence> {
    records.iter().filter(|r| r.len() <= max_len).cloned().collect()
}

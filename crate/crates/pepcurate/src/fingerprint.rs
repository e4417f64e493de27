//! Circular (Morgan) fingerprints over molecular graphs, Tanimoto
//! similarity, and molecule-set metrics.
//!
//! Hashing is pinned so fingerprints are bit-exact across implementations:
//! 64-bit FNV-1a over the little-endian byte encoding of the initial atom
//! invariant (atomic number, degree, formal charge, attached-H count,
//! aromatic flag) at layer 0, and of the previous-layer identifier followed
//! by the sorted (bond-order code, neighbor previous-layer id) pairs at each
//! further layer. Each identifier sets bit `id mod width`. Defaults:
//! radius 2, width 1024; radius 3 gives ECFP6-style parity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::notation::{BondOrder, MolecularGraph};

pub const DEFAULT_RADIUS: u32 = 2;
pub const ECFP6_RADIUS: u32 = 3;
pub const DEFAULT_WIDTH: usize = 1024;
pub const ALLOWED_WIDTHS: [usize; 3] = [512, 1024, 2048];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FingerprintError {
    #[error("molecule has no atoms")]
    EmptyMolecule,
    #[error("fingerprint widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("need at least two molecules, got {0}")]
    TooFewMolecules(usize),
    #[error("generated set is empty")]
    EmptyGeneratedSet,
    #[error("width {0} not one of 512/1024/2048")]
    BadWidth(usize),
    #[error("radius {0} outside 0..=4")]
    BadRadius(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    words: Vec<u64>,
    width: usize,
    radius: u32,
}

impl Fingerprint {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn popcount(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.width);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set_bit(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    /// Hex dump, most significant word first; used by the fingerprint report.
    pub fn to_hex(&self) -> String {
        self.words.iter().rev().map(|w| format!("{w:016x}")).collect()
    }
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn bond_code(order: BondOrder) -> u8 {
    match order {
        BondOrder::Single => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
        BondOrder::Aromatic => 4,
    }
}

fn layer0_id(g: &MolecularGraph, i: usize) -> u64 {
    let a = g.atom(i);
    let mut bytes = Vec::with_capacity(8);
    bytes.push(a.atomic_number());
    bytes.push(g.degree(i) as u8);
    bytes.push(a.charge as u8);
    bytes.push(a.hcount);
    bytes.push(a.aromatic as u8);
    fnv1a(&bytes)
}

/// Morgan fingerprint with neighborhood identifiers for layers 0..=radius.
/// Identical for any relabeling of the input atoms.
pub fn morgan_fingerprint(
    g: &MolecularGraph,
    radius: u32,
    width: usize,
) -> Result<Fingerprint, FingerprintError> {
    if g.atoms().is_empty() {
        return Err(FingerprintError::EmptyMolecule);
    }
    if !ALLOWED_WIDTHS.contains(&width) {
        return Err(FingerprintError::BadWidth(width));
    }
    if radius > 4 {
        return Err(FingerprintError::BadRadius(radius));
    }
    let n = g.atoms().len();
    let mut fp = Fingerprint { words: vec![0; width.div_ceil(64)], width, radius };
    let adjacency: Vec<Vec<(usize, BondOrder)>> = (0..n).map(|i| g.neighbors(i)).collect();

    let mut ids: Vec<u64> = (0..n).map(|i| layer0_id(g, i)).collect();
    for &id in &ids {
        fp.set_bit((id % width as u64) as usize);
    }
    for _layer in 1..=radius {
        let mut next = ids.clone();
        for i in 0..n {
            if adjacency[i].is_empty() {
                // Closed environment; the identifier no longer changes.
                continue;
            }
            let mut env: Vec<(u8, u64)> = adjacency[i]
                .iter()
                .map(|&(j, order)| (bond_code(order), ids[j]))
                .collect();
            env.sort_unstable();
            let mut bytes = Vec::with_capacity(8 + env.len() * 9);
            bytes.extend_from_slice(&ids[i].to_le_bytes());
            for (code, id) in env {
                bytes.push(code);
                bytes.extend_from_slice(&id.to_le_bytes());
            }
            next[i] = fnv1a(&bytes);
        }
        ids = next;
        for &id in &ids {
            fp.set_bit((id % width as u64) as usize);
        }
    }
    Ok(fp)
}

/// |a AND b| / |a OR b|; 1.0 when both are empty (cannot occur for valid
/// molecules, every fingerprint has at least one bit).
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.width != b.width {
        return Err(FingerprintError::WidthMismatch(a.width, b.width));
    }
    let mut inter = 0u32;
    let mut union = 0u32;
    for (x, y) in a.words.iter().zip(&b.words) {
        inter += (x & y).count_ones();
        union += (x | y).count_ones();
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

/// 1 minus the mean Tanimoto similarity over all unordered pairs.
pub fn internal_diversity(set: &[Fingerprint]) -> Result<f64, FingerprintError> {
    if set.len() < 2 {
        return Err(FingerprintError::TooFewMolecules(set.len()));
    }
    let mut sum = 0.0;
    let mut pairs = 0u64;
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            sum += tanimoto(&set[i], &set[j])?;
            pairs += 1;
        }
    }
    Ok(1.0 - sum / pairs as f64)
}

/// Fraction of generated fingerprints absent from the reference set.
/// Membership is exact fingerprint equality, a documented proxy for
/// structure identity.
pub fn novelty(
    generated: &[Fingerprint],
    reference: &[Fingerprint],
) -> Result<f64, FingerprintError> {
    if generated.is_empty() {
        return Err(FingerprintError::EmptyGeneratedSet);
    }
    if let Some(r) = reference.iter().find(|r| r.width != generated[0].width) {
        return Err(FingerprintError::WidthMismatch(generated[0].width, r.width));
    }
    let absent = generated.iter().filter(|g| !reference.contains(g)).count();
    Ok(absent as f64 / generated.len() as f64)
}

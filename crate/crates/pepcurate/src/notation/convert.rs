//! Conversions between notations: BILN <-> HELM, FASTA -> BILN, X-collapse,
//! and nearest-canonical-homolog mapping.

use super::biln::{BilnDocument, BondSite, Crosslink};
use super::helm::{HelmConnection, HelmConnectionEnd, HelmDocument};
use super::monomer::MonomerLibrary;
use super::NotationError;
use crate::seqcore::{is_canonical_residue, PeptideSequence};

pub fn biln_to_helm(doc: &BilnDocument) -> HelmDocument {
    let polymers: Vec<(String, Vec<String>)> = doc
        .chains
        .iter()
        .enumerate()
        .map(|(i, chain)| (format!("PEPTIDE{}", i + 1), chain.clone()))
        .collect();
    let connections = doc
        .crosslinks
        .iter()
        .map(|x| HelmConnection {
            from: HelmConnectionEnd {
                polymer: format!("PEPTIDE{}", x.a.chain + 1),
                position: x.a.position + 1,
                rgroup: x.a.rgroup,
            },
            to: HelmConnectionEnd {
                polymer: format!("PEPTIDE{}", x.b.chain + 1),
                position: x.b.position + 1,
                rgroup: x.b.rgroup,
            },
        })
        .collect();
    HelmDocument { polymers, connections }
}

pub fn helm_to_biln(doc: &HelmDocument) -> Result<BilnDocument, NotationError> {
    let chains: Vec<Vec<String>> = doc.polymers.iter().map(|(_, m)| m.clone()).collect();
    let chain_of = |polymer: &str| -> Result<usize, NotationError> {
        doc.polymers
            .iter()
            .position(|(id, _)| id == polymer)
            .ok_or_else(|| NotationError::UnrepresentableFeature(format!(
                "connection references unknown polymer {polymer}"
            )))
    };
    let mut crosslinks = Vec::new();
    for (i, conn) in doc.connections.iter().enumerate() {
        crosslinks.push(Crosslink {
            bond_id: i as u32 + 1,
            a: BondSite {
                chain: chain_of(&conn.from.polymer)?,
                position: conn.from.position - 1,
                rgroup: conn.from.rgroup,
            },
            b: BondSite {
                chain: chain_of(&conn.to.polymer)?,
                position: conn.to.position - 1,
                rgroup: conn.to.rgroup,
            },
        });
    }
    Ok(BilnDocument { chains, crosslinks })
}

/// One single-letter monomer per residue, joined with '-'.
pub fn fasta_to_biln(seq: &PeptideSequence) -> BilnDocument {
    BilnDocument::linear(seq.residues().chars().map(|c| c.to_string()).collect())
}

/// Maps every monomer that is not a canonical single-letter residue to the
/// ambiguity token 'X'; chains are concatenated in order. Cap monomers
/// collapse to 'X' too, which changes apparent length relative to the
/// residue count of the parent peptide.
pub fn collapse_noncanonical(doc: &BilnDocument, id: impl Into<String>) -> PeptideSequence {
    let mut out = String::with_capacity(doc.monomer_count());
    for chain in &doc.chains {
        for symbol in chain {
            let c = symbol.as_bytes();
            if c.len() == 1 && is_canonical_residue(c[0]) {
                out.push(c[0].to_ascii_uppercase() as char);
            } else {
                out.push('X');
            }
        }
    }
    PeptideSequence::from_validated(id, out)
}

/// Replaces every monomer with its canonical homolog letter from the library.
/// Fails listing the offending monomers when any homolog is missing.
pub fn nearest_canonical_homolog(
    doc: &BilnDocument,
    library: &MonomerLibrary,
    id: impl Into<String>,
) -> Result<PeptideSequence, NotationError> {
    let mut out = String::with_capacity(doc.monomer_count());
    let mut missing = Vec::new();
    for chain in &doc.chains {
        for symbol in chain {
            match library.get(symbol).and_then(|d| d.canonical_homolog) {
                Some(h) => out.push(h),
                None => missing.push(symbol.clone()),
            }
        }
    }
    if !missing.is_empty() {
        missing.dedup();
        return Err(NotationError::MissingHomolog(missing));
    }
    Ok(PeptideSequence::from_validated(id, out))
}

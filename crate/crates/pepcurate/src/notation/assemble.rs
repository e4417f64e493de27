//! Peptide assembly: condenses monomer graphs into one molecule.
//!
//! Within a chain, residue i's R2 condenses with residue i+1's R1 into an
//! amide bond; cross-links bond the named R-group anchors. Unused attachments
//! are capped: R1 and R3 gain a hydrogen on the anchor, R2 gains a hydroxyl.
//! Wildcard placeholder atoms are removed afterwards.

use std::collections::BTreeMap;

use super::biln::BilnDocument;
use super::graph::{Atom, BondOrder, MolecularGraph};
use super::monomer::MonomerLibrary;
use super::NotationError;

struct Attachment {
    anchor: usize,
    used: bool,
}

/// Builds the molecular graph of a BILN document against a monomer library.
pub fn assemble_molecule(
    doc: &BilnDocument,
    library: &MonomerLibrary,
) -> Result<MolecularGraph, NotationError> {
    let mut graph = MolecularGraph::new();
    // (chain, position, rgroup) -> attachment bookkeeping.
    let mut sites: BTreeMap<(usize, usize, u8), Attachment> = BTreeMap::new();

    for (chain_idx, chain) in doc.chains.iter().enumerate() {
        for (pos, symbol) in chain.iter().enumerate() {
            let def = library
                .get(symbol)
                .ok_or_else(|| NotationError::UnknownMonomer(symbol.clone()))?;
            let offset = graph.atoms().len();
            for atom in def.graph().atoms() {
                graph.add_atom(atom.clone());
            }
            for bond in def.graph().bonds() {
                graph.add_bond(offset + bond.a, offset + bond.b, bond.order)?;
            }
            for r in def.rgroups() {
                let (_, anchor) = def.attachment(r).expect("listed rgroup");
                sites.insert(
                    (chain_idx, pos, r),
                    Attachment { anchor: offset + anchor, used: false },
                );
            }
        }
    }

    let consume = |sites: &mut BTreeMap<(usize, usize, u8), Attachment>,
                       chain: usize,
                       pos: usize,
                       rgroup: u8|
     -> Result<usize, NotationError> {
        let site = sites.get_mut(&(chain, pos, rgroup)).ok_or(
            NotationError::MissingAttachment { chain, position: pos, rgroup },
        )?;
        if site.used {
            return Err(NotationError::OccupiedAttachment { chain, position: pos, rgroup });
        }
        site.used = true;
        Ok(site.anchor)
    };

    // Backbone amide bonds.
    for (chain_idx, chain) in doc.chains.iter().enumerate() {
        for pos in 0..chain.len().saturating_sub(1) {
            let acid = consume(&mut sites, chain_idx, pos, 2)?;
            let amine = consume(&mut sites, chain_idx, pos + 1, 1)?;
            graph.add_bond(acid, amine, BondOrder::Single)?;
        }
    }

    // Cross-links.
    for link in &doc.crosslinks {
        let a = consume(&mut sites, link.a.chain, link.a.position, link.a.rgroup)?;
        let b = consume(&mut sites, link.b.chain, link.b.position, link.b.rgroup)?;
        graph.add_bond(a, b, BondOrder::Single)?;
    }

    // Cap whatever is left: H on R1/R3 anchors, OH on R2 anchors.
    for ((_, _, rgroup), site) in sites.iter() {
        if site.used {
            continue;
        }
        match rgroup {
            1 | 3 => {
                graph.atom_mut(site.anchor).hcount += 1;
            }
            2 => {
                let mut oxygen = Atom::new("O");
                oxygen.hcount = 1;
                let o = graph.add_atom(oxygen);
                graph.add_bond(site.anchor, o, BondOrder::Single)?;
            }
            _ => unreachable!("rgroups validated at library load"),
        }
    }

    // Drop every wildcard placeholder (and with it the anchor-placeholder bonds).
    let drop: Vec<bool> = graph.atoms().iter().map(Atom::is_wildcard).collect();
    let assembled = graph.without_atoms(&drop);
    debug_assert!(!assembled.has_wildcards());
    Ok(assembled)
}

//! BILN subset grammar:
//!
//! ```text
//! biln     := chain ('.' chain)*
//! chain    := monomer ('-' monomer)*
//! monomer  := token suffix*
//! token    := <single char not in "-.()[]"> | '[' <name> ']'
//! suffix   := '(' <bond id> ',' <r-group 1..3> ')'
//! ```
//!
//! Chains are separated by `.`, monomers by `-`; multi-character monomer
//! names are bracketed. Each `(id,r)` suffix declares half of a cross-link;
//! the two halves sharing a bond id are paired.

use serde::{Deserialize, Serialize};

use super::NotationError;

/// One endpoint of a cross-link: chain index, monomer position (0-based),
/// and the R-group used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BondSite {
    pub chain: usize,
    pub position: usize,
    pub rgroup: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crosslink {
    pub bond_id: u32,
    pub a: BondSite,
    pub b: BondSite,
}

/// Parsed BILN document: chains of monomer symbols plus paired cross-links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilnDocument {
    pub chains: Vec<Vec<String>>,
    pub crosslinks: Vec<Crosslink>,
}

impl BilnDocument {
    /// Builds a linear single-chain document.
    pub fn linear(monomers: Vec<String>) -> Self {
        BilnDocument { chains: vec![monomers], crosslinks: Vec::new() }
    }

    pub fn monomer_count(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }
}

pub fn parse_biln(text: &str) -> Result<BilnDocument, NotationError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(NotationError::UnknownGrammar("empty BILN text".into()));
    }
    let mut chains = Vec::new();
    let mut half_links: Vec<(u32, BondSite)> = Vec::new();

    for (chain_idx, chain_text) in text.split('.').enumerate() {
        if chain_text.is_empty() {
            return Err(NotationError::UnknownGrammar("empty chain".into()));
        }
        let mut monomers = Vec::new();
        let bytes = chain_text.as_bytes();
        let mut pos = 0usize;
        loop {
            // One monomer token.
            let symbol = match bytes.get(pos) {
                Some(b'[') => {
                    let close = chain_text[pos..]
                        .find(']')
                        .ok_or(NotationError::UnbalancedBracket)?;
                    let name = &chain_text[pos + 1..pos + close];
                    if name.is_empty() {
                        return Err(NotationError::UnknownGrammar("empty [] token".into()));
                    }
                    pos += close + 1;
                    name.to_string()
                }
                Some(b']') => return Err(NotationError::UnbalancedBracket),
                Some(&c) if !b"-.()".contains(&c) => {
                    pos += 1;
                    (c as char).to_string()
                }
                other => {
                    return Err(NotationError::UnknownGrammar(format!(
                        "expected monomer token, found {other:?}"
                    )))
                }
            };
            let position = monomers.len();
            monomers.push(symbol);

            // Zero or more (id,r) suffixes.
            while bytes.get(pos) == Some(&b'(') {
                let close = chain_text[pos..]
                    .find(')')
                    .ok_or(NotationError::UnknownGrammar("unclosed (id,r) suffix".into()))?;
                let inner = &chain_text[pos + 1..pos + close];
                let (id_str, r_str) = inner.split_once(',').ok_or_else(|| {
                    NotationError::UnknownGrammar(format!("bad crosslink suffix ({inner})"))
                })?;
                let bond_id: u32 = id_str.trim().parse().map_err(|_| {
                    NotationError::UnknownGrammar(format!("bad bond id {id_str:?}"))
                })?;
                let rgroup: u8 = r_str.trim().parse().map_err(|_| {
                    NotationError::UnknownGrammar(format!("bad r-group {r_str:?}"))
                })?;
                if !(1..=3).contains(&rgroup) {
                    return Err(NotationError::UnknownGrammar(format!(
                        "r-group {rgroup} outside 1..=3"
                    )));
                }
                half_links.push((bond_id, BondSite { chain: chain_idx, position, rgroup }));
                pos += close + 1;
            }

            match bytes.get(pos) {
                None => break,
                Some(b'-') => pos += 1,
                Some(&c) => {
                    return Err(NotationError::UnknownGrammar(format!(
                        "unexpected {:?} after monomer",
                        c as char
                    )))
                }
            }
        }
        chains.push(monomers);
    }

    // Pair the half links by bond id; every id must occur exactly twice.
    let mut crosslinks = Vec::new();
    let mut ids: Vec<u32> = half_links.iter().map(|&(id, _)| id).collect();
    ids.sort_unstable();
    ids.dedup();
    for id in ids {
        let ends: Vec<BondSite> = half_links
            .iter()
            .filter(|&&(i, _)| i == id)
            .map(|&(_, s)| s)
            .collect();
        if ends.len() != 2 {
            return Err(NotationError::UnpairedBondId(id));
        }
        crosslinks.push(Crosslink { bond_id: id, a: ends[0], b: ends[1] });
    }

    Ok(BilnDocument { chains, crosslinks })
}

/// Serializes a document back to BILN text (the canonical form: `parse` of
/// the output reproduces the document).
pub fn write_biln(doc: &BilnDocument) -> String {
    let mut chains_text = Vec::new();
    for (chain_idx, chain) in doc.chains.iter().enumerate() {
        let mut monomer_texts = Vec::new();
        for (position, symbol) in chain.iter().enumerate() {
            let mut t = if symbol.len() == 1 && !"-.()[]".contains(symbol.as_str()) {
                symbol.clone()
            } else {
                format!("[{symbol}]")
            };
            let mut suffixes: Vec<(u32, u8)> = doc
                .crosslinks
                .iter()
                .flat_map(|x| [(x.bond_id, x.a), (x.bond_id, x.b)])
                .filter(|&(_, s)| s.chain == chain_idx && s.position == position)
                .map(|(id, s)| (id, s.rgroup))
                .collect();
            suffixes.sort_unstable();
            for (id, r) in suffixes {
                t.push_str(&format!("({id},{r})"));
            }
            monomer_texts.push(t);
        }
        chains_text.push(monomer_texts.join("-"));
    }
    chains_text.join(".")
}

//! Monomer definitions and the library that resolves BILN/HELM tokens.
//!
//! Library CSV format (header required): `symbol,smiles,homolog`. The SMILES
//! column encodes attachment points as numbered wildcards `[*:1]` (backbone
//! amine), `[*:2]` (backbone acid), `[*:3]` (sidechain). `homolog` is the
//! single-letter canonical stand-in, empty when none is defined (caps).
//!
//! A test-scale default library ships with the crate: the 20 canonical
//! residues plus N-methyl, D-, and other modified monomers and terminal caps.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use super::graph::MolecularGraph;
use super::smiles::parse_smiles;
use super::NotationError;

#[derive(Debug, Clone)]
pub struct MonomerDef {
    pub symbol: String,
    pub smiles: String,
    pub canonical_homolog: Option<char>,
    graph: MolecularGraph,
    /// R-group number -> (wildcard atom index, anchor atom index).
    attachments: BTreeMap<u8, (usize, usize)>,
}

impl MonomerDef {
    pub fn new(
        symbol: impl Into<String>,
        smiles: impl Into<String>,
        canonical_homolog: Option<char>,
    ) -> Result<Self, NotationError> {
        let symbol = symbol.into();
        let smiles = smiles.into();
        let graph = parse_smiles(&smiles)?;
        if !graph.is_connected() {
            return Err(NotationError::LibraryFormat(format!(
                "monomer {symbol}: structure is not connected"
            )));
        }
        let mut attachments = BTreeMap::new();
        for (i, atom) in graph.atoms().iter().enumerate() {
            if atom.is_wildcard() {
                let r = atom.rgroup.ok_or_else(|| {
                    NotationError::LibraryFormat(format!(
                        "monomer {symbol}: unnumbered attachment wildcard"
                    ))
                })?;
                let nbrs = graph.neighbors(i);
                if nbrs.len() != 1 {
                    return Err(NotationError::LibraryFormat(format!(
                        "monomer {symbol}: attachment R{r} must have exactly one anchor"
                    )));
                }
                if !(1..=3).contains(&r) {
                    return Err(NotationError::LibraryFormat(format!(
                        "monomer {symbol}: attachment R{r} outside 1..=3"
                    )));
                }
                if attachments.insert(r, (i, nbrs[0].0)).is_some() {
                    return Err(NotationError::LibraryFormat(format!(
                        "monomer {symbol}: duplicate attachment R{r}"
                    )));
                }
            }
        }
        Ok(MonomerDef { symbol, smiles, canonical_homolog, graph, attachments })
    }

    pub fn graph(&self) -> &MolecularGraph {
        &self.graph
    }

    pub fn attachment(&self, rgroup: u8) -> Option<(usize, usize)> {
        self.attachments.get(&rgroup).copied()
    }

    pub fn rgroups(&self) -> impl Iterator<Item = u8> + '_ {
        self.attachments.keys().copied()
    }

    /// Caps lack one of the backbone attachments.
    pub fn is_cap(&self) -> bool {
        !(self.attachments.contains_key(&1) && self.attachments.contains_key(&2))
    }
}

/// Immutable symbol -> monomer map, shareable across workers.
#[derive(Debug, Clone)]
pub struct MonomerLibrary {
    monomers: BTreeMap<String, MonomerDef>,
}

const DEFAULT_LIBRARY_CSV: &str = include_str!("../../data/monomers.csv");

impl MonomerLibrary {
    /// The built-in test-scale library (also shipped as `data/monomers.csv`).
    pub fn default_library() -> Self {
        Self::from_csv_str(DEFAULT_LIBRARY_CSV).expect("embedded library parses")
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, NotationError> {
        let mut text = String::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| NotationError::LibraryFormat(format!("{}: {e}", path.display())))?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, NotationError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        {
            let headers = reader
                .headers()
                .map_err(|e| NotationError::LibraryFormat(e.to_string()))?;
            if headers.iter().collect::<Vec<_>>() != ["symbol", "smiles", "homolog"] {
                return Err(NotationError::LibraryFormat(
                    "expected header symbol,smiles,homolog".into(),
                ));
            }
        }
        let mut monomers = BTreeMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| NotationError::LibraryFormat(e.to_string()))?;
            if record.len() != 3 {
                return Err(NotationError::LibraryFormat(format!(
                    "row with {} fields, expected 3",
                    record.len()
                )));
            }
            let symbol = record[0].trim().to_string();
            let homolog = match record[2].trim() {
                "" => None,
                h if h.len() == 1 => h.chars().next(),
                h => {
                    return Err(NotationError::LibraryFormat(format!(
                        "homolog {h:?} must be a single letter"
                    )))
                }
            };
            let def = MonomerDef::new(symbol.clone(), record[1].trim(), homolog)?;
            if monomers.insert(symbol.clone(), def).is_some() {
                return Err(NotationError::LibraryFormat(format!(
                    "duplicate monomer symbol {symbol}"
                )));
            }
        }
        Ok(MonomerLibrary { monomers })
    }

    pub fn get(&self, symbol: &str) -> Option<&MonomerDef> {
        self.monomers.get(symbol)
    }

    pub fn len(&self) -> usize {
        self.monomers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomers.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.monomers.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MonomerDef> {
        self.monomers.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_library_loads() {
        let lib = MonomerLibrary::default_library();
        assert!(lib.len() >= 30);
        // All 20 canonical residues present, with themselves as homolog.
        for c in "ACDEFGHIKLMNPQRSTVWY".chars() {
            let def = lib.get(&c.to_string()).unwrap_or_else(|| panic!("missing {c}"));
            assert_eq!(def.canonical_homolog, Some(c));
            assert!(!def.is_cap());
        }
        assert!(lib.get("ac").unwrap().is_cap());
        assert!(lib.get("am").unwrap().is_cap());
        assert_eq!(lib.get("meA").unwrap().canonical_homolog, Some('A'));
    }

    #[test]
    fn attachments_resolved() {
        let lib = MonomerLibrary::default_library();
        let gly = lib.get("G").unwrap();
        assert!(gly.attachment(1).is_some());
        assert!(gly.attachment(2).is_some());
        assert!(gly.attachment(3).is_none());
        let cys = lib.get("C").unwrap();
        assert!(cys.attachment(3).is_some());
    }

    #[test]
    fn disconnected_structure_rejected() {
        assert!(matches!(
            MonomerDef::new("bad", "C.O", None),
            Err(NotationError::LibraryFormat(_))
        ));
    }

    #[test]
    fn duplicate_rgroup_rejected() {
        assert!(matches!(
            MonomerDef::new("bad", "[*:1]NC(C[*:1])C(=O)O", None),
            Err(NotationError::LibraryFormat(_))
        ));
    }

    #[test]
    fn csv_header_enforced() {
        assert!(matches!(
            MonomerLibrary::from_csv_str("a,b,c\nA,[*:1]NC(C)C(=O)[*:2],A\n"),
            Err(NotationError::LibraryFormat(_))
        ));
    }
}

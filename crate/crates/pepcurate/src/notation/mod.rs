//! BILN / HELM / SMILES notation handling and molecule assembly.

use thiserror::Error;

pub mod assemble;
pub mod biln;
pub mod convert;
pub mod graph;
pub mod helm;
pub mod monomer;
pub mod smiles;

pub use assemble::assemble_molecule;
pub use biln::{parse_biln, write_biln, BilnDocument, BondSite, Crosslink};
pub use convert::{biln_to_helm, collapse_noncanonical, fasta_to_biln, helm_to_biln,
    nearest_canonical_homolog};
pub use graph::{are_isomorphic, Atom, Bond, BondOrder, MolecularGraph};
pub use helm::{parse_helm, write_helm, HelmConnection, HelmConnectionEnd, HelmDocument};
pub use monomer::{MonomerDef, MonomerLibrary};
pub use smiles::{parse_smiles, write_smiles};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NotationError {
    #[error("unbalanced bracket in monomer token")]
    UnbalancedBracket,
    #[error("bond id {0} does not appear exactly twice")]
    UnpairedBondId(u32),
    #[error("unrecognized BILN syntax: {0}")]
    UnknownGrammar(String),
    #[error("HELM text does not match the POLYMERS$CONNECTIONS$$$ layout")]
    MalformedSections,
    #[error("polymer {0} is not a peptide")]
    UnknownPolymerType(String),
    #[error("cannot be represented in the target notation: {0}")]
    UnrepresentableFeature(String),
    #[error("monomer {0} not found in the library")]
    UnknownMonomer(String),
    #[error("attachment R{rgroup} of chain {chain} position {position} used twice")]
    OccupiedAttachment { chain: usize, position: usize, rgroup: u8 },
    #[error("monomer at chain {chain} position {position} has no R{rgroup} attachment")]
    MissingAttachment { chain: usize, position: usize, rgroup: u8 },
    #[error("monomers without a canonical homolog: {0:?}")]
    MissingHomolog(Vec<String>),
    #[error("unsupported SMILES feature: {0}")]
    UnsupportedSmilesFeature(String),
    #[error("ring closure mismatch: {0}")]
    RingClosureMismatch(String),
    #[error("SMILES syntax error: {0}")]
    SmilesSyntax(String),
    #[error("invalid bond between atoms {a} and {b}")]
    InvalidBond { a: usize, b: usize },
    #[error("monomer library format error: {0}")]
    LibraryFormat(String),
}

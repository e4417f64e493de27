//! Deterministic peptide dataset curation: notation handling, redundancy
//! removal, k-mer enrichment analysis, leakage-aware splitting, and
//! distribution-controlled negative sampling.
//!
//! The library is the primary interface; each major capability has a
//! runnable example:
//!
//! ```text
//! examples/
//! ├── properties.rs          # validation, k-mers, charge/GRAVY/pI
//! ├── notation_roundtrip.rs  # BILN <-> HELM <-> SMILES, X-collapse, homologs
//! ├── fingerprints.rs        # Morgan fingerprints, Tanimoto, set metrics
//! ├── redundancy.rs          # identity clustering and IQR aggregation
//! ├── enrichment.rs          # Fisher/BH k-mer enrichment scan
//! ├── splitting.rs           # the six split strategies plus the auditor
//! ├── negative_sampling.rs   # pool building and the six samplers
//! └── full_pipeline.rs       # clean -> negsamp -> split -> audit -> stats
//! ```
//!
//! ```bash
//! cargo run --release -p pepcurate --example notation_roundtrip
//! cargo run --release -p pepcurate --example full_pipeline
//! ```
//!
//! A thin `pepcurate` binary exposes the stages as subcommands
//! (`clean`, `negsamp`, `split`, `convert`, `enrich`, `stats`, `audit`);
//! see the README for the file formats.
//!
//! Determinism is a design constraint throughout: every sampler and splitter
//! is seeded, parallelism never changes results, and rerunning a stage with
//! the same config and inputs reproduces its outputs byte for byte.

pub mod cleanse;
pub mod cli;
pub mod enrich;
pub mod fingerprint;
pub mod io;
pub mod negsamp;
pub mod notation;
pub mod pipeline;
pub mod seqcore;
pub mod split;

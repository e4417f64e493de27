//! Command-line front end: one verb per pipeline stage.
//!
//! Verbs: `clean`, `negsamp`, `split`, `convert`, `enrich`, `stats`,
//! `audit`. Global flags: `--config`, `--seed`, `--workers`, `--out-dir`.
//! Exit codes: 0 ok, 2 parse error, 3 empty result, 4 audit violation,
//! 5 insufficient pool.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::io;
use crate::negsamp::{NegSampError, SourceDataset};
use crate::notation;
use crate::pipeline::{
    self, PipelineConfig, PipelineError, RunManifest, SplitStrategy, TaskType,
};
use crate::seqcore::{validate_sequence, PeptideSequence, Validated, ValidationPolicy};
use crate::split::{AuditReport, Partition, SplitAssignment};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_AUDIT: i32 = 4;
pub const EXIT_POOL: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "pepcurate",
    about = "Deterministic peptide dataset curation pipeline",
    version
)]
pub struct Cli {
    /// JSON configuration file; defaults are used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Random seed, overriding the configured one.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory for stage artifacts.
    #[arg(long, global = true, default_value = "pepcurate_out")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Classification,
    Regression,
    Ppi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Random,
    Kmer,
    Identity,
    Hybrid,
    Ecfp,
    ColdStart,
}

impl From<StrategyArg> for SplitStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Random => SplitStrategy::Random,
            StrategyArg::Kmer => SplitStrategy::Kmer,
            StrategyArg::Identity => SplitStrategy::Identity,
            StrategyArg::Hybrid => SplitStrategy::Hybrid,
            StrategyArg::Ecfp => SplitStrategy::Ecfp,
            StrategyArg::ColdStart => SplitStrategy::ColdStart,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NotationArg {
    Biln,
    Helm,
    Fasta,
    Smiles,
    Collapsed,
    Homolog,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Data cleaning: redundancy removal (classification) or IQR duplicate
    /// aggregation (regression).
    Clean {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        task: Option<TaskArg>,
    },
    /// Distribution-controlled negative sampling from a labeled pool;
    /// recombination shuffling for peptide-protein tasks.
    Negsamp {
        #[arg(long)]
        positives: PathBuf,
        /// Pool CSV, grouped into source datasets by its `source` column.
        /// Not used by the ppi task.
        #[arg(long)]
        pool: Option<PathBuf>,
        /// FASTA of extra candidates for under-covered length bins.
        #[arg(long)]
        external: Option<PathBuf>,
    },
    /// Train/valid/test splitting with a leakage audit.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        strategy: Option<StrategyArg>,
        /// Number of seeded repeat splits (seed, seed+1, ...).
        #[arg(long)]
        repeats: Option<usize>,
    },
    /// Notation conversion, one record per line.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        from: NotationArg,
        #[arg(long)]
        to: NotationArg,
        /// Monomer library CSV (symbol,smiles,homolog).
        #[arg(long)]
        library: Option<PathBuf>,
        /// Output file; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// k-mer enrichment report for a labeled binary dataset.
    Enrich {
        #[arg(long)]
        input: PathBuf,
    },
    /// Length / residue / property histograms.
    Stats {
        #[arg(long)]
        input: PathBuf,
    },
    /// Leakage audit of an existing split file.
    Audit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        split: PathBuf,
    },
}

/// Entry point used by the binary.
pub fn run() -> i32 {
    let cli = Cli::parse();
    execute(cli)
}

/// Testable entry point.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            EXIT_PARSE
        }
    }
}

fn execute(cli: Cli) -> i32 {
    if let Some(workers) = cli.workers {
        // Ignore the error if a pool already exists (tests call run_from
        // repeatedly in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    if let Err(e) = fs::create_dir_all(&cli.out_dir) {
        eprintln!("error: cannot create {}: {e}", cli.out_dir.display());
        return EXIT_ERROR;
    }
    let mut config = match &cli.config {
        Some(path) => match PipelineConfig::from_json_path(path) {
            Ok(c) => c,
            Err(e) => return fail(&cli.out_dir, &e),
        },
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    match dispatch(&cli, &config) {
        Ok(code) => code,
        Err(e) => fail(&cli.out_dir, &e),
    }
}

fn fail(out_dir: &Path, err: &PipelineError) -> i32 {
    eprintln!("error: {err}");
    log_lines(out_dir, &[format!("error: {err}")]);
    exit_code(err)
}

fn exit_code(err: &PipelineError) -> i32 {
    match err {
        PipelineError::Io(_) | PipelineError::Parse(_) => EXIT_PARSE,
        PipelineError::Empty(_) => EXIT_EMPTY,
        PipelineError::NegSamp(NegSampError::InsufficientPool { .. }) => EXIT_POOL,
        PipelineError::NegSamp(
            NegSampError::EmptyClass
            | NegSampError::EmptySet
            | NegSampError::EmptyPoolAfterExclusion
            | NegSampError::EmptyValues,
        ) => EXIT_EMPTY,
        PipelineError::Enrich(_) => EXIT_PARSE,
        PipelineError::Notation(_) | PipelineError::Sequence { .. } => EXIT_PARSE,
        _ => EXIT_ERROR,
    }
}

fn log_lines(out_dir: &Path, lines: &[String]) {
    if lines.is_empty() {
        return;
    }
    let _ = fs::create_dir_all(out_dir);
    if let Ok(mut f) =
        fs::OpenOptions::new().create(true).append(true).open(out_dir.join("pepcurate.log"))
    {
        for line in lines {
            let _ = writeln!(f, "{line}");
            eprintln!("{line}");
        }
    }
}

fn dispatch(cli: &Cli, config: &PipelineConfig) -> Result<i32, PipelineError> {
    let out_dir = &cli.out_dir;
    match &cli.command {
        Command::Clean { input, task } => {
            let mut config = config.clone();
            if let Some(task) = task {
                config.task_type = match task {
                    TaskArg::Classification => TaskType::Classification,
                    TaskArg::Regression => TaskType::Regression,
                    TaskArg::Ppi => TaskType::Ppi,
                };
            }
            cmd_clean(input, &config, out_dir)
        }
        Command::Negsamp { positives, pool, external } => {
            cmd_negsamp(positives, pool.as_deref(), external.as_deref(), config, out_dir)
        }
        Command::Split { input, strategy, repeats } => {
            let mut config = config.clone();
            if let Some(s) = strategy {
                config.split.strategy = (*s).into();
            }
            if let Some(r) = repeats {
                config.split.repeats = (*r).max(1);
            }
            cmd_split(input, &config, out_dir)
        }
        Command::Convert { input, from, to, library, output } => {
            let mut config = config.clone();
            if library.is_some() {
                config.monomer_library = library.clone();
            }
            cmd_convert(input, *from, *to, &config, output.as_deref(), out_dir)
        }
        Command::Enrich { input } => cmd_enrich(input, config, out_dir),
        Command::Stats { input } => cmd_stats(input, config, out_dir),
        Command::Audit { input, split } => cmd_audit(input, split, config, out_dir),
    }
}

fn read_rows(input: &Path) -> Result<Vec<io::RawRecord>, PipelineError> {
    let rows = io::read_labeled_csv(input)?;
    if rows.is_empty() {
        return Err(PipelineError::Empty(format!("{} has no data rows", input.display())));
    }
    Ok(rows)
}

fn label_text(label: &crate::seqcore::Label) -> String {
    match label {
        crate::seqcore::Label::Binary(v) => v.to_string(),
        crate::seqcore::Label::Real { value, .. } => value.to_string(),
    }
}

fn cmd_clean(
    input: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<i32, PipelineError> {
    let rows = read_rows(input)?;
    let outcome = pipeline::stage_clean(&rows, config)?;
    if outcome.records.is_empty() {
        return Err(PipelineError::Empty("cleaning removed every record".into()));
    }
    let csv_rows: Vec<(String, String, String)> = outcome
        .records
        .iter()
        .map(|r| (r.seq.residues().to_string(), label_text(&r.label), r.source.clone()))
        .collect();
    io::write_labeled_csv(&out_dir.join("cleaned.csv"), &csv_rows)?;
    fs::write(
        out_dir.join("clean_report.json"),
        serde_json::to_string_pretty(&outcome.counts).expect("serializes") + "\n",
    )
    .map_err(|e| PipelineError::Parse(e.to_string()))?;
    for (class, seqs, assignment) in &outcome.class_clusters {
        let name = if *class == 1 { "clusters_pos.tsv" } else { "clusters_neg.tsv" };
        io::write_cluster_tsv(&out_dir.join(name), seqs, assignment)?;
    }
    if let Some(report) = &outcome.outlier_report {
        io::write_outlier_csv(&out_dir.join("outliers.csv"), report)?;
    }
    let mut manifest = RunManifest::load_or_new(out_dir, config);
    manifest.record("clean", rows.len(), outcome.records.len(), outcome.warnings.clone());
    manifest.save(out_dir)?;
    log_lines(out_dir, &outcome.warnings);
    println!(
        "clean: {} rows in, {} kept, {} removed",
        rows.len(),
        outcome.counts.kept,
        outcome.counts.removed
    );
    Ok(EXIT_OK)
}

fn cmd_negsamp(
    positives_path: &Path,
    pool_path: Option<&Path>,
    external_path: Option<&Path>,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<i32, PipelineError> {
    let pos_rows = read_rows(positives_path)?;
    let (pos_records, _) = pipeline::validate_records(&pos_rows, config)?;
    if config.task_type == TaskType::Ppi {
        return cmd_negsamp_ppi(&pos_records, config, out_dir);
    }
    let positives: Vec<PeptideSequence> = pos_records
        .iter()
        .filter(|r| r.label.as_binary() != Some(0))
        .map(|r| r.seq.clone())
        .collect();
    if positives.is_empty() {
        return Err(PipelineError::Empty("no positive records".into()));
    }
    let pool_path = pool_path.ok_or_else(|| {
        PipelineError::Parse("--pool is required except for the ppi task".into())
    })?;
    if config.peptide_type == pipeline::PeptideType::NonCanonical {
        return cmd_negsamp_bridge(&pos_records, pool_path, config, out_dir);
    }

    let pool_rows = read_rows(pool_path)?;
    let (pool_records, _) = pipeline::validate_records(&pool_rows, config)?;
    let mut datasets: Vec<SourceDataset> = Vec::new();
    for r in &pool_records {
        let name = if r.source.is_empty() { "pool".to_string() } else { r.source.clone() };
        match datasets.iter_mut().find(|d| d.name == name) {
            Some(d) => d.seqs.push(r.seq.clone()),
            None => datasets.push(SourceDataset { name, seqs: vec![r.seq.clone()] }),
        }
    }

    let external_seqs: Option<Vec<PeptideSequence>> = match external_path {
        Some(path) => {
            let mut seqs = Vec::new();
            for (i, (id, raw)) in io::read_fasta(path)?.iter().enumerate() {
                match validate_sequence(raw, format!("x{i:06}_{id}"), ValidationPolicy::DropRecord)
                {
                    Ok(Validated::Accepted(s)) => seqs.push(s),
                    Ok(Validated::Dropped { .. }) => continue,
                    Err(e) => {
                        return Err(PipelineError::Sequence { id: id.clone(), source: e })
                    }
                }
            }
            Some(seqs)
        }
        None => None,
    };

    let outcome =
        pipeline::stage_negsamp(&positives, &datasets, external_seqs.as_deref(), config)?;
    write_negatives_csv(&out_dir.join("negatives.csv"), &outcome)?;
    io::write_js_report_json(&out_dir.join("js_report.json"), &outcome.report)?;
    fs::write(
        out_dir.join("negsamp_scoreboard.json"),
        serde_json::to_string_pretty(&outcome.scoreboard).expect("serializes") + "\n",
    )
    .map_err(|e| PipelineError::Parse(e.to_string()))?;
    let mut manifest = RunManifest::load_or_new(out_dir, config);
    manifest.record("negsamp", positives.len(), outcome.negatives.len(), outcome.warnings.clone());
    manifest.save(out_dir)?;
    log_lines(out_dir, &outcome.warnings);
    println!(
        "negsamp: {} negatives via {} (js pass: {})",
        outcome.negatives.len(),
        outcome.strategy,
        outcome.pass
    );
    Ok(EXIT_OK)
}

fn write_negatives_csv(
    path: &Path,
    outcome: &pipeline::NegsampOutcome,
) -> Result<(), PipelineError> {
    let mut text = String::from("sequence,label,strategy,source\n");
    for (seq, source) in &outcome.negatives {
        text.push_str(&format!("{},0,{},{}\n", seq.residues(), outcome.strategy, source));
    }
    fs::write(path, text).map_err(|e| PipelineError::Parse(e.to_string()))?;
    Ok(())
}

/// Shuffle negatives for peptide-protein pairs at the configured ratio.
fn cmd_negsamp_ppi(
    records: &[pipeline::CuratedRecord],
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<i32, PipelineError> {
    let pairs: Vec<(String, String)> = records
        .iter()
        .filter(|r| r.label.as_binary() != Some(0))
        .map(|r| {
            let protein = r.protein.as_ref().ok_or_else(|| {
                PipelineError::Parse("ppi negsamp needs a protein column".into())
            })?;
            Ok((r.seq.residues().to_string(), protein.residues().to_string()))
        })
        .collect::<Result<_, PipelineError>>()?;
    if pairs.is_empty() {
        return Err(PipelineError::Empty("no positive pairs".into()));
    }
    let negatives = crate::negsamp::ppi_shuffle_negatives(
        &pairs,
        config.negsamp.ppi_ratio,
        config.seed,
    )?;
    let mut text = String::from("sequence,protein,label,strategy,source\n");
    for (pep, prot) in &negatives {
        text.push_str(&format!("{pep},{prot},0,shuffle,recombined\n"));
    }
    fs::write(out_dir.join("negatives.csv"), text)
        .map_err(|e| PipelineError::Parse(e.to_string()))?;
    let mut manifest = RunManifest::load_or_new(out_dir, config);
    manifest.record("negsamp", pairs.len(), negatives.len(), vec![]);
    manifest.save(out_dir)?;
    println!("negsamp: {} shuffled pairs at {}:1", negatives.len(), config.negsamp.ppi_ratio);
    Ok(EXIT_OK)
}

/// Canonical bridge for non-canonical positives: homolog mapping, canonical
/// sampling, and the converter handoff file.
fn cmd_negsamp_bridge(
    records: &[pipeline::CuratedRecord],
    pool_path: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<i32, PipelineError> {
    let library = config.library()?;
    let docs: Vec<notation::BilnDocument> = records
        .iter()
        .filter(|r| r.label.as_binary() != Some(0))
        .map(|r| {
            let text = r.notation.as_deref().ok_or_else(|| {
                PipelineError::Parse("non-canonical negsamp needs notation input".into())
            })?;
            Ok(notation::parse_biln(text)?)
        })
        .collect::<Result<_, PipelineError>>()?;
    if docs.is_empty() {
        return Err(PipelineError::Empty("no positive records".into()));
    }
    let pool_rows = read_rows(pool_path)?;
    let canonical_config =
        PipelineConfig { peptide_type: pipeline::PeptideType::Canonical, ..config.clone() };
    let (pool_records, _) = pipeline::validate_records(&pool_rows, &canonical_config)?;
    let pool: Vec<PeptideSequence> = pool_records.iter().map(|r| r.seq.clone()).collect();

    let ns_config = config.negsamp.config(config.seed, config.ph);
    let bridge = crate::negsamp::nc_negsamp_bridge(&docs, &library, &pool, &ns_config)?;

    let mut text = String::from("sequence,label,strategy,source\n");
    for &i in &bridge.outcome.selection.indices {
        let seq = &bridge.outcome.filtered_pool[i];
        text.push_str(&format!(
            "{},0,{},canonical_pool\n",
            seq.residues(),
            bridge.outcome.selection.strategy
        ));
    }
    fs::write(out_dir.join("negatives.csv"), text)
        .map_err(|e| PipelineError::Parse(e.to_string()))?;
    let mut handoff = String::from("canonical_sequence\n");
    for row in &bridge.handoff {
        handoff.push_str(row);
        handoff.push('\n');
    }
    fs::write(out_dir.join("handoff.csv"), handoff)
        .map_err(|e| PipelineError::Parse(e.to_string()))?;
    io::write_js_report_json(&out_dir.join("js_report.json"), &bridge.outcome.selection.report)?;
    let mut manifest = RunManifest::load_or_new(out_dir, config);
    manifest.record(
        "negsamp",
        docs.len(),
        bridge.outcome.selection.indices.len(),
        bridge.outcome.warnings.clone(),
    );
    manifest.save(out_dir)?;
    log_lines(out_dir, &bridge.outcome.warnings);
    println!(
        "negsamp: {} canonical negatives via {} handed off for conversion",
        bridge.outcome.selection.indices.len(),
        bridge.outcome.selection.strategy
    );
    Ok(EXIT_OK)
}

fn cmd_split(
    input: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<i32, PipelineError> {
    let rows = read_rows(input)?;
    let (records, _) = pipeline::validate_records(&rows, config)?;
    if records.is_empty() {
        return Err(PipelineError::Empty("no valid records to split".into()));
    }
    let ids: Vec<String> = records.iter().map(|r| r.seq.id().to_string()).collect();
    let mut warnings = Vec::new();
    let mut dirty = false;
    for rep in 0..config.split.repeats.max(1) {
        let suffix = if config.split.repeats > 1 { format!("_{rep}") } else { String::new() };
        let outcome = pipeline::stage_split(&records, config, config.seed + rep as u64)?;
        io::write_split_csv(&out_dir.join(format!("split{suffix}.csv")), &ids, &outcome.assignment)?;
        io::write_audit_json(&out_dir.join(format!("audit{suffix}.json")), &outcome.audit)?;
        if let Some(fps) = &outcome.fingerprints {
            if rep == 0 {
                io::write_fingerprint_dump(&out_dir.join("fingerprints.tsv"), &ids, fps)?;
            }
        }
        if !outcome.audit.is_clean() {
            dirty = true;
            warnings.push(format!(
                "split{suffix}: audit found {} violations",
                outcome.audit.total()
            ));
        }
        warnings.extend(outcome.assignment.warnings.iter().cloned());
        if rep == 0 {
            println!(
                "split: strategy {} counts {:?} violations {}",
                outcome.assignment.strategy,
                outcome.assignment.counts(),
                outcome.audit.total()
            );
        }
    }
    let mut manifest = RunManifest::load_or_new(out_dir, config);
    manifest.record("split", records.len(), records.len(), warnings.clone());
    manifest.save(out_dir)?;
    log_lines(out_dir, &warnings);
    let _ = dirty;
    Ok(EXIT_OK)
}

fn cmd_convert(
    input: &Path,
    from: NotationArg,
    to: NotationArg,
    config: &PipelineConfig,
    output: Option<&Path>,
    out_dir: &Path,
) -> Result<i32, PipelineError> {
    let library = config.library()?;
    let docs: Vec<(String, notation::BilnDocument)> = match from {
        NotationArg::Fasta => {
            let records = io::read_fasta(input)?;
            records
                .into_iter()
                .map(|(id, raw)| {
                    match validate_sequence(&raw, id.clone(), config.validation_policy) {
                        Ok(Validated::Accepted(seq)) => Ok((id, notation::fasta_to_biln(&seq))),
                        Ok(Validated::Dropped { offending, .. }) => Err(PipelineError::Parse(
                            format!("{id}: dropped for ambiguity code {offending}"),
                        )),
                        Err(e) => Err(PipelineError::Sequence { id, source: e }),
                    }
                })
                .collect::<Result<_, _>>()?
        }
        NotationArg::Biln => read_lines(input)?
            .into_iter()
            .enumerate()
            .map(|(i, line)| Ok((format!("r{i:06}"), notation::parse_biln(&line)?)))
            .collect::<Result<_, PipelineError>>()?,
        NotationArg::Helm => read_lines(input)?
            .into_iter()
            .enumerate()
            .map(|(i, line)| {
                let helm = notation::parse_helm(&line)?;
                Ok((format!("r{i:06}"), notation::helm_to_biln(&helm)?))
            })
            .collect::<Result<_, PipelineError>>()?,
        other => {
            return Err(PipelineError::Parse(format!(
                "conversion source {other:?} is not supported"
            )))
        }
    };
    if docs.is_empty() {
        return Err(PipelineError::Empty("no records to convert".into()));
    }

    let mut warnings = Vec::new();
    let mut lines = Vec::with_capacity(docs.len());
    for (id, doc) in &docs {
        let line = match to {
            NotationArg::Biln => notation::write_biln(doc),
            NotationArg::Helm => notation::write_helm(&notation::biln_to_helm(doc)),
            NotationArg::Smiles => {
                let graph = notation::assemble_molecule(doc, &library)?;
                notation::write_smiles(&graph)
            }
            NotationArg::Collapsed => {
                for chain in &doc.chains {
                    for symbol in chain {
                        if library.get(symbol).is_some_and(|d| d.is_cap()) {
                            warnings.push(format!(
                                "{id}: cap monomer [{symbol}] collapsed to X (length changes)"
                            ));
                        }
                    }
                }
                notation::collapse_noncanonical(doc, id.clone()).residues().to_string()
            }
            NotationArg::Homolog => notation::nearest_canonical_homolog(doc, &library, id.clone())?
                .residues()
                .to_string(),
            NotationArg::Fasta => {
                return Err(PipelineError::Parse(
                    "use `collapsed` or `homolog` to produce plain sequences".into(),
                ))
            }
        };
        lines.push(line);
    }
    let body = lines.join("\n") + "\n";
    match output {
        Some(path) => {
            fs::write(path, &body).map_err(|e| PipelineError::Parse(e.to_string()))?
        }
        None => print!("{body}"),
    }
    log_lines(out_dir, &warnings);
    Ok(EXIT_OK)
}

fn read_lines(path: &Path) -> Result<Vec<String>, PipelineError> {
    let text =
        fs::read_to_string(path).map_err(|e| PipelineError::Parse(format!("{}: {e}", path.display())))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn cmd_enrich(
    input: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<i32, PipelineError> {
    let rows = read_rows(input)?;
    let (records, _) = pipeline::validate_records(&rows, config)?;
    let hits = pipeline::stage_enrich(&records, config)?;
    io::write_enrichment_csv(&out_dir.join("enrichment.csv"), &hits)?;
    let mut manifest = RunManifest::load_or_new(out_dir, config);
    manifest.record("enrich", records.len(), hits.len(), vec![]);
    manifest.save(out_dir)?;
    println!("enrich: {} motifs", hits.len());
    Ok(EXIT_OK)
}

fn cmd_stats(
    input: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<i32, PipelineError> {
    let rows = read_rows(input)?;
    let (records, _) = pipeline::validate_records(&rows, config)?;
    let tables = pipeline::stage_stats(&records, config)?;
    pipeline::write_stats(out_dir, &tables)?;
    let mut manifest = RunManifest::load_or_new(out_dir, config);
    manifest.record("stats", records.len(), records.len(), vec![]);
    manifest.save(out_dir)?;
    println!("stats: {} records", records.len());
    Ok(EXIT_OK)
}

fn cmd_audit(
    input: &Path,
    split_path: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<i32, PipelineError> {
    let rows = read_rows(input)?;
    let (records, _) = pipeline::validate_records(&rows, config)?;
    let seqs: Vec<PeptideSequence> = records.iter().map(|r| r.seq.clone()).collect();

    // Parse the split file back into an assignment aligned with the input.
    let text = fs::read_to_string(split_path)
        .map_err(|e| PipelineError::Parse(format!("{}: {e}", split_path.display())))?;
    let mut by_id: std::collections::BTreeMap<String, (Partition, usize, String)> =
        std::collections::BTreeMap::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(PipelineError::Parse(format!(
                "{}:{}: expected 4 columns",
                split_path.display(),
                lineno + 1
            )));
        }
        let partition = match fields[1] {
            "train" => Partition::Train,
            "valid" => Partition::Valid,
            "test" => Partition::Test,
            other => {
                return Err(PipelineError::Parse(format!("unknown partition {other:?}")))
            }
        };
        let cluster: usize = fields[2]
            .parse()
            .map_err(|_| PipelineError::Parse(format!("bad cluster id {:?}", fields[2])))?;
        by_id.insert(fields[0].to_string(), (partition, cluster, fields[3].to_string()));
    }
    let mut partitions = Vec::with_capacity(seqs.len());
    let mut cluster_ids = Vec::with_capacity(seqs.len());
    let mut strategy = String::from("unknown");
    for s in &seqs {
        let (p, c, strat) = by_id.get(s.id()).ok_or_else(|| {
            PipelineError::Parse(format!("record {} missing from split file", s.id()))
        })?;
        partitions.push(*p);
        cluster_ids.push(*c);
        strategy = strat.clone();
    }
    let assignment = SplitAssignment { partitions, cluster_ids, strategy, warnings: vec![] };

    // Enriched k-mers from the labeled data, when both classes are present.
    let enriched: Vec<String> = match pipeline::stage_enrich(&records, config) {
        Ok(hits) => hits.into_iter().map(|h| h.kmer).collect(),
        Err(PipelineError::Enrich(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    let report: AuditReport = crate::split::audit_leakage(
        &seqs,
        &assignment,
        &enriched,
        config.split.identity_threshold,
        None,
    );
    io::write_audit_json(&out_dir.join("audit.json"), &report)?;
    let mut manifest = RunManifest::load_or_new(out_dir, config);
    manifest.record("audit", seqs.len(), report.total(), vec![]);
    manifest.save(out_dir)?;
    println!(
        "audit: {} motif, {} identity, {} similarity violations",
        report.motif_violations.len(),
        report.identity_violations.len(),
        report.similarity_violations.len()
    );
    if report.is_clean() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_AUDIT)
    }
}

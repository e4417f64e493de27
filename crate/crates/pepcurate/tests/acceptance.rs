//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test -p pepcurate --test acceptance -- --nocapture`.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{
    bfs_components, bh_reject_oracle, fisher_greater_oracle, random_peptide, random_peptides,
    same_partition, seq, Binomials, Stream, CANONICAL,
};
use pepcurate::cleanse::{cluster_by_identity, iqr_aggregate, pair_links, AlignmentParams};
use pepcurate::enrich::{
    bh_fdr, find_enriched_kmers, fisher_exact_greater, merge_motifs, ContingencyTable,
    EnrichmentParams,
};
use pepcurate::fingerprint::{
    internal_diversity, morgan_fingerprint, novelty, tanimoto, Fingerprint, DEFAULT_RADIUS,
    DEFAULT_WIDTH,
};
use pepcurate::negsamp::{
    js_divergence, sample_bin_matched, sample_kde_importance, sample_mmd_herding,
    sample_moment_matched, sample_nearest_neighbor, sample_sinkhorn_ot, scalar_properties,
    sinkhorn_plan, validate_distributions, DistributionSpec, SourceDataset, Strategy,
};
use pepcurate::notation::{
    are_isomorphic, assemble_molecule, biln_to_helm, helm_to_biln, parse_biln, parse_smiles,
    write_smiles, MonomerLibrary,
};
use pepcurate::pipeline::{run_classification_pipeline, PipelineConfig};
use pepcurate::seqcore::PeptideSequence;
use pepcurate::split::{
    audit_leakage, ecfp_split, hybrid_split, identity_split, random_split, SplitParams,
};

fn pass(criterion: u32, detail: &str) {
    println!("criterion {criterion:02} [pass]: {detail}");
}

/// Criterion 1: the worked IQR example removes exactly 1.792 and aggregates
/// to 0.690 within 1e-9, in under a millisecond.
#[test]
fn criterion_01_iqr_reproduction() {
    let values = [0.778, 0.602, 0.778, 1.792, 0.602];
    let warmup = iqr_aggregate(&values).unwrap();
    assert_eq!(warmup.removed, vec![1.792]);
    let start = Instant::now();
    let out = iqr_aggregate(&values).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(out.removed, vec![1.792]);
    assert!((out.mean - 0.690).abs() <= 1e-9, "mean {}", out.mean);
    assert!(elapsed.as_micros() < 1000, "took {elapsed:?}");
    pass(1, &format!("outlier 1.792 removed, mean {:.3}, {elapsed:?}", out.mean));
}

/// Criterion 2: Fisher p-values match the exact rational enumeration oracle
/// within 1e-12 on every table with row margins up to 20, within 5 seconds.
#[test]
fn criterion_02_fisher_exhaustive_oracle() {
    let start = Instant::now();
    let bin = Binomials::up_to(40);
    let mut tables = 0u64;
    let mut worst = 0.0f64;
    for row1 in 0..=20u64 {
        for row2 in 0..=20u64 {
            for a in 0..=row1 {
                for c in 0..=row2 {
                    let t = ContingencyTable { a, b: row1 - a, c, d: row2 - c };
                    let got = fisher_exact_greater(&t);
                    let want = fisher_greater_oracle(a, row1 - a, c, row2 - c, &bin);
                    let err = (got - want).abs();
                    worst = worst.max(err);
                    assert!(
                        err <= 1e-12,
                        "table ({a},{},{c},{}) got {got} want {want}",
                        row1 - a,
                        row2 - c
                    );
                    tables += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(2, &format!("{tables} tables, max |error| {worst:.2e}, {elapsed:?}"));
}

/// Criterion 3: BH rejection sets equal the step-up oracle on 1,000 random
/// p-vectors of length up to 50.
#[test]
fn criterion_03_bh_oracle() {
    let mut stream = Stream::new(303);
    for case in 0..1000 {
        let len = 1 + stream.below(50) as usize;
        let pvals: Vec<f64> = (0..len).map(|_| stream.unit()).collect();
        let alpha = 0.01 + 0.2 * stream.unit();
        let got = bh_fdr(&pvals, alpha).reject;
        let want = bh_reject_oracle(&pvals, alpha);
        assert_eq!(got, want, "case {case} alpha {alpha}");
    }
    pass(3, "1000 random p-vectors match the step-up oracle exactly");
}

/// Criterion 4: the four near-duplicate antifungal positives form one
/// cluster at 0.9/0.9, and the mismatch budget floor(0.1 * 34) = 3 is sharp.
#[test]
fn criterion_04_clustering_semantics() {
    let variants = [
        "CIKNGNGCQPDGSQGNCCSRYCHKEPGWVAGYCR",
        "CIANRNGCQPDGSQGNCCSGYCHKEPGWVAGYCR",
        "CIKNGNGCQPNGSQGNCCSGCHKQPGWVAGYCRRK",
        "CIKNGNGCQPNGSQGNCCSGYCHKQPGWVAGYCRRK",
    ];
    let seqs: Vec<PeptideSequence> =
        variants.iter().enumerate().map(|(i, s)| seq(s, &format!("af{i}"))).collect();
    let assignment = cluster_by_identity(&seqs, &AlignmentParams::default());
    assert_eq!(assignment.n_clusters(), 1, "antifungal variants split apart");

    let base: String = (0..34).map(|i| CANONICAL[i % 20] as char).collect();
    let mutate = |k: usize| -> String {
        base.bytes()
            .enumerate()
            .map(|(i, c)| if i < k { if c == b'A' { 'C' } else { 'A' } } else { c as char })
            .collect()
    };
    let params = AlignmentParams::default();
    assert!(pair_links(&seq(&base, "b"), &seq(&mutate(3), "m3"), &params));
    assert!(!pair_links(&seq(&base, "b"), &seq(&mutate(4), "m4"), &params));
    pass(4, "one antifungal cluster; 3-mismatch 34-mer links, 4-mismatch does not");
}

fn motif_planted_fixture(
    stream: &mut Stream,
) -> (Vec<PeptideSequence>, Vec<PeptideSequence>, String) {
    // A 5-mer motif planted into 75 of 250 positives (15% of 500 records).
    let motif: String = (0..5).map(|_| CANONICAL[stream.below(20) as usize] as char).collect();
    let mut positives = Vec::with_capacity(250);
    for i in 0..250usize {
        let mut text = random_peptide(stream, 15, 30);
        if i < 75 {
            let at = 2 + (stream.below(5) as usize).min(text.len() - 5);
            text.insert_str(at, &motif);
        }
        positives.push(seq(&text, &format!("p{i:04}")));
    }
    let negatives: Vec<PeptideSequence> = (0..250)
        .map(|i| {
            // Keep the motif out of the negative class.
            loop {
                let text = random_peptide(stream, 15, 30);
                if !text.contains(&motif) {
                    return seq(&text, &format!("n{i:04}"));
                }
            }
        })
        .collect();
    (positives, negatives, motif)
}

/// Criterion 5: on 50 motif-planted fixtures (n = 500), the hybrid split
/// yields zero motif-crossing and zero identity-crossing violations, while
/// the random split crosses the motif in at least 95% of fixtures.
#[test]
fn criterion_05_leakage_guarantee() {
    let mut stream = Stream::new(505);
    let mut random_violations = 0usize;
    for fixture in 0..50 {
        let (positives, negatives, motif) = motif_planted_fixture(&mut stream);
        let hits = find_enriched_kmers(
            &positives,
            &negatives,
            &EnrichmentParams { k: Some(5), ..Default::default() },
        )
        .unwrap();
        assert!(
            hits.iter().any(|h| h.kmer == motif),
            "fixture {fixture}: planted motif {motif} not detected"
        );
        let clusters = merge_motifs(&hits, 0.6);
        let kmers: Vec<String> = clusters.iter().flat_map(|c| c.kmers.iter().cloned()).collect();

        let mut records = positives;
        records.extend(negatives);
        let params = SplitParams { seed: fixture as u64, ..Default::default() };

        let hybrid = hybrid_split(&records, &clusters, 0.3, &params).unwrap();
        let audit = audit_leakage(&records, &hybrid, &kmers, 0.3, None);
        assert!(
            audit.motif_violations.is_empty(),
            "fixture {fixture}: motif crossing {:?}",
            audit.motif_violations
        );
        assert!(
            audit.identity_violations.is_empty(),
            "fixture {fixture}: identity crossing {:?}",
            audit.identity_violations.first()
        );

        let random = random_split(records.len(), &params).unwrap();
        let random_audit = audit_leakage(&records, &random, &kmers, 0.3, None);
        if !random_audit.motif_violations.is_empty() {
            random_violations += 1;
        }
    }
    assert!(random_violations >= 48, "random split leaked in only {random_violations}/50");
    pass(
        5,
        &format!(
            "hybrid clean on 50/50 fixtures; random split leaked motifs in {random_violations}/50"
        ),
    );
}

/// Criterion 6: fingerprint-split components equal brute-force BFS on
/// fixtures up to 200 molecules at tau = 0.95.
#[test]
fn criterion_06_ecfp_components_vs_bfs() {
    let mut stream = Stream::new(606);
    let library = MonomerLibrary::default_library();
    for &n in &[10usize, 60, 120, 200] {
        // Base molecules with duplicates and homologous families, so the
        // similarity graph has nontrivial components at 0.95.
        let mut fps: Vec<Fingerprint> = Vec::with_capacity(n);
        let mut base: Vec<Fingerprint> = Vec::new();
        for len in 3..9 {
            let biln: String = (0..len)
                .map(|i| (CANONICAL[(len + i) % 20] as char).to_string())
                .collect::<Vec<_>>()
                .join("-");
            let graph = assemble_molecule(&parse_biln(&biln).unwrap(), &library).unwrap();
            base.push(morgan_fingerprint(&graph, DEFAULT_RADIUS, DEFAULT_WIDTH).unwrap());
        }
        for _ in 0..n {
            fps.push(base[stream.below(base.len() as u64) as usize].clone());
        }
        let assignment = ecfp_split(&fps, 0.95, &SplitParams::default()).unwrap();

        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if tanimoto(&fps[i], &fps[j]).unwrap() >= 0.95 {
                    edges.push((i, j));
                }
            }
        }
        let oracle = bfs_components(n, &edges);
        assert!(
            same_partition(&assignment.cluster_ids, &oracle),
            "n = {n}: components disagree with BFS"
        );
    }
    pass(6, "components equal brute-force BFS on fixtures of 10..200 molecules");
}

/// Criterion 7: with a pool containing exact property twins of 100 synthetic
/// positives, all six samplers pass the JS thresholds; the worked JS values
/// 0, 1, and 0.31128 reproduce within 1e-5.
#[test]
fn criterion_07_js_constraints() {
    assert!(js_divergence(&[0.25, 0.75], &[0.25, 0.75]).unwrap().abs() < 1e-5);
    assert!((js_divergence(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-5);
    assert!((js_divergence(&[0.5, 0.5], &[1.0, 0.0]).unwrap() - 0.31128).abs() < 1e-5);

    let mut stream = Stream::new(707);
    let positives = random_peptides(&mut stream, 100, 8, 26, "pos");
    // Pool: exact copies of every positive plus far-off junk that no
    // matched sampler should pick.
    let mut pool: Vec<PeptideSequence> = positives
        .iter()
        .enumerate()
        .map(|(i, p)| seq(p.residues(), &format!("twin{i:04}")))
        .collect();
    for i in 0..50 {
        pool.push(seq(&"W".repeat(80 + (i % 7)), &format!("junk{i:03}")));
    }
    let mut spec = DistributionSpec::default();
    let pos_props = scalar_properties(&positives, spec.ph).unwrap();
    let pool_props = scalar_properties(&pool, spec.ph).unwrap();
    let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for row in pos_props.iter().chain(&pool_props) {
        for d in 0..3 {
            ranges[d].0 = ranges[d].0.min(row[d]);
            ranges[d].1 = ranges[d].1.max(row[d]);
        }
    }
    spec.ranges = Some(ranges);

    for strategy in Strategy::ALL {
        let outcome = match strategy {
            Strategy::Bin => sample_bin_matched(&pool, &positives, 1.0, &spec, 7),
            Strategy::Kde => sample_kde_importance(&pool, &positives, 1.0, &spec, 7),
            Strategy::Mmd => sample_mmd_herding(&pool, &positives, 1.0, &spec, 7),
            Strategy::Nn => sample_nearest_neighbor(&pool, &positives, 1.0, &spec, 7),
            Strategy::Ot => sample_sinkhorn_ot(&pool, &positives, 1.0, &spec, 0.05, 4000, 7),
            Strategy::Moment => sample_moment_matched(&pool, &positives, 1.0, &spec, 7),
        }
        .unwrap();
        let negs: Vec<PeptideSequence> =
            outcome.indices.iter().map(|&i| pool[i].clone()).collect();
        let report = validate_distributions(&positives, &negs, &spec).unwrap();
        assert!(
            report.pass,
            "{} failed thresholds 0.2/0.2/0.2/0.05/0.15: {report:?}",
            strategy.name()
        );
    }
    pass(7, "all six samplers pass the JS regime on the twin pool; worked JS values match");
}

/// Criterion 8: Sinkhorn marginals within 1e-6 on convergent runs; the
/// large-epsilon plan is within 1e-3 (relative) of the outer product.
#[test]
fn criterion_08_sinkhorn_contract() {
    let mut stream = Stream::new(808);
    let positives = random_peptides(&mut stream, 30, 8, 24, "pos");
    let pool = random_peptides(&mut stream, 80, 8, 24, "pool");
    let spec = DistributionSpec::default();
    let pos_props = scalar_properties(&positives, spec.ph).unwrap();
    let pool_props = scalar_properties(&pool, spec.ph).unwrap();
    let z = |rows: &[[f64; 3]]| -> Vec<Vec<f64>> { rows.iter().map(|r| r.to_vec()).collect() };
    let (n, m) = (positives.len(), pool.len());

    let (plan, stats) = sinkhorn_plan(&z(&pos_props), &z(&pool_props), 0.1, 5000);
    assert!(stats.converged, "violation {}", stats.max_marginal_violation);
    assert!(stats.max_marginal_violation < 1e-6);
    for i in 0..n {
        let row: f64 = plan[i * m..(i + 1) * m].iter().sum();
        assert!((row - 1.0 / n as f64).abs() < 1e-6);
    }
    for j in 0..m {
        let col: f64 = (0..n).map(|i| plan[i * m + j]).sum();
        assert!((col - 1.0 / m as f64).abs() < 1e-6);
    }

    let (plan_big, _) = sinkhorn_plan(&z(&pos_props), &z(&pool_props), 1e5, 5000);
    let uniform = 1.0 / (n as f64 * m as f64);
    for &entry in &plan_big {
        assert!(
            ((entry - uniform) / uniform).abs() < 1e-3,
            "entry {entry} vs outer product {uniform}"
        );
    }
    pass(8, "marginals < 1e-6; large-epsilon plan within 1e-3 of the outer product");
}

/// Criterion 9: glycine and diglycine assemble to the reference structures;
/// BILN <-> HELM round trips are graph-isomorphic on a 20-case corpus with
/// disulfides; SMILES round trips are isomorphic for every library monomer.
#[test]
fn criterion_09_notation() {
    let library = MonomerLibrary::default_library();
    for (biln, smiles) in [("G", "NCC(=O)O"), ("G-G", "NCC(=O)NCC(=O)O")] {
        let graph = assemble_molecule(&parse_biln(biln).unwrap(), &library).unwrap();
        assert!(
            are_isomorphic(&graph, &parse_smiles(smiles).unwrap()),
            "{biln} != {smiles}"
        );
    }

    let corpus = [
        "A", "G-G", "A-G-C", "K-K-K-K", "P-W-H", "M-N-Q-R-S-T", "V-Y-W",
        "C(1,3)-G-C(1,3)", "C(1,3)-A-G-C(1,3)", "A-C(1,3)-G.K-C(1,3)-D",
        "C(1,3)-C(2,3)-G-C(1,3)-C(2,3)", "A-G.K-D", "A-G.K-D.W-Y",
        "[ac]-A-G", "K-[am]", "[ac]-[meA]-K-[am]", "[dA]-[dF]-[dK]",
        "[Aib]-[Nle]-[Orn]", "[Hyp]-P-G", "[meA]-C(9,3)-G.[meG]-C(9,3)-A",
    ];
    assert_eq!(corpus.len(), 20);
    for text in corpus {
        let doc = parse_biln(text).unwrap();
        let round = helm_to_biln(&biln_to_helm(&doc)).unwrap();
        let g1 = assemble_molecule(&doc, &library).unwrap();
        let g2 = assemble_molecule(&round, &library).unwrap();
        assert!(are_isomorphic(&g1, &g2), "round trip changed {text}");
    }

    for def in library.iter() {
        let reparsed = parse_smiles(&write_smiles(def.graph())).unwrap();
        assert!(
            are_isomorphic(def.graph(), &reparsed),
            "monomer {} SMILES round trip failed",
            def.symbol
        );
    }
    pass(9, "glycine cases, 20 BILN<->HELM round trips, all monomer SMILES round trips");
}

/// Criterion 10: 100 random atom permutations leave fingerprints unchanged;
/// the worked diversity and novelty arithmetic is exact.
#[test]
fn criterion_10_fingerprint_invariance() {
    let mut stream = Stream::new(1010);
    let library = MonomerLibrary::default_library();
    for biln in ["G-G", "A-C-K", "[meA]-W", "C(1,3)-G-C(1,3)"] {
        let graph = assemble_molecule(&parse_biln(biln).unwrap(), &library).unwrap();
        let reference = morgan_fingerprint(&graph, DEFAULT_RADIUS, DEFAULT_WIDTH).unwrap();
        let n = graph.atoms().len();
        for _ in 0..100 {
            // Fisher-Yates permutation from the deterministic stream.
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = stream.below(i as u64 + 1) as usize;
                perm.swap(i, j);
            }
            let shuffled = graph.permuted(&perm);
            let fp = morgan_fingerprint(&shuffled, DEFAULT_RADIUS, DEFAULT_WIDTH).unwrap();
            assert_eq!(reference, fp, "{biln}: fingerprint changed under relabeling");
        }
    }

    // Worked arithmetic: sims {1, 0, 0} -> diversity 1 - 1/3; 3 of 4 novel.
    let a = morgan_fingerprint(&parse_smiles("CCO").unwrap(), 2, 1024).unwrap();
    let b = morgan_fingerprint(&parse_smiles("NCC(=O)O").unwrap(), 2, 1024).unwrap();
    let shared = tanimoto(&a, &b).unwrap();
    assert!(shared < 1.0);
    let c = morgan_fingerprint(&parse_smiles("CCCCC").unwrap(), 2, 1024).unwrap();
    let d = morgan_fingerprint(&parse_smiles("c1ccccc1").unwrap(), 2, 1024).unwrap();
    let div = internal_diversity(&[a.clone(), a.clone(), b.clone()]).unwrap();
    let expected = 1.0 - (1.0 + 2.0 * shared) / 3.0;
    assert!((div - expected).abs() < 1e-12);
    assert_eq!(novelty(&[a.clone(), b, c, d], &[a]).unwrap(), 0.75);
    pass(10, "400 permutations preserved fingerprints; diversity and novelty exact");
}

/// Criterion 11: random/identity/hybrid achieve 8:1:1 within one largest
/// cluster on 1,000-record fixtures; cold-start test partitions contain no
/// train protein (exhaustive check).
#[test]
fn criterion_11_ratios_and_cold_start() {
    let mut stream = Stream::new(1111);
    let records = random_peptides(&mut stream, 1000, 12, 40, "r");
    let params = SplitParams::default();

    let random = random_split(records.len(), &params).unwrap();
    assert_eq!(random.counts(), [800, 100, 100]);

    for assignment in [
        identity_split(&records, 0.3, &params).unwrap(),
        hybrid_split(&records, &[], 0.3, &params).unwrap(),
    ] {
        let counts = assignment.counts();
        let granularity = assignment.largest_cluster() as f64;
        assert_eq!(counts.iter().sum::<usize>(), 1000);
        for (got, target) in counts.iter().zip([800.0, 100.0, 100.0]) {
            assert!(
                (*got as f64 - target).abs() <= granularity,
                "{}: counts {counts:?} deviate beyond granularity {granularity}",
                assignment.strategy
            );
        }
    }

    // Cold start: 40 proteins, 400 pairs, split 0.5/0/0.5.
    let proteins: Vec<PeptideSequence> = (0..40)
        .map(|i| seq(&random_peptide(&mut stream, 60, 90), &format!("prot{i:02}")))
        .collect();
    let pairs: Vec<(PeptideSequence, PeptideSequence)> = (0..400)
        .map(|i| {
            let pep = seq(&random_peptide(&mut stream, 8, 20), &format!("pep{i:03}"));
            (pep, proteins[i % 40].clone())
        })
        .collect();
    let half = SplitParams { frac_train: 0.5, frac_valid: 0.0, frac_test: 0.5, seed: 3 };
    let cold = pepcurate::split::cold_start_split(&pairs, 0.3, &half).unwrap();
    let train_proteins: BTreeSet<&str> = pairs
        .iter()
        .zip(&cold.partitions)
        .filter(|(_, p)| **p == pepcurate::split::Partition::Train)
        .map(|((_, prot), _)| prot.residues())
        .collect();
    let mut test_count = 0usize;
    for (i, (_, prot)) in pairs.iter().enumerate() {
        if cold.partitions[i] == pepcurate::split::Partition::Test {
            test_count += 1;
            assert!(
                !train_proteins.contains(prot.residues()),
                "protein {} appears in train and test",
                prot.id()
            );
        }
    }
    assert!(test_count > 0);
    pass(11, "ratios within one-cluster granularity; zero train proteins in test");
}

/// Criterion 12: the full pipeline on a 5,000-sequence synthetic
/// classification dataset finishes in under 60 seconds and is byte-identical
/// across two runs with the same seed.
#[test]
fn criterion_12_end_to_end_determinism_and_scale() {
    let mut stream = Stream::new(1212);
    // 2,750 raw positives (including 250 duplicate rows) that clean to
    // ~2,500, plus a matched pool; the curated classification dataset
    // (positives + sampled negatives) holds 5,000 sequences.
    let motif = "KWWKF";
    let mut texts: Vec<String> = (0..2500)
        .map(|i| {
            let mut t = random_peptide(&mut stream, 12, 30);
            if i % 5 == 0 {
                t.insert_str(2, motif);
            }
            t
        })
        .collect();
    for i in 0..250 {
        texts.push(texts[i * 7].clone());
    }
    let positive_rows: Vec<pepcurate::io::RawRecord> = texts
        .into_iter()
        .map(|sequence| pepcurate::io::RawRecord {
            sequence,
            label: "1".into(),
            source: Some("synthetic".into()),
            protein: None,
        })
        .collect();
    let datasets = vec![
        SourceDataset {
            name: "activity_a".into(),
            seqs: random_peptides(&mut stream, 2600, 12, 30, "a"),
        },
        SourceDataset {
            name: "activity_b".into(),
            seqs: random_peptides(&mut stream, 2600, 12, 30, "b"),
        },
    ];
    let config = PipelineConfig { seed: 11, ..Default::default() };

    let run = |dir: &std::path::Path| {
        run_classification_pipeline(&positive_rows, &datasets, None, &config, dir).unwrap()
    };
    let dir1 = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let summary = run(dir1.path());
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "pipeline took {elapsed:?}");
    let total = summary.cleaned + summary.negatives;
    assert_eq!(total, 5000, "curated dataset holds {total} sequences");
    assert_eq!(summary.audit_violations, 0);

    let dir2 = tempfile::tempdir().unwrap();
    let summary2 = run(dir2.path());
    assert_eq!(summary, summary2);
    let mut checked = 0;
    for name in [
        "cleaned.csv",
        "negatives.csv",
        "js_report.json",
        "split.csv",
        "audit.json",
        "stats_length.csv",
        "stats_aa.csv",
        "stats_properties.csv",
        "manifest.json",
    ] {
        let b1 = std::fs::read(dir1.path().join(name)).unwrap();
        let b2 = std::fs::read(dir2.path().join(name)).unwrap();
        assert_eq!(b1, b2, "{name} differs between runs");
        checked += 1;
    }
    pass(
        12,
        &format!(
            "{total} curated sequences in {elapsed:?}; {checked} artifacts byte-identical"
        ),
    );
}

//! The six split strategies and the leakage auditor.
//!
//! ```bash
//! cargo run -p pepcurate --example splitting
//! ```

use pepcurate::enrich::MotifCluster;
use pepcurate::fingerprint::{morgan_fingerprint, DEFAULT_RADIUS, DEFAULT_WIDTH};
use pepcurate::notation::{assemble_molecule, parse_biln, MonomerLibrary};
use pepcurate::seqcore::{validate_sequence, PeptideSequence, ValidationPolicy};
use pepcurate::split::{
    audit_leakage, cold_start_split, ecfp_split, hybrid_split, identity_split, kmer_split,
    random_split, SplitParams,
};

fn seq(s: &str, id: &str) -> PeptideSequence {
    validate_sequence(s, id, ValidationPolicy::StrictCanonical)
        .unwrap()
        .accepted()
        .unwrap()
}

fn main() {
    let params = SplitParams { seed: 7, ..Default::default() };

    // Records: a motif family sharing KWKWK, a homolog family, singletons.
    let mut records: Vec<PeptideSequence> = (0..10)
        .map(|i| seq(&format!("KWKWK{}DE{}", "ACDEF".chars().nth(i % 5).unwrap(), "MW".chars().nth(i % 2).unwrap()), &format!("motif{i}")))
        .collect();
    let base = "HIHIHIHIHIHIHIHIHIHQ";
    for i in 0..8 {
        let mut v = base.as_bytes().to_vec();
        v[2 * i] = b'N';
        records.push(seq(std::str::from_utf8(&v).unwrap(), &format!("homolog{i}")));
    }
    for (i, (a, b)) in [("PG", "YS"), ("RT", "VL"), ("ED", "CM")].iter().enumerate() {
        records.push(seq(&format!("{a}{a}{a}{a}{b}{b}{b}{b}"), &format!("single{i}")));
    }
    let motif = MotifCluster { kmers: vec!["KWKWK".into()], support: (0..10).collect() };
    let kmers = vec!["KWKWK".to_string()];

    let random = random_split(records.len(), &params).unwrap();
    println!("random   counts {:?}", random.counts());
    let leak = audit_leakage(&records, &random, &kmers, 0.3, None);
    println!("random   violations: {} motif, {} identity", leak.motif_violations.len(), leak.identity_violations.len());

    let kmer = kmer_split(&records, &[motif.clone()], &params).unwrap();
    println!("kmer     counts {:?}", kmer.counts());

    let identity = identity_split(&records, 0.3, &params).unwrap();
    println!("identity counts {:?}", identity.counts());

    let hybrid = hybrid_split(&records, &[motif], 0.3, &params).unwrap();
    let audit = audit_leakage(&records, &hybrid, &kmers, 0.3, None);
    println!(
        "hybrid   counts {:?}, clean audit: {}",
        hybrid.counts(),
        audit.is_clean()
    );

    // Fingerprint components for non-canonical molecules.
    let library = MonomerLibrary::default_library();
    let fps: Vec<_> = ["K-W-K", "K-W-K", "A-G-S", "F-F-F", "G-G-G", "P-P-P"]
        .iter()
        .map(|b| {
            let graph = assemble_molecule(&parse_biln(b).unwrap(), &library).unwrap();
            morgan_fingerprint(&graph, DEFAULT_RADIUS, DEFAULT_WIDTH).unwrap()
        })
        .collect();
    let half = SplitParams { frac_train: 0.5, frac_valid: 0.0, frac_test: 0.5, seed: 7 };
    let ecfp = ecfp_split(&fps, 0.95, &half).unwrap();
    println!("ecfp     counts {:?} (duplicates share a component)", ecfp.counts());

    // Protein cold start: every pair follows its protein's partition.
    let proteins = ["MMMMMMMMMMMMMMMM", "QQQQQQQQQQQQQQQQ", "EEEEEEEEEEEEEEEE", "SSSSSSSSSSSSSSSS"];
    let pairs: Vec<(PeptideSequence, PeptideSequence)> = (0..16)
        .map(|i| {
            (
                seq(&format!("KK{}KK", "ACDG".chars().nth(i % 4).unwrap()), &format!("pep{i}")),
                seq(proteins[i % 4], &format!("prot{}", i % 4)),
            )
        })
        .collect();
    let cold = cold_start_split(&pairs, 0.3, &half).unwrap();
    println!("cold     counts {:?}", cold.counts());
}

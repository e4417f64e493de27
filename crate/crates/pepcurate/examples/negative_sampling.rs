//! Pool construction, the six distribution-matching samplers, JS validation,
//! and candidate selection.
//!
//! ```bash
//! cargo run --release -p pepcurate --example negative_sampling
//! ```

use pepcurate::cleanse::AlignmentParams;
use pepcurate::negsamp::{
    build_pool, ppi_shuffle_negatives, run_negative_sampling, validate_distributions, NegSampConfig,
    SourceDataset,
};
use pepcurate::seqcore::{validate_sequence, PeptideSequence, ValidationPolicy};

fn seq(s: &str, id: &str) -> PeptideSequence {
    validate_sequence(s, id, ValidationPolicy::StrictCanonical)
        .unwrap()
        .accepted()
        .unwrap()
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn synthetic(n: usize, tag: &str, stream: u64) -> Vec<PeptideSequence> {
    let letters = b"ACDEFGHIKLMNPQRSTVWY";
    let mut state = stream.wrapping_mul(0x5851F42D4C957F2D) ^ 0xDA3E39CB94B95BDB;
    (0..n)
        .map(|i| {
            let len = 8 + (splitmix(&mut state) % 16) as usize;
            let s: String =
                (0..len).map(|_| letters[(splitmix(&mut state) % 20) as usize] as char).collect();
            seq(&s, &format!("{tag}{i:04}"))
        })
        .collect()
}

fn main() {
    let positives = synthetic(250, "pos", 1);

    // Three candidate source datasets; one overlaps the target too much and
    // is dropped automatically.
    let mut overlapping = positives[..20].to_vec();
    overlapping.extend(synthetic(40, "ovl", 2));
    let datasets = vec![
        SourceDataset { name: "related_activity".into(), seqs: overlapping },
        SourceDataset { name: "activity_a".into(), seqs: synthetic(400, "a", 3) },
        SourceDataset { name: "activity_b".into(), seqs: synthetic(400, "b", 4) },
    ];
    let pool = build_pool(&datasets, &positives, &[], 0.05, &AlignmentParams::default()).unwrap();
    println!(
        "pool: {} members after dedup; excluded datasets: {:?}",
        pool.members.len(),
        pool.excluded_datasets
    );

    // Run every sampler and pick the best candidate set.
    let config = NegSampConfig { seed: 42, ..Default::default() };
    let outcome = run_negative_sampling(&pool.seqs(), &positives, &config).unwrap();
    println!("\nscoreboard (score = max JS - 0.1 * diversity):");
    for row in &outcome.selection.scoreboard {
        println!(
            "  {:<7} max_js {:.3} diversity {:.3} score {:+.3} pass {}",
            row.strategy, row.max_js, row.diversity, row.score, row.report.pass
        );
    }
    println!(
        "\nchosen: {} ({} negatives, pass {})",
        outcome.selection.strategy,
        outcome.selection.indices.len(),
        outcome.selection.pass
    );
    let r = outcome.selection.report;
    println!(
        "js: length {:.3} charge {:.3} hydro {:.3} 1mer {:.3} 2mer {:.3}",
        r.length_js, r.charge_js, r.hydrophobicity_js, r.onemer_js, r.twomer_js
    );

    // Self-check: a class compared with itself has zero divergence.
    let self_report = validate_distributions(&positives, &positives, &config.spec).unwrap();
    println!("self-check all-zero: {}", self_report.length_js == 0.0 && self_report.pass);

    // Peptide-protein interactions use shuffle negatives at 5:1.
    let pairs: Vec<(String, String)> =
        (0..8).map(|i| (format!("PEPTIDE{i}"), format!("TARGET{i}"))).collect();
    let shuffled = ppi_shuffle_negatives(&pairs, 5, 1).unwrap();
    println!("ppi shuffle: {} negatives from {} positives", shuffled.len(), pairs.len());
}
